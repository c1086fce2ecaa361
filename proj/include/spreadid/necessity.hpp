// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <utility>
#include <vector>

#include "spreadid/spark.hpp"
#include "spreadid/tf.hpp"
#include "spreadid/types.hpp"

namespace spreadid::necessity {

// ---------------------------------------------------------------------------
// Slanted-matrix instability: synthetic worst-case matrix with entries
//   m[j', j] = w(||lambda*j' - j||_inf) * p(||j||_inf),  j, j' in Z^2,
// where w(x) = (1+x)^(-decay_power) and p(x) = (1+x)^poly_degree. A wide
// rectangular section always has a kernel vector whose image has small norm,
// quantified by the tail bound below.
// ---------------------------------------------------------------------------

struct SlantedMatrixSpec {
    double lambda = 2.0;
    int poly_degree = 1;   // degree of p
    int decay_power = 4;   // must be >= poly_degree + 3
    int k1 = 3;            // truncation parameter
    double k0 = 0.0;       // validity radius (informational)

    void validate() const;
    // N = ceil(lambda*(k1+1)/(lambda-1)), Ntilde = ceil(N/lambda) + k1
    int radius_n() const;
    int radius_ntilde() const;
    double weight(double x) const;
    double poly(double x) const;
};

// Rows indexed by ||j'||_inf <= Ntilde, columns by ||j||_inf <= N,
// flattened as (a + R) * (2R + 1) + (b + R).
CMat build_slanted(const SlantedMatrixSpec& spec);

struct KernelVectorResult {
    CVec x;                 // unit vector over the (2N+1)^2 column index set
    double norm_mx = 0.0;   // ||Mx|| over rows of radius eval_radius_mult * N
    double inner_residual = 0.0;  // ||Mx|| restricted to rows <= Ntilde
    double bound = 0.0;     // numeric truncation tail bound on ||Mx||^2
    int n_radius = 0;
    int ntilde_radius = 0;
};

// Unit kernel vector of the rectangular section (orthogonal complement of the
// row space), zero-padded, with ||Mx|| evaluated over a section of radius
// eval_radius_mult * N. Throws NumericalRankFull if the section has no
// numerical kernel.
KernelVectorResult kernel_vector(const SlantedMatrixSpec& spec, int eval_radius_mult = 3);

// K1^(2*poly_degree) * sum_{K>=K1} K * sum_{k>=K} k w(k)^2 for each K1,
// truncated where w(k)^2 < 1e-30. Throws DivergentTail when the double sum
// does not converge (decay_power <= 2).
std::vector<double> tail_sum(int decay_power, int poly_degree, const std::vector<int>& k1_list);

// 2^6 (lambda/(lambda-1))^(2L) (K1+3)^(2L) sum_{K >= ceil(N/lambda)+K1} K sum_{k>=K} k w(k)^2
double slant_tail_bound(const SlantedMatrixSpec& spec);

// ---------------------------------------------------------------------------
// Prototype operator: tensor bump spreading function eta1 (x) eta2 supported
// in one (time, frequency) grid cell of the P x P spreading grid, plateau of
// relative width 1/lambda, raised-cosine taper.
// ---------------------------------------------------------------------------

struct PrototypeOp {
    int P = 0, K = 0, L = 0;
    double lambda = 0.0;
    std::vector<double> eta1, eta2;  // length P, indexed by grid position
    int t_plateau = 0, t_support = 0;
    int nu_plateau = 0, nu_support = 0;
};

// eta1: plateau radius floor(P/(2*lambda*K)), zero outside ceil(P/(2K));
// eta2: same formulas with L. Requires KL | P and plateau >= 1 sample.
PrototypeOp build_prototype(int P, int K, int L, double lambda);

tf::SpreadingFunction prototype_spreading(const PrototypeOp& proto);
tf::LinOp prototype_operator(const PrototypeOp& proto);

struct GramReport {
    std::vector<double> eigenvalues;  // descending
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

// Gram matrix (HS inner products) of the modulated prototype family on the
// sqrt(family_size) x sqrt(family_size) corner of the (k, l) lattice:
// member (k, l) modulates the prototype spreading function at integer rates
// (round(lambda*K*k), round(lambda*L*l)).
GramReport riesz_gram_check(const PrototypeOp& proto, int family_size);

// ---------------------------------------------------------------------------
// Gaussian Gabor frames on Z_P with window exp(-pi x^2 / P).
// ---------------------------------------------------------------------------

struct GaborFrameSpec {
    int P = 0;
    int mod_step = 1;    // a' in samples, must divide P
    int shift_step = 1;  // b' in samples, must divide P
    double density() const { return double(mod_step) * double(shift_step) / double(P); }
};

CVec gaussian_window(int P);

// extreme eigenvalues (A_frame, B_frame) of the frame operator
std::pair<double, double> gaussian_frame_bounds(const GaborFrameSpec& spec);

// ---------------------------------------------------------------------------
// Composition C o Phi_f o E on Z_P under the self-dual dictionary (continuous
// unit <-> sqrt(P) samples). E synthesizes channels from the shifted/modulated
// prototype family over the plan's merged cells (each tagged with its input);
// Phi_f applies the delta-train pilots; C takes Gaussian Gabor coefficients
// on the lattice with steps (lambda^2 K, lambda^2 L / (K J)).
// ---------------------------------------------------------------------------

struct CompositionCell {
    int m = 0, n = 0;  // merged-grid cell
    int input = 0;     // which pilot drives this cell
};

struct CompositionSpec {
    int P = 300;
    int K = 2, L = 3;
    double lambda = 1.05;
    std::vector<CompositionCell> cells;   // J cells
    spark::IdentifierSequence c;          // pilot weights, period L
    std::vector<int> input_offsets;       // frequency offsets (cells) per input
    // nested column windows (k radius, l radius) per section
    std::vector<std::pair<int, int>> sections{{1, 1}, {2, 2}, {3, 3}};
    int analysis_j = 0;                   // J for the analysis lattice (0 = cells.size())
    bool enforce_overspread = true;
};

struct CompositionCurve {
    std::vector<int> section_cols;
    std::vector<double> sigma_min;
    std::vector<double> sigma_max;
    int rows = 0;
    int row_k_radius = 0, row_l_radius = 0;
};

// Reports sigma_min / sigma_max of nested column sections against a fixed
// generous analysis window. Throws PlanNotOverspread when enforce_overspread
// is set and |cells| <= L.
CompositionCurve composition_instability(const CompositionSpec& spec);

}  // namespace spreadid::necessity
