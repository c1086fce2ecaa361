// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <utility>
#include <vector>

#include "spreadid/geometry.hpp"
#include "spreadid/rng.hpp"
#include "spreadid/spark.hpp"
#include "spreadid/types.hpp"

namespace spreadid::ident {

// M x N array of subchannels, each a coefficient vector over the cells of
// its support (cells in ascending (m, n) order). The squared HS norm of the
// channel is the sum of the squared coefficient norms, block by block.
struct MimoChannel {
    geom::MimoSupportPlan plan;
    std::vector<CVec> coeffs;  // M*N entries, index m*N + n

    double hs_norm() const;
};

struct PilotSet {
    spark::IdentifierSequence c;
    int K = 0;
    std::vector<int> offsets;  // must match the plan used for recovery
};

struct IdentificationResult {
    std::vector<CVec> recovered;   // same shape as MimoChannel::coeffs
    std::vector<double> residual;  // per-row relative l2 residual
    double A_est = 0.0;
    double B_est = 0.0;
};

// The L x (sum_n |cells(S_mn)|) map from row-m stacked coefficients to the
// row output: the column for subchannel-n cell (mu, nu) is the A(c) column
// at the shifted cell (mu, (nu + s_n) mod L). Column order is n ascending,
// cells ascending within each subchannel.
CMat row_matrix(const geom::MimoSupportPlan& plan, const spark::IdentifierSequence& c, int m);

MimoChannel random_channel(const geom::MimoSupportPlan& plan, Rng rng);

// y_m = row_matrix(m) * coeffs_m + circularly symmetric Gaussian noise with
// standard deviation noise_sigma per real component.
std::vector<CVec> simulate_output(const MimoChannel& ch, const PilotSet& pilots,
                                  double noise_sigma, Rng noise_rng);

// Per-row least squares; throws RankDeficient when a row matrix has
// sigma_min <= 1e-10 * sigma_max (in particular whenever a row has more than
// L merged cells).
IdentificationResult recover(const std::vector<CVec>& y, const geom::MimoSupportPlan& plan,
                             const spark::IdentifierSequence& c, int K);

// (A_est, B_est) = (min_m sigma_min, max_m sigma_max) over the row matrices;
// the discrete frame bounds of the pilot map on the support class.
std::pair<double, double> stability_bounds(const geom::MimoSupportPlan& plan,
                                           const spark::IdentifierSequence& c, int K);

// stacked row coefficients in row_matrix column order
CVec stack_row(const MimoChannel& ch, int m);

}  // namespace spreadid::ident
