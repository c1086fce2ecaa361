// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/necessity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "spreadid/errors.hpp"
#include "spreadid/kernels.hpp"
#include "spreadid/linalg.hpp"
#include "spreadid/rng.hpp"

namespace spreadid::necessity {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

inline int flat_index(int a, int b, int radius) {
    return (a + radius) * (2 * radius + 1) + (b + radius);
}

}  // namespace

// ---------------------------------------------------------------------------
// slanted matrices
// ---------------------------------------------------------------------------

void SlantedMatrixSpec::validate() const {
    if (!(lambda > 1.0)) throw ShapeMismatch("SlantedMatrixSpec: lambda must exceed 1");
    if (poly_degree < 0) throw ShapeMismatch("SlantedMatrixSpec: poly_degree must be >= 0");
    if (decay_power < poly_degree + 3)
        throw ShapeMismatch("SlantedMatrixSpec: decay_power must be >= poly_degree + 3");
    if (k1 < 1) throw ShapeMismatch("SlantedMatrixSpec: k1 must be >= 1");
}

int SlantedMatrixSpec::radius_n() const {
    return static_cast<int>(std::ceil(lambda * (k1 + 1) / (lambda - 1.0)));
}

int SlantedMatrixSpec::radius_ntilde() const {
    return static_cast<int>(std::ceil(radius_n() / lambda)) + k1;
}

double SlantedMatrixSpec::weight(double x) const { return std::pow(1.0 + x, -decay_power); }

double SlantedMatrixSpec::poly(double x) const { return std::pow(1.0 + x, poly_degree); }

CMat build_slanted(const SlantedMatrixSpec& spec) {
    spec.validate();
    const int n = spec.radius_n();
    const int nt = spec.radius_ntilde();
    const int rows = (2 * nt + 1) * (2 * nt + 1);
    const int cols = (2 * n + 1) * (2 * n + 1);
    CMat m(rows, cols);
    for (int a = -n; a <= n; ++a) {
        for (int b = -n; b <= n; ++b) {
            const int col = flat_index(a, b, n);
            const double pj = spec.poly(std::max(std::abs(a), std::abs(b)));
            for (int ap = -nt; ap <= nt; ++ap) {
                for (int bp = -nt; bp <= nt; ++bp) {
                    const double slant = std::max(std::abs(spec.lambda * ap - a),
                                                  std::abs(spec.lambda * bp - b));
                    m(flat_index(ap, bp, nt), col) = spec.weight(slant) * pj;
                }
            }
        }
    }
    return m;
}

namespace {

// suffix sums sum_{K >= from} K * sum_{k >= K} k w(k)^2 with w = (1+x)^-d,
// truncated where w(k)^2 < 1e-30
double double_tail(int decay_power, int from) {
    if (decay_power <= 2) throw DivergentTail("double tail sum diverges for decay_power <= 2");
    const double cutoff = 1e-30;
    // k_stop: (1+k)^(-2d) < cutoff
    const double k_stop_d = std::pow(cutoff, -1.0 / (2.0 * decay_power)) - 1.0;
    const int k_stop = std::max(from + 1, static_cast<int>(std::ceil(k_stop_d)));
    // inner suffix T(K) = sum_{k >= K} k w(k)^2
    double inner = 0.0;
    double total = 0.0;
    // accumulate from the top so both suffixes are available in one pass
    for (int k = k_stop; k >= std::max(from, 0); --k) {
        inner += k * std::pow(1.0 + k, -2.0 * decay_power);
        total += static_cast<double>(k) * inner;
    }
    return total;
}

}  // namespace

std::vector<double> tail_sum(int decay_power, int poly_degree, const std::vector<int>& k1_list) {
    std::vector<double> out;
    out.reserve(k1_list.size());
    for (int k1 : k1_list) {
        if (k1 < 0) throw ShapeMismatch("tail_sum: k1 must be >= 0");
        out.push_back(std::pow(static_cast<double>(k1), 2.0 * poly_degree) *
                      double_tail(decay_power, k1));
    }
    return out;
}

double slant_tail_bound(const SlantedMatrixSpec& spec) {
    const int n = spec.radius_n();
    const int from = static_cast<int>(std::ceil(n / spec.lambda)) + spec.k1;
    const double lam_fac = std::pow(spec.lambda / (spec.lambda - 1.0), 2.0 * spec.poly_degree);
    const double k1_fac = std::pow(static_cast<double>(spec.k1 + 3), 2.0 * spec.poly_degree);
    return 64.0 * lam_fac * k1_fac * double_tail(spec.decay_power, from);
}

KernelVectorResult kernel_vector(const SlantedMatrixSpec& spec, int eval_radius_mult) {
    const CMat mt = build_slanted(spec);
    const linalg::KernelBasis kb = linalg::kernel_basis(mt);
    if (kb.basis.cols == 0)
        throw NumericalRankFull("kernel_vector: rectangular section has full column rank");

    KernelVectorResult res;
    res.n_radius = spec.radius_n();
    res.ntilde_radius = spec.radius_ntilde();
    res.bound = slant_tail_bound(spec);

    // canonical kernel vector: project a fixed seeded direction onto the
    // kernel subspace. The subspace is numerically stable; an individual QR
    // basis column is not (its choice follows pivoting round-off).
    {
        const auto& kr = kernels::active();
        const int nrows = kb.basis.rows;
        Rng r = Rng::stream(0xC0FFEE, static_cast<uint64_t>(nrows));
        CVec probe(nrows);
        for (cd& z : probe) z = r.cnormal();
        CVec x(nrows, cd{0.0, 0.0});
        for (int t = 0; t < kb.basis.cols; ++t) {
            const cd coeff = kr.dotc(nrows, kb.basis.col(t), probe.data());
            kr.axpy(nrows, coeff, kb.basis.col(t), x.data());
        }
        double nx = linalg::nrm2(x);
        if (nx < 1e-8) {  // probe essentially orthogonal to the kernel
            x.assign(kb.basis.col(0), kb.basis.col(0) + nrows);
            nx = 1.0;
        }
        kr.scal(nrows, cd{1.0 / nx, 0.0}, x.data());
        res.x = std::move(x);
    }

    {
        const CVec inner = linalg::matvec(mt, res.x);
        res.inner_residual = linalg::nrm2(inner);
    }

    // ||Mx|| over the enlarged row window; x is supported on ||j||_inf <= N
    const int n = res.n_radius;
    const int r_eval = std::max(eval_radius_mult, 1) * n;
    double acc = 0.0;
    for (int ap = -r_eval; ap <= r_eval; ++ap) {
        for (int bp = -r_eval; bp <= r_eval; ++bp) {
            cd row_sum{0.0, 0.0};
            for (int a = -n; a <= n; ++a) {
                const double da = std::abs(spec.lambda * ap - a);
                for (int b = -n; b <= n; ++b) {
                    const double slant = std::max(da, std::abs(spec.lambda * bp - b));
                    const double pj = spec.poly(std::max(std::abs(a), std::abs(b)));
                    row_sum += spec.weight(slant) * pj * res.x[flat_index(a, b, n)];
                }
            }
            acc += std::norm(row_sum);
        }
    }
    res.norm_mx = std::sqrt(acc);
    return res;
}

// ---------------------------------------------------------------------------
// prototype operator
// ---------------------------------------------------------------------------

namespace {

// even raised-cosine bump on Z_P: 1 inside plateau, 0 at/after support radius
std::vector<double> make_bump(int p, int plateau, int support) {
    std::vector<double> bump(p, 0.0);
    for (int i = 0; i < p; ++i) {
        const int t = i <= p / 2 ? i : i - p;  // signed representative
        const int at = std::abs(t);
        if (at <= plateau) {
            bump[i] = 1.0;
        } else if (at < support) {
            const double u = double(at - plateau) / double(support - plateau);
            bump[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * u));
        }
    }
    return bump;
}

}  // namespace

PrototypeOp build_prototype(int P, int K, int L, double lambda) {
    if (!(lambda > 1.0)) throw ShapeMismatch("build_prototype: lambda must exceed 1");
    if (P < 2 || K < 1 || L < 1) throw ShapeMismatch("build_prototype: bad grid");
    if (P % (K * L) != 0)
        throw GridTooCoarse("build_prototype: K*L must divide P");
    PrototypeOp proto;
    proto.P = P;
    proto.K = K;
    proto.L = L;
    proto.lambda = lambda;
    proto.t_plateau = static_cast<int>(std::floor(P / (2.0 * lambda * K)));
    proto.t_support = static_cast<int>(std::ceil(P / (2.0 * K)));
    proto.nu_plateau = static_cast<int>(std::floor(P / (2.0 * lambda * L)));
    proto.nu_support = static_cast<int>(std::ceil(P / (2.0 * L)));
    if (proto.t_plateau < 1 || proto.nu_plateau < 1)
        throw GridTooCoarse("build_prototype: plateau radius below one sample");
    if (2 * proto.t_support >= P || 2 * proto.nu_support >= P)
        throw GridTooCoarse("build_prototype: support radius wraps the torus");
    proto.eta1 = make_bump(P, proto.t_plateau, proto.t_support);
    proto.eta2 = make_bump(P, proto.nu_plateau, proto.nu_support);
    return proto;
}

tf::SpreadingFunction prototype_spreading(const PrototypeOp& proto) {
    CMat eta(proto.P, proto.P);
    for (int k = 0; k < proto.P; ++k) {
        if (proto.eta1[k] == 0.0) continue;
        for (int l = 0; l < proto.P; ++l) eta(k, l) = proto.eta1[k] * proto.eta2[l];
    }
    return tf::SpreadingFunction(proto.P, std::move(eta));
}

tf::LinOp prototype_operator(const PrototypeOp& proto) {
    return tf::operator_from_spreading(prototype_spreading(proto));
}

GramReport riesz_gram_check(const PrototypeOp& proto, int family_size) {
    const int side = static_cast<int>(std::lround(std::sqrt(double(family_size))));
    if (side * side != family_size || side < 1)
        throw ShapeMismatch("riesz_gram_check: family_size must be a perfect square");

    const tf::SpreadingFunction base = prototype_spreading(proto);
    std::vector<tf::SpreadingFunction> members;
    members.reserve(family_size);
    for (int k = 0; k < side; ++k) {
        for (int l = 0; l < side; ++l) {
            const int omega = static_cast<int>(std::lround(proto.lambda * proto.K * k));
            const int rmod = static_cast<int>(std::lround(proto.lambda * proto.L * l));
            members.push_back(tf::conjugate_spreading(base, omega, 0, rmod, 0));
        }
    }

    const auto& kr = kernels::active();
    const size_t cells = static_cast<size_t>(proto.P) * proto.P;
    CMat g(family_size, family_size);
    for (int i = 0; i < family_size; ++i) {
        for (int j = i; j < family_size; ++j) {
            // HS inner product = P * spreading-grid inner product
            const cd v = double(proto.P) *
                         kr.dotc(cells, members[i].eta.a.data(), members[j].eta.a.data());
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    }
    const linalg::Svd svd = linalg::jacobi_svd(g);
    GramReport rep;
    rep.eigenvalues = svd.sigma;  // Gram is Hermitian PSD
    rep.lambda_max = svd.sigma_max();
    rep.lambda_min = svd.sigma_min();
    return rep;
}

// ---------------------------------------------------------------------------
// Gaussian Gabor frames
// ---------------------------------------------------------------------------

CVec gaussian_window(int P) {
    CVec g(P);
    for (int i = 0; i < P; ++i) {
        const int t = i <= P / 2 ? i : i - P;
        g[i] = std::exp(-std::numbers::pi * double(t) * double(t) / double(P));
    }
    return g;
}

std::pair<double, double> gaussian_frame_bounds(const GaborFrameSpec& spec) {
    const int P = spec.P;
    if (P < 1 || spec.mod_step < 1 || spec.shift_step < 1)
        throw ShapeMismatch("gaussian_frame_bounds: bad lattice");
    if (P % spec.mod_step != 0 || P % spec.shift_step != 0)
        throw ShapeMismatch("gaussian_frame_bounds: lattice steps must divide P");

    const tf::Signal g0(P, gaussian_window(P));
    const auto& kr = kernels::active();
    CMat frame_op(P, P);
    for (int a = 0; a < P / spec.mod_step; ++a) {
        for (int b = 0; b < P / spec.shift_step; ++b) {
            const tf::Signal atom =
                tf::modulate(tf::translate(g0, b * spec.shift_step), a * spec.mod_step);
            for (int j = 0; j < P; ++j) {
                if (atom.samples[j] == cd{0.0, 0.0}) continue;
                kr.axpy(P, std::conj(atom.samples[j]), atom.samples.data(), frame_op.col(j));
            }
        }
    }
    const linalg::Svd svd = linalg::jacobi_svd(frame_op);
    return {svd.sigma_min(), svd.sigma_max()};
}

// ---------------------------------------------------------------------------
// composition C o Phi_f o E
// ---------------------------------------------------------------------------

namespace {

// delta-train pilot with weights c at spacing sqrtP/K, modulated by the
// input's frequency offset (in cells)
tf::Signal composition_pilot(int P, int K, int L, const CVec& c, int offset_cells) {
    const double sqrt_p = std::sqrt(double(P));
    std::map<int, cd> taps;
    const int count = static_cast<int>(std::floor(K * sqrt_p));
    for (int d = 0; d < count; ++d) {
        const int pos = mod(static_cast<int>(std::lround(d * sqrt_p / K)), P);
        taps[pos] += c[d % L];
    }
    CVec f(P, cd{0.0, 0.0});
    for (const auto& [pos, w] : taps) f[pos] = w;
    const int mu = static_cast<int>(std::lround(offset_cells * (double(K) / L) * sqrt_p));
    return tf::modulate(tf::Signal(P, std::move(f)), mu);
}

}  // namespace

CompositionCurve composition_instability(const CompositionSpec& spec) {
    const int P = spec.P;
    const int K = spec.K;
    const int L = spec.L;
    const int J = static_cast<int>(spec.cells.size());
    if (J == 0) throw ShapeMismatch("composition_instability: empty cell list");
    if (spec.c.L != L) throw GridMismatch("composition_instability: identifier period != L");
    if (spec.enforce_overspread) {
        if (J <= L)
            throw PlanNotOverspread("composition_instability: |J| <= L, instability not expected");
        const double lam4 = std::pow(spec.lambda, 4.0);
        if (!(lam4 > 1.0) || !(lam4 < double(J) / L))
            throw ShapeMismatch("composition_instability: need 1 < lambda^4 < J/L");
    }

    const double sqrt_p = std::sqrt(double(P));
    const double lam = spec.lambda;
    const int j_ana = spec.analysis_j > 0 ? spec.analysis_j : J;

    // prototype bump under the self-dual dictionary: cell width sqrtP/K by
    // sqrtP*K/L samples
    const int t_supp = static_cast<int>(std::lround(sqrt_p / (2.0 * K)));
    const int nu_supp = static_cast<int>(std::lround(sqrt_p * K / (2.0 * L)));
    // keep at least one taper sample even when lambda is close to 1
    const int t_plat =
        std::min(static_cast<int>(std::floor(sqrt_p / (2.0 * lam * K))), t_supp - 1);
    const int nu_plat =
        std::min(static_cast<int>(std::floor(sqrt_p * K / (2.0 * lam * L))), nu_supp - 1);
    if (t_plat < 1 || nu_plat < 1)
        throw GridTooCoarse("composition_instability: P too small for the prototype bump");
    const std::vector<double> eta1 = make_bump(P, t_plat, t_supp);
    const std::vector<double> eta2 = make_bump(P, nu_plat, nu_supp);

    // pilots per input
    int n_inputs = 0;
    for (const CompositionCell& cell : spec.cells) n_inputs = std::max(n_inputs, cell.input + 1);
    if (static_cast<int>(spec.input_offsets.size()) < n_inputs)
        throw ShapeMismatch("composition_instability: missing input offsets");
    std::vector<tf::Signal> pilots;
    pilots.reserve(n_inputs);
    for (int n = 0; n < n_inputs; ++n)
        pilots.push_back(composition_pilot(P, K, L, spec.c.c, spec.input_offsets[n]));

    // synthesis atom u = H_{k,l,j} f_{input(j)} computed from the conjugated
    // spreading bump over its support box only
    const double beta_j = lam * L / K;  // time translation per l step, in units
    auto synth_atom = [&](int k, int l, const CompositionCell& cell) {
        const int omega = static_cast<int>(std::lround(lam * K * k * sqrt_p));
        const int rmod = -static_cast<int>(std::lround(beta_j * l * sqrt_p));
        const int pshift = static_cast<int>(std::lround(cell.m * sqrt_p / K));
        const int xshift = static_cast<int>(std::lround(cell.n * (double(K) / L) * sqrt_p));
        const tf::Signal& f = pilots[cell.input];
        CVec u(P, cd{0.0, 0.0});
        const cd global = std::polar(1.0, -two_pi * double(rmod) * double(xshift) / P);
        for (int dt = -t_supp; dt <= t_supp; ++dt) {
            const double w1 = eta1[mod(dt, P)];
            if (w1 == 0.0) continue;
            const int a = mod(pshift + dt, P);
            for (int dn = -nu_supp; dn <= nu_supp; ++dn) {
                const double w2 = eta2[mod(dn, P)];
                if (w2 == 0.0) continue;
                const int b = mod(xshift + dn, P);
                const cd coeff = global * (w1 * w2) *
                                 std::polar(1.0, two_pi * (double(omega) * a + double(rmod) * b) / P);
                // u += coeff * pi(a, b) f
                for (int x = 0; x < P; ++x) {
                    const int xs = mod(x - a, P);
                    u[x] += coeff * std::polar(1.0, two_pi * double(b) * xs / P) * f.samples[xs];
                }
            }
        }
        return u;
    };

    // fixed analysis window sized to the torus
    const double alpha_step = lam * lam * K;                    // frequency units per k'
    const double beta_step = lam * lam * L / (double(K) * j_ana);  // time units per l'
    const double half_span = 0.5 * sqrt_p;
    const int row_k_radius = std::max(1, static_cast<int>(std::floor(0.9 * half_span / alpha_step)));
    const int row_l_radius = std::max(1, static_cast<int>(std::floor(0.9 * half_span / beta_step)));

    const tf::Signal g0(P, gaussian_window(P));
    std::vector<CVec> analysis_atoms;
    analysis_atoms.reserve((2 * row_k_radius + 1) * (2 * row_l_radius + 1));
    for (int kp = -row_k_radius; kp <= row_k_radius; ++kp) {
        for (int lp = -row_l_radius; lp <= row_l_radius; ++lp) {
            const int mshift = static_cast<int>(std::lround(alpha_step * kp * sqrt_p));
            const int tshift = static_cast<int>(std::lround(beta_step * lp * sqrt_p));
            analysis_atoms.push_back(tf::modulate(tf::translate(g0, tshift), mshift).samples);
        }
    }
    const int rows = static_cast<int>(analysis_atoms.size());

    // full column set at the largest window, ordered (k, l, j)
    int kmax = 0, lmax = 0;
    for (const auto& [kr2, lr2] : spec.sections) {
        kmax = std::max(kmax, kr2);
        lmax = std::max(lmax, lr2);
    }
    struct ColKey {
        int k, l, j;
    };
    std::vector<ColKey> keys;
    for (int k = -kmax; k <= kmax; ++k)
        for (int l = -lmax; l <= lmax; ++l)
            for (int j = 0; j < J; ++j) keys.push_back({k, l, j});

    const auto& kr = kernels::active();
    CMat full(rows, static_cast<int>(keys.size()));
    for (size_t col = 0; col < keys.size(); ++col) {
        const ColKey& key = keys[col];
        const CVec u = synth_atom(key.k, key.l, spec.cells[key.j]);
        for (int r = 0; r < rows; ++r)
            full(r, static_cast<int>(col)) = kr.dotc(P, analysis_atoms[r].data(), u.data());
    }

    CompositionCurve curve;
    curve.rows = rows;
    curve.row_k_radius = row_k_radius;
    curve.row_l_radius = row_l_radius;
    for (const auto& [kr2, lr2] : spec.sections) {
        std::vector<int> sel;
        for (size_t col = 0; col < keys.size(); ++col) {
            if (std::abs(keys[col].k) <= kr2 && std::abs(keys[col].l) <= lr2)
                sel.push_back(static_cast<int>(col));
        }
        CMat section(rows, static_cast<int>(sel.size()));
        for (size_t t = 0; t < sel.size(); ++t)
            std::copy(full.col(sel[t]), full.col(sel[t]) + rows, section.col(static_cast<int>(t)));
        const linalg::Svd svd = linalg::jacobi_svd(section);
        curve.section_cols.push_back(static_cast<int>(sel.size()));
        curve.sigma_min.push_back(svd.sigma_min());
        curve.sigma_max.push_back(svd.sigma_max());
    }
    return curve;
}

}  // namespace spreadid::necessity
