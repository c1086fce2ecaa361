// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/ident.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spreadid/errors.hpp"
#include "spreadid/kernels.hpp"
#include "spreadid/linalg.hpp"

namespace spreadid::ident {

namespace {

constexpr double kRankTol = 1e-10;

void check_pilot(const geom::MimoSupportPlan& plan, const PilotSet& p) {
    if (p.c.L != plan.L || p.K != plan.K) throw GridMismatch("pilot grid does not match plan");
    if (p.offsets != plan.offsets) throw GridMismatch("pilot offsets do not match plan");
}

}  // namespace

double MimoChannel::hs_norm() const {
    double s = 0.0;
    const auto& k = kernels::active();
    for (const CVec& block : coeffs) s += k.nrm2sq(block.size(), block.data());
    return std::sqrt(s);
}

CMat row_matrix(const geom::MimoSupportPlan& plan, const spark::IdentifierSequence& c, int m) {
    if (c.L != plan.L) throw GridMismatch("row_matrix: identifier period != plan L");
    if (m < 0 || m >= plan.M) throw IndexOutOfRange("row_matrix: row index");
    int total = 0;
    for (int n = 0; n < plan.N; ++n) total += static_cast<int>(plan.support(m, n).cells.size());
    CMat a(plan.L, total);
    int col = 0;
    for (int n = 0; n < plan.N; ++n) {
        const int s_n = plan.offsets.empty() ? 0 : plan.offsets[n];
        for (const geom::Cell& cell : plan.support(m, n).cells) {
            const CVec column = spark::a_column(c, cell.first, mod(cell.second + s_n, plan.L));
            std::copy(column.begin(), column.end(), a.col(col));
            ++col;
        }
    }
    return a;
}

MimoChannel random_channel(const geom::MimoSupportPlan& plan, Rng rng) {
    MimoChannel ch;
    ch.plan = plan;
    ch.coeffs.resize(plan.M * plan.N);
    for (int m = 0; m < plan.M; ++m) {
        for (int n = 0; n < plan.N; ++n) {
            Rng r = rng.substream(static_cast<uint64_t>(m) * plan.N + n);
            CVec block(plan.support(m, n).cells.size());
            for (cd& z : block) z = r.cnormal();
            ch.coeffs[m * plan.N + n] = std::move(block);
        }
    }
    return ch;
}

CVec stack_row(const MimoChannel& ch, int m) {
    CVec x;
    for (int n = 0; n < ch.plan.N; ++n) {
        const CVec& block = ch.coeffs[m * ch.plan.N + n];
        x.insert(x.end(), block.begin(), block.end());
    }
    return x;
}

std::vector<CVec> simulate_output(const MimoChannel& ch, const PilotSet& pilots,
                                  double noise_sigma, Rng noise_rng) {
    check_pilot(ch.plan, pilots);
    for (int m = 0; m < ch.plan.M; ++m) {
        for (int n = 0; n < ch.plan.N; ++n) {
            if (ch.coeffs[m * ch.plan.N + n].size() != ch.plan.support(m, n).cells.size())
                throw ShapeMismatch("simulate_output: coefficient block size");
        }
    }
    std::vector<CVec> y;
    y.reserve(ch.plan.M);
    for (int m = 0; m < ch.plan.M; ++m) {
        const CMat a = row_matrix(ch.plan, pilots.c, m);
        CVec ym = linalg::matvec(a, stack_row(ch, m));
        if (noise_sigma > 0.0) {
            Rng r = noise_rng.substream(static_cast<uint64_t>(m));
            for (cd& z : ym) z += cd{noise_sigma * r.normal(), noise_sigma * r.normal()};
        }
        y.push_back(std::move(ym));
    }
    return y;
}

IdentificationResult recover(const std::vector<CVec>& y, const geom::MimoSupportPlan& plan,
                             const spark::IdentifierSequence& c, int K) {
    if (K != plan.K) throw GridMismatch("recover: K does not match plan");
    if (static_cast<int>(y.size()) != plan.M) throw ShapeMismatch("recover: need M outputs");

    IdentificationResult out;
    out.recovered.resize(plan.M * plan.N);
    out.residual.resize(plan.M, 0.0);
    double a_est = 0.0, b_est = 0.0;
    bool first = true;

    for (int m = 0; m < plan.M; ++m) {
        if (static_cast<int>(y[m].size()) != plan.L)
            throw ShapeMismatch("recover: output length != L");
        const CMat a = row_matrix(plan, c, m);
        const linalg::Svd svd = linalg::jacobi_svd(a);
        if (a.cols > 0 && (svd.sigma_max() == 0.0 ||
                           svd.sigma_min() <= kRankTol * svd.sigma_max() || a.cols > plan.L))
            throw RankDeficient("recover: row " + std::to_string(m) +
                                " is not identifiable with this pilot");
        const CVec x = linalg::lstsq(svd, y[m], kRankTol);

        const CVec yhat = linalg::matvec(a, x);
        CVec diff = y[m];
        const auto& kr = kernels::active();
        kr.axpy(diff.size(), cd{-1.0, 0.0}, yhat.data(), diff.data());
        const double ynorm = linalg::nrm2(y[m]);
        out.residual[m] = ynorm > 0.0 ? linalg::nrm2(diff) / ynorm : linalg::nrm2(diff);

        // unstack into per-subchannel blocks
        int pos = 0;
        for (int n = 0; n < plan.N; ++n) {
            const int sz = static_cast<int>(plan.support(m, n).cells.size());
            out.recovered[m * plan.N + n] = CVec(x.begin() + pos, x.begin() + pos + sz);
            pos += sz;
        }

        if (a.cols > 0) {
            a_est = first ? svd.sigma_min() : std::min(a_est, svd.sigma_min());
            b_est = first ? svd.sigma_max() : std::max(b_est, svd.sigma_max());
            first = false;
        }
    }
    out.A_est = a_est;
    out.B_est = b_est;
    return out;
}

std::pair<double, double> stability_bounds(const geom::MimoSupportPlan& plan,
                                           const spark::IdentifierSequence& c, int K) {
    if (K != plan.K) throw GridMismatch("stability_bounds: K does not match plan");
    double a_est = 0.0, b_est = 0.0;
    bool first = true;
    for (int m = 0; m < plan.M; ++m) {
        const CMat a = row_matrix(plan, c, m);
        if (a.cols == 0) continue;
        const linalg::Svd svd = linalg::jacobi_svd(a);
        if (svd.sigma_max() == 0.0 || svd.sigma_min() <= kRankTol * svd.sigma_max() ||
            a.cols > plan.L)
            throw RankDeficient("stability_bounds: row " + std::to_string(m) + " rank deficient");
        a_est = first ? svd.sigma_min() : std::min(a_est, svd.sigma_min());
        b_est = first ? svd.sigma_max() : std::max(b_est, svd.sigma_max());
        first = false;
    }
    return {a_est, b_est};
}

}  // namespace spreadid::ident
