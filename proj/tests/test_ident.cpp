// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spreadid/errors.hpp"
#include "spreadid/ident.hpp"
#include "spreadid/linalg.hpp"
#include "spreadid/rng.hpp"
#include "spreadid/tf.hpp"

using namespace spreadid;
using namespace spreadid::ident;

namespace {

spark::IdentifierSequence seeded_identifier(int l, uint64_t seed) {
    Rng r = Rng::stream(seed, 0);
    CVec c(l);
    for (cd& z : c) z = r.cnormal();
    return spark::IdentifierSequence(l, std::move(c));
}

// the 2x2 plan used across the fixtures: K=2, L=7, two cells per subchannel
// except the (1,0) entry
geom::MimoSupportPlan fixture_plan_2x2() {
    geom::GridSupport s00(2, 7), s01(2, 7), s10(2, 7), s11(2, 7);
    s00.cells = {{0, 0}, {1, 1}};
    s01.cells = {{0, 0}, {1, 2}};
    s10.cells = {{0, 1}};
    s11.cells = {{1, 0}, {0, 2}};
    return geom::pack_offsets({s00, s01, s10, s11}, 2, 2);
}

double max_coeff_error(const MimoChannel& truth, const IdentificationResult& rec) {
    double num = 0.0, den = 0.0;
    for (size_t b = 0; b < truth.coeffs.size(); ++b) {
        for (size_t i = 0; i < truth.coeffs[b].size(); ++i) {
            num += std::norm(rec.recovered[b][i] - truth.coeffs[b][i]);
            den += std::norm(truth.coeffs[b][i]);
        }
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_CASE("row_matrix reduces to A(c) columns for SISO") {
    const int L = 5;
    const auto c = seeded_identifier(L, 11);
    geom::GridSupport s(1, L);
    s.cells = {{0, 1}, {0, 3}};
    const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
    const CMat a = row_matrix(plan, c, 0);
    REQUIRE(a.rows == L);
    REQUIRE(a.cols == 2);
    const spark::IdentMatrix full = spark::build_A(c, 1);
    for (int p = 0; p < L; ++p) {
        CHECK(std::abs(a(p, 0) - full.A(p, 1)) < 1e-14);
        CHECK(std::abs(a(p, 1) - full.A(p, 3)) < 1e-14);
    }
}

TEST_CASE("row_matrix column audit for a 2-input disjoint plan") {
    const int L = 5;
    const auto c = seeded_identifier(L, 12);
    geom::GridSupport s1(1, L), s2(1, L);
    s1.cells = {{0, 0}, {0, 1}};
    s2.cells = {{0, 0}};
    const geom::MimoSupportPlan plan = geom::pack_offsets({s1, s2}, 1, 2);
    const CMat a = row_matrix(plan, c, 0);
    CHECK(a.cols == 3);
    // columns are distinct A(c) columns at the shifted cells
    const spark::IdentMatrix full = spark::build_A(c, 1);
    const int s_2 = plan.offsets[1];
    const int expect_cols[3] = {0, 1, mod(0 + s_2, L)};
    for (int j = 0; j < 3; ++j)
        for (int p = 0; p < L; ++p)
            CHECK(std::abs(a(p, j) - full.A(p, expect_cols[j])) < 1e-14);
    // all columns carry norm ||c||
    const double cn = linalg::nrm2(c.c);
    for (int j = 0; j < 3; ++j) {
        CVec col(a.col(j), a.col(j) + L);
        CHECK(linalg::nrm2(col) == doctest::Approx(cn).epsilon(1e-13));
    }
}

TEST_CASE("K=1 forward map agrees with a literal signal-domain simulation") {
    // channel cell (m, n) acts on the pilot c as the operator with spreading
    // coefficient at (-m mod L, n); the A(c) column convention reflects time
    const int L = 7;
    const auto c = seeded_identifier(L, 13);
    geom::GridSupport s(1, L);
    s.cells = {{0, 1}, {0, 4}, {0, 6}};
    const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
    MimoChannel ch = random_channel(plan, Rng::stream(14, 0));
    const PilotSet pilot{c, 1, plan.offsets};
    const auto y = simulate_output(ch, pilot, 0.0, Rng(0));

    CMat eta(L, L);
    int idx = 0;
    for (const geom::Cell& cell : s.cells) {
        eta(mod(-cell.first, L), cell.second) = ch.coeffs[0][idx];
        ++idx;
    }
    const tf::LinOp h = tf::operator_from_spreading(tf::SpreadingFunction(L, std::move(eta)));
    const tf::Signal out = tf::apply(h, tf::Signal(L, c.c));
    for (int p = 0; p < L; ++p) CHECK(std::abs(out.samples[p] - y[0][p]) < 1e-12);
}

TEST_CASE("simulate_output: zero channel and identity column") {
    {
        geom::GridSupport s(1, 4);
        s.cells = {{0, 2}};
        const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
        MimoChannel ch;
        ch.plan = plan;
        ch.coeffs = {CVec{cd{0, 0}}};
        const auto c = seeded_identifier(4, 15);
        const auto y = simulate_output(ch, {c, 1, plan.offsets}, 0.0, Rng(0));
        for (const cd& z : y[0]) CHECK(std::abs(z) == 0.0);
    }
    {
        // single cell (0,0), coefficient 1, N=1, K=1: the output is c itself
        geom::GridSupport s(1, 3);
        s.cells = {{0, 0}};
        const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
        MimoChannel ch;
        ch.plan = plan;
        ch.coeffs = {CVec{cd{1, 0}}};
        const auto c = seeded_identifier(3, 16);
        const auto y = simulate_output(ch, {c, 1, plan.offsets}, 0.0, Rng(0));
        for (int p = 0; p < 3; ++p) CHECK(std::abs(y[0][p] - c.c[p]) < 1e-14);
    }
}

TEST_CASE("simulate_output regression fixture at L=5, 3 cells") {
    geom::GridSupport s(1, 5);
    s.cells = {{0, 0}, {0, 2}, {0, 3}};
    const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
    const auto c = seeded_identifier(5, 515151);
    MimoChannel ch = random_channel(plan, Rng::stream(616161, 0));
    const auto y = simulate_output(ch, {c, 1, plan.offsets}, 0.0, Rng(0));
    const cd expect[5] = {{-2.0972522232644542, 1.764969818017164},
                          {-0.34662338639326123, -0.70669915059484634},
                          {0.40510730482476903, -0.027865343404540083},
                          {-0.0041474271913252564, -0.15001510069764445},
                          {0.039979525201762234, -0.18350032235475777}};
    for (int p = 0; p < 5; ++p) CHECK(std::abs(y[0][p] - expect[p]) < 1e-13);
}

TEST_CASE("noiseless recovery is exact over randomized trials") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    auto [c, rep] = spark::search_identifier(7, 2, 5, 97531);
    REQUIRE(rep.min_sigma_min > 0.0);
    const PilotSet pilot{c, 2, plan.offsets};
    for (int trial = 0; trial < 100; ++trial) {
        const MimoChannel ch = random_channel(plan, Rng::stream(3000, trial));
        const auto y = simulate_output(ch, pilot, 0.0, Rng(0));
        const IdentificationResult res = recover(y, plan, c, 2);
        CHECK(max_coeff_error(ch, res) < 1e-10);
        for (double r : res.residual) CHECK(r < 1e-10);
    }
}

TEST_CASE("zero output recovers the zero channel") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    const auto c = seeded_identifier(7, 21);
    const std::vector<CVec> y(2, CVec(7, cd{0, 0}));
    const IdentificationResult res = recover(y, plan, c, 2);
    for (const CVec& block : res.recovered)
        for (const cd& z : block) CHECK(std::abs(z) < 1e-15);
    for (double r : res.residual) CHECK(r == 0.0);
}

TEST_CASE("a row with more than L merged cells is rank deficient") {
    const int L = 3;
    geom::GridSupport s(2, L);
    s.cells = {{0, 0}, {0, 1}, {0, 2}, {1, 0}};  // L + 1 cells
    const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
    const auto c = seeded_identifier(L, 22);
    CHECK_THROWS_AS((void)recover({CVec(L, cd{0, 0})}, plan, c, 2), RankDeficient);
    CHECK_THROWS_AS((void)stability_bounds(plan, c, 2), RankDeficient);
    // the L x (L+1) row matrix has a numerical kernel
    const CMat a = row_matrix(plan, c, 0);
    const linalg::Svd svd = linalg::jacobi_svd(a);
    CHECK(svd.sigma_min() < 1e-10 * svd.sigma_max());
}

TEST_CASE("stability bounds: single cell and orthogonal columns") {
    {
        geom::GridSupport s(1, 4);
        s.cells = {{0, 1}};
        const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
        const auto c = seeded_identifier(4, 23);
        auto [a, b] = stability_bounds(plan, c, 1);
        CHECK(a == doctest::Approx(linalg::nrm2(c.c)).epsilon(1e-13));
        CHECK(b == doctest::Approx(a).epsilon(1e-13));
    }
    {
        // c = (1,1) at L=2: cells (0,0) and (0,1) give orthogonal columns
        const spark::IdentifierSequence c(2, {cd{1, 0}, cd{1, 0}});
        geom::GridSupport s(1, 2);
        s.cells = {{0, 0}, {0, 1}};
        const geom::MimoSupportPlan plan = geom::pack_offsets({s}, 1, 1);
        auto [a, b] = stability_bounds(plan, c, 1);
        CHECK(a == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
        CHECK(b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    }
}

TEST_CASE("stability bounds regression fixture for the 2x2 plan at L=7") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    CHECK(plan.offsets == std::vector<int>{0, 3});
    auto [c, rep] = spark::search_identifier(7, 2, 5, 97531);
    auto [a, b] = stability_bounds(plan, c, 2);
    CHECK(a == doctest::Approx(1.4483588218245578).epsilon(1e-12));
    CHECK(b == doctest::Approx(3.8125666859684486).epsilon(1e-12));
}

TEST_CASE("frame inequality and block additivity on random channels") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    auto [c, rep] = spark::search_identifier(7, 2, 5, 97531);
    auto [a_est, b_est] = stability_bounds(plan, c, 2);
    const PilotSet pilot{c, 2, plan.offsets};
    for (int trial = 0; trial < 100; ++trial) {
        const MimoChannel ch = random_channel(plan, Rng::stream(4000, trial));
        const auto y = simulate_output(ch, pilot, 0.0, Rng(0));
        double y_sq = 0.0;
        for (const CVec& ym : y) y_sq += linalg::nrm2(ym) * linalg::nrm2(ym);
        const double y_norm = std::sqrt(y_sq);
        const double h_norm = ch.hs_norm();
        CHECK(a_est * h_norm <= y_norm * (1.0 + 1e-12));
        CHECK(y_norm <= b_est * h_norm * (1.0 + 1e-12));

        // block additivity of the squared channel norm
        double blocks = 0.0;
        for (const CVec& block : ch.coeffs)
            blocks += linalg::nrm2(block) * linalg::nrm2(block);
        CHECK(std::sqrt(blocks) == doctest::Approx(h_norm).epsilon(1e-12));
    }
}

TEST_CASE("recovery error grows with noise and vanishes at sigma = 0") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    auto [c, rep] = spark::search_identifier(7, 2, 5, 97531);
    const PilotSet pilot{c, 2, plan.offsets};
    double err_by_sigma[3] = {0, 0, 0};
    const double sigmas[3] = {0.0, 0.01, 0.3};
    for (int si = 0; si < 3; ++si) {
        double total = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            const MimoChannel ch = random_channel(plan, Rng::stream(5000, trial));
            const auto y = simulate_output(ch, pilot, sigmas[si], Rng::stream(6000, trial));
            total += max_coeff_error(ch, recover(y, plan, c, 2));
        }
        err_by_sigma[si] = total / 30.0;
    }
    CHECK(err_by_sigma[0] < 1e-10);
    CHECK(err_by_sigma[1] > err_by_sigma[0]);
    CHECK(err_by_sigma[2] > err_by_sigma[1]);
}

TEST_CASE("exact recovery across randomized plans") {
    // random supports with per-row merged cells <= L, random full-spark pilots
    Rng plan_rng = Rng::stream(909090, 0);
    int built = 0;
    for (int rep = 0; rep < 40 && built < 20; ++rep) {
        const int L = 5, K = 2, M = 2, N = 2;
        std::vector<geom::GridSupport> sup(M * N, geom::GridSupport(K, L));
        Rng r = plan_rng.substream(rep);
        for (auto& s : sup) {
            const int count = 1 + static_cast<int>(r.below(2));
            while (static_cast<int>(s.cells.size()) < count)
                s.cells.insert({static_cast<int>(r.below(K)), static_cast<int>(r.below(2))});
        }
        geom::MimoSupportPlan plan;
        try {
            plan = geom::pack_offsets(sup, M, N);
        } catch (const PackingFailed&) {
            continue;
        }
        bool fits = true;
        for (const auto& row : plan.merged) fits = fits && static_cast<int>(row.cells.size()) <= L;
        if (!fits) continue;
        ++built;
        auto [c, spark_rep] = spark::search_identifier(L, K, 5, 333000 + rep);
        const PilotSet pilot{c, K, plan.offsets};
        for (int trial = 0; trial < 5; ++trial) {
            const MimoChannel ch = random_channel(plan, Rng::stream(444000 + rep, trial));
            const auto y = simulate_output(ch, pilot, 0.0, Rng(0));
            const IdentificationResult res = recover(y, plan, c, K);
            CHECK(max_coeff_error(ch, res) < 1e-10);
        }
    }
    CHECK(built >= 20);
}

TEST_CASE("pilot validation catches mismatched grids") {
    const geom::MimoSupportPlan plan = fixture_plan_2x2();
    const auto c5 = seeded_identifier(5, 31);
    CHECK_THROWS_AS((void)row_matrix(plan, c5, 0), GridMismatch);
    const auto c7 = seeded_identifier(7, 32);
    MimoChannel ch = random_channel(plan, Rng::stream(33, 0));
    CHECK_THROWS_AS((void)simulate_output(ch, {c7, 1, plan.offsets}, 0.0, Rng(0)), GridMismatch);
    CHECK_THROWS_AS((void)recover({CVec(7), CVec(7)}, plan, c7, 1), GridMismatch);
}
