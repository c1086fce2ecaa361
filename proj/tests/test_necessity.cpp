// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spreadid/errors.hpp"
#include "spreadid/kernels.hpp"
#include "spreadid/linalg.hpp"
#include "spreadid/necessity.hpp"
#include "spreadid/rng.hpp"
#include "spreadid/spark.hpp"
#include "spreadid/tf.hpp"

using namespace spreadid;
using namespace spreadid::necessity;

namespace {

SlantedMatrixSpec slanted_spec(int k1) {
    SlantedMatrixSpec spec;
    spec.lambda = 2.0;
    spec.poly_degree = 1;
    spec.decay_power = 4;
    spec.k1 = k1;
    return spec;
}

spark::IdentifierSequence pinned_identifier_l3() {
    return spark::search_identifier(3, 2, 10, 8888).first;
}

}  // namespace

TEST_CASE("slanted section radii match the closed forms") {
    CHECK(slanted_spec(3).radius_n() == 8);
    CHECK(slanted_spec(3).radius_ntilde() == 7);
    CHECK(slanted_spec(1).radius_n() == 4);
    CHECK(slanted_spec(1).radius_ntilde() == 3);

    // rectangular sections are always strictly wide
    for (int k1 : {1, 2, 3, 4, 6}) {
        const SlantedMatrixSpec spec = slanted_spec(k1);
        CHECK(spec.radius_ntilde() < spec.radius_n());
        const CMat m = build_slanted(spec);
        CHECK(m.rows < m.cols);
        const int nt = spec.radius_ntilde();
        const int n = spec.radius_n();
        CHECK(m.rows == (2 * nt + 1) * (2 * nt + 1));
        CHECK(m.cols == (2 * n + 1) * (2 * n + 1));
    }
    // K1=3: 225 rows vs 289 columns
    const CMat m = build_slanted(slanted_spec(3));
    CHECK(m.rows == 225);
    CHECK(m.cols == 289);
}

TEST_CASE("build_slanted saturates the hypothesis bound entrywise") {
    const SlantedMatrixSpec spec = slanted_spec(1);
    const CMat m = build_slanted(spec);
    const int n = spec.radius_n();
    const int nt = spec.radius_ntilde();
    // spot-check the entry formula at a few (j', j)
    auto entry = [&](int ap, int bp, int a, int b) {
        const double slant =
            std::max(std::abs(spec.lambda * ap - a), std::abs(spec.lambda * bp - b));
        return spec.weight(slant) * spec.poly(std::max(std::abs(a), std::abs(b)));
    };
    for (auto [ap, bp, a, b] : {std::tuple{0, 0, 0, 0}, {1, -2, 3, 0}, {-3, 3, -4, 4}}) {
        const int row = (ap + nt) * (2 * nt + 1) + (bp + nt);
        const int col = (a + n) * (2 * n + 1) + (b + n);
        CHECK(m(row, col).real() == doctest::Approx(entry(ap, bp, a, b)).epsilon(1e-14));
        CHECK(m(row, col).imag() == 0.0);
    }
    CHECK_THROWS_AS(slanted_spec(0).validate(), ShapeMismatch);
    {
        SlantedMatrixSpec bad = slanted_spec(1);
        bad.decay_power = 3;  // needs poly_degree + 3 = 4
        CHECK_THROWS_AS(bad.validate(), ShapeMismatch);
    }
}

TEST_CASE("kernel_vector: unit norm, interior zeros, decreasing image norm") {
    double prev = 1e9;
    for (int k1 : {1, 2, 3, 4}) {
        const KernelVectorResult res = kernel_vector(slanted_spec(k1));
        CHECK(linalg::nrm2(res.x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.inner_residual < 1e-10);
        CHECK(res.norm_mx < prev);
        CHECK(res.norm_mx * res.norm_mx <= res.bound);
        prev = res.norm_mx;
    }
}

TEST_CASE("kernel_vector regression values") {
    // the canonical projected kernel vector is lane-stable to ~1e-11
    CHECK(kernel_vector(slanted_spec(1)).norm_mx ==
          doctest::Approx(0.0010885665883318704).epsilon(1e-8));
    CHECK(kernel_vector(slanted_spec(4)).norm_mx ==
          doctest::Approx(1.4951374905937459e-07).epsilon(1e-8));
}

TEST_CASE("tail_sum: decreasing for the default weight, flat at the boundary") {
    const std::vector<int> k1s{2, 4, 8, 16};
    const std::vector<double> def = tail_sum(4, 1, k1s);
    CHECK(def[0] > 0.0);
    for (size_t i = 1; i < def.size(); ++i) CHECK(def[i] < def[i - 1]);
    CHECK(def.back() * 2.0 <= def.front());

    // decay_power = poly_degree + 2 sits exactly on the hypothesis boundary
    const std::vector<double> boundary = tail_sum(3, 1, k1s);
    CHECK_FALSE(boundary.back() * 2.0 <= boundary.front());

    // K1 = 1 value is a finite truncated sum
    CHECK(std::isfinite(tail_sum(4, 1, {1})[0]));

    CHECK_THROWS_AS((void)tail_sum(2, 0, {2}), DivergentTail);
}

TEST_CASE("prototype bump: plateau and support are exact") {
    const PrototypeOp proto = build_prototype(64, 2, 4, 1.2);
    CHECK(proto.t_plateau == 13);
    CHECK(proto.t_support == 16);
    CHECK(proto.nu_plateau == 6);
    CHECK(proto.nu_support == 8);
    for (int i = 0; i < 64; ++i) {
        const int t = i <= 32 ? i : i - 64;
        if (std::abs(t) <= proto.t_plateau)
            CHECK(proto.eta1[i] == 1.0);
        else if (std::abs(t) >= proto.t_support)
            CHECK(proto.eta1[i] == 0.0);
        else {
            CHECK(proto.eta1[i] > 0.0);
            CHECK(proto.eta1[i] < 1.0);
        }
        if (std::abs(t) <= proto.nu_plateau) CHECK(proto.eta2[i] == 1.0);
        if (std::abs(t) >= proto.nu_support) CHECK(proto.eta2[i] == 0.0);
    }
    // spreading support containment in the centered cell box
    const tf::SpreadingFunction eta = prototype_spreading(proto);
    for (int k = 0; k < 64; ++k) {
        for (int l = 0; l < 64; ++l) {
            const int ks = k <= 32 ? k : k - 64;
            const int ls = l <= 32 ? l : l - 64;
            if (std::abs(ks) >= proto.t_support || std::abs(ls) >= proto.nu_support)
                CHECK(eta.eta(k, l) == cd{0.0, 0.0});
        }
    }
    CHECK_THROWS_AS((void)build_prototype(48, 24, 2, 1.2), GridTooCoarse);  // plateau < 1 sample
    CHECK_THROWS_AS((void)build_prototype(30, 4, 2, 1.2), GridTooCoarse);   // K*L does not divide P
}

TEST_CASE("prototype operator Frobenius fixture and norm identity") {
    const PrototypeOp proto = build_prototype(64, 2, 4, 1.2);
    const tf::LinOp op = prototype_operator(proto);
    CHECK(tf::hs_norm(op) == doctest::Approx(156.23059879549874).epsilon(1e-12));
    // ||kernel||_F = sqrt(P) * ||eta||
    const tf::SpreadingFunction eta = prototype_spreading(proto);
    CHECK(tf::hs_norm(op) == doctest::Approx(std::sqrt(64.0) * tf::l2_norm(eta)).epsilon(1e-12));
}

TEST_CASE("riesz family: single member, disjoint translates, pinned 9-member Gram") {
    const PrototypeOp proto = build_prototype(64, 2, 4, 1.2);

    const GramReport one = riesz_gram_check(proto, 1);
    CHECK(one.lambda_min == doctest::Approx(one.lambda_max));

    // translates to disjoint cells have a diagonal Gram: orthogonality comes
    // from the disjoint spreading supports
    {
        const tf::SpreadingFunction base = prototype_spreading(proto);
        const tf::SpreadingFunction t1 = tf::conjugate_spreading(base, 0, 32, 0, 0);
        const auto& kr = kernels::active();
        const cd cross = kr.dotc(base.eta.a.size(), base.eta.a.data(), t1.eta.a.data());
        CHECK(std::abs(cross) < 1e-14);
    }

    const GramReport nine = riesz_gram_check(proto, 9);
    CHECK(nine.lambda_min == doctest::Approx(16589.872150754141).epsilon(1e-10));
    CHECK(nine.lambda_max == doctest::Approx(32394.337751879219).epsilon(1e-10));

    // lambda_min stays bounded away from zero as the family grows
    for (int size : {4, 9, 16, 25}) {
        const GramReport rep = riesz_gram_check(proto, size);
        CHECK(rep.lambda_min > 12000.0);
        CHECK(rep.lambda_min > 0.3 * rep.lambda_max);
    }
}

TEST_CASE("empirical decay of the prototype output envelope") {
    // the image of a (modulated, translated) Gaussian under the prototype
    // operator concentrates: shell maxima decay away from the peak. Needs a
    // torus with room beyond the bump's time support (here +-32 of P=256).
    const int p = 256;
    const PrototypeOp proto = build_prototype(p, 4, 4, 1.2);
    const tf::LinOp op = prototype_operator(proto);
    const tf::Signal g(p, gaussian_window(p));
    for (auto [y, w] : {std::pair{0, 0}, {9, 17}, {30, 51}}) {
        const tf::Signal out = tf::apply(op, tf::tf_shift(g, {y, w}));
        int peak = 0;
        double peak_val = 0.0;
        for (int i = 0; i < p; ++i) {
            if (std::abs(out.samples[i]) > peak_val) {
                peak_val = std::abs(out.samples[i]);
                peak = i;
            }
        }
        auto shell_max = [&](int lo, int hi) {
            double worst = 0.0;
            for (int i = 0; i < p; ++i) {
                int d = std::abs(mod(i - peak + p / 2, p) - p / 2);
                if (d >= lo && d < hi) worst = std::max(worst, std::abs(out.samples[i]));
            }
            return worst;
        };
        CHECK(shell_max(48, 80) < shell_max(0, 48));
        CHECK(shell_max(112, p / 2 + 1) < 1e-3 * peak_val);
    }
}

TEST_CASE("gaussian frame bounds: tight full lattice, pinned subcritical fixture") {
    {
        // every time-frequency shift: tight frame with A = B = P * ||g||^2
        const GaborFrameSpec full{24, 1, 1};
        auto [a, b] = gaussian_frame_bounds(full);
        const CVec g = gaussian_window(24);
        const double expect = 24.0 * linalg::nrm2(g) * linalg::nrm2(g);
        CHECK(a == doctest::Approx(expect).epsilon(1e-12));
        CHECK(b == doctest::Approx(expect).epsilon(1e-12));
    }
    {
        // density 0.8 at P=60: pinned lower bound on A/B
        const GaborFrameSpec spec{60, 4, 12};
        CHECK(spec.density() == doctest::Approx(0.8));
        auto [a, b] = gaussian_frame_bounds(spec);
        CHECK(a == doctest::Approx(0.69120667041019956).epsilon(1e-10));
        CHECK(a / b > 0.045);
    }
    CHECK_THROWS_AS((void)gaussian_frame_bounds(GaborFrameSpec{60, 7, 6}), ShapeMismatch);
}

TEST_CASE("A_frame decreases as the lattice density rises past critical") {
    const std::pair<int, int> lattices[] = {{5, 6}, {6, 6}, {5, 10}, {6, 10}, {5, 15}};
    double prev = 1e300;
    for (auto [a_step, b_step] : lattices) {
        auto [a, b] = gaussian_frame_bounds(GaborFrameSpec{60, a_step, b_step});
        CHECK(a < prev);
        prev = a;
    }
    // subcritical densities keep a positive lower frame bound
    for (auto [a_step, b_step] : {std::pair{5, 6}, {6, 6}, {4, 12}, {5, 10}}) {
        auto [a, b] = gaussian_frame_bounds(GaborFrameSpec{60, a_step, b_step});
        CHECK(a > 1e-6 * b);
    }
}

TEST_CASE("composition guards: not overspread, lambda constraint") {
    const spark::IdentifierSequence c = pinned_identifier_l3();
    CompositionSpec spec;
    spec.P = 60;
    spec.c = c;
    spec.input_offsets = {0, 2};
    spec.cells = {{0, 0, 0}, {0, 1, 0}, {0, 2, 1}};
    CHECK_THROWS_AS((void)composition_instability(spec), PlanNotOverspread);

    spec.cells.push_back({1, 0, 1});
    spec.lambda = 1.2;  // lambda^4 > J/L = 4/3
    CHECK_THROWS_AS((void)composition_instability(spec), ShapeMismatch);
}

TEST_CASE("composition sigma_min decreases over nested sections at P=60") {
    const spark::IdentifierSequence c = pinned_identifier_l3();
    CompositionSpec spec;
    spec.P = 60;
    spec.lambda = 1.05;
    spec.c = c;
    spec.input_offsets = {0, 2};
    spec.cells = {{0, 0, 0}, {0, 1, 0}, {0, 2, 1}, {1, 0, 1}};
    spec.sections = {{0, 0}, {1, 0}, {1, 1}};
    const CompositionCurve curve = composition_instability(spec);
    REQUIRE(curve.sigma_min.size() == 3);
    CHECK(curve.section_cols == std::vector<int>{4, 12, 36});
    CHECK(curve.sigma_min[1] < curve.sigma_min[0]);
    CHECK(curve.sigma_min[2] < curve.sigma_min[1]);
}
