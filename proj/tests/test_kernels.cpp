// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spreadid/kernels.hpp"
#include "spreadid/rng.hpp"

using namespace spreadid;
using kernels::Ops;

namespace {

CVec random_vec(size_t n, uint64_t seed) {
    Rng r = Rng::stream(seed, 17);
    CVec v(n);
    for (cd& z : v) z = r.cnormal();
    return v;
}

double rel_err(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// the two lanes must agree on every op up to FMA reassociation
void check_equivalent(const Ops& lhs, const Ops& rhs, size_t n, uint64_t seed) {
    const CVec x = random_vec(n, seed);
    const CVec y = random_vec(n, seed + 1);
    const cd alpha = Rng::stream(seed, 2).cnormal();

    {
        CVec y1 = y, y2 = y;
        lhs.axpy(n, alpha, x.data(), y1.data());
        rhs.axpy(n, alpha, x.data(), y2.data());
        CHECK(rel_err(y1, y2) < 1e-13);
    }
    {
        const cd d1 = lhs.dotc(n, x.data(), y.data());
        const cd d2 = rhs.dotc(n, x.data(), y.data());
        CHECK(std::abs(d1 - d2) <= 1e-12 * (1.0 + std::abs(d2)));
    }
    {
        const double n1 = lhs.nrm2sq(n, x.data());
        const double n2 = rhs.nrm2sq(n, x.data());
        CHECK(n1 == doctest::Approx(n2).epsilon(1e-12));
    }
    {
        CVec x1 = x, y1 = y, x2 = x, y2 = y;
        const double c = 0.6;
        const cd s{0.48, -0.64};  // c^2 + |s|^2 = 1
        lhs.rot(n, x1.data(), y1.data(), c, s);
        rhs.rot(n, x2.data(), y2.data(), c, s);
        CHECK(rel_err(x1, x2) < 1e-13);
        CHECK(rel_err(y1, y2) < 1e-13);
    }
    {
        CVec x1 = x, x2 = x;
        lhs.scal(n, alpha, x1.data());
        rhs.scal(n, alpha, x2.data());
        CHECK(rel_err(x1, x2) < 1e-13);
    }
}

}  // namespace

TEST_CASE("scalar kernels: axpy/dotc/nrm2sq basic identities") {
    const auto& k = kernels::scalar_ops();
    const size_t n = 33;
    const CVec x = random_vec(n, 5);
    const CVec y = random_vec(n, 6);

    // dotc(x, x) is the squared norm
    const cd xx = k.dotc(n, x.data(), x.data());
    CHECK(xx.real() == doctest::Approx(k.nrm2sq(n, x.data())));
    CHECK(std::abs(xx.imag()) < 1e-14 * xx.real());

    // axpy with alpha = 1 adds
    CVec z = y;
    k.axpy(n, cd{1.0, 0.0}, x.data(), z.data());
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(z[i] - (x[i] + y[i])) < 1e-15);

    // conjugate symmetry of dotc
    const cd xy = k.dotc(n, x.data(), y.data());
    const cd yx = k.dotc(n, y.data(), x.data());
    CHECK(std::abs(xy - std::conj(yx)) < 1e-13);
}

TEST_CASE("rot preserves norms and is the stated unitary") {
    const auto& k = kernels::scalar_ops();
    const size_t n = 17;
    CVec x = random_vec(n, 7);
    CVec y = random_vec(n, 8);
    const double before = k.nrm2sq(n, x.data()) + k.nrm2sq(n, y.data());

    const double c = 0.8;
    const cd s{0.36, 0.48};  // |s| = 0.6
    CVec x0 = x, y0 = y;
    k.rot(n, x.data(), y.data(), c, s);
    const double after = k.nrm2sq(n, x.data()) + k.nrm2sq(n, y.data());
    CHECK(after == doctest::Approx(before).epsilon(1e-13));

    for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x[i] - (c * x0[i] + s * y0[i])) < 1e-14);
        CHECK(std::abs(y[i] - (-std::conj(s) * x0[i] + c * y0[i])) < 1e-14);
    }
}

TEST_CASE("avx2 lane matches scalar lane on assorted sizes") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available on this host; lane equivalence skipped");
        return;
    }
    const Ops& simd = *kernels::avx2_ops();
    const Ops& ref = kernels::scalar_ops();
    for (size_t n : {size_t{0}, size_t{1}, size_t{2}, size_t{3}, size_t{7}, size_t{8},
                     size_t{64}, size_t{65}, size_t{201}, size_t{1024}}) {
        check_equivalent(simd, ref, n, 1000 + n);
    }
}

TEST_CASE("dispatch selects a valid table") {
    const auto& k = kernels::active();
    CHECK((std::string_view(k.name) == "scalar" || std::string_view(k.name) == "avx2"));
    const CVec x = random_vec(9, 42);
    CHECK(k.nrm2sq(9, x.data()) == doctest::Approx(kernels::scalar_ops().nrm2sq(9, x.data())));
}
