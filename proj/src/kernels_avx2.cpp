// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids
//
// AVX2/FMA lane. One __m256d holds two complex<double>. Complex products are
// formed with the usual permute + fmaddsub pattern; dotc keeps two raw
// accumulators and does the horizontal add/sub once at the end.

#include "spreadid/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace spreadid::kernels {

namespace avx2 {

static inline __m256d swap_halves(__m256d v) { return _mm256_permute_pd(v, 0x5); }

static void axpy(size_t n, cd a, const cd* x, cd* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        const __m256d t = _mm256_mul_pd(ai, swap_halves(xv));
        const __m256d prod = _mm256_fmaddsub_pd(ar, xv, t);
        _mm256_storeu_pd(reinterpret_cast<double*>(y + i), _mm256_add_pd(yv, prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

static cd dotc(size_t n, const cd* x, const cd* y) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, swap_halves(yv), acc_im);
    }
    alignas(32) double re4[4], im4[4];
    _mm256_store_pd(re4, acc_re);
    _mm256_store_pd(im4, acc_im);
    double re = re4[0] + re4[1] + re4[2] + re4[3];
    double im = im4[0] - im4[1] + im4[2] - im4[3];
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

static double nrm2sq(size_t n, const cd* x) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    alignas(32) double s4[4];
    _mm256_store_pd(s4, acc);
    double s = s4[0] + s4[1] + s4[2] + s4[3];
    for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

static void rot(size_t n, cd* x, cd* y, double c, cd s) {
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    const __m256d msr = _mm256_set1_pd(-s.real());
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        // s*y and -conj(s)*x
        const __m256d sy = _mm256_fmaddsub_pd(sr, yv, _mm256_mul_pd(si, swap_halves(yv)));
        const __m256d msx = _mm256_fmaddsub_pd(msr, xv, _mm256_mul_pd(si, swap_halves(xv)));
        _mm256_storeu_pd(reinterpret_cast<double*>(x + i), _mm256_fmadd_pd(cv, xv, sy));
        _mm256_storeu_pd(reinterpret_cast<double*>(y + i), _mm256_fmadd_pd(cv, yv, msx));
    }
    const cd ms = -std::conj(s);
    for (; i < n; ++i) {
        const cd xi = x[i];
        const cd yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = ms * xi + c * yi;
    }
}

static void scal(size_t n, cd a, cd* x) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d t = _mm256_mul_pd(ai, swap_halves(xv));
        _mm256_storeu_pd(reinterpret_cast<double*>(x + i), _mm256_fmaddsub_pd(ar, xv, t));
    }
    for (; i < n; ++i) x[i] *= a;
}

}  // namespace avx2

bool avx2_cpu_ok() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& avx2_impl_ops() {
    static const Ops ops{"avx2", avx2::axpy, avx2::dotc, avx2::nrm2sq,
                         avx2::rot, avx2::scal};
    return ops;
}

}  // namespace spreadid::kernels

#endif  // x86_64
