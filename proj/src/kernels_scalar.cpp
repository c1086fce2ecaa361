// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/kernels.hpp"

namespace spreadid::kernels {

namespace scalar {

static void axpy(size_t n, cd a, const cd* x, cd* y) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

static cd dotc(size_t n, const cd* x, const cd* y) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

static double nrm2sq(size_t n, const cd* x) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return s;
}

static void rot(size_t n, cd* x, cd* y, double c, cd s) {
    const cd ms = -std::conj(s);
    for (size_t i = 0; i < n; ++i) {
        const cd xi = x[i];
        const cd yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = ms * xi + c * yi;
    }
}

static void scal(size_t n, cd a, cd* x) {
    for (size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace scalar

const Ops& scalar_ops() {
    static const Ops ops{"scalar", scalar::axpy, scalar::dotc, scalar::nrm2sq,
                         scalar::rot, scalar::scal};
    return ops;
}

}  // namespace spreadid::kernels
