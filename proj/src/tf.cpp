// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/tf.hpp"

#include <cmath>
#include <numbers>

#include "spreadid/errors.hpp"
#include "spreadid/kernels.hpp"

namespace spreadid::tf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cd unit_phase(double turns) { return std::polar(1.0, two_pi * turns); }

void check_finite(const CVec& v) {
    for (const cd& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw UnboundedInput("non-finite sample");
    }
}

}  // namespace

Signal::Signal(int p, CVec s) : period(p), samples(std::move(s)) {
    if (period <= 0 || static_cast<int>(samples.size()) != period)
        throw ShapeMismatch("Signal: samples length must equal period");
    check_finite(samples);
}

Signal Signal::delta(int p, int at) {
    Signal s = zeros(p);
    s.samples[mod(at, p)] = 1.0;
    return s;
}

LinOp::LinOp(int p, CMat k) : period(p), kernel(std::move(k)) {
    if (period <= 0 || kernel.rows != period || kernel.cols != period)
        throw ShapeMismatch("LinOp: kernel must be period x period");
    check_finite(kernel.a);
}

SpreadingFunction::SpreadingFunction(int p, CMat e) : period(p), eta(std::move(e)) {
    if (period <= 0 || eta.rows != period || eta.cols != period)
        throw ShapeMismatch("SpreadingFunction: eta must be period x period");
    check_finite(eta.a);
}

Signal translate(const Signal& x, int k) {
    const int p = x.period;
    CVec out(p);
    for (int i = 0; i < p; ++i) out[i] = x.samples[mod(i - k, p)];
    return Signal(p, std::move(out));
}

Signal modulate(const Signal& x, int l) {
    const int p = x.period;
    CVec out(p);
    for (int i = 0; i < p; ++i) out[i] = unit_phase(double(l) * i / p) * x.samples[i];
    return Signal(p, std::move(out));
}

Signal tf_shift(const Signal& x, TFShift s) { return translate(modulate(x, s.l), s.k); }

LinOp tf_shift_op(int period, TFShift s) {
    CMat m(period, period);
    for (int x = 0; x < period; ++x) {
        const int y = mod(x - s.k, period);
        m(x, y) = unit_phase(double(s.l) * y / period);
    }
    return LinOp(period, std::move(m));
}

Signal apply(const LinOp& h, const Signal& f) {
    if (h.period != f.period) throw ShapeMismatch("apply: period mismatch");
    const int p = h.period;
    CVec y(p, cd{0.0, 0.0});
    const auto& k = kernels::active();
    // kernel is column-major: accumulate columns scaled by f[y]
    for (int c = 0; c < p; ++c) k.axpy(p, f.samples[c], h.kernel.col(c), y.data());
    return Signal(p, std::move(y));
}

SpreadingFunction spreading_of(const LinOp& h) {
    const int p = h.period;
    CMat eta(p, p);
    for (int k = 0; k < p; ++k) {
        for (int l = 0; l < p; ++l) {
            cd acc{0.0, 0.0};
            for (int x = 0; x < p; ++x) {
                const int y = mod(x - k, p);
                acc += h.kernel(x, y) * unit_phase(-double(l) * y / p);
            }
            eta(k, l) = acc / double(p);
        }
    }
    return SpreadingFunction(p, std::move(eta));
}

LinOp operator_from_spreading(const SpreadingFunction& s) {
    const int p = s.period;
    CMat kern(p, p);
    for (int x = 0; x < p; ++x) {
        for (int y = 0; y < p; ++y) {
            const int k = mod(x - y, p);
            cd acc{0.0, 0.0};
            for (int l = 0; l < p; ++l) acc += s.eta(k, l) * unit_phase(double(l) * y / p);
            kern(x, y) = acc;
        }
    }
    return LinOp(p, std::move(kern));
}

CMat stft(const Signal& g, const Signal& f) {
    if (g.period != f.period) throw ShapeMismatch("stft: period mismatch");
    const int p = g.period;
    CMat v(p, p);
    for (int k = 0; k < p; ++k) {
        for (int l = 0; l < p; ++l) {
            cd acc{0.0, 0.0};
            for (int x = 0; x < p; ++x) {
                const int xs = mod(x - k, p);
                acc += g.samples[x] * unit_phase(-double(l) * xs / p) * std::conj(f.samples[xs]);
            }
            v(k, l) = acc;
        }
    }
    return v;
}

SpreadingFunction conjugate_spreading(const SpreadingFunction& s, int omega, int p, int r, int xi) {
    const int n = s.period;
    const cd global = unit_phase(-double(r) * double(xi) / n);
    CMat out(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            const cd cell = unit_phase((double(omega) * k + double(r) * l) / n);
            out(k, l) = global * cell * s.eta(mod(k - p, n), mod(l - xi, n));
        }
    }
    return SpreadingFunction(n, std::move(out));
}

double l2_norm(const Signal& x) {
    return std::sqrt(kernels::active().nrm2sq(x.samples.size(), x.samples.data()));
}

double l2_norm(const SpreadingFunction& s) {
    return std::sqrt(kernels::active().nrm2sq(s.eta.a.size(), s.eta.a.data()));
}

double hs_norm(const LinOp& h) {
    return std::sqrt(kernels::active().nrm2sq(h.kernel.a.size(), h.kernel.a.data()));
}

}  // namespace spreadid::tf
