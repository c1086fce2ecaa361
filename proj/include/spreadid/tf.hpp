// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include "spreadid/types.hpp"

namespace spreadid::tf {

// Discrete time-frequency calculus on Z_P.
//
// Conventions (fixed once, tested exhaustively in tests/test_tf.cpp):
//   translate:  (T_k f)[p] = f[(p - k) mod P]
//   modulate:   (M_l f)[p] = exp(2*pi*i*l*p/P) * f[p]
//   tf shift:   pi(k,l) = T_k M_l          (translate AFTER modulate)
//   spreading:  H = sum_{k,l} eta[k,l] * pi(k,l), i.e. eta holds the unique
//               expansion coefficients of H in the basis {pi(k,l)}; the
//               matrices pi(k,l)/sqrt(P) are orthonormal, so
//               ||eta||_2 * sqrt(P) = ||kernel||_F.
//   stft:       V[k,l] = <g, pi(k,l) f> = sum_x g[x] e^{-2pi i l(x-k)/P} conj(f[x-k])
//               which makes the pairing <Hf, g> = <eta, stft(g,f)> exact with
//               constant 1.

struct Signal {
    int period = 0;
    CVec samples;

    Signal() = default;
    Signal(int p, CVec s);
    static Signal zeros(int p) { return Signal(p, CVec(p, cd{0.0, 0.0})); }
    static Signal delta(int p, int at = 0);
};

struct TFShift {
    int k = 0;  // time shift
    int l = 0;  // frequency shift
};

struct LinOp {
    int period = 0;
    CMat kernel;  // kernel(x, y); action (Hf)[x] = sum_y kernel(x,y) f[y]

    LinOp() = default;
    LinOp(int p, CMat k);
    static LinOp identity(int p) { return LinOp(p, CMat::identity(p)); }
};

struct SpreadingFunction {
    int period = 0;
    CMat eta;  // eta(k, l), time shift k, frequency shift l

    SpreadingFunction() = default;
    SpreadingFunction(int p, CMat e);
};

Signal translate(const Signal& x, int k);
Signal modulate(const Signal& x, int l);
Signal tf_shift(const Signal& x, TFShift s);
LinOp tf_shift_op(int period, TFShift s);  // matrix of pi(k,l)

Signal apply(const LinOp& h, const Signal& f);

SpreadingFunction spreading_of(const LinOp& h);
LinOp operator_from_spreading(const SpreadingFunction& eta);

CMat stft(const Signal& g, const Signal& f);

// Spreading function of M_omega T_{p-r} H T_r M_{xi-omega}, computed by the
// closed-form discrete conjugation law
//   eta'[k,l] = e^{-2pi i r xi / P} e^{2pi i (omega k + r l)/P} eta[k-p, l-xi].
// The phase convention is pinned by the dual-path oracle test against direct
// spreading extraction of the conjugated matrix.
SpreadingFunction conjugate_spreading(const SpreadingFunction& eta, int omega, int p, int r, int xi);

double l2_norm(const Signal& x);
double l2_norm(const SpreadingFunction& eta);
double hs_norm(const LinOp& h);  // Frobenius norm of the kernel

}  // namespace spreadid::tf
