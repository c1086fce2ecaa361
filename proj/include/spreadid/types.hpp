// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace spreadid {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

// Dense complex matrix, column-major. Columns are the contiguous unit the
// kernel layer operates on (Jacobi sweeps, Householder reflections, matvec).
struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<cd> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c)) {}

    cd& operator()(int r, int c) { return a[static_cast<size_t>(c) * rows + r]; }
    const cd& operator()(int r, int c) const { return a[static_cast<size_t>(c) * rows + r]; }

    cd* col(int c) { return a.data() + static_cast<size_t>(c) * rows; }
    const cd* col(int c) const { return a.data() + static_cast<size_t>(c) * rows; }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline CMat conj_transpose(const CMat& m) {
    CMat t(m.cols, m.rows);
    for (int c = 0; c < m.cols; ++c)
        for (int r = 0; r < m.rows; ++r) t(c, r) = std::conj(m(r, c));
    return t;
}

inline int mod(int x, int p) {
    int r = x % p;
    return r < 0 ? r + p : r;
}

}  // namespace spreadid
