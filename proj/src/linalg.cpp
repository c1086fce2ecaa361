// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spreadid/errors.hpp"
#include "spreadid/kernels.hpp"

namespace spreadid::linalg {

using kernels::active;

CVec matvec(const CMat& a, const CVec& x) {
    if (static_cast<int>(x.size()) != a.cols) throw ShapeMismatch("matvec: size mismatch");
    CVec y(a.rows, cd{0.0, 0.0});
    const auto& k = active();
    for (int j = 0; j < a.cols; ++j) k.axpy(a.rows, x[j], a.col(j), y.data());
    return y;
}

CMat matmul(const CMat& a, const CMat& b) {
    if (a.cols != b.rows) throw ShapeMismatch("matmul: size mismatch");
    CMat c(a.rows, b.cols);
    const auto& k = active();
    for (int j = 0; j < b.cols; ++j)
        for (int i = 0; i < b.rows; ++i) k.axpy(a.rows, b(i, j), a.col(i), c.col(j));
    return c;
}

CMat gram(const CMat& a) {
    CMat g(a.cols, a.cols);
    const auto& k = active();
    for (int j = 0; j < a.cols; ++j) {
        for (int i = 0; i <= j; ++i) {
            cd v = k.dotc(a.rows, a.col(i), a.col(j));
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    }
    return g;
}

double fro_norm(const CMat& a) {
    return std::sqrt(active().nrm2sq(a.a.size(), a.a.data()));
}

double nrm2(const CVec& x) { return std::sqrt(active().nrm2sq(x.size(), x.data())); }

Svd jacobi_svd(const CMat& a) {
    const int m = a.rows;
    const int n = a.cols;
    const auto& k = active();

    CMat w = a;                     // columns get orthogonalized in place
    CMat v = CMat::identity(n);

    double max_col = 0.0;
    for (int j = 0; j < n; ++j) max_col = std::max(max_col, k.nrm2sq(m, w.col(j)));
    max_col = std::sqrt(max_col);

    if (max_col > 0.0) {
        const double negligible = 1e-18 * max_col;   // columns below this no longer interact
        const double conv_tol = 1e-15;
        const int max_sweeps = 64;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double worst = 0.0;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double np = std::sqrt(k.nrm2sq(m, w.col(p)));
                    const double nq = std::sqrt(k.nrm2sq(m, w.col(q)));
                    if (np <= negligible && nq <= negligible) continue;
                    if (np == 0.0 || nq == 0.0) continue;
                    const cd g = k.dotc(m, w.col(p), w.col(q));
                    const double gabs = std::abs(g);
                    if (gabs == 0.0) continue;
                    const double app = np * np;
                    const double aqq = nq * nq;
                    const double rel = (gabs / np) / nq;
                    worst = std::max(worst, rel);
                    if (rel <= conv_tol) continue;
                    const double tau = (aqq - app) / (2.0 * gabs);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double sr = t * c;
                    const cd s = -sr * std::conj(g / gabs);
                    k.rot(m, w.col(p), w.col(q), c, s);
                    k.rot(n, v.col(p), v.col(q), c, s);
                }
            }
            if (worst <= conv_tol) break;
        }
    }

    std::vector<double> sig(n);
    for (int j = 0; j < n; ++j) sig[j] = std::sqrt(k.nrm2sq(m, w.col(j)));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return sig[i] > sig[j]; });

    Svd out;
    out.U = CMat(m, n);
    out.V = CMat(n, n);
    out.sigma.resize(n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.sigma[j] = sig[src];
        std::copy(v.col(src), v.col(src) + n, out.V.col(j));
        if (sig[src] > 0.0) {
            std::copy(w.col(src), w.col(src) + m, out.U.col(j));
            k.scal(m, cd{1.0 / sig[src], 0.0}, out.U.col(j));
        }
    }
    return out;
}

double sigma_min(const CMat& a) { return jacobi_svd(a).sigma_min(); }

KernelBasis kernel_basis(const CMat& a, double rel_tol) {
    const auto& k = active();
    CMat b = conj_transpose(a);     // kernel of a == orthogonal complement of col span of b
    const int rows = b.rows;
    const int cols = b.cols;
    const int steps = std::min(rows, cols);

    std::vector<double> beta(steps, 0.0);
    std::vector<double> rdiag(steps, 0.0);
    int factored = 0;

    for (int j = 0; j < steps; ++j) {
        // column pivot on trailing norms
        int piv = j;
        double best = -1.0;
        for (int c = j; c < cols; ++c) {
            const double nn = k.nrm2sq(rows - j, &b(j, c));
            if (nn > best) {
                best = nn;
                piv = c;
            }
        }
        if (piv != j) {
            for (int r = 0; r < rows; ++r) std::swap(b(r, j), b(r, piv));
        }
        const double nx = std::sqrt(std::max(best, 0.0));
        if (nx == 0.0) break;

        const cd x0 = b(j, j);
        const cd phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cd{1.0, 0.0};
        const cd alpha = -phase * nx;
        b(j, j) = x0 - alpha;
        const double vn2 = k.nrm2sq(rows - j, &b(j, j));
        beta[j] = vn2 > 0.0 ? 2.0 / vn2 : 0.0;
        rdiag[j] = std::abs(alpha);
        for (int c = j + 1; c < cols; ++c) {
            const cd wv = k.dotc(rows - j, &b(j, j), &b(j, c));
            k.axpy(rows - j, -beta[j] * wv, &b(j, j), &b(j, c));
        }
        factored = j + 1;
    }

    int rank = 0;
    if (factored > 0) {
        const double cut = rel_tol * rdiag[0];
        while (rank < factored && rdiag[rank] > cut) ++rank;
    }

    KernelBasis out;
    out.rank = rank;
    const int null_dim = rows - rank;
    out.basis = CMat(rows, null_dim);
    // kernel columns are Q e_t for t = rank..rows-1; apply reflectors last-first
    for (int t = 0; t < null_dim; ++t) {
        cd* q = out.basis.col(t);
        q[rank + t] = 1.0;
        for (int j = std::min(factored, rank) - 1; j >= 0; --j) {
            if (beta[j] == 0.0) continue;
            const cd wv = k.dotc(rows - j, &b(j, j), q + j);
            k.axpy(rows - j, -beta[j] * wv, &b(j, j), q + j);
        }
    }
    return out;
}

CVec lstsq(const Svd& svd, const CVec& b, double rel_tol) {
    const int m = svd.U.rows;
    const int n = svd.V.rows;
    if (static_cast<int>(b.size()) != m) throw ShapeMismatch("lstsq: rhs size");
    const auto& k = active();
    const double cut = rel_tol * svd.sigma_max();
    CVec x(n, cd{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        if (svd.sigma[j] <= cut || svd.sigma[j] == 0.0) continue;
        const cd c = k.dotc(m, svd.U.col(j), b.data()) / svd.sigma[j];
        k.axpy(n, c, svd.V.col(j), x.data());
    }
    return x;
}

}  // namespace spreadid::linalg
