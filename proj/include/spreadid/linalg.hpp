// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <vector>

#include "spreadid/types.hpp"

namespace spreadid::linalg {

// Full SVD A = U * diag(sigma) * V^H via one-sided Jacobi on columns.
// sigma has A.cols entries sorted descending; for a wide matrix the entries
// past rank(A) are the (near-zero) norms of the deflated columns. Columns of
// U with sigma == 0 are left zero. V is A.cols x A.cols unitary.
struct Svd {
    CMat U;
    CMat V;
    std::vector<double> sigma;
    double sigma_min() const { return sigma.empty() ? 0.0 : sigma.back(); }
    double sigma_max() const { return sigma.empty() ? 0.0 : sigma.front(); }
};

Svd jacobi_svd(const CMat& a);

// Smallest/largest singular value only (still runs the full Jacobi sweep).
double sigma_min(const CMat& a);

// Orthonormal basis of the numerical kernel of a, one column per kernel
// direction, computed from a column-pivoted Householder QR of a^H. The
// numerical rank is the number of |r_jj| above rel_tol * |r_00|.
struct KernelBasis {
    CMat basis;  // a.cols x (a.cols - rank)
    int rank;
};
KernelBasis kernel_basis(const CMat& a, double rel_tol = 1e-12);

// Minimum-norm least squares through the SVD, dropping singular values below
// rel_tol * sigma_max.
CVec lstsq(const Svd& svd, const CVec& b, double rel_tol = 1e-10);

CVec matvec(const CMat& a, const CVec& x);
CMat matmul(const CMat& a, const CMat& b);
CMat gram(const CMat& a);  // a^H a
double fro_norm(const CMat& a);
double nrm2(const CVec& x);

}  // namespace spreadid::linalg
