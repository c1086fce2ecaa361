// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "spreadid/types.hpp"

namespace spreadid::spark {

// L-periodic identifier sequence c generating the delta-train pilot.
struct IdentifierSequence {
    int L = 0;
    CVec c;

    IdentifierSequence() = default;
    IdentifierSequence(int l, CVec coeffs);
};

// Identification matrix A(c) = [A_0(c) ... A_{K-1}(c)], L rows by K*L
// columns, with block k entry (p,q) = c_{(p+k) mod L} e^{2 pi i q (p+k)/L}.
// Column j = m*L + n corresponds to grid cell (m, n).
struct IdentMatrix {
    int K = 0;
    int L = 0;
    CMat A;
};

enum class SparkMode { exhaustive, sampled };

struct SparkReport {
    int L = 0;
    SparkMode mode = SparkMode::exhaustive;
    uint64_t subsets_checked = 0;
    double min_sigma_min = 0.0;
    std::vector<int> witness;  // column indices of the worst subset
};

IdentMatrix build_A(const IdentifierSequence& c, int K);

// Single A(c) column for cell (m, n), as a length-L vector.
CVec a_column(const IdentifierSequence& c, int m, int n);

// Smallest singular value of the L x |J| submatrix with columns J.
// Positive iff the columns are linearly independent.
double subset_sigma_min(const IdentMatrix& a, const std::vector<int>& j);

// Exhaustive mode enumerates all L-subsets of the K*L columns (errors with
// BudgetExceeded when C(K*L, L) > budget); sampled mode draws `budget`
// uniform random subsets from the seeded stream. The optional sink receives
// every checked subset with its sigma_min, in enumeration order.
using SubsetSink = std::function<void(const std::vector<int>&, double)>;
SparkReport full_spark_check(const IdentifierSequence& c, int K, SparkMode mode,
                             uint64_t budget, uint64_t seed = 0, const SubsetSink& sink = {});

// Draws `trials` complex Gaussian candidates and returns the one whose spark
// report has the largest min_sigma_min. Deterministic given rng_seed.
std::pair<IdentifierSequence, SparkReport> search_identifier(int L, int K, int trials,
                                                             uint64_t rng_seed,
                                                             SparkMode mode = SparkMode::exhaustive,
                                                             uint64_t budget = 100000);

bool is_prime(int n);

// C(n, k) saturating at uint64 max.
uint64_t binomial(int n, int k);

}  // namespace spreadid::spark
