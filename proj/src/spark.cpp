// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/spark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spreadid/errors.hpp"
#include "spreadid/linalg.hpp"
#include "spreadid/rng.hpp"

namespace spreadid::spark {

IdentifierSequence::IdentifierSequence(int l, CVec coeffs) : L(l), c(std::move(coeffs)) {
    if (L <= 0 || static_cast<int>(c.size()) != L)
        throw ShapeMismatch("IdentifierSequence: length must equal L");
    bool all_zero = true;
    for (const cd& z : c) {
        if (z != cd{0.0, 0.0}) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) throw ShapeMismatch("IdentifierSequence: c must not be identically zero");
}

CVec a_column(const IdentifierSequence& c, int m, int n) {
    const int L = c.L;
    CVec col(L);
    for (int p = 0; p < L; ++p) {
        const int pk = p + m;
        col[p] = c.c[mod(pk, L)] * std::polar(1.0, 2.0 * std::numbers::pi * n * pk / L);
    }
    return col;
}

IdentMatrix build_A(const IdentifierSequence& c, int K) {
    if (K < 1) throw ShapeMismatch("build_A: K must be >= 1");
    const int L = c.L;
    IdentMatrix m;
    m.K = K;
    m.L = L;
    m.A = CMat(L, K * L);
    for (int k = 0; k < K; ++k) {
        for (int q = 0; q < L; ++q) {
            const CVec col = a_column(c, k, q);
            std::copy(col.begin(), col.end(), m.A.col(k * L + q));
        }
    }
    return m;
}

double subset_sigma_min(const IdentMatrix& a, const std::vector<int>& j) {
    for (int idx : j) {
        if (idx < 0 || idx >= a.K * a.L) throw IndexOutOfRange("subset_sigma_min: column index");
    }
    if (j.empty()) throw IndexOutOfRange("subset_sigma_min: empty subset");
    CMat sub(a.L, static_cast<int>(j.size()));
    for (size_t t = 0; t < j.size(); ++t)
        std::copy(a.A.col(j[t]), a.A.col(j[t]) + a.L, sub.col(static_cast<int>(t)));
    return linalg::sigma_min(sub);
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    const uint64_t cap = std::numeric_limits<uint64_t>::max();
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        const uint64_t num = static_cast<uint64_t>(n - k + i);
        if (r > cap / num) return cap;  // saturate
        r = r * num / static_cast<uint64_t>(i);
    }
    return r;
}

namespace {

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
    return true;
}

}  // namespace

SparkReport full_spark_check(const IdentifierSequence& c, int K, SparkMode mode,
                             uint64_t budget, uint64_t seed, const SubsetSink& sink) {
    const int L = c.L;
    const int ncols = K * L;
    const IdentMatrix a = build_A(c, K);

    SparkReport rep;
    rep.L = L;
    rep.mode = mode;
    rep.min_sigma_min = std::numeric_limits<double>::infinity();

    auto consider = [&](const std::vector<int>& j) {
        const double s = subset_sigma_min(a, j);
        ++rep.subsets_checked;
        if (s < rep.min_sigma_min) {
            rep.min_sigma_min = s;
            rep.witness = j;
        }
        if (sink) sink(j, s);
    };

    if (mode == SparkMode::exhaustive) {
        if (binomial(ncols, L) > budget)
            throw BudgetExceeded("full_spark_check: exhaustive enumeration exceeds budget");
        std::vector<int> idx(L);
        for (int i = 0; i < L; ++i) idx[i] = i;
        do {
            consider(idx);
        } while (next_combination(idx, ncols));
    } else {
        Rng base = Rng::stream(seed, 0x5b5e);
        std::vector<int> pool(ncols);
        for (uint64_t t = 0; t < budget; ++t) {
            Rng r = base.substream(t);
            for (int i = 0; i < ncols; ++i) pool[i] = i;
            // partial Fisher-Yates, first L entries become the subset
            for (int i = 0; i < L; ++i) {
                const int j = i + static_cast<int>(r.below(ncols - i));
                std::swap(pool[i], pool[j]);
            }
            std::vector<int> subset(pool.begin(), pool.begin() + L);
            std::sort(subset.begin(), subset.end());
            consider(subset);
        }
    }
    return rep;
}

std::pair<IdentifierSequence, SparkReport> search_identifier(int L, int K, int trials,
                                                             uint64_t rng_seed, SparkMode mode,
                                                             uint64_t budget) {
    if (trials < 1) throw ShapeMismatch("search_identifier: trials must be >= 1");
    Rng base = Rng::stream(rng_seed, 0x1de4);
    IdentifierSequence best;
    SparkReport best_rep;
    double best_score = -1.0;
    for (int t = 0; t < trials; ++t) {
        Rng r = base.substream(static_cast<uint64_t>(t));
        CVec c(L);
        for (int i = 0; i < L; ++i) c[i] = r.cnormal();
        IdentifierSequence cand(L, std::move(c));
        SparkReport rep = full_spark_check(cand, K, mode, budget, rng_seed + t);
        if (rep.min_sigma_min > best_score) {
            best_score = rep.min_sigma_min;
            best = cand;
            best_rep = rep;
        }
    }
    return {best, best_rep};
}

}  // namespace spreadid::spark
