// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include "spreadid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "spreadid/errors.hpp"
#include "spreadid/types.hpp"

namespace spreadid::geom {

RectUnion::RectUnion(std::vector<Rect> r) : rects(std::move(r)) {
    for (const Rect& q : rects) {
        if (!std::isfinite(q.t0) || !std::isfinite(q.t1) || !std::isfinite(q.nu0) ||
            !std::isfinite(q.nu1))
            throw UnboundedInput("RectUnion: endpoints must be finite");
        if (!(q.t1 > q.t0) || !(q.nu1 > q.nu0))
            throw ShapeMismatch("RectUnion: rectangles must be nonempty");
    }
}

double measure(const GridSupport& s) {
    return static_cast<double>(s.cells.size()) / static_cast<double>(s.L);
}

double area(const RectUnion& s) {
    if (s.rects.empty()) return 0.0;
    // coordinate compression; exact for rectangle unions
    std::vector<double> xs, ys;
    for (const Rect& r : s.rects) {
        xs.push_back(r.t0);
        xs.push_back(r.t1);
        ys.push_back(r.nu0);
        ys.push_back(r.nu1);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    double total = 0.0;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        for (size_t j = 0; j + 1 < ys.size(); ++j) {
            const double cx = 0.5 * (xs[i] + xs[i + 1]);
            const double cy = 0.5 * (ys[j] + ys[j + 1]);
            for (const Rect& r : s.rects) {
                if (cx > r.t0 && cx < r.t1 && cy > r.nu0 && cy < r.nu1) {
                    total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
                    break;
                }
            }
        }
    }
    return total;
}

GridSupport outer_cover(const RectUnion& s, int K, int L) {
    if (K < 1 || L < 1) throw ShapeMismatch("outer_cover: K, L must be >= 1");
    GridSupport out(K, L);
    const double w = 1.0 / K;       // cell width in time
    const double h = double(K) / L; // cell height in frequency
    for (const Rect& r : s.rects) {
        const int m_lo = static_cast<int>(std::floor(r.t0 / w)) - 1;
        const int m_hi = static_cast<int>(std::ceil(r.t1 / w)) + 1;
        const int n_lo = static_cast<int>(std::floor(r.nu0 / h)) - 1;
        const int n_hi = static_cast<int>(std::ceil(r.nu1 / h)) + 1;
        for (int m = m_lo; m <= m_hi; ++m) {
            if (!(r.t1 > m * w && r.t0 < (m + 1) * w)) continue;  // open-interior test
            for (int n = n_lo; n <= n_hi; ++n) {
                if (!(r.nu1 > n * h && r.nu0 < (n + 1) * h)) continue;
                out.cells.insert({mod(m, K), mod(n, L)});
            }
        }
    }
    return out;
}

std::vector<int> primes_up_to(int n) {
    std::vector<int> out;
    for (int p = 2; p <= n; ++p) {
        bool prime = true;
        for (int d = 2; d * d <= p; ++d) {
            if (p % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime) out.push_back(p);
    }
    return out;
}

CoverResult best_cover(const std::vector<RectUnion>& s_list, int K_max, int L_max, int M, int N) {
    if (static_cast<int>(s_list.size()) != M * N)
        throw ShapeMismatch("best_cover: need M*N rectangle unions");
    // precondition: each row's total area must already be < 1
    for (int m = 0; m < M; ++m) {
        double row_area = 0.0;
        for (int n = 0; n < N; ++n) row_area += area(s_list[m * N + n]);
        if (!(row_area < 1.0))
            throw NoCoverFound("best_cover: row " + std::to_string(m) +
                               " has total area >= 1");
    }

    for (int L : primes_up_to(L_max)) {
        for (int K = 1; K <= K_max; ++K) {
            std::vector<GridSupport> covers;
            covers.reserve(s_list.size());
            for (const RectUnion& s : s_list) covers.push_back(outer_cover(s, K, L));
            bool ok = true;
            for (int m = 0; m < M && ok; ++m) {
                double row = 0.0;
                for (int n = 0; n < N; ++n) row += measure(covers[m * N + n]);
                ok = row < 1.0;
            }
            if (ok) return {K, L, std::move(covers)};
        }
    }
    throw NoCoverFound("best_cover: no (K, L) within bounds keeps all row sums below 1");
}

GridSupport shift_freq(const GridSupport& s, int offset) {
    GridSupport out(s.K, s.L);
    for (const Cell& c : s.cells) out.cells.insert({c.first, mod(c.second + offset, s.L)});
    return out;
}

namespace {

bool offsets_work(const std::vector<GridSupport>& supports, int M, int N,
                  const std::vector<int>& offsets, std::vector<GridSupport>* merged_out) {
    const int K = supports[0].K;
    const int L = supports[0].L;
    std::vector<GridSupport> merged;
    for (int m = 0; m < M; ++m) {
        GridSupport row(K, L);
        size_t expected = 0;
        for (int n = 0; n < N; ++n) {
            const GridSupport shifted = shift_freq(supports[m * N + n], offsets[n]);
            expected += shifted.cells.size();
            row.cells.insert(shifted.cells.begin(), shifted.cells.end());
        }
        if (row.cells.size() != expected) return false;  // collision
        merged.push_back(std::move(row));
    }
    if (merged_out != nullptr) *merged_out = std::move(merged);
    return true;
}

}  // namespace

MimoSupportPlan pack_offsets(const std::vector<GridSupport>& supports, int M, int N) {
    if (static_cast<int>(supports.size()) != M * N || M < 1 || N < 1)
        throw ShapeMismatch("pack_offsets: need M*N supports");
    const int K = supports[0].K;
    const int L = supports[0].L;
    for (const GridSupport& s : supports) {
        if (s.K != K || s.L != L) throw GridMismatch("pack_offsets: supports must share (K, L)");
    }

    MimoSupportPlan plan;
    plan.M = M;
    plan.N = N;
    plan.K = K;
    plan.L = L;
    plan.supports = supports;

    // cumulative-extent first: stack inputs by the global frequency extent
    int extent = 0;
    for (const GridSupport& s : supports)
        for (const Cell& c : s.cells) extent = std::max(extent, c.second + 1);
    std::vector<int> offsets(N, 0);
    for (int n = 1; n < N; ++n) offsets[n] = mod(n * extent, L);
    if (offsets_work(supports, M, N, offsets, &plan.merged)) {
        plan.offsets = std::move(offsets);
        return plan;
    }

    if (N == 1) throw PackingFailed("pack_offsets: single input plan has internal collisions");
    if (N > 3)
        throw PackingFailed("pack_offsets: cumulative offsets failed and exhaustive search "
                            "is limited to N <= 3");

    std::vector<int> trial(N, 0);
    if (N == 2) {
        for (int s2 = 0; s2 < L; ++s2) {
            trial[1] = s2;
            if (offsets_work(supports, M, N, trial, &plan.merged)) {
                plan.offsets = trial;
                return plan;
            }
        }
    } else {  // N == 3
        for (int s2 = 0; s2 < L; ++s2) {
            for (int s3 = 0; s3 < L; ++s3) {
                trial[1] = s2;
                trial[2] = s3;
                if (offsets_work(supports, M, N, trial, &plan.merged)) {
                    plan.offsets = trial;
                    return plan;
                }
            }
        }
    }
    throw PackingFailed("pack_offsets: no offset assignment exists on the torus");
}

void write_text(std::ostream& os, const RectUnion& s) {
    os.precision(17);
    for (const Rect& r : s.rects)
        os << r.t0 << ' ' << r.t1 << ' ' << r.nu0 << ' ' << r.nu1 << '\n';
}

RectUnion read_rect_union(std::istream& is) {
    std::vector<Rect> rects;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Rect r;
        if (!(ls >> r.t0 >> r.t1 >> r.nu0 >> r.nu1))
            throw ShapeMismatch("read_rect_union: expected four reals per line");
        rects.push_back(r);
    }
    return RectUnion(std::move(rects));
}

void write_text(std::ostream& os, const GridSupport& s) {
    os << s.K << ' ' << s.L << '\n';
    for (const Cell& c : s.cells) os << c.first << ' ' << c.second << '\n';
}

GridSupport read_grid_support(std::istream& is) {
    int K = 0, L = 0;
    if (!(is >> K >> L)) throw ShapeMismatch("read_grid_support: missing K L header");
    GridSupport s(K, L);
    int m = 0, n = 0;
    while (is >> m >> n) s.cells.insert({mod(m, K), mod(n, L)});
    return s;
}

}  // namespace spreadid::geom
