// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

namespace spreadid::geom {

// Axis-aligned rectangle [t0,t1] x [nu0,nu1] in the time-frequency plane.
struct Rect {
    double t0 = 0.0, t1 = 0.0, nu0 = 0.0, nu1 = 0.0;
};

// Finite union of rectangles; the implemented subclass of Jordan domains.
struct RectUnion {
    std::vector<Rect> rects;

    RectUnion() = default;
    explicit RectUnion(std::vector<Rect> r);
};

using Cell = std::pair<int, int>;  // (m, n), m in Z_K, n in Z_L

// Union of grid cells; cell (m,n) covers [m/K,(m+1)/K] x [nK/L,(n+1)K/L],
// so each cell has area 1/L and the full torus has measure K.
struct GridSupport {
    int K = 0;
    int L = 0;
    std::set<Cell> cells;

    GridSupport() = default;
    GridSupport(int k, int l) : K(k), L(l) {}
};

double measure(const GridSupport& s);

// Exact area of the union (overlaps counted once).
double area(const RectUnion& s);

// Smallest grid support containing s: a cell is included iff its open
// interior intersects s (boundary-only contact is excluded). Cell indices
// wrap modulo (K, L).
GridSupport outer_cover(const RectUnion& s, int K, int L);

struct MimoSupportPlan {
    int M = 0, N = 0, K = 0, L = 0;
    std::vector<GridSupport> supports;  // M*N entries, index m*N + n
    std::vector<int> offsets;           // frequency offset s_n per input, s_0 = 0
    std::vector<GridSupport> merged;    // per-row union of the shifted supports

    const GridSupport& support(int m, int n) const { return supports[m * N + n]; }
};

struct CoverResult {
    int K = 0, L = 0;
    std::vector<GridSupport> covers;  // M*N entries
};

// Searches primes L <= L_max (ascending) and K = 1..K_max (ascending) for the
// first grid whose per-row cover measures sum below 1. The (L, K) ordering is
// the deterministic tie-break.
CoverResult best_cover(const std::vector<RectUnion>& s_list, int K_max, int L_max, int M, int N);

// Finds frequency offsets making the per-row shifted supports pairwise
// disjoint on the torus: cumulative-extent offsets first, exhaustive search
// over Z_L^(N-1) as fallback for N <= 3.
MimoSupportPlan pack_offsets(const std::vector<GridSupport>& supports, int M, int N);

GridSupport shift_freq(const GridSupport& s, int offset);

std::vector<int> primes_up_to(int n);

// text formats: rectangles are four reals per line (t0 t1 nu0 nu1);
// grid supports are a "K L" header plus one "m n" line per cell.
void write_text(std::ostream& os, const RectUnion& s);
RectUnion read_rect_union(std::istream& is);
void write_text(std::ostream& os, const GridSupport& s);
GridSupport read_grid_support(std::istream& is);

}  // namespace spreadid::geom
