// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <cstddef>

#include "spreadid/types.hpp"

namespace spreadid::kernels {

// Low-level complex array kernels. One scalar reference implementation and
// one AVX2 implementation; the active table is picked once at startup from
// cpuid (override with SPREADID_SIMD=scalar|avx2). Both lanes are
// equivalence-tested against each other in tests/test_kernels.cpp.
struct Ops {
    const char* name;
    // y += a * x
    void (*axpy)(size_t n, cd a, const cd* x, cd* y);
    // sum conj(x[i]) * y[i]
    cd (*dotc)(size_t n, const cd* x, const cd* y);
    // sum |x[i]|^2
    double (*nrm2sq)(size_t n, const cd* x);
    // plane rotation, c real, s complex:
    //   x' =  c*x + s*y
    //   y' = -conj(s)*x + c*y
    void (*rot)(size_t n, cd* x, cd* y, double c, cd s);
    // x *= a
    void (*scal)(size_t n, cd a, cd* x);
};

const Ops& scalar_ops();
bool avx2_compiled();
bool avx2_available();    // compiled in and supported by this CPU
const Ops* avx2_ops();    // nullptr unless avx2_available()
const Ops& active();      // runtime-selected table

}  // namespace spreadid::kernels
