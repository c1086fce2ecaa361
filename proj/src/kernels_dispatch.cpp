// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#include <cstdlib>
#include <cstring>

#include "spreadid/kernels.hpp"

namespace spreadid::kernels {

#ifdef SPREADID_HAVE_AVX2_TU
bool avx2_cpu_ok();
const Ops& avx2_impl_ops();
#endif

bool avx2_compiled() {
#ifdef SPREADID_HAVE_AVX2_TU
    return true;
#else
    return false;
#endif
}

bool avx2_available() {
#ifdef SPREADID_HAVE_AVX2_TU
    return avx2_cpu_ok();
#else
    return false;
#endif
}

const Ops* avx2_ops() {
#ifdef SPREADID_HAVE_AVX2_TU
    if (avx2_cpu_ok()) return &avx2_impl_ops();
#endif
    return nullptr;
}

static const Ops* select() {
    const char* env = std::getenv("SPREADID_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (const Ops* v = avx2_ops()) return v;
    return &scalar_ops();
}

const Ops& active() {
    static const Ops* chosen = select();
    return *chosen;
}

}  // namespace spreadid::kernels
