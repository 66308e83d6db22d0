#include "pct/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pct::kernels {

const Ops* avx2_table();  // kernels_avx2.cpp

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(_M_X64)
    static const Ops* table = []() -> const Ops* {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
            return avx2_table();
        return nullptr;
    }();
    return table;
#else
    return nullptr;
#endif
}

const Ops& active() {
    static const Ops& ops = [&]() -> const Ops& {
        const char* want = std::getenv("PCT_KERNELS");
        if (want != nullptr) {
            if (std::strcmp(want, "scalar") == 0) return scalar_ops();
            if (std::strcmp(want, "avx2") == 0 && avx2_ops() != nullptr) return *avx2_ops();
        }
        if (const Ops* a = avx2_ops()) return *a;
        return scalar_ops();
    }();
    return ops;
}

}  // namespace pct::kernels
