#include <cstdlib>
#include <cstring>

#include "fhl/simd/kernels.hpp"

namespace fhl::simd {

#if defined(FHL_HAVE_AVX2_TU)
namespace avx2 {
void apply(const Stencil5&, const double*, double*, std::size_t, std::size_t);
void jacobi(const Stencil5&, const double*, const double*, const double*, double*, double,
            std::size_t, std::size_t);
double dot(const double*, const double*, std::size_t);
void axpby(double, const double*, double, double*, std::size_t);
double min_seg_dist2(double, double, const double*, const double*, const double*, const double*,
                     std::size_t);
}  // namespace avx2
#endif

const Kernels* avx2_kernels() {
#if defined(FHL_HAVE_AVX2_TU)
    static const Kernels k{"avx2", avx2::apply, avx2::jacobi, avx2::dot, avx2::axpby,
                           avx2::min_seg_dist2};
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &k : nullptr;
#else
    return nullptr;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        const char* env = std::getenv("FHL_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        const Kernels* a = avx2_kernels();
        return a ? a : &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace fhl::simd
