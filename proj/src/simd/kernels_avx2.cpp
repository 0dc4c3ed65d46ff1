#include "fhl/simd/kernels.hpp"

#if defined(FHL_HAVE_AVX2_TU)

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace fhl::simd::avx2 {

namespace {

inline __m256d stencil4(const Stencil5& A, const double* x, std::size_t c) {
    const std::size_t nx = A.nx;
    __m256d y = _mm256_mul_pd(_mm256_loadu_pd(A.d + c), _mm256_loadu_pd(x + c));
    y = _mm256_fnmadd_pd(_mm256_loadu_pd(A.e + c), _mm256_loadu_pd(x + c + 1), y);
    y = _mm256_fnmadd_pd(_mm256_loadu_pd(A.e + c - 1), _mm256_loadu_pd(x + c - 1), y);
    y = _mm256_fnmadd_pd(_mm256_loadu_pd(A.n + c), _mm256_loadu_pd(x + c + nx), y);
    y = _mm256_fnmadd_pd(_mm256_loadu_pd(A.n + c - nx), _mm256_loadu_pd(x + c - nx), y);
    return y;
}

inline double stencil1(const Stencil5& A, const double* x, std::size_t c) {
    const std::size_t nx = A.nx;
    return A.d[c] * x[c] - A.e[c] * x[c + 1] - A.e[c - 1] * x[c - 1] - A.n[c] * x[c + nx] -
           A.n[c - nx] * x[c - nx];
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    // (l0 + l1) + (l2 + l3) like the scalar reduction.
    const double a = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    const double b = _mm_cvtsd_f64(hi) + _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
    return a + b;
}

}  // namespace

void apply(const Stencil5& A, const double* x, double* y, std::size_t begin, std::size_t end) {
    std::size_t c = begin;
    for (; c + 4 <= end; c += 4) _mm256_storeu_pd(y + c, stencil4(A, x, c));
    for (; c < end; ++c) y[c] = stencil1(A, x, c);
}

void jacobi(const Stencil5& A, const double* inv_d, const double* x, const double* b,
            double* x_out, double omega, std::size_t begin, std::size_t end) {
    const __m256d w = _mm256_set1_pd(omega);
    std::size_t c = begin;
    for (; c + 4 <= end; c += 4) {
        const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(b + c), stencil4(A, x, c));
        const __m256d s = _mm256_mul_pd(w, _mm256_loadu_pd(inv_d + c));
        _mm256_storeu_pd(x_out + c, _mm256_fmadd_pd(s, r, _mm256_loadu_pd(x + c)));
    }
    for (; c < end; ++c) x_out[c] = x[c] + omega * inv_d[c] * (b[c] - stencil1(A, x, c));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    lanes[0] += tail;
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void axpby(double a, const double* x, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double min_seg_dist2(double px, double py, const double* ax, const double* ay, const double* bx,
                     const double* by, std::size_t n) {
    const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
    const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d x0 = _mm256_loadu_pd(ax + k), y0 = _mm256_loadu_pd(ay + k);
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(bx + k), x0);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(by + k), y0);
        const __m256d wx = _mm256_sub_pd(vpx, x0), wy = _mm256_sub_pd(vpy, y0);
        const __m256d len2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        const __m256d proj = _mm256_fmadd_pd(wx, dx, _mm256_mul_pd(wy, dy));
        const __m256d nz = _mm256_cmp_pd(len2, zero, _CMP_GT_OQ);
        __m256d t = _mm256_and_pd(nz, _mm256_div_pd(proj, _mm256_blendv_pd(one, len2, nz)));
        t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
        const __m256d ex = _mm256_fnmadd_pd(t, dx, wx), ey = _mm256_fnmadd_pd(t, dy, wy);
        best = _mm256_min_pd(best, _mm256_fmadd_pd(ex, ex, _mm256_mul_pd(ey, ey)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double b = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
    if (k < n) b = std::min(b, scalar_kernels().min_seg_dist2(px, py, ax + k, ay + k, bx + k, by + k, n - k));
    return b;
}

}  // namespace fhl::simd::avx2

#endif
