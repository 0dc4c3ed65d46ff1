#include <algorithm>
#include <limits>

#include "fhl/simd/kernels.hpp"

namespace fhl::simd {

namespace {

void apply_scalar(const Stencil5& A, const double* x, double* y, std::size_t begin, std::size_t end) {
    const std::size_t nx = A.nx;
    for (std::size_t c = begin; c < end; ++c) {
        y[c] = A.d[c] * x[c] - A.e[c] * x[c + 1] - A.e[c - 1] * x[c - 1] - A.n[c] * x[c + nx] -
               A.n[c - nx] * x[c - nx];
    }
}

void jacobi_scalar(const Stencil5& A, const double* inv_d, const double* x, const double* b,
                   double* x_out, double omega, std::size_t begin, std::size_t end) {
    const std::size_t nx = A.nx;
    for (std::size_t c = begin; c < end; ++c) {
        const double ax = A.d[c] * x[c] - A.e[c] * x[c + 1] - A.e[c - 1] * x[c - 1] -
                          A.n[c] * x[c + nx] - A.n[c - nx] * x[c - nx];
        x_out[c] = x[c] + omega * inv_d[c] * (b[c] - ax);
    }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    // Four interleaved partial sums, matching the lane layout of the AVX2 path
    // closely enough that the two differ only by final-reduction rounding.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double min_seg_dist2_scalar(double px, double py, const double* ax, const double* ay,
                            const double* bx, const double* by, std::size_t n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = bx[k] - ax[k], dy = by[k] - ay[k];
        const double wx = px - ax[k], wy = py - ay[k];
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? (wx * dx + wy * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = wx - t * dx, ey = wy - t * dy;
        best = std::min(best, ex * ex + ey * ey);
    }
    return best;
}

const Kernels kScalar{"scalar", apply_scalar, jacobi_scalar, dot_scalar, axpby_scalar,
                      min_seg_dist2_scalar};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace fhl::simd
