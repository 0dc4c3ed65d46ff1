#pragma once

#include <cstddef>

namespace fhl::simd {

/// Symmetric 5-point operator on an nx-wide row-major grid:
///   y[c] = d[c] x[c] - e[c] x[c+1] - e[c-1] x[c-1] - n[c] x[c+nx] - n[c-nx] x[c-nx]
/// where e[c] couples c to its east neighbour and n[c] to its north one.
/// Ranges [begin, end) must keep every neighbour in bounds.
struct Stencil5 {
    const double* d;
    const double* e;
    const double* n;
    std::size_t nx;
};

struct Kernels {
    const char* name;
    void (*apply)(const Stencil5& A, const double* x, double* y, std::size_t begin, std::size_t end);
    /// x_out = x + omega * inv_d * (b - A x); inv_d is 0 where the cell is inactive.
    void (*jacobi)(const Stencil5& A, const double* inv_d, const double* x, const double* b,
                   double* x_out, double omega, std::size_t begin, std::size_t end);
    double (*dot)(const double* x, const double* y, std::size_t n);
    /// y = a x + b y
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    /// Minimum squared distance from (px, py) to segments (ax,ay)-(bx,by), SoA.
    double (*min_seg_dist2)(double px, double py, const double* ax, const double* ay,
                            const double* bx, const double* by, std::size_t n);
};

const Kernels& scalar_kernels();
/// nullptr when the CPU (or the build) lacks AVX2+FMA.
const Kernels* avx2_kernels();
/// AVX2 when available unless FHL_SIMD=scalar is set.
const Kernels& active_kernels();

}  // namespace fhl::simd
