#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "fhl/simd/kernels.hpp"

namespace fhl::heat::detail {

/// Operator m + c k on a padded row-major grid: m is the (diagonal) mass,
/// k a symmetric 5-point stiffness given by its diagonal kd and the east and
/// north couplings ke, kn. Inactive cells have m = kd = 0.
struct GridOperator {
    std::size_t nx = 0, ny = 0;
    std::vector<double> m, kd, ke, kn;
    std::vector<double> d, e, n, inv_d;
    /// Per row, [begin, end) covering every active cell of the row.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t active = 0;

    void finalize_spans();
    void set_scale(double c, double stiffness_factor = 1.0);
    simd::Stencil5 stencil() const { return {d.data(), e.data(), n.data(), nx}; }

    void apply(const simd::Kernels& K, const double* x, double* y) const;
    double dot(const simd::Kernels& K, const double* x, const double* y) const;
    /// y = a x + b y over the spans.
    void axpby(const simd::Kernels& K, double a, const double* x, double b, double* y) const;
};

/// Aggregation multigrid V-cycle: 2x2 piecewise-constant aggregates, coarse
/// stiffness halved relative to Galerkin, damped Jacobi smoothing, dense
/// Cholesky on the coarsest level. Symmetric, so usable inside PCG.
class Multigrid {
public:
    Multigrid(const GridOperator& fine, const simd::Kernels& K, std::size_t coarsest = 400);
    ~Multigrid();

    /// Rebuild all level operators for the scale c of the fine operator.
    void set_scale(double c);
    /// x = B b, one V-cycle from a zero guess.
    void apply(const double* b, double* x);
    std::size_t levels() const;

    int smoothing_steps = 2;
    double omega = 0.7;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fhl::heat::detail
