#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhl/geometry.hpp"
#include "fhl/series.hpp"
#include "fhl/zeta.hpp"

namespace fhl::heat {

using geometry::GridDomain;
using geometry::Polyline;

struct SolverOptions {
    /// Relative CG residual ||b - Ax|| / ||b||.
    double cg_tol = 1e-10;
    int max_cg_iterations = 500;
    /// Time steps satisfy dt <= max_step_ratio * t_old.
    double max_step_ratio = 0.0367;
    /// Steps are also cut so dt^2/2 |E''| stays below this fraction of the area.
    double local_error_tol = 1e-4;
    /// Integration starts at t_grid.front() * start_fraction.
    double start_fraction = 1e-3;
    bool multigrid = true;
    /// Print a line per output time to stderr.
    bool progress = false;
};

struct SchemeInfo {
    std::string scheme = "backward-euler/5-point/cut-cell";
    std::string preconditioner;
    std::string kernels;
    std::size_t time_steps = 0;
    std::size_t cg_iterations = 0;
    int max_cg_iterations_per_step = 0;
    double cg_tol = 0.0;
    double max_step_ratio = 0.0;
    double local_error_tol = 0.0;
    /// Largest dt^2/2 |E''| estimate over the accepted steps, relative to area.
    double max_local_error = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double wall_seconds = 0.0;
};

/// The grid is shared rather than copied; it may be large.
struct HeatRun {
    std::shared_ptr<const GridDomain> grid;
    double C = 1.0;
    TimeSeries E;
    SchemeInfo info;
    double area() const { return grid ? grid->area() : 0.0; }
};

/// Backward Euler for u_t = C Lap u, u = 0 at t = 0, u = 1 on the boundary.
/// E is recorded at every t in t_grid (increasing, positive).
HeatRun fd_heat_solve(std::shared_ptr<const GridDomain> grid, double C,
                      const std::vector<double>& t_grid, const SolverOptions& opt = {});
HeatRun fd_heat_solve(const GridDomain& grid, double C, const std::vector<double>& t_grid,
                      const SolverOptions& opt = {});

/// Log grid with `per_decade` points covering [t_min, t_max].
std::vector<double> default_t_grid(double t_min = 1e-6, double t_max = 10.0, int per_decade = 64);

struct McOptions {
    std::uint64_t seed = 20240611;
    /// Brownian-bridge crossing test between steps.
    bool bridge_correction = false;
    std::size_t chunk = 4096;
};

struct McResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double area = 0.0;
    std::size_t paths = 0;
    std::size_t absorbed = 0;
};

/// Monte Carlo heat content of the polygon: area times the fraction of
/// uniformly started Brownian paths that leave it before time t.
McResult mc_heat_content(const Polyline& polygon, double C, double t, std::size_t n_paths,
                         double dt, const McOptions& opt = {});

/// R(t) = E(t) - sum_k m_k r_k^2 E(t / r_k^2) on the grid points where all
/// terms are covered.
TimeSeries decomposition_remainder(const zeta::RatioProfile& p, const TimeSeries& E);
TimeSeries decomposition_remainder(const zeta::RatioProfile& p, const HeatRun& run);
/// Values at explicit t for closed-form E.
TimeSeries decomposition_remainder(const zeta::RatioProfile& p,
                                   const std::function<double(double)>& E,
                                   const std::vector<double>& t);

struct RemainderFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool sign_changes = false;
    /// log residual of the straight line exceeds 0.01 somewhere.
    bool oscillation = false;
    double t_lo = 0.0, t_hi = 0.0;
};

/// Log-log fit of |R| over [t_lo, t_hi]; defaults to the first two decades.
RemainderFit remainder_order_fit(const TimeSeries& R, std::optional<double> t_lo = {},
                                 std::optional<double> t_hi = {});

}  // namespace fhl::heat
