#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhl/geometry.hpp"
#include "fhl/series.hpp"

namespace fhl::tube {

using geometry::GridDomain;

/// Distance from every interior cell centre to the boundary polyline;
/// +inf outside. Requires grid.polyline().
std::vector<double> distance_transform(const GridDomain& grid);

struct TubeRun {
    std::shared_ptr<const GridDomain> grid;
    TimeSeries V;  // V(t) = |{x in Omega : dist(x, boundary) <= t}|
    /// Sorted interior distances, kept so V can be evaluated anywhere.
    std::vector<double> sorted_distances;
    double volume(double t) const;
};

TubeRun tube_function(std::shared_ptr<const GridDomain> grid, const std::vector<double>& t_values);
TubeRun tube_function(const GridDomain& grid, const std::vector<double>& t_values);

/// Largest distance to the boundary over interior cells.
double inradius(const TubeRun& run);

struct MinkowskiFit {
    double dim = 0.0;       // N - slope
    double slope = 0.0;
    double r2 = 0.0;
    double amplitude = 0.0; // single-harmonic amplitude in log V at `period`
    double variance_reduction = 0.0;
    double period = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};

struct FitWindow {
    std::optional<double> t_lo, t_hi;
    /// Multiplicative period in t of the harmonic; 0 skips the harmonic fit.
    double period = 0.0;
    int trend_degree = 1;
    /// Minimum window length in decades.
    double min_decades = 2.0;
};

/// Least-squares slope of log V vs log t; default window [4h, inradius/10].
MinkowskiFit minkowski_fit(const TubeRun& run, int N = 2, const FitWindow& w = {});

/// Truncated Mellin transform of t^{-N} V(t) on (0, delta) with small-t
/// growth exponent sigma0 = dim.
std::complex<double> tube_zeta_eval(const TubeRun& run, double dim, double delta,
                                    std::complex<double> s, int N = 2);
/// Same for V sampled on a log grid (at least 64 points per decade).
std::complex<double> tube_zeta_eval(const TimeSeries& V, double dim, double delta,
                                    std::complex<double> s, int N = 2);

struct ExponentReport {
    double tube_dim = 0.0;
    double tube_exponent = 0.0;       // N - tube_dim
    double heat_exponent = 0.0;
    double predicted_heat_exponent = 0.0;  // (N - tube_dim) / 2
    /// (N - tube_dim) / heat_exponent; 2 in theory.
    double slope_ratio = 0.0;
    /// (N - tube_dim) / (2 heat_exponent); 1 in theory.
    double normalized_ratio = 0.0;
    double tolerance = 0.0;
    bool consistent = false;
    std::string note;
};

/// Checks the factor-of-two relation between tube and heat exponents.
ExponentReport compare_exponents(double tube_dim, double heat_exponent, int N = 2,
                                 double tolerance = 0.1);

}  // namespace fhl::tube
