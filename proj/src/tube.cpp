#include "fhl/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhl/error.hpp"
#include "fhl/mellin.hpp"
#include "fhl/parallel.hpp"
#include "fhl/simd/kernels.hpp"

namespace fhl::tube {

namespace {

constexpr int kBlock = 16;

double point_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double wx = px - ax, wy = py - ay;
    const double len2 = dx * dx + dy * dy;
    const double t = len2 > 0 ? std::clamp((wx * dx + wy * dy) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(wx - t * dx, wy - t * dy);
}

double rect_gap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::max(a0 - b1, b0 - a1));
}

}  // namespace

std::vector<double> distance_transform(const GridDomain& g) {
    if (!g.polyline()) throw DomainError("distance transform: grid carries no boundary polyline");
    const auto& P = *g.polyline();
    const std::size_t m = P.edge_count();
    std::vector<double> ax(m), ay(m), bx(m), by(m);
    for (std::size_t k = 0; k < m; ++k) {
        auto [a, b] = P.edge(k);
        ax[k] = a.x;
        ay[k] = a.y;
        bx[k] = b.x;
        by[k] = b.y;
    }
    const int nx = g.nx(), ny = g.ny();
    const auto& in = g.interior_mask();
    std::vector<double> dist(static_cast<std::size_t>(nx) * ny,
                             std::numeric_limits<double>::infinity());
    const int bnx = (nx + kBlock - 1) / kBlock, bny = (ny + kBlock - 1) / kBlock;
    const auto& K = simd::active_kernels();

    parallel_for(static_cast<std::size_t>(bnx) * bny, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> cax, cay, cbx, cby;
        for (std::size_t blk = b0; blk < b1; ++blk) {
            const int bi = static_cast<int>(blk % bnx), bj = static_cast<int>(blk / bnx);
            const int i0 = bi * kBlock, j0 = bj * kBlock;
            const int i1 = std::min(nx, i0 + kBlock), j1 = std::min(ny, j0 + kBlock);
            bool any = false;
            for (int j = j0; j < j1 && !any; ++j)
                for (int i = i0; i < i1 && !any; ++i) any = in[g.index(i, j)] != 0;
            if (!any) continue;
            // Rectangle spanned by the block's cell centres.
            const auto c0 = g.center(i0, j0), c1 = g.center(i1 - 1, j1 - 1);
            const double cx = 0.5 * (c0.x + c1.x), cy = 0.5 * (c0.y + c1.y);
            const double half_diag = 0.5 * std::hypot(c1.x - c0.x, c1.y - c0.y);
            double upper = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m; ++k)
                upper = std::min(upper, point_segment(cx, cy, ax[k], ay[k], bx[k], by[k]) + half_diag);
            cax.clear();
            cay.clear();
            cbx.clear();
            cby.clear();
            for (std::size_t k = 0; k < m; ++k) {
                const double gx = rect_gap(c0.x, c1.x, std::min(ax[k], bx[k]), std::max(ax[k], bx[k]));
                const double gy = rect_gap(c0.y, c1.y, std::min(ay[k], by[k]), std::max(ay[k], by[k]));
                if (std::hypot(gx, gy) <= upper * (1 + 1e-12) + 1e-15) {
                    cax.push_back(ax[k]);
                    cay.push_back(ay[k]);
                    cbx.push_back(bx[k]);
                    cby.push_back(by[k]);
                }
            }
            for (int j = j0; j < j1; ++j) {
                for (int i = i0; i < i1; ++i) {
                    const std::size_t idx = g.index(i, j);
                    if (!in[idx]) continue;
                    const auto c = g.center(i, j);
                    dist[idx] = std::sqrt(K.min_seg_dist2(c.x, c.y, cax.data(), cay.data(),
                                                          cbx.data(), cby.data(), cax.size()));
                }
            }
        }
    });
    return dist;
}

double TubeRun::volume(double t) const {
    if (!grid) return 0.0;
    const auto n = std::upper_bound(sorted_distances.begin(), sorted_distances.end(), t) -
                   sorted_distances.begin();
    return static_cast<double>(n) * grid->h() * grid->h();
}

TubeRun tube_function(std::shared_ptr<const GridDomain> grid, const std::vector<double>& t_values) {
    if (!grid) throw DomainError("tube: null grid");
    for (std::size_t k = 1; k < t_values.size(); ++k)
        if (!(t_values[k] > t_values[k - 1])) throw DomainError("tube: t values must increase");
    TubeRun run;
    run.grid = grid;
    auto d = distance_transform(*grid);
    for (double x : d)
        if (std::isfinite(x)) run.sorted_distances.push_back(x);
    std::sort(run.sorted_distances.begin(), run.sorted_distances.end());
    for (double t : t_values) {
        run.V.t.push_back(t);
        run.V.v.push_back(run.volume(t));
    }
    return run;
}

TubeRun tube_function(const GridDomain& grid, const std::vector<double>& t_values) {
    return tube_function(std::make_shared<const GridDomain>(grid), t_values);
}

double inradius(const TubeRun& run) {
    return run.sorted_distances.empty() ? 0.0 : run.sorted_distances.back();
}

MinkowskiFit minkowski_fit(const TubeRun& run, int N, const FitWindow& w) {
    if (!run.grid) throw DomainError("minkowski fit: empty run");
    const double h = run.grid->h();
    MinkowskiFit f;
    f.t_lo = w.t_lo.value_or(4.0 * h);
    f.t_hi = w.t_hi.value_or(inradius(run) / 10.0);
    if (!(f.t_hi > f.t_lo) || std::log10(f.t_hi / f.t_lo) < w.min_decades - 1e-9) {
        throw DomainError("minkowski fit: window [" + std::to_string(f.t_lo) + ", " +
                          std::to_string(f.t_hi) + "] is shorter than " +
                          std::to_string(w.min_decades) + " decades");
    }
    // Evaluate V at 64 points per decade inside the window.
    TimeSeries V;
    V.t = mellin::log_grid(f.t_lo, f.t_hi, 64);
    for (double t : V.t) V.v.push_back(run.volume(t));
    const PowerFit p = fit_loglog(V, f.t_lo, f.t_hi);
    f.slope = p.slope;
    f.r2 = p.r2;
    f.dim = N - p.slope;
    if (w.period > 0.0) {
        const HarmonicFit hf = fit_log_periodic(V, f.t_lo, f.t_hi, w.period, w.trend_degree);
        f.amplitude = hf.amplitude;
        f.variance_reduction = hf.variance_reduction;
        f.period = w.period;
    }
    return f;
}

std::complex<double> tube_zeta_eval(const TimeSeries& V, double dim, double delta,
                                    std::complex<double> s, int N) {
    V.validate();
    std::vector<double> v;
    for (std::size_t k = 0; k < V.size(); ++k) v.push_back(V.v[k] * std::pow(V.t[k], -N));
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) return 0.0;
    mellin::SampledFunction f(V.t, v, dim, "t^-N V");
    return mellin::truncated_mellin(f, 0.0, delta, s).value;
}

std::complex<double> tube_zeta_eval(const TubeRun& run, double dim, double delta,
                                    std::complex<double> s, int N) {
    if (!run.grid) throw DomainError("tube zeta: empty run");
    TimeSeries V;
    V.t = mellin::log_grid(4.0 * run.grid->h(), delta, 64);
    for (double t : V.t) V.v.push_back(run.volume(t));
    return tube_zeta_eval(V, dim, delta, s, N);
}

ExponentReport compare_exponents(double tube_dim, double heat_exponent, int N, double tolerance) {
    ExponentReport r;
    r.tube_dim = tube_dim;
    r.tube_exponent = N - tube_dim;
    r.heat_exponent = heat_exponent;
    r.predicted_heat_exponent = r.tube_exponent / 2.0;
    r.tolerance = tolerance;
    if (heat_exponent == 0.0) {
        r.note = "heat exponent is zero; ratio undefined";
        return r;
    }
    r.slope_ratio = r.tube_exponent / heat_exponent;
    r.normalized_ratio = r.slope_ratio / 2.0;
    r.consistent = std::abs(r.normalized_ratio - 1.0) <= tolerance;
    r.note = r.consistent ? "tube exponent is twice the heat exponent; both governed by D = " +
                                std::to_string(tube_dim)
                          : "exponents violate the factor-of-two relation";
    return r;
}

}  // namespace fhl::tube
