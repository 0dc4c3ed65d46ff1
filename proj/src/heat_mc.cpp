#include <atomic>
#include <cmath>
#include <random>

#include "fhl/error.hpp"
#include "fhl/heat.hpp"
#include "fhl/parallel.hpp"
#include "fhl/simd/kernels.hpp"

namespace fhl::heat {

namespace {

struct Edges {
    std::vector<double> ax, ay, bx, by;
};

bool inside(const Edges& E, double x, double y) {
    bool in = false;
    for (std::size_t k = 0; k < E.ax.size(); ++k) {
        const double y0 = E.ay[k], y1 = E.by[k];
        if ((y0 > y) != (y1 > y)) {
            const double xc = E.ax[k] + (y - y0) * (E.bx[k] - E.ax[k]) / (y1 - y0);
            if (x < xc) in = !in;
        }
    }
    return in;
}

}  // namespace

McResult mc_heat_content(const Polyline& polygon, double C, double t, std::size_t n_paths,
                         double dt, const McOptions& opt) {
    if (!(C > 0.0)) throw DomainError("mc: diffusivity must be positive");
    if (t < 0.0) throw DomainError("mc: t must be nonnegative");
    if (!polygon.closed || polygon.vertices.size() < 3)
        throw DomainError("mc: polygon must be closed");
    McResult res;
    res.area = std::abs(signed_area(polygon));
    res.paths = n_paths;
    if (t == 0.0 || n_paths == 0) return res;
    if (!(dt > 0.0) || dt > t / 100.0 * (1 + 1e-12)) throw DomainError("mc: need 0 < dt <= t/100");

    Edges E;
    const auto& V = polygon.vertices;
    double xlo = V[0].x, xhi = xlo, ylo = V[0].y, yhi = ylo;
    for (std::size_t k = 0; k < polygon.edge_count(); ++k) {
        const auto [a, b] = polygon.edge(k);
        E.ax.push_back(a.x);
        E.ay.push_back(a.y);
        E.bx.push_back(b.x);
        E.by.push_back(b.y);
        xlo = std::min(xlo, a.x);
        xhi = std::max(xhi, a.x);
        ylo = std::min(ylo, a.y);
        yhi = std::max(yhi, a.y);
    }
    const auto& K = simd::active_kernels();
    const std::size_t steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    const std::size_t chunk = std::max<std::size_t>(1, opt.chunk);
    const std::size_t chunks = (n_paths + chunk - 1) / chunk;
    std::atomic<std::size_t> absorbed{0};

    parallel_tasks(chunks, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::normal_distribution<double> N(0.0, 1.0);
        const std::size_t begin = c * chunk, end = std::min(n_paths, begin + chunk);
        std::size_t hit = 0;
        for (std::size_t p = begin; p < end; ++p) {
            double x, y;
            do {
                x = xlo + (xhi - xlo) * U(rng);
                y = ylo + (yhi - ylo) * U(rng);
            } while (!inside(E, x, y));
            double elapsed = 0.0;
            for (std::size_t s = 0; s < steps; ++s) {
                const double h = std::min(dt, t - elapsed);
                elapsed += h;
                const double sd = std::sqrt(2.0 * C * h);
                const double nx = x + sd * N(rng), ny = y + sd * N(rng);
                if (!inside(E, nx, ny)) {
                    ++hit;
                    break;
                }
                if (opt.bridge_correction) {
                    const double d0 = std::sqrt(K.min_seg_dist2(x, y, E.ax.data(), E.ay.data(),
                                                                E.bx.data(), E.by.data(), E.ax.size()));
                    const double d1 = std::sqrt(K.min_seg_dist2(nx, ny, E.ax.data(), E.ay.data(),
                                                                E.bx.data(), E.by.data(), E.ax.size()));
                    if (U(rng) < std::exp(-d0 * d1 / (C * h))) {
                        ++hit;
                        break;
                    }
                }
                x = nx;
                y = ny;
            }
        }
        absorbed += hit;
    });

    res.absorbed = absorbed.load();
    const double p = static_cast<double>(res.absorbed) / static_cast<double>(n_paths);
    res.estimate = res.area * p;
    res.stderr_ = res.area * std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths));
    return res;
}

}  // namespace fhl::heat
