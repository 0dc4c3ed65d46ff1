#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fhl/error.hpp"
#include "fhl/heat.hpp"
#include "fhl/mellin.hpp"
#include "fhl/simd/kernels.hpp"
#include "multigrid.hpp"

namespace fhl::heat {

std::vector<double> default_t_grid(double t_min, double t_max, int per_decade) {
    return mellin::log_grid(t_min, t_max, per_decade);
}

namespace {

using detail::GridOperator;
using detail::Multigrid;

struct Assembly {
    GridOperator op;
    std::vector<double> wall_rhs;  // sum over walls of 1/theta
};

Assembly assemble(const GridDomain& g) {
    Assembly a;
    auto& op = a.op;
    op.nx = static_cast<std::size_t>(g.nx());
    op.ny = static_cast<std::size_t>(g.ny());
    const std::size_t size = op.nx * op.ny;
    op.m.assign(size, 0.0);
    op.kd.assign(size, 0.0);
    op.ke.assign(size, 0.0);
    op.kn.assign(size, 0.0);
    a.wall_rhs.assign(size, 0.0);
    const auto& in = g.interior_mask();
    for (std::size_t k = 0; k < size; ++k) {
        if (!in[k]) continue;
        op.m[k] = 1.0;
        if (in[k + 1]) {
            op.ke[k] = 1.0;
            op.kd[k] += 1.0;
            op.kd[k + 1] += 1.0;
        }
        if (in[k + op.nx]) {
            op.kn[k] = 1.0;
            op.kd[k] += 1.0;
            op.kd[k + op.nx] += 1.0;
        }
    }
    for (const auto& w : g.wall_cells()) {
        for (int d = 0; d < 4; ++d) {
            const std::size_t k = w.index;
            const std::size_t nb = d == GridDomain::East    ? k + 1
                                   : d == GridDomain::West  ? k - 1
                                   : d == GridDomain::North ? k + op.nx
                                                            : k - op.nx;
            if (in[nb]) continue;
            const double theta = std::max(0.05, static_cast<double>(w.fraction[d]));
            op.kd[k] += 1.0 / theta;
            a.wall_rhs[k] += 1.0 / theta;
        }
    }
    op.finalize_spans();
    return a;
}

}  // namespace

HeatRun fd_heat_solve(std::shared_ptr<const GridDomain> grid, double C,
                      const std::vector<double>& t_grid, const SolverOptions& opt) {
    if (!grid) throw DomainError("heat: null grid");
    if (!(C > 0.0)) throw DomainError("heat: diffusivity must be positive");
    if (t_grid.empty()) throw DomainError("heat: empty time grid");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
            throw DomainError("heat: time grid must be positive and increasing");
    }
    const double h = grid->h();
    if (t_grid.back() < 10.0 * h * h / C)
        throw DomainError("heat: time grid ends below 10 h^2 / C; nothing is resolvable");
    if (grid->interior_components() != 1) throw GeometryError("heat: grid interior is disconnected");
    if (!(opt.max_step_ratio > 0.0)) throw DomainError("heat: max_step_ratio must be positive");
    if (!(opt.local_error_tol > 0.0)) throw DomainError("heat: local_error_tol must be positive");

    const auto wall0 = std::chrono::steady_clock::now();
    const simd::Kernels& K = simd::active_kernels();
    Assembly asmb = assemble(*grid);
    GridOperator& A = asmb.op;
    std::unique_ptr<Multigrid> mg;
    if (opt.multigrid) mg = std::make_unique<Multigrid>(A, K);

    const std::size_t size = A.nx * A.ny;
    std::vector<double> u(size, 0.0), u_prev(size, 0.0), x(size, 0.0), b(size, 0.0),
        r(size, 0.0), z(size, 0.0), p(size, 0.0), q(size, 0.0);

    HeatRun run;
    run.grid = grid;
    run.C = C;
    run.info.preconditioner = opt.multigrid ? "aggregation-multigrid V(2,2)" : "jacobi";
    run.info.kernels = K.name;
    run.info.cg_tol = opt.cg_tol;
    run.info.max_step_ratio = opt.max_step_ratio;
    run.info.local_error_tol = opt.local_error_tol;
    run.info.u_min = std::numeric_limits<double>::infinity();
    run.info.u_max = -std::numeric_limits<double>::infinity();

    const double h2 = h * h;
    double dt_prev = 0.0, dt_prev_accepted = 0.0;

    auto precondition = [&](const double* rr, double* zz) {
        if (mg) {
            mg->apply(rr, zz);
        } else {
            for (auto [lo, e] : A.spans)
                for (std::size_t k = lo; k < e; ++k) zz[k] = A.inv_d[k] * rr[k];
        }
    };

    auto step = [&](double dt) {
        const double c = C * dt / h2;
        A.set_scale(c);
        if (mg) mg->set_scale(c);
        for (auto [lo, e] : A.spans) {
            for (std::size_t k = lo; k < e; ++k) {
                b[k] = u[k] + c * asmb.wall_rhs[k];
                // Linear extrapolation in time as the initial guess.
                x[k] = dt_prev > 0.0 ? u[k] + (u[k] - u_prev[k]) * (dt / dt_prev) : u[k];
            }
        }
        const double bnorm = std::sqrt(A.dot(K, b.data(), b.data()));
        A.apply(K, x.data(), r.data());
        A.axpby(K, 1.0, b.data(), -1.0, r.data());
        double rnorm = std::sqrt(A.dot(K, r.data(), r.data()));
        int it = 0;
        if (rnorm > opt.cg_tol * bnorm) {
            precondition(r.data(), z.data());
            for (auto [lo, e] : A.spans) std::copy(z.begin() + lo, z.begin() + e, p.begin() + lo);
            double rz = A.dot(K, r.data(), z.data());
            while (true) {
                if (++it > opt.max_cg_iterations) {
                    throw NumericError("heat: CG did not converge in " +
                                       std::to_string(opt.max_cg_iterations) +
                                       " iterations (relative residual " +
                                       std::to_string(rnorm / bnorm) + ")");
                }
                A.apply(K, p.data(), q.data());
                const double alpha = rz / A.dot(K, p.data(), q.data());
                A.axpby(K, alpha, p.data(), 1.0, x.data());
                A.axpby(K, -alpha, q.data(), 1.0, r.data());
                rnorm = std::sqrt(A.dot(K, r.data(), r.data()));
                if (rnorm <= opt.cg_tol * bnorm) break;
                precondition(r.data(), z.data());
                const double rz_new = A.dot(K, r.data(), z.data());
                A.axpby(K, 1.0, z.data(), rz_new / rz, p.data());
                rz = rz_new;
            }
        }
        run.info.cg_iterations += static_cast<std::size_t>(it);
        run.info.max_cg_iterations_per_step = std::max(run.info.max_cg_iterations_per_step, it);
        ++run.info.time_steps;
        std::swap(u_prev, u);
        std::swap(u, x);
        dt_prev = dt;
    };

    auto content = [&] {
        double s = 0.0;
        for (auto [lo, e] : A.spans) {
            for (std::size_t k = lo; k < e; ++k) {
                if (A.m[k] > 0.0) {
                    s += u[k];
                    run.info.u_min = std::min(run.info.u_min, u[k]);
                    run.info.u_max = std::max(run.info.u_max, u[k]);
                }
            }
        }
        return s * h2;
    };

    // Local error control on E: dt^2/2 |E''| <= tol * area, with E'' from the
    // last three accepted steps.
    const double area = grid->area();
    double t = 0.0, e_prev = 0.0, slope_prev = 0.0, dt_err = std::numeric_limits<double>::infinity();
    bool have_slope = false, in_ramp = true;
    auto accept = [&](double dt) {
        const double e = content();
        const double slope = (e - e_prev) / dt;
        if (have_slope) {
            const double curv = std::abs(slope - slope_prev) / (0.5 * (dt + dt_prev_accepted));
            if (curv > 0.0) {
                dt_err = std::sqrt(2.0 * opt.local_error_tol * area / curv);
                if (!in_ramp)
                    run.info.max_local_error =
                        std::max(run.info.max_local_error, 0.5 * dt * dt * curv / area);
            }
        }
        e_prev = e;
        slope_prev = slope;
        have_slope = true;
        dt_prev_accepted = dt;
    };

    // March t -> target with geometric steps, each at most ratio * t, each
    // subdivided when the error cap is tighter.
    auto march = [&](double target, double ratio) {
        if (t == 0.0) {
            step(target);
            t = target;
            e_prev = content();
            return;
        }
        const double span = std::log(target / t);
        const int n = std::max(1, static_cast<int>(std::ceil(span / std::log1p(ratio) - 1e-9)));
        const double g = std::exp(span / n);
        for (int s = 0; s < n; ++s) {
            const double next = s + 1 == n ? target : t * g;
            const double t0 = t;
            const int m = std::max(1, static_cast<int>(std::ceil((next - t0) / dt_err - 1e-9)));
            for (int j = 1; j <= m; ++j) {
                const double tj = j == m ? next : t0 + (next - t0) * j / m;
                step(tj - t);
                accept(tj - t);
                t = tj;
            }
        }
    };

    // Ramp from t0 * start_fraction with coarser steps; its error is washed
    // out by the boundary flux before the first recorded time.
    march(t_grid.front() * opt.start_fraction, opt.max_step_ratio);
    march(t_grid.front(), std::max(opt.max_step_ratio, 0.2));
    in_ramp = false;
    run.E.t.reserve(t_grid.size());
    run.E.v.reserve(t_grid.size());
    for (double target : t_grid) {
        if (target > t) march(target, opt.max_step_ratio);
        run.E.t.push_back(target);
        run.E.v.push_back(content());
        if (opt.progress) {
            std::fprintf(stderr, "heat: t=%.4e E=%.8e steps=%zu cg=%zu\n", target, run.E.v.back(),
                         run.info.time_steps, run.info.cg_iterations);
        }
    }
    run.info.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return run;
}

HeatRun fd_heat_solve(const GridDomain& grid, double C, const std::vector<double>& t_grid,
                      const SolverOptions& opt) {
    return fd_heat_solve(std::make_shared<const GridDomain>(grid), C, t_grid, opt);
}

}  // namespace fhl::heat
