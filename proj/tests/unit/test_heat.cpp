#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fhl/error.hpp"
#include "fhl/heat.hpp"
#include "fhl/mellin.hpp"

using namespace fhl;
using namespace fhl::heat;

namespace {

constexpr double pi = std::numbers::pi;

/// Exact heat content of the unit square with C = 1: 1 - S(t)^2, where S is
/// the mean of the 1D solution's complement, summed from its sine series.
double square_exact(double t) {
    double S = 0.0;
    for (int k = 0;; ++k) {
        const double m = 2 * k + 1;
        const double term = 8.0 / (m * m * pi * pi) * std::exp(-m * m * pi * pi * t);
        S += term;
        if (term < 1e-18) break;
    }
    return 1.0 - S * S;
}

HeatRun square_run(int res, double C, const std::vector<double>& t, double side = 1.0,
                   bool mg = true) {
    SolverOptions o;
    o.multigrid = mg;
    return fd_heat_solve(geometry::rasterize(geometry::square(side), res), C, t, o);
}

}  // namespace

TEST_CASE("square heat content matches the exact series") {
    const int res = 128;
    const double h2 = 1.0 / (res * res);
    auto t = default_t_grid(1e-5, 1.0, 16);
    auto run = square_run(res, 1.0, t);
    REQUIRE(run.E.size() == t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= 25 * h2) CHECK(std::abs(run.E.v[k] / square_exact(t[k]) - 1.0) < 0.01);
        CHECK(run.E.v[k] >= 0.0);
        CHECK(run.E.v[k] <= run.area() * (1 + 1e-12));
        if (k > 0) CHECK(run.E.v[k] >= run.E.v[k - 1] - 1e-12);
    }
    CHECK(std::abs(run.E.v.back() - 1.0) < 1e-3);
    CHECK(run.info.u_min > -1e-9);
    CHECK(run.info.u_max < 1.0 + 1e-9);
    // Small t: E / sqrt(t) approaches 8 / sqrt(pi) minus the corner term.
    const double tt = 1e-3;
    CHECK(std::abs(square_exact(tt) - (8 * std::sqrt(tt / pi) - 16 * tt / pi)) < 1e-12);
}

TEST_CASE("multigrid and Jacobi preconditioning agree") {
    auto t = default_t_grid(1e-4, 1e-1, 16);
    auto a = square_run(64, 1.0, t, 1.0, true);
    auto b = square_run(64, 1.0, t, 1.0, false);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(a.E.v[k] - b.E.v[k]) < 1e-8);
    CHECK(a.info.cg_iterations < b.info.cg_iterations);
}

TEST_CASE("diffusivity covariance, scaling law and grid convergence") {
    auto t = default_t_grid(1e-4, 1e-1, 16);
    std::vector<double> t4;
    for (double x : t) t4.push_back(x / 4);
    auto a = square_run(128, 1.0, t);
    auto b = square_run(128, 4.0, t4);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(b.E.v[k] / a.E.v[k] - 1.0) < 0.01);

    // Half-size square at the same cells per unit length: E_half(t) = E(4t) / 4.
    auto half = square_run(128, 1.0, t4, 0.5);
    const double h2 = 1.0 / (128.0 * 128.0);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t4[k] < 25 * h2) continue;
        CHECK(std::abs(half.E.v[k] / (0.25 * a.E.v[k]) - 1.0) < 0.02);
    }

    auto coarse = square_run(64, 1.0, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < 25.0 / (64.0 * 64.0)) continue;
        CHECK(std::abs(coarse.E.v[k] / a.E.v[k] - 1.0) < 0.03);
    }
}

TEST_CASE("heat solver preconditions") {
    auto g = geometry::rasterize(geometry::square(), 64);
    CHECK_THROWS_AS(fd_heat_solve(g, 1.0, {1e-6, 2e-6}), DomainError);
    CHECK_THROWS_AS(fd_heat_solve(g, 0.0, {1e-2}), DomainError);
    CHECK_THROWS_AS(fd_heat_solve(g, 1.0, {1e-2, 1e-3}), DomainError);
}

TEST_CASE("Monte Carlo heat content") {
    auto sq = geometry::square();
    CHECK(mc_heat_content(sq, 1.0, 0.0, 1000, 1e-3).estimate == 0.0);
    auto big = mc_heat_content(sq, 1.0, 10.0, 2000, 0.1);
    CHECK(std::abs(big.estimate - 1.0) < 1e-12);
    McOptions o;
    o.bridge_correction = true;
    const double t = 1e-3;
    auto r = mc_heat_content(sq, 1.0, t, 20000, t / 100, o);
    CHECK(std::abs(r.estimate - square_exact(t)) < 3 * r.stderr_);
    auto again = mc_heat_content(sq, 1.0, t, 20000, t / 100, o);
    CHECK(again.estimate == r.estimate);
    CHECK_THROWS_AS(mc_heat_content(sq, 1.0, t, 10, t / 50), DomainError);
}

TEST_CASE("decomposition remainder") {
    auto p = zeta::gkf_profile(3, 1.0 / 3.0);
    const double D = std::log(4.0) / std::log(3.0);
    auto t = default_t_grid(1e-6, 1.0, 64);
    TimeSeries E;
    E.t = t;
    for (double x : t) E.v.push_back(2.5 * std::pow(x, (2 - D) / 2));
    auto R = decomposition_remainder(p, E);
    REQUIRE(R.size() > 0);
    CHECK(R.t.back() <= 1.0 / 9.0 * (1 + 1e-9));
    for (std::size_t k = 0; k < R.size(); ++k) CHECK(std::abs(R.v[k]) < 1e-9 * E.v[k] + 1e-12);

    for (auto& v : E.v) v = 0.7;
    R = decomposition_remainder(p, E);
    for (double v : R.v) CHECK(std::abs(v - 0.7 * (1 - 4.0 / 9.0)) < 1e-12);

    for (auto& v : E.v) v = 0.0;
    R = decomposition_remainder(p, E);
    for (double v : R.v) CHECK(v == 0.0);

    TimeSeries shortE{{1e-3, 2e-3, 3e-3, 4e-3}, {1, 2, 3, 4}};
    CHECK_THROWS_AS(decomposition_remainder(p, shortE), CoverageError);
}

TEST_CASE("remainder order fit") {
    TimeSeries R;
    R.t = default_t_grid(1e-6, 1e-3, 64);
    for (double x : R.t) R.v.push_back(3 * x);
    auto f = remainder_order_fit(R);
    CHECK(std::abs(f.slope - 1.0) < 1e-6);
    CHECK(!f.oscillation);
    CHECK(!f.sign_changes);
    R.v.clear();
    for (double x : R.t) R.v.push_back(x * (2 + std::sin(2 * pi * std::log(x) / std::log(9.0))));
    f = remainder_order_fit(R);
    CHECK(std::abs(f.slope - 1.0) < 0.1);
    CHECK(f.oscillation);
    R.v.clear();
    for (double x : R.t) R.v.push_back(x * std::sin(std::log(x)));
    CHECK(remainder_order_fit(R).sign_changes);
    TimeSeries shortR{{1e-3, 2e-3, 5e-3}, {1, 2, 3}};
    CHECK_THROWS_AS(remainder_order_fit(shortR), DomainError);
}
