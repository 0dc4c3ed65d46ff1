#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fhl/error.hpp"
#include "fhl/mellin.hpp"
#include "fhl/series.hpp"

using namespace fhl;

TEST_CASE("power fit recovers exact power laws") {
    TimeSeries s;
    s.t = mellin::log_grid(1e-5, 1e-1, 16);
    for (double t : s.t) s.v.push_back(-3.0 * std::pow(t, 0.37));
    auto f = fit_loglog(s, 1e-5, 1e-1);
    CHECK(f.slope == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(!f.sign_changes);
    CHECK(f.n == s.size());
    s.v[5] = -s.v[5];
    CHECK(fit_loglog(s, 1e-5, 1e-1).sign_changes);
    CHECK_THROWS_AS(fit_loglog(s, 2e-2, 2.5e-2), DomainError);
}

TEST_CASE("log-periodic harmonic fit") {
    const double period = std::log(9.0);
    TimeSeries s;
    s.t = mellin::log_grid(1e-6, 1e-2, 64);
    for (double t : s.t)
        s.v.push_back(std::pow(t, 0.4) * std::exp(0.05 * std::cos(2 * std::numbers::pi * std::log(t) / period - 1.0)));
    auto h = fit_log_periodic(s, 1e-6, 1e-2, period);
    CHECK(h.amplitude == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(h.phase == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(h.variance_reduction > 0.999);
    CHECK(h.trend.slope == doctest::Approx(0.4).epsilon(1e-2));

    // A smooth curvature is absorbed by a cubic trend but not by a line.
    for (std::size_t k = 0; k < s.size(); ++k) s.v[k] *= std::exp(0.02 * std::pow(std::log(s.t[k]), 2));
    auto lin = fit_log_periodic(s, 1e-6, 1e-2, period, 1);
    auto cub = fit_log_periodic(s, 1e-6, 1e-2, period, 3);
    CHECK(cub.variance_reduction > lin.variance_reduction);
    CHECK(cub.amplitude == doctest::Approx(0.05).epsilon(1e-2));
}

TEST_CASE("validation") {
    TimeSeries s{{1.0, 1.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(s.validate(), DomainError);
    TimeSeries u{{1.0, 2.0}, {0.0}};
    CHECK_THROWS_AS(u.validate(), DomainError);
}

TEST_CASE("cleanest decade picks the straight stretch") {
    // Power law 0.5 below 1e-3, curving off above.
    TimeSeries s;
    s.t = mellin::log_grid(1e-6, 1.0, 32);
    for (double t : s.t) s.v.push_back(std::sqrt(t) * (t < 1e-3 ? 1.0 : std::exp(std::pow(std::log(t / 1e-3), 2))));
    auto f = cleanest_decade(s, 1e-6, 1e-1);
    CHECK(f.t_hi <= 1e-3 * (1 + 1e-9));
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(f.t_hi == doctest::Approx(10 * f.t_lo));
    CHECK_THROWS_AS(cleanest_decade(s, 0.5, 1.0), DomainError);
}
