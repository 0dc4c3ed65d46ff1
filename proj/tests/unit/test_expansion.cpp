#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fhl/error.hpp"
#include "fhl/expansion.hpp"
#include "fhl/geometry.hpp"
#include "fhl/heat.hpp"

using namespace fhl;
using namespace fhl::expansion;

namespace {

constexpr double pi = std::numbers::pi;
const double D = std::log(4.0) / std::log(3.0);
const double kappa = 2 * pi / std::log(9.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

HeatZeta monomial(double delta) {
    return make_heat_zeta(zeta::gkf_profile(3, 1.0 / 3.0),
                          [](double t) { return std::pow(t, (2 - D) / 2); }, D / 2, 0.0, delta);
}

HeatZeta wobble(double delta) {
    return make_heat_zeta(
        zeta::gkf_profile(3, 1.0 / 3.0),
        [](double t) { return std::pow(t, (2 - D) / 2) * (1 + 0.1 * std::cos(kappa * std::log(t))); },
        D / 2, 0.0, delta);
}

}  // namespace

TEST_CASE("pochhammer") {
    CHECK(pochhammer(1.0, 5) == cplx(120.0));
    CHECK(pochhammer(cplx(0.3, 2.0), 0) == cplx(1.0));
    CHECK(std::abs(pochhammer(0.5, 2) - 0.75) < 1e-15);
    CHECK_THROWS_AS(pochhammer(1.0, -1), DomainError);
}

TEST_CASE("heat zeta factorization on synthetic monomials") {
    auto hz = monomial(1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(D / 2 + 0.2, D / 2 + 2.0), im(-15.0, 15.0);
    for (int k = 0; k < 10; ++k) {
        const cplx s(re(rng), im(rng));
        const cplx exact = std::pow(cplx(hz.delta), s - D / 2) / (s - D / 2);
        CHECK(rel(heat_zeta_direct(hz, s), exact) < 1e-8);
        CHECK(rel(heat_zeta_eval(hz, s), exact) < 1e-8);
    }
    CHECK_THROWS_AS(heat_zeta_eval(hz, cplx(0.04, 0.0)), DomainError);
    CHECK_THROWS_AS(heat_zeta_eval(hz, cplx(D / 2, 0.0)), AtPoleError);

    auto zero = make_heat_zeta(zeta::gkf_profile(3, 1.0 / 3.0), [](double) { return 0.0; }, D / 2, 0.0);
    CHECK(heat_zeta_eval(zero, cplx(1.5, 2.0)) == cplx(0.0));
    CHECK(heat_residue(zero, D).value == cplx(0.0));
}

TEST_CASE("heat residues") {
    auto hz = monomial(1.0);
    auto r = heat_residue(hz, D);
    CHECK(std::abs(r.value - 1.0) < 1e-8);
    CHECK(r.relative_difference < 1e-6);
    // The monomial has no oscillatory part: residues off the real axis vanish.
    auto r1 = heat_residue(hz, cplx(D, 2 * kappa));
    CHECK(std::abs(r1.value) < 1e-8);

    for (double delta : {1.0, 0.5}) {
        auto w = wobble(delta);
        auto a = heat_residue(w, D);
        auto b = heat_residue(w, cplx(D, 2 * kappa));
        auto c = heat_residue(w, cplx(D, -2 * kappa));
        CHECK(std::abs(a.value - 1.0) < 1e-6);
        CHECK(std::abs(b.value - 0.05) < 1e-6);
        CHECK(std::abs(c.value - std::conj(b.value)) < 1e-12);
        CHECK(b.relative_difference < 1e-6);
    }
    CHECK_THROWS_AS(heat_residue(hz, cplx(1.1, 0.0)), DomainError);
}

TEST_CASE("heat terms from a dimension set") {
    auto p = zeta::gkf_profile(3, 1.0 / 3.0);
    auto cls = zeta::classify_lattice(p);
    auto dims = zeta::complex_dimensions(p, zeta::default_window(p, 12.0), cls);
    auto terms = heat_terms(wobble(1.0), dims, 12.0);
    REQUIRE(terms.size() == 5);
    for (double t : {1e-4, 1e-3, 1e-2}) {
        const double E = std::pow(t, (2 - D) / 2) * (1 + 0.1 * std::cos(kappa * std::log(t)));
        CHECK(std::abs(explicit_formula_eval(terms, 0, 2, t) - E) < 1e-6 * E);
    }
    auto bad = dims;
    bad.poles[0].multiplicity = 2;
    CHECK_THROWS_AS(heat_terms(wobble(1.0), bad, 12.0), DomainError);
}

TEST_CASE("explicit formula") {
    std::vector<Term> one{{cplx(D, 0.0), cplx(1.0, 0.0)}};
    CHECK(std::abs(explicit_formula_eval(one, 0, 2, 0.01) - std::pow(0.01, (2 - D) / 2)) < 1e-15);
    const double z = (2 - D) / 2;
    CHECK(std::abs(explicit_formula_eval(one, 2, 2, 0.01) - std::pow(0.01, z + 2) / ((z + 1) * (z + 2))) <
          1e-15);

    const cplx w(0.9, 4.0), r(0.3, -0.2);
    std::vector<Term> pair{{w, r}, {std::conj(w), std::conj(r)}};
    for (double t : {1e-4, 0.03, 0.5}) {
        const cplx direct = r * std::pow(cplx(t), (2.0 - w) / 2.0) +
                            std::conj(r) * std::pow(cplx(t), (2.0 - std::conj(w)) / 2.0);
        CHECK(std::abs(explicit_formula_eval(pair, 0, 2, t) - direct.real()) < 1e-12);
        // Euler form.
        const double euler = 2 * std::abs(r) * std::pow(t, (2 - w.real()) / 2) *
                             std::cos(w.imag() / 2 * std::log(1 / t) + std::arg(r));
        CHECK(std::abs(explicit_formula_eval(pair, 0, 2, t) - euler) < 1e-12);
    }
    std::vector<Term> lonely{{w, r}};
    CHECK_THROWS_AS(explicit_formula_eval(lonely, 0, 2, 0.1), DomainError);
    std::vector<Term> skew{{w, r}, {std::conj(w), r}};
    CHECK_THROWS_AS(explicit_formula_eval(skew, 0, 2, 0.1), NumericError);
    CHECK(explicit_formula_eval({}, 0, 2, 0.1) == 0.0);
}

TEST_CASE("k-consistency and truncation convergence") {
    // A five-pole lattice set on Re = D with decaying residues.
    const double g = 2 * pi / std::log(3.0);
    std::vector<Term> terms{{cplx(D, 0), cplx(1.0, 0)}};
    for (int j = 1; j <= 2; ++j) {
        const cplx r = cplx(0.05, 0.02) / static_cast<double>(j);
        terms.push_back({cplx(D, j * g), r});
        terms.push_back({cplx(D, -j * g), std::conj(r)});
    }
    for (double t : {1e-3, 1e-2, 5e-2}) {
        const double h = 1e-3 * t;
        const double f2 = (explicit_formula_eval(terms, 2, 2, t + h) - 2 * explicit_formula_eval(terms, 2, 2, t) +
                           explicit_formula_eval(terms, 2, 2, t - h)) /
                          (h * h);
        CHECK(std::abs(f2 / explicit_formula_eval(terms, 0, 2, t) - 1.0) < 0.01);
    }
    auto grid = mellin::log_grid(1e-4, 1e-1, 64);
    double prev = std::numeric_limits<double>::infinity();
    for (double T : {0.0, g + 0.1, 2 * g + 0.1}) {
        double worst = 0.0;
        for (double t : grid)
            worst = std::max(worst, std::abs(explicit_formula_eval(terms, 0, 2, t, T) -
                                             explicit_formula_eval(terms, 0, 2, t)));
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-14);
}

TEST_CASE("antiderivative") {
    TimeSeries one;
    one.t = mellin::log_grid(1e-6, 1.0, 64);
    one.v.assign(one.t.size(), 1.0);
    auto a1 = antiderivative(one, 1);
    auto a2 = antiderivative(one, 2);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(std::abs(a1.v[i] - one.t[i]) < 1e-12 * one.t[i] + 1e-15);
        CHECK(std::abs(a2.v[i] / (0.5 * one.t[i] * one.t[i]) - 1.0) < 1e-3);
    }
    TimeSeries p;
    p.t = one.t;
    for (double t : p.t) p.v.push_back(std::pow(t, 0.37));
    auto ap = antiderivative(p, 1);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(std::abs(ap.v[i] / (std::pow(p.t[i], 1.37) / 1.37) - 1.0) < 1e-3);
    CHECK(antiderivative(p, 0).v == p.v);
}

TEST_CASE("log-periodic fit") {
    const double period = std::log(9.0);
    TimeSeries E;
    E.t = mellin::log_grid(1e-5, 1e-1, 64);
    for (double t : E.t) E.v.push_back(2.0 * std::pow(t, 0.369));
    auto f = logperiodic_fit(E, 2 - 2 * 0.369, period, 2, 1e-5, 1e-1);
    CHECK(std::abs(f.c0 - 2.0) < 1e-10);
    for (double a : f.amplitude) CHECK(a < 1e-8);

    E.v.clear();
    for (double t : E.t) E.v.push_back(2.0 * std::pow(t, 0.369) * (1 + 0.1 * std::cos(2 * pi * std::log(t) / period + 0.4)));
    f = logperiodic_fit(E, 2 - 2 * 0.369, period, 1, 1e-5, 1e-1);
    CHECK(std::abs(f.amplitude[0] / 0.2 - 1.0) < 0.01);
    CHECK(std::abs(f.phase[0] - 0.4) < 1e-6);
    CHECK(f.rss < f.rss_constant);
    REQUIRE(f.implied_terms.size() == 3);
    CHECK(std::abs(f.implied_terms[1].omega.imag() - 2 * pi / std::log(3.0)) < 1e-12);
    // The implied terms reproduce the data.
    for (double t : {1e-4, 1e-3}) {
        const double E0 = 2.0 * std::pow(t, 0.369) * (1 + 0.1 * std::cos(2 * pi * std::log(t) / period + 0.4));
        CHECK(std::abs(explicit_formula_eval(f.implied_terms, 0, 2, t) / E0 - 1.0) < 1e-8);
    }
    CHECK_THROWS_AS(logperiodic_fit(E, 1.26, period, 1, 1e-3, 1e-2), DomainError);
}

TEST_CASE("measured snowflake heat zeta") {
    auto sf = geometry::snowflake(geometry::gkf_system(3, 1.0 / 3.0), 2);
    auto g = geometry::rasterize(sf.boundary, 96);
    auto run = heat::fd_heat_solve(g, 1.0, heat::default_t_grid(1e-4, 10.0, 64));
    auto hz = make_heat_zeta(zeta::gkf_profile(3, 1.0 / 3.0), run.E, D / 2, 0.0, 1.0);
    const cplx s(2.0, 0.0);
    CHECK(rel(heat_zeta_eval(hz, s), heat_zeta_direct(hz, s)) < 1e-4);
    const cplx s2(1.1, 3.0);
    CHECK(rel(heat_zeta_eval(hz, s2), heat_zeta_direct(hz, s2)) < 1e-4);
    auto short_run = run.E;
    short_run.t.resize(short_run.t.size() / 2);
    short_run.v.resize(short_run.t.size());
    CHECK_THROWS_AS(make_heat_zeta(zeta::gkf_profile(3, 1.0 / 3.0), short_run, D / 2, 0.0, 1.0),
                    CoverageError);
}

TEST_CASE("fitted residues recover known coefficients") {
    const double g = 2 * pi / std::log(3.0);
    std::vector<Term> truth{{cplx(D, 0), cplx(0.8, 0)},
                            {cplx(D, g), cplx(0.03, -0.01)},
                            {cplx(D, -g), cplx(0.03, 0.01)}};
    TimeSeries E;
    E.t = mellin::log_grid(1e-5, 1e-2, 32);
    for (double t : E.t) E.v.push_back(explicit_formula_eval(truth, 0, 2, t));
    auto fit = fit_residues(E, {cplx(D, 0), cplx(D, g)}, 2, 1e-5, 1e-2);
    REQUIRE(fit.size() == 3);
    CHECK(std::abs(fit[0].residue - 0.8) < 1e-10);
    CHECK(std::abs(fit[1].residue - cplx(0.03, -0.01)) < 1e-10);
    CHECK(fit[2].residue == std::conj(fit[1].residue));
    CHECK(fit[1].source == "fitted");
    auto ex = build_expansion(E, fit, 0, 2, 10.0, 1.0);
    CHECK(ex.max_relative_residual < 1e-10);
    auto empty = build_expansion(E, {}, 0, 2, 10.0, 1.0);
    CHECK(empty.residual.v == E.v);
}
