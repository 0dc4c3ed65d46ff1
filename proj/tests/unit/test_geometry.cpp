#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fhl/error.hpp"
#include "fhl/geometry.hpp"

using namespace fhl::geometry;

namespace {

int count_ratio(const SelfSimilarSystem& s, double r) {
    int c = 0;
    for (const auto& m : s.maps()) c += std::abs(m.ratio() - r) < 1e-14;
    return c;
}

Polyline triangle() {
    return Polyline{{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, true};
}

}  // namespace

TEST_CASE("similitude scales distances by its ratio") {
    Similitude s(0.37, 1.1, true, {0.3, -0.2});
    const Vec2 p{0.4, 1.7}, q{-2.0, 0.25};
    CHECK(norm(s(p) - s(q)) == doctest::Approx(0.37 * norm(p - q)).epsilon(1e-12));
    Similitude t(0.5, -0.4, false, {1.0, 2.0});
    const auto st = s.compose(t);
    const Vec2 a = st(p), b = s(t(p));
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-13));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-13));
    CHECK_THROWS_AS(Similitude(1.0, 0.0, false, {}), fhl::DomainError);
}

TEST_CASE("gkf_system ratios") {
    auto s3 = gkf_system(3, 1.0 / 3.0);
    CHECK(s3.maps().size() == 4);
    CHECK(count_ratio(s3, 1.0 / 3.0) == 4);
    REQUIRE(s3.distinct_ratios().size() == 1);
    CHECK(s3.distinct_ratios()[0].multiplicity == 4);

    auto s4 = gkf_system(4, 0.25);
    CHECK(s4.maps().size() == 5);
    CHECK(count_ratio(s4, 3.0 / 8.0) == 2);
    CHECK(count_ratio(s4, 0.25) == 3);

    auto s5 = gkf_system(5, 0.2);
    CHECK(count_ratio(s5, 0.4) == 2);
    CHECK(count_ratio(s5, 0.2) == 4);

    CHECK_THROWS_AS(gkf_system(2, 0.2), fhl::DomainError);
    CHECK_THROWS_AS(gkf_system(4, 0.4), fhl::DomainError);
    CHECK_THROWS_AS(gkf_system(4, 0.0), fhl::DomainError);
    CHECK_NOTHROW(gkf_system(4, 0.4, true));
}

TEST_CASE("gkf maps chain the unit segment") {
    for (int n : {3, 4, 5, 6, 7}) {
        auto s = gkf_system(n, 0.2);
        Vec2 prev{0.0, 0.0};
        for (const auto& m : s.maps()) {
            const Vec2 a = m({0.0, 0.0});
            CHECK(norm(a - prev) < 1e-14);
            prev = m({1.0, 0.0});
        }
        CHECK(norm(prev - Vec2{1.0, 0.0}) < 1e-14);
    }
}

TEST_CASE("self-avoidance bounds") {
    CHECK(self_avoidance_bound(3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(self_avoidance_bound(4) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // sin^2(pi/6) = 1/4, cos^2(pi/6) = 3/4.
    CHECK(self_avoidance_bound(6) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(self_avoidance_bound(5) == doctest::Approx(1.0 - std::cos(std::numbers::pi / 5)).epsilon(1e-12));
}

TEST_CASE("prefractal curve counts and apex") {
    auto s = gkf_system(3, 1.0 / 3.0);
    auto c0 = prefractal_curve(s, 0);
    REQUIRE(c0.vertices.size() == 2);
    CHECK(c0.vertices[1] == Vec2{1.0, 0.0});
    auto c1 = prefractal_curve(s, 1);
    REQUIRE(c1.vertices.size() == 5);
    CHECK(c1.vertices[2].x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c1.vertices[2].y == doctest::Approx(std::sqrt(3.0) / 6.0).epsilon(1e-14));
    auto c3 = prefractal_curve(s, 3);
    CHECK(c3.vertices.size() == 65);
    CHECK(c3.vertices.front() == Vec2{0.0, 0.0});
    CHECK(c3.vertices.back() == Vec2{1.0, 0.0});
    CHECK_THROWS_AS(prefractal_curve(s, 40), fhl::ResourceError);
}

TEST_CASE("snowflakes") {
    auto s = gkf_system(3, 1.0 / 3.0);
    auto t0 = snowflake(s, 0);
    CHECK(t0.boundary.vertices.size() == 3);
    CHECK(signed_area(t0.boundary) == doctest::Approx(std::sqrt(3.0) / 4.0));
    auto t2 = snowflake(s, 2);
    CHECK(t2.boundary.edge_count() == 48);
    // Outward bumps grow the area: depth-1 Koch snowflake is 4/3 of the triangle.
    auto t1 = snowflake(s, 1);
    CHECK(signed_area(t1.boundary) == doctest::Approx(std::sqrt(3.0) / 3.0).epsilon(1e-12));

    for (int n : {3, 4, 5, 6}) {
        auto g = gkf_system(n, 0.9 * std::min(self_avoidance_bound(n), 1.0 / 3.0));
        for (int d = 0; d <= 3; ++d) {
            auto sf = snowflake(g, d);
            CHECK_FALSE(find_self_intersection(sf.boundary).has_value());
            CHECK(signed_area(sf.boundary) > 0.0);
        }
    }

    auto bad = gkf_system(4, 0.4, true);
    CHECK_THROWS_AS(snowflake(bad, 1), fhl::GeometryError);
}

TEST_CASE("self-intersection detector") {
    Polyline bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true};
    CHECK(find_self_intersection(bowtie).has_value());
    CHECK_FALSE(find_self_intersection(square()).has_value());
    Polyline fold{{{0, 0}, {2, 0}, {1, 0}, {1, 1}}, false};
    CHECK(find_self_intersection(fold).has_value());
}

TEST_CASE("osculating residual areas") {
    auto s3 = gkf_system(3, 1.0 / 3.0);
    for (int d = 1; d <= 4; ++d) {
        auto r = osculating_residual(s3, d);
        CHECK(std::abs(r.additivity_defect) < 1e-12);
    }
    // As d grows the residual fraction tends to 1 - sum lambda^2.
    auto r = osculating_residual(s3, 8);
    const double frac = r.residual_area / r.sector_area;
    CHECK(frac == doctest::Approx(1.0 - 4.0 / 9.0).epsilon(1e-3));

    auto s4 = gkf_system(4, 0.25);
    auto r4 = osculating_residual(s4, 7);
    CHECK(std::abs(r4.additivity_defect) < 1e-12);
    CHECK(r4.residual_area / r4.sector_area == doctest::Approx(1.0 - 0.46875).epsilon(2e-3));

    auto r0 = osculating_residual(s3, 0);
    CHECK(r0.residual.size() == 1);
    CHECK(r0.residual_area == r0.sector_area);
}

TEST_CASE("rasterize areas") {
    auto sq = rasterize(square(), 64);
    CHECK(std::abs(sq.area() - 1.0) <= 2.0 / 64);
    CHECK(sq.interior_components() == 1);

    auto tri = rasterize(triangle(), 128);
    CHECK(std::abs(tri.area() - std::sqrt(3.0) / 4.0) <= 0.02);

    auto sf = snowflake(gkf_system(3, 1.0 / 3.0), 3).boundary;
    auto g = rasterize(sf, 512);
    const double shoelace = signed_area(sf);
    CHECK(std::abs(g.area() - shoelace) / shoelace < 0.01);

    // Masks are disjoint and boundary cells are exterior neighbours.
    for (std::size_t k = 0; k < g.interior_mask().size(); ++k) {
        CHECK_FALSE((g.interior_mask()[k] && g.boundary_mask()[k]));
    }

    Polyline open = square();
    open.closed = false;
    CHECK_THROWS_AS(rasterize(open, 64), fhl::GeometryError);
    Polyline bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true};
    CHECK_THROWS_AS(rasterize(bowtie, 64), fhl::GeometryError);
    CHECK_THROWS_AS(rasterize(square(), 8), fhl::DomainError);
}

TEST_CASE("raster area converges at first order") {
    auto sf = snowflake(gkf_system(3, 1.0 / 3.0), 3).boundary;
    const double exact = signed_area(sf);
    double prev = 1.0;
    for (double res : {64.0, 128.0, 256.0}) {
        const double err = std::abs(rasterize(sf, res).area() - exact);
        CHECK(err <= 8.0 * perimeter(sf) / res);
        prev = err;
    }
    (void)prev;
}

TEST_CASE("wall fractions on an offset square") {
    // Square edges at 0.3h inside cell faces.
    const double h = 1.0 / 32;
    auto g = rasterize(square(0.5, {0.1 + 0.2 * h, 0.1 + 0.2 * h}), 32);
    bool seen = false;
    for (const auto& w : g.wall_cells()) {
        for (float f : w.fraction) {
            CHECK(f > 0.0f);
            CHECK(f <= 1.0f);
            if (f < 1.0f) seen = true;
        }
    }
    CHECK(seen);
}
