#include "fhl/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fhl/error.hpp"

namespace fhl::geometry {

Similitude::Similitude(double ratio, double rotation, bool reflection, Vec2 translation)
    : ratio_(ratio),
      rotation_(rotation),
      reflection_(reflection),
      translation_(translation),
      c_(std::cos(rotation)),
      s_(std::sin(rotation)) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DomainError("similitude ratio must lie in (0,1)");
    }
}

Vec2 Similitude::operator()(Vec2 p) const {
    const double py = reflection_ ? -p.y : p.y;
    return {translation_.x + ratio_ * (c_ * p.x - s_ * py),
            translation_.y + ratio_ * (s_ * p.x + c_ * py)};
}

Similitude Similitude::compose(const Similitude& other) const {
    // R1 F1 R2 F2 = R(theta1 -/+ theta2) F1F2, the sign flipping under F1.
    const double rot = rotation_ + (reflection_ ? -other.rotation_ : other.rotation_);
    return Similitude(ratio_ * other.ratio_, rot, reflection_ != other.reflection_,
                      (*this)(other.translation_));
}

std::vector<RatioCount> dedupe_ratios(std::vector<RatioCount> ratios) {
    for (const auto& rc : ratios) {
        if (!(rc.ratio > 0.0 && rc.ratio < 1.0)) throw DomainError("ratios must lie in (0,1)");
        if (rc.multiplicity < 1) throw DomainError("multiplicities must be >= 1");
    }
    if (ratios.empty()) throw DomainError("a self-similar system needs at least one map");
    std::sort(ratios.begin(), ratios.end(),
              [](const RatioCount& a, const RatioCount& b) { return a.ratio > b.ratio; });
    std::vector<RatioCount> out;
    for (const auto& rc : ratios) {
        if (!out.empty() && std::abs(out.back().ratio - rc.ratio) <= 1e-12 * rc.ratio) {
            out.back().multiplicity += rc.multiplicity;
        } else {
            out.push_back(rc);
        }
    }
    return out;
}

SelfSimilarSystem::SelfSimilarSystem(std::vector<Similitude> maps, int ambient_dim)
    : maps_(std::move(maps)), ambient_dim_(ambient_dim) {
    if (maps_.empty()) throw DomainError("a self-similar system needs at least one map");
    if (ambient_dim_ < 1) throw DomainError("ambient dimension must be positive");
    std::vector<RatioCount> rc;
    rc.reserve(maps_.size());
    for (const auto& m : maps_) rc.push_back({m.ratio(), 1});
    distinct_ = dedupe_ratios(std::move(rc));
}

SelfSimilarSystem SelfSimilarSystem::from_ratios(std::vector<RatioCount> ratios, int ambient_dim) {
    if (ambient_dim < 1) throw DomainError("ambient dimension must be positive");
    SelfSimilarSystem s;
    s.distinct_ = dedupe_ratios(std::move(ratios));
    s.ambient_dim_ = ambient_dim;
    return s;
}

double signed_area(const Polyline& p) {
    const std::size_t n = p.vertices.size();
    if (n < 3) return 0.0;
    // Shoelace about the first vertex keeps cancellation small.
    const Vec2 o = p.vertices[0];
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a += cross(p.vertices[i] - o, p.vertices[i + 1] - o);
    }
    return 0.5 * a;
}

double perimeter(const Polyline& p) {
    double len = 0.0;
    for (std::size_t i = 0; i < p.edge_count(); ++i) {
        auto [a, b] = p.edge(i);
        len += norm(b - a);
    }
    return len;
}

SelfSimilarSystem gkf_system(int n, double r, bool allow_any_ratio) {
    if (n < 3) throw DomainError("gkf_system: n must be >= 3");
    const double rmax = allow_any_ratio ? 1.0 : 1.0 / 3.0;
    const bool ok = allow_any_ratio ? (r > 0.0 && r < 1.0) : (r > 0.0 && r <= rmax + 1e-15);
    if (!ok) {
        std::ostringstream os;
        os << "gkf_system: r=" << r << " outside " << (allow_any_ratio ? "(0,1)" : "(0,1/3]");
        throw DomainError(os.str());
    }
    const double ell = (1.0 - r) / 2.0;
    const double theta = 2.0 * std::numbers::pi / n;     // central angle
    const double alpha = std::numbers::pi - theta;        // interior angle

    // Chain order along the curve: phi_L, psi_1..psi_{n-1}, phi_R.
    std::vector<Similitude> maps;
    maps.reserve(n + 1);
    maps.emplace_back(ell, 0.0, false, Vec2{0.0, 0.0});
    Vec2 start{ell, 0.0};
    for (int k = 1; k <= n - 1; ++k) {
        Similitude psi(r, alpha - (k - 1) * theta, false, start);
        start = psi(Vec2{1.0, 0.0});
        maps.push_back(psi);
    }
    maps.emplace_back(ell, 0.0, false, Vec2{ell + r, 0.0});

    SelfSimilarSystem sys(std::move(maps), 2);
    sys.gkf_ = std::make_pair(n, r);
    return sys;
}

double self_avoidance_bound(int n) {
    if (n < 3) throw DomainError("self_avoidance_bound: n must be >= 3");
    const double a = std::numbers::pi / n;
    if (n % 2 == 0) {
        const double s = std::sin(a), c = std::cos(a);
        return s * s / (c * c + 1.0);
    }
    return 1.0 - std::cos(a);
}

namespace {

std::size_t curve_vertex_count(std::size_t maps, int depth) {
    std::size_t v = 2;
    for (int d = 0; d < depth; ++d) {
        if (v - 1 > kMaxPrefractalVertices / maps) return kMaxPrefractalVertices + 1;
        v = maps * (v - 1) + 1;
    }
    return v;
}

}  // namespace

Polyline prefractal_curve(const SelfSimilarSystem& system, int depth) {
    if (!system.has_geometry()) throw DomainError("prefractal_curve: system has no planar maps");
    if (depth < 0) throw DomainError("prefractal_curve: depth must be >= 0");
    const auto& maps = system.maps();
    const std::size_t need = curve_vertex_count(maps.size(), depth);
    if (need > kMaxPrefractalVertices) {
        std::ostringstream os;
        os << "prefractal_curve: depth " << depth << " exceeds the vertex budget of "
           << kMaxPrefractalVertices;
        throw ResourceError(os.str());
    }

    std::vector<Vec2> cur{{0.0, 0.0}, {1.0, 0.0}};
    for (int d = 0; d < depth; ++d) {
        std::vector<Vec2> next;
        next.reserve(maps.size() * (cur.size() - 1) + 1);
        next.push_back(maps.front()(cur.front()));
        for (const auto& m : maps) {
            for (std::size_t i = 1; i < cur.size(); ++i) next.push_back(m(cur[i]));
        }
        cur = std::move(next);
    }
    // Pin the endpoints: the chain is exact in exact arithmetic.
    cur.front() = {0.0, 0.0};
    cur.back() = {1.0, 0.0};
    return Polyline{std::move(cur), false};
}

namespace {

int sgn(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p, double eps) {
    return std::min(a.x, b.x) - eps <= p.x && p.x <= std::max(a.x, b.x) + eps &&
           std::min(a.y, b.y) - eps <= p.y && p.y <= std::max(a.y, b.y) + eps;
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
    const int o1 = sgn(cross(b - a, c - a), eps);
    const int o2 = sgn(cross(b - a, d - a), eps);
    const int o3 = sgn(cross(d - c, a - c), eps);
    const int o4 = sgn(cross(d - c, b - c), eps);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && on_segment(a, b, c, eps)) return true;
    if (o2 == 0 && on_segment(a, b, d, eps)) return true;
    if (o3 == 0 && on_segment(c, d, a, eps)) return true;
    if (o4 == 0 && on_segment(c, d, b, eps)) return true;
    return false;
}

// Adjacent edges a->b, b->c share b; they are bad only if they fold back
// onto each other.
bool adjacent_overlap(Vec2 a, Vec2 b, Vec2 c, double eps) {
    if (sgn(cross(b - a, c - b), eps) != 0) return false;
    return dot(b - a, c - b) < 0.0;
}

}  // namespace

std::optional<Intersection> find_self_intersection(const Polyline& p, double eps) {
    const std::size_t ne = p.edge_count();
    if (ne < 2) return std::nullopt;
    const std::size_t nv = p.vertices.size();

    struct Box {
        double xmin, xmax, ymin, ymax;
        std::size_t e;
    };
    std::vector<Box> boxes(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        auto [a, b] = p.edge(e);
        boxes[e] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y),
                    std::max(a.y, b.y), e};
    }
    std::sort(boxes.begin(), boxes.end(),
              [](const Box& l, const Box& r) { return l.xmin < r.xmin; });

    auto adjacent = [&](std::size_t e1, std::size_t e2) {
        if (e1 > e2) std::swap(e1, e2);
        if (e2 == e1 + 1) return true;
        return p.closed && e1 == 0 && e2 == ne - 1;
    };

    for (std::size_t i = 0; i < ne; ++i) {
        const Box& bi = boxes[i];
        for (std::size_t j = i + 1; j < ne && boxes[j].xmin <= bi.xmax + eps; ++j) {
            const Box& bj = boxes[j];
            if (bj.ymin > bi.ymax + eps || bj.ymax < bi.ymin - eps) continue;
            std::size_t e1 = bi.e, e2 = bj.e;
            auto [a, b] = p.edge(e1);
            auto [c, d] = p.edge(e2);
            if (adjacent(e1, e2)) {
                // Order so that the shared vertex is the middle one.
                if (e1 > e2) std::swap(e1, e2);
                bool wrap = p.closed && e1 == 0 && e2 == ne - 1;
                Vec2 v0, v1, v2;
                if (wrap) {
                    v0 = p.vertices[e2];
                    v1 = p.vertices[0];
                    v2 = p.vertices[1 % nv];
                } else {
                    v0 = p.vertices[e1];
                    v1 = p.vertices[e1 + 1];
                    v2 = p.vertices[(e1 + 2) % nv];
                }
                if (adjacent_overlap(v0, v1, v2, eps)) return Intersection{e1, e2};
                continue;
            }
            if (segments_touch(a, b, c, d, eps)) {
                return Intersection{std::min(e1, e2), std::max(e1, e2)};
            }
        }
    }
    return std::nullopt;
}

namespace {

Polyline snowflake_at(const SelfSimilarSystem& system, int n, int depth) {
    const Polyline curve = prefractal_curve(system, depth);
    const double theta = 2.0 * std::numbers::pi / n;
    Polyline out;
    out.closed = true;
    out.vertices.reserve(n * (curve.vertices.size() - 1));
    Vec2 corner{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        // Reflected placement puts the bump on the right of travel, i.e. outside
        // the counterclockwise base polygon.
        const double a = k * theta;
        const Vec2 next = corner + Vec2{std::cos(a), std::sin(a)};
        for (std::size_t i = 0; i + 1 < curve.vertices.size(); ++i) {
            const Vec2 q = curve.vertices[i];
            out.vertices.push_back(corner + Vec2{std::cos(a) * q.x + std::sin(a) * q.y,
                                                 std::sin(a) * q.x - std::cos(a) * q.y});
        }
        corner = next;
    }
    return out;
}

}  // namespace

SnowflakeResult snowflake(const SelfSimilarSystem& system, int depth, const SnowflakeOptions& opts) {
    const auto params = system.gkf_parameters();
    if (!params) throw DomainError("snowflake: system was not built by gkf_system");
    const auto [n, r] = *params;
    SnowflakeResult res;
    res.ratio_above_bound = !(r < self_avoidance_bound(n));
    res.boundary = snowflake_at(system, n, depth);

    auto check = [&](const Polyline& poly, int d) {
        if (auto hit = find_self_intersection(poly)) {
            std::ostringstream os;
            os << "snowflake(" << n << ", " << r << ") self-intersects at depth " << d
               << ": edges " << hit->edge_a << " and " << hit->edge_b;
            throw GeometryError(os.str());
        }
    };
    check(res.boundary, depth);
    if (res.ratio_above_bound && depth < opts.min_check_depth_when_unsafe) {
        check(snowflake_at(system, n, opts.min_check_depth_when_unsafe),
              opts.min_check_depth_when_unsafe);
    }
    return res;
}

OsculatingResidual osculating_residual(const SelfSimilarSystem& system, int depth) {
    const auto params = system.gkf_parameters();
    if (!params) throw DomainError("osculating_residual: system was not built by gkf_system");
    if (depth < 0) throw DomainError("osculating_residual: depth must be >= 0");
    const auto [n, r] = *params;

    OsculatingResidual out;
    const Polyline xd = prefractal_curve(system, depth);
    Polyline region{xd.vertices, true};
    out.sector_area = std::abs(signed_area(region));
    if (depth == 0) {
        out.residual.push_back(region);
        out.residual_area = out.sector_area;
        return out;
    }

    const Polyline prev = prefractal_curve(system, depth - 1);
    const double prev_area = std::abs(signed_area(Polyline{prev.vertices, true}));
    for (const auto& m : system.maps()) out.copies_area += m.ratio() * m.ratio() * prev_area;

    // Cap: the regular n-gon of side r standing on the middle gap.
    const double ell = (1.0 - r) / 2.0;
    Polyline cap;
    cap.closed = true;
    cap.vertices.push_back({ell, 0.0});
    const auto& maps = system.maps();
    for (int k = 1; k <= n - 2; ++k) cap.vertices.push_back(maps[k](Vec2{1.0, 0.0}));
    cap.vertices.push_back({ell + r, 0.0});
    out.residual_area = std::abs(signed_area(cap));
    out.residual.push_back(std::move(cap));
    out.additivity_defect = out.sector_area - out.copies_area - out.residual_area;
    return out;
}

Polyline square(double side, Vec2 corner) {
    return Polyline{{corner,
                     corner + Vec2{side, 0.0},
                     corner + Vec2{side, side},
                     corner + Vec2{0.0, side}},
                    true};
}

Polyline scaled(const Polyline& p, double factor) {
    Polyline out = p;
    for (auto& v : out.vertices) v = factor * v;
    return out;
}

}  // namespace fhl::geometry
