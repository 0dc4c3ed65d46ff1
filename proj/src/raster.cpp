#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhl/error.hpp"
#include "fhl/geometry.hpp"

namespace fhl::geometry {

namespace {

// Wall fractions below this are clamped; the cut-cell coefficient 1/(theta h^2)
// otherwise blows up the condition number for negligible accuracy gain.
constexpr float kMinWallFraction = 0.05f;

}  // namespace

GridDomain::GridDomain(double h, Vec2 origin, int nx, int ny, std::vector<std::uint8_t> interior,
                       std::vector<WallCell> walls, std::optional<Polyline> boundary)
    : h_(h),
      origin_(origin),
      nx_(nx),
      ny_(ny),
      interior_(std::move(interior)),
      walls_(std::move(walls)),
      polyline_(std::move(boundary)) {
    if (!(h > 0.0) || nx < 1 || ny < 1) throw DomainError("GridDomain: bad dimensions");
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (interior_.size() != n) throw DomainError("GridDomain: mask size mismatch");
    std::sort(walls_.begin(), walls_.end(),
              [](const WallCell& a, const WallCell& b) { return a.index < b.index; });

    boundary_.assign(n, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = index(i, j);
            if (interior_[c]) {
                ++interior_count_;
                continue;
            }
            bool touch = false;
            for (int dj = -1; dj <= 1 && !touch; ++dj) {
                for (int di = -1; di <= 1 && !touch; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                    touch = interior_[index(ii, jj)] != 0;
                }
            }
            boundary_[c] = touch ? 1 : 0;
        }
    }
    for (int i = 0; i < nx; ++i) {
        if (interior_[index(i, 0)] || interior_[index(i, ny - 1)])
            throw GeometryError("GridDomain: interior touches the grid edge");
    }
    for (int j = 0; j < ny; ++j) {
        if (interior_[index(0, j)] || interior_[index(nx - 1, j)])
            throw GeometryError("GridDomain: interior touches the grid edge");
    }
    if (interior_count_ == 0) throw GeometryError("GridDomain: empty interior");
    const int comps = interior_components();
    if (comps != 1) {
        std::ostringstream os;
        os << "GridDomain: interior has " << comps << " connected components";
        throw GeometryError(os.str());
    }
}

double GridDomain::wall_fraction(int i, int j, Dir d) const {
    const std::size_t c = index(i, j);
    auto it = std::lower_bound(walls_.begin(), walls_.end(), c,
                               [](const WallCell& w, std::size_t v) { return w.index < v; });
    if (it == walls_.end() || it->index != c) return 1.0;
    return it->fraction[d];
}

int GridDomain::interior_components() const {
    std::vector<int> label(interior_.size(), -1);
    std::vector<std::size_t> stack;
    int comps = 0;
    for (std::size_t s = 0; s < interior_.size(); ++s) {
        if (!interior_[s] || label[s] >= 0) continue;
        label[s] = comps;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(c % nx_), j = static_cast<int>(c / nx_);
            const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[1] < 0 || q[0] >= nx_ || q[1] >= ny_) continue;
                const std::size_t k = index(q[0], q[1]);
                if (interior_[k] && label[k] < 0) {
                    label[k] = comps;
                    stack.push_back(k);
                }
            }
        }
        ++comps;
    }
    return comps;
}

namespace {

// Crossings of the polyline with the horizontal lines through cell centres
// (or vertical lines, with x and y swapped), using the half-open rule so a
// vertex on a scanline is counted once.
std::vector<std::vector<double>> scan_crossings(const Polyline& p, double o_across, double o_along,
                                                double h, int lines, bool vertical) {
    std::vector<std::vector<double>> cross(lines);
    for (std::size_t e = 0; e < p.edge_count(); ++e) {
        auto [a, b] = p.edge(e);
        double ay = vertical ? a.x : a.y, by = vertical ? b.x : b.y;
        double ax = vertical ? a.y : a.x, bx = vertical ? b.y : b.x;
        if (ay == by) continue;
        if (ay > by) {
            std::swap(ay, by);
            std::swap(ax, bx);
        }
        // Lines j with ay <= y_j < by, y_j = o_across + h (j + 1/2).
        int j0 = static_cast<int>(std::ceil((ay - o_across) / h - 0.5));
        int j1 = static_cast<int>(std::ceil((by - o_across) / h - 0.5)) - 1;
        j0 = std::max(j0, 0);
        j1 = std::min(j1, lines - 1);
        for (int j = j0; j <= j1; ++j) {
            const double y = o_across + h * (j + 0.5);
            if (y < ay || y >= by) continue;
            const double t = (y - ay) / (by - ay);
            cross[j].push_back(ax + t * (bx - ax));
        }
    }
    (void)o_along;
    for (auto& c : cross) std::sort(c.begin(), c.end());
    return cross;
}

float fraction_between(const std::vector<double>& xs, double from, double to, double h) {
    // First crossing strictly between the two centres, measured from `from`.
    if (to > from) {
        auto it = std::upper_bound(xs.begin(), xs.end(), from);
        if (it != xs.end() && *it <= to) return static_cast<float>((*it - from) / h);
    } else {
        auto it = std::lower_bound(xs.begin(), xs.end(), from);
        if (it != xs.begin()) {
            --it;
            if (*it >= to) return static_cast<float>((from - *it) / h);
        }
    }
    return 0.5f;
}

}  // namespace

GridDomain rasterize(const Polyline& boundary, double resolution, bool check_simple) {
    if (!boundary.closed) throw GeometryError("rasterize: polyline must be closed");
    if (boundary.vertices.size() < 3) throw GeometryError("rasterize: fewer than 3 vertices");
    if (!(resolution >= 16.0)) throw DomainError("rasterize: resolution must be >= 16");
    if (check_simple) {
        if (auto hit = find_self_intersection(boundary)) {
            std::ostringstream os;
            os << "rasterize: polyline self-intersects at edges " << hit->edge_a << " and "
               << hit->edge_b;
            throw GeometryError(os.str());
        }
    }

    const double h = 1.0 / resolution;
    double xmin = boundary.vertices[0].x, xmax = xmin;
    double ymin = boundary.vertices[0].y, ymax = ymin;
    for (const auto& v : boundary.vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    const Vec2 origin{xmin - 2.0 * h, ymin - 2.0 * h};
    const int nx = static_cast<int>(std::ceil((xmax - xmin) / h)) + 4;
    const int ny = static_cast<int>(std::ceil((ymax - ymin) / h)) + 4;
    const double cells = static_cast<double>(nx) * ny;
    if (cells > 1.5e8) {
        std::ostringstream os;
        os << "rasterize: grid of " << nx << "x" << ny << " cells exceeds the budget";
        throw ResourceError(os.str());
    }

    const auto rows = scan_crossings(boundary, origin.y, origin.x, h, ny, false);
    const auto cols = scan_crossings(boundary, origin.x, origin.y, h, nx, true);

    std::vector<std::uint8_t> interior(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
        const auto& xs = rows[j];
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // Cells with centre in [xs[k], xs[k+1]).
            int i0 = static_cast<int>(std::ceil((xs[k] - origin.x) / h - 0.5));
            int i1 = static_cast<int>(std::ceil((xs[k + 1] - origin.x) / h - 0.5)) - 1;
            i0 = std::max(i0, 0);
            i1 = std::min(i1, nx - 1);
            for (int i = i0; i <= i1; ++i) interior[static_cast<std::size_t>(j) * nx + i] = 1;
        }
    }

    std::vector<GridDomain::WallCell> walls;
    auto in = [&](int i, int j) { return interior[static_cast<std::size_t>(j) * nx + i] != 0; };
    for (int j = 1; j + 1 < ny; ++j) {
        for (int i = 1; i + 1 < nx; ++i) {
            if (!in(i, j)) continue;
            const bool e = !in(i + 1, j), w = !in(i - 1, j), n = !in(i, j + 1), s = !in(i, j - 1);
            if (!(e || w || n || s)) continue;
            GridDomain::WallCell wc{static_cast<std::size_t>(j) * nx + i, {1.f, 1.f, 1.f, 1.f}};
            const double cx = origin.x + h * (i + 0.5), cy = origin.y + h * (j + 0.5);
            auto clampf = [](float f) { return std::clamp(f, kMinWallFraction, 1.0f); };
            if (e) wc.fraction[GridDomain::East] = clampf(fraction_between(rows[j], cx, cx + h, h));
            if (w) wc.fraction[GridDomain::West] = clampf(fraction_between(rows[j], cx, cx - h, h));
            if (n) wc.fraction[GridDomain::North] = clampf(fraction_between(cols[i], cy, cy + h, h));
            if (s) wc.fraction[GridDomain::South] = clampf(fraction_between(cols[i], cy, cy - h, h));
            walls.push_back(wc);
        }
    }
    return GridDomain(h, origin, nx, ny, std::move(interior), std::move(walls), boundary);
}

}  // namespace fhl::geometry
