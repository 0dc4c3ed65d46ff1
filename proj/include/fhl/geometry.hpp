#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fhl::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// p -> translation + ratio * Rot(rotation) * Refl(p), where Refl flips y when
/// `reflection` is set.
class Similitude {
public:
    Similitude(double ratio, double rotation, bool reflection, Vec2 translation);

    double ratio() const { return ratio_; }
    double rotation() const { return rotation_; }
    bool reflection() const { return reflection_; }
    Vec2 translation() const { return translation_; }

    Vec2 operator()(Vec2 p) const;

    /// (this ∘ other)(p) = this(other(p)).
    Similitude compose(const Similitude& other) const;

private:
    double ratio_;
    double rotation_;
    bool reflection_;
    Vec2 translation_;
    double c_, s_;
};

/// One distinct scaling ratio together with how many maps share it.
struct RatioCount {
    double ratio;
    int multiplicity;
};

/// Either an explicit list of planar similitudes, or an abstract ratio list
/// (used for zeta-function work in any ambient dimension).
class SelfSimilarSystem {
public:
    SelfSimilarSystem(std::vector<Similitude> maps, int ambient_dim = 2);
    static SelfSimilarSystem from_ratios(std::vector<RatioCount> ratios, int ambient_dim);

    const std::vector<Similitude>& maps() const { return maps_; }
    bool has_geometry() const { return !maps_.empty(); }
    int ambient_dim() const { return ambient_dim_; }

    /// Distinct ratios, descending, with multiplicities.
    const std::vector<RatioCount>& distinct_ratios() const { return distinct_; }

    /// Generalized von Koch parameters when built by gkf_system.
    std::optional<std::pair<int, double>> gkf_parameters() const { return gkf_; }

private:
    SelfSimilarSystem() = default;
    friend SelfSimilarSystem gkf_system(int, double, bool);

    std::vector<Similitude> maps_;
    std::vector<RatioCount> distinct_;
    int ambient_dim_ = 2;
    std::optional<std::pair<int, double>> gkf_;
};

/// Merge nearly-equal ratios (relative 1e-12) and sort descending.
std::vector<RatioCount> dedupe_ratios(std::vector<RatioCount> ratios);

struct Polyline {
    std::vector<Vec2> vertices;
    bool closed = false;

    std::size_t edge_count() const {
        if (vertices.size() < 2) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }
    std::pair<Vec2, Vec2> edge(std::size_t i) const {
        return {vertices[i], vertices[(i + 1) % vertices.size()]};
    }
};

/// Signed shoelace area of a closed polyline (positive when counterclockwise).
double signed_area(const Polyline& p);
double perimeter(const Polyline& p);

/// Maps {phi_L, phi_R, psi_1..psi_{n-1}} of the (n, r)-von Koch curve. The
/// ratio r must lie in (0, 1/3]; `allow_any_ratio` relaxes this to (0, 1) for
/// negative-control experiments on non-admissible parameters.
SelfSimilarSystem gkf_system(int n, double r, bool allow_any_ratio = false);

/// Sufficient ratio bound for the (n, r)-von Koch curve to be simple.
double self_avoidance_bound(int n);

/// Maximum number of vertices any prefractal builder will allocate.
inline constexpr std::size_t kMaxPrefractalVertices = std::size_t{1} << 26;

/// Depth-`depth` prefractal of the curve from (0,0) to (1,0): the base segment
/// replaced recursively by its images, maps applied in chain order.
Polyline prefractal_curve(const SelfSimilarSystem& system, int depth);

struct Intersection {
    std::size_t edge_a;
    std::size_t edge_b;
};

/// Sweep over x-sorted edge bounding boxes; adjacent edges are ignored except
/// for collinear overlap. Returns the first offending pair found, if any.
std::optional<Intersection> find_self_intersection(const Polyline& p, double eps = 1e-12);

struct SnowflakeOptions {
    /// When r exceeds the self-avoidance bound the sweep is also run at this
    /// minimum depth, because violations need not show at depth 0 or 1.
    int min_check_depth_when_unsafe = 3;
};

struct SnowflakeResult {
    Polyline boundary;          // closed, counterclockwise, side-1 base n-gon
    bool ratio_above_bound = false;
};

/// Regular n-gon (side 1, counterclockwise) with a depth-`depth` curve on each
/// edge, bumps pointing outward. Throws GeometryError on self-intersection.
SnowflakeResult snowflake(const SelfSimilarSystem& system, int depth,
                          const SnowflakeOptions& opts = {});

/// Residual of the curve-subordinate region X_d (between the depth-d curve and
/// the base segment) after removing the images phi[X_{d-1}].
struct OsculatingResidual {
    std::vector<Polyline> residual;   // the n-gon cap of side r sitting on the gap
    double sector_area = 0.0;         // |X_d|
    double copies_area = 0.0;         // sum over maps of |phi[X_{d-1}]|
    double residual_area = 0.0;       // sum of residual polygon areas
    double additivity_defect = 0.0;   // |X_d| - copies - residual (0 iff the
                                      // copies and residual tile X_d)
};
OsculatingResidual osculating_residual(const SelfSimilarSystem& system, int depth);

/// Rasterized interior of a simple closed polyline.
///
/// Cells are indexed (i, j) with i along x. Cell (i, j) has center
/// origin + h * (i + 1/2, j + 1/2). Besides the masks, each interior cell that
/// touches an exterior 4-neighbour records the fraction of the centre-to-centre
/// distance at which the polyline is crossed in that direction.
class GridDomain {
public:
    enum Dir : int { East = 0, West = 1, North = 2, South = 3 };

    /// Interior cell with at least one exterior 4-neighbour.
    struct WallCell {
        std::size_t index;
        float fraction[4];  // by Dir; 1 where the neighbour is interior
    };

    GridDomain(double h, Vec2 origin, int nx, int ny, std::vector<std::uint8_t> interior,
               std::vector<WallCell> walls, std::optional<Polyline> boundary);

    double h() const { return h_; }
    Vec2 origin() const { return origin_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    Vec2 center(int i, int j) const {
        return {origin_.x + h_ * (i + 0.5), origin_.y + h_ * (j + 0.5)};
    }

    bool interior(int i, int j) const { return interior_[index(i, j)] != 0; }
    bool boundary(int i, int j) const { return boundary_[index(i, j)] != 0; }
    const std::vector<std::uint8_t>& interior_mask() const { return interior_; }
    const std::vector<std::uint8_t>& boundary_mask() const { return boundary_; }

    /// Fraction in (0, 1] of the distance to the exterior neighbour in
    /// direction `d` at which the boundary lies; 1 when not known.
    double wall_fraction(int i, int j, Dir d) const;
    /// Wall cells sorted by index.
    const std::vector<WallCell>& wall_cells() const { return walls_; }

    std::size_t interior_count() const { return interior_count_; }
    double area() const { return static_cast<double>(interior_count_) * h_ * h_; }
    const std::optional<Polyline>& polyline() const { return polyline_; }

    /// Number of 4-connected components of the interior.
    int interior_components() const;

private:
    double h_;
    Vec2 origin_;
    int nx_, ny_;
    std::vector<std::uint8_t> interior_;
    std::vector<std::uint8_t> boundary_;
    std::vector<WallCell> walls_;
    std::size_t interior_count_ = 0;
    std::optional<Polyline> polyline_;
};

/// Even-odd scanline fill at cell centres. `resolution` is cells per unit
/// length and must be at least 16. Rejects open or self-intersecting input.
GridDomain rasterize(const Polyline& boundary, double resolution, bool check_simple = true);

/// Axis-aligned square [x0, x0+side]^2 as a closed counterclockwise polyline.
Polyline square(double side = 1.0, Vec2 corner = {0.0, 0.0});

/// Uniformly scale a polyline about the origin.
Polyline scaled(const Polyline& p, double factor);

}  // namespace fhl::geometry
