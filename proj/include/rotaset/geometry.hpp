#pragma once
/// Planar convex geometry: 2-vectors, convex hulls (monotone chain with a
/// collinearity tolerance), point-vs-polygon classification with a boundary
/// band, and Hausdorff distance between convex sets. Degenerate hulls (a
/// single point, a segment) are first-class citizens: every operation accepts
/// them and classification can only answer BOUNDARY or OUTSIDE for them.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rotaset/errors.hpp"

namespace rotaset {

// ── Vec2 ─────────────────────────────────────────────────────────────────
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);  // z-component of a × b
double norm(Vec2 a);
double norm_inf(Vec2 a);
bool is_finite(Vec2 a);

/// Distance from point p to the closed segment [a, b].
double dist_point_segment(Vec2 p, Vec2 a, Vec2 b);

// ── ConvexPolygon ────────────────────────────────────────────────────────
/// Counter-clockwise vertex list without repetition of the first vertex.
/// size() may be 1 (point) or 2 (segment).
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec2> ccw_vertices);

  const std::vector<Vec2>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }
  bool empty() const { return verts_.empty(); }
  bool is_point() const { return verts_.size() == 1; }
  bool is_segment() const { return verts_.size() == 2; }

  /// Signed area by the shoelace formula (0 for degenerate forms).
  double area() const;

  /// Euclidean distance from p to this set (0 if p is inside).
  double distance_to(Vec2 p) const;

  /// Largest d such that the disk of radius d around p is contained in the
  /// polygon; negative when p is outside (minus the distance to the set).
  double signed_interior_distance(Vec2 p) const;

 private:
  std::vector<Vec2> verts_;
};

// ── operations ───────────────────────────────────────────────────────────
/// Monotone-chain convex hull. Points closer than `collinear_tol` to an edge
/// (cross-product test) are treated as collinear and dropped; tol 0 keeps
/// every extreme-or-cocircular point (used for exact pooling). Duplicates are
/// always removed. Throws usage_error on an empty or non-finite input.
ConvexPolygon convex_hull(std::vector<Vec2> points,
                          double collinear_tol = 1e-12);

enum class PointLocation { INSIDE, BOUNDARY, OUTSIDE };

/// INSIDE  ⇔ the disk of radius tol around p fits in the polygon,
/// OUTSIDE ⇔ the distance from p to the polygon is at least tol,
/// BOUNDARY otherwise. Degenerate hulls can only yield BOUNDARY / OUTSIDE.
PointLocation classify_point(const ConvexPolygon& poly, Vec2 p, double tol);

/// Symmetric Hausdorff distance between two convex polygons (attained at
/// vertices against a convex set, so the vertex sweep is exact).
double hausdorff_distance(const ConvexPolygon& a, const ConvexPolygon& b);

/// Writes one "x,y" row per vertex with 17 significant digits.
void write_vertices_csv(const ConvexPolygon& poly, std::ostream& os);

// ── deterministic RNG helpers ────────────────────────────────────────────
/// splitmix64: the standard 64-bit mix; used to derive independent
/// substreams from (seed, index) pairs, identically on every platform.
std::uint64_t splitmix64(std::uint64_t& state);

/// Uniform double in [0,1) from the top 53 bits of splitmix64 output.
double uniform01(std::uint64_t& state);

}  // namespace rotaset
