/// Convex-hull and point-classification kernels. The hull is Andrew's
/// monotone chain over lexicographically sorted unique points; a cross
/// product within `collinear_tol` counts as a non-left turn, so the returned
/// chain never carries three consecutive vertices collinear beyond the
/// tolerance. All classification is done through signed edge distances so
/// that the same code path serves INSIDE/BOUNDARY/OUTSIDE decisions.

#include "rotaset/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace rotaset {

// ── Vec2 helpers ───────────────────────────────────────────────────────────
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double norm_inf(Vec2 a) { return std::max(std::fabs(a.x), std::fabs(a.y)); }
bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// ── ConvexPolygon ──────────────────────────────────────────────────────────
ConvexPolygon::ConvexPolygon(std::vector<Vec2> ccw_vertices)
    : verts_(std::move(ccw_vertices)) {}

double ConvexPolygon::area() const {
  if (verts_.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

double ConvexPolygon::signed_interior_distance(Vec2 p) const {
  if (verts_.empty()) throw usage_error("classify/distance on empty polygon");
  if (verts_.size() == 1) return -norm(p - verts_[0]);
  if (verts_.size() == 2)
    return -dist_point_segment(p, verts_[0], verts_[1]);
  // Signed distance to each edge line, positive on the interior side.
  double min_edge = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    const Vec2 e = b - a;
    const double len = norm(e);
    if (len == 0.0) continue;
    min_edge = std::min(min_edge, cross(e, p - a) / len);
  }
  if (min_edge >= 0.0) return min_edge;  // inside: distance to boundary
  // Outside: true Euclidean distance to the boundary.
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const Vec2 a = verts_[i];
    const Vec2 b = verts_[(i + 1) % verts_.size()];
    d = std::min(d, dist_point_segment(p, a, b));
  }
  return -d;
}

double ConvexPolygon::distance_to(Vec2 p) const {
  const double s = signed_interior_distance(p);
  return s >= 0.0 ? 0.0 : -s;
}

// ── convex hull ────────────────────────────────────────────────────────────
ConvexPolygon convex_hull(std::vector<Vec2> points, double collinear_tol) {
  if (points.empty()) throw usage_error("convex_hull: empty point set");
  for (const Vec2& p : points)
    if (!is_finite(p)) throw usage_error("convex_hull: non-finite point");
  if (collinear_tol < 0.0)
    throw usage_error("convex_hull: negative tolerance");

  std::sort(points.begin(), points.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](Vec2 a, Vec2 b) { return a == b; }),
               points.end());
  const std::size_t n = points.size();
  if (n == 1) return ConvexPolygon({points[0]});

  // Build lower then upper chain; a turn with cross ≤ tol is not a left turn.
  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 &&
           cross(h[k - 1] - h[k - 2], points[i] - h[k - 2]) <= collinear_tol)
      --k;
    h[k++] = points[i];
  }
  const std::size_t lower_end = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower_end &&
           cross(h[k - 1] - h[k - 2], points[i] - h[k - 2]) <= collinear_tol)
      --k;
    h[k++] = points[i];
  }
  h.resize(k - 1);  // last point equals the first
  if (h.size() == 2 && h[0] == h[1]) h.resize(1);
  return ConvexPolygon(std::move(h));
}

// ── classification ─────────────────────────────────────────────────────────
PointLocation classify_point(const ConvexPolygon& poly, Vec2 p, double tol) {
  if (!is_finite(p)) throw usage_error("classify_point: non-finite point");
  if (tol < 0.0) throw usage_error("classify_point: negative tolerance");
  const double s = poly.signed_interior_distance(p);
  if (poly.size() <= 2) {
    // Point or segment: no interior, so INSIDE is impossible.
    return (-s >= tol) ? PointLocation::OUTSIDE : PointLocation::BOUNDARY;
  }
  if (s >= tol) return PointLocation::INSIDE;
  if (-s >= tol) return PointLocation::OUTSIDE;
  return PointLocation::BOUNDARY;
}

double hausdorff_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.empty() || b.empty())
    throw usage_error("hausdorff_distance: empty polygon");
  double d = 0.0;
  for (const Vec2& v : a.vertices()) d = std::max(d, b.distance_to(v));
  for (const Vec2& v : b.vertices()) d = std::max(d, a.distance_to(v));
  return d;
}

void write_vertices_csv(const ConvexPolygon& poly, std::ostream& os) {
  char buf[64];
  for (const Vec2& v : poly.vertices()) {
    std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", v.x, v.y);
    os << buf;
  }
}

// ── deterministic RNG ──────────────────────────────────────────────────────
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace rotaset
