/// Certified fixed-point search, winding-number indices, and the advance
/// probe. The search is a breadth-first subdivision: a cell is discarded
/// only under a local Lipschitz certificate that |g| cannot vanish on it,
/// split otherwise, and classified at the size floor. Floor cells cluster
/// by adjacency (modulo ℤ²); point-like clusters become records, extended
/// ones are reported unresolved.

#include "rotaset/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "rotaset/errors.hpp"

namespace rotaset {
namespace {

constexpr std::size_t kMaxUnresolvedStored = 100000;
constexpr std::size_t kMaxFloorCells = 400000;
constexpr int kMaxDepth = 48;

struct Cell {
  Vec2 center;
  double side = 0.0;
  int depth = 0;
};

struct FloorCell {
  Vec2 center;
  double side = 0.0;
  double residual = 0.0;
  bool candidate = false;  // residual ≤ tol
};

/// One union-find / unwrapped-position entry per floor cell.
struct ClusterNode {
  int parent = -1;
  Vec2 unwrapped;  // position relative to the cluster seed, wrap-corrected
  bool placed = false;
};

int uf_find(std::vector<ClusterNode>& nodes, int i) {
  while (nodes[static_cast<std::size_t>(i)].parent != i) {
    auto& n = nodes[static_cast<std::size_t>(i)];
    n.parent = nodes[static_cast<std::size_t>(n.parent)].parent;
    i = n.parent;
  }
  return i;
}

void uf_union(std::vector<ClusterNode>& nodes, int a, int b) {
  a = uf_find(nodes, a);
  b = uf_find(nodes, b);
  if (a != b) nodes[static_cast<std::size_t>(b)].parent = a;
}

/// Nearest-image difference a − b modulo ℤ².
Vec2 wrap_delta(Vec2 a, Vec2 b) {
  const Vec2 d = a - b;
  return {d.x - std::nearbyint(d.x), d.y - std::nearbyint(d.y)};
}

}  // namespace

// ── displacement field ──────────────────────────────────────────────────────
Vec2 rho_displacement(const LiftedMap& map, const RationalVector& rho,
                      Vec2 z) {
  Vec2 w = z;
  for (long long i = 0; i < rho.q; ++i) w = evaluate(map, w);
  return w - z - Vec2{static_cast<double>(rho.p), static_cast<double>(rho.r)};
}

// ── certified search ────────────────────────────────────────────────────────
FixedPointSearch find_fixed_points(const LiftedMap& map,
                                   const RationalVector& rho, double cell,
                                   double tol, long long budget) {
  if (!(cell > 0.0 && cell <= 0.1))
    throw usage_error("find_fixed_points: cell must lie in (0, 0.1]");
  if (!(tol > 0.0))
    throw usage_error("find_fixed_points: tol must be positive");
  if (budget < 1)
    throw usage_error("find_fixed_points: budget must be positive");

  // The iterate whose displacement is searched; power() supplies local
  // Lipschitz fields for f^q from the factor's fields.
  const LiftedMap iter = rho.q == 1 ? map : power(map, rho.q);
  const Vec2 shift{static_cast<double>(rho.p), static_cast<double>(rho.r)};
  const double floor_side = tol / std::sqrt(2.0);  // diameter ≤ tol

  FixedPointSearch out;
  const auto note_unresolved = [&out](const Cell& c,
                                      UnresolvedCell::Reason reason) {
    ++out.unresolved_total;
    if (out.unresolved.size() < kMaxUnresolvedStored)
      out.unresolved.push_back({c.center, c.side, reason});
  };

  std::deque<Cell> queue;
  const int n0 = static_cast<int>(std::ceil(1.0 / cell));
  const double side0 = 1.0 / static_cast<double>(n0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j)
      queue.push_back({{(i + 0.5) * side0, (j + 0.5) * side0}, side0, 0});

  std::vector<FloorCell> floor_cells;
  const long long cost_per_cell = 2 * rho.q;  // g(center) plus the row query

  while (!queue.empty()) {
    if (out.map_evaluations + cost_per_cell > budget) {
      out.budget_exhausted = true;
      for (const Cell& c : queue)
        note_unresolved(c, UnresolvedCell::Reason::kBudget);
      queue.clear();
      break;
    }
    const Cell c = queue.front();
    queue.pop_front();

    const Vec2 g = evaluate(iter, c.center) - c.center - shift;
    out.map_evaluations += rho.q;
    const double rdisk = 0.5 * c.side * std::sqrt(2.0);

    // Exclusion certificate: one displacement row (or the full vector)
    // provably stays away from zero on the whole cell. Row Lipschitz
    // constants gain 1 from the identity part of g.
    const double lx = local_lip_bound_x(iter, c.center, rdisk);
    const double ly = local_lip_bound_y(iter, c.center, rdisk);
    const double lf = local_lip_bound(iter, c.center, rdisk);
    out.map_evaluations += rho.q;
    if (std::fabs(g.x) > (lx + 1.0) * rdisk ||
        std::fabs(g.y) > (ly + 1.0) * rdisk ||
        norm(g) > (lf + 1.0) * rdisk)
      continue;

    if (c.side <= floor_side || c.depth >= kMaxDepth) {
      const double res = norm(g);
      if (floor_cells.size() < kMaxFloorCells) {
        floor_cells.push_back({c.center, c.side, res, res <= tol});
      } else {
        note_unresolved(c, UnresolvedCell::Reason::kFloor);
      }
      continue;
    }

    const double h = 0.25 * c.side;
    const double s = 0.5 * c.side;
    queue.push_back({{c.center.x - h, c.center.y - h}, s, c.depth + 1});
    queue.push_back({{c.center.x + h, c.center.y - h}, s, c.depth + 1});
    queue.push_back({{c.center.x - h, c.center.y + h}, s, c.depth + 1});
    queue.push_back({{c.center.x + h, c.center.y + h}, s, c.depth + 1});
  }

  if (floor_cells.empty()) return out;

  // ── cluster floor cells by adjacency modulo ℤ² ───────────────────────────
  double s_min = floor_cells.front().side;
  for (const FloorCell& f : floor_cells) s_min = std::min(s_min, f.side);
  const double link = 1.75 * s_min;

  // Spatial hash on ⌊center/s_min⌋ so neighbor scans stay linear.
  const auto key_of = [s_min](Vec2 p) {
    const long long kx = static_cast<long long>(std::floor(p.x / s_min));
    const long long ky = static_cast<long long>(std::floor(p.y / s_min));
    return (static_cast<std::uint64_t>(kx) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky));
  };
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  for (std::size_t i = 0; i < floor_cells.size(); ++i)
    buckets[key_of(floor_cells[i].center)].push_back(static_cast<int>(i));

  std::vector<ClusterNode> nodes(floor_cells.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    nodes[i].parent = static_cast<int>(i);

  for (std::size_t i = 0; i < floor_cells.size(); ++i) {
    const Vec2 ci = floor_cells[i].center;
    for (int dx = -2; dx <= 2; ++dx) {
      for (int dy = -2; dy <= 2; ++dy) {
        // Probe neighboring buckets of each lattice image of the center.
        const Vec2 probe{ci.x + dx * s_min, ci.y + dy * s_min};
        const Vec2 wrapped = reduce_torus(probe);
        const auto it = buckets.find(key_of(wrapped));
        if (it == buckets.end()) continue;
        for (const int j : it->second) {
          if (static_cast<std::size_t>(j) <= i) continue;
          const Vec2 d = wrap_delta(floor_cells[static_cast<std::size_t>(j)]
                                        .center,
                                    ci);
          if (norm(d) <= link)
            uf_union(nodes, static_cast<int>(i), j);
        }
      }
    }
  }

  // Group members and assign wrap-consistent unwrapped positions by BFS
  // from each cluster seed.
  std::unordered_map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < floor_cells.size(); ++i)
    members[uf_find(nodes, static_cast<int>(i))].push_back(
        static_cast<int>(i));

  std::vector<int> roots;
  roots.reserve(members.size());
  for (const auto& kv : members) roots.push_back(kv.first);
  std::sort(roots.begin(), roots.end());

  const double point_like = std::max(20.0 * tol, 8.0 * s_min);

  std::vector<FixedPointRecord> records;
  for (const int root : roots) {
    std::vector<int>& group = members[root];
    std::sort(group.begin(), group.end());

    // BFS unwrap: place the seed at its own coordinates, every neighbor at
    // seed + nearest-image delta, accumulated along the adjacency graph.
    std::deque<int> bfs;
    nodes[static_cast<std::size_t>(group.front())].unwrapped =
        floor_cells[static_cast<std::size_t>(group.front())].center;
    nodes[static_cast<std::size_t>(group.front())].placed = true;
    bfs.push_back(group.front());
    while (!bfs.empty()) {
      const int i = bfs.front();
      bfs.pop_front();
      const Vec2 pi = nodes[static_cast<std::size_t>(i)].unwrapped;
      const Vec2 ci = floor_cells[static_cast<std::size_t>(i)].center;
      for (const int j : group) {
        auto& nj = nodes[static_cast<std::size_t>(j)];
        if (nj.placed) continue;
        const Vec2 d =
            wrap_delta(floor_cells[static_cast<std::size_t>(j)].center, ci);
        if (norm(d) <= link) {
          nj.unwrapped = pi + d;
          nj.placed = true;
          bfs.push_back(j);
        }
      }
    }

    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    bool any_candidate = false;
    int best = -1;
    for (const int i : group) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      const FloorCell& f = floor_cells[static_cast<std::size_t>(i)];
      lo_x = std::min(lo_x, n.unwrapped.x);
      hi_x = std::max(hi_x, n.unwrapped.x);
      lo_y = std::min(lo_y, n.unwrapped.y);
      hi_y = std::max(hi_y, n.unwrapped.y);
      if (f.candidate) {
        any_candidate = true;
        if (best < 0 ||
            f.residual < floor_cells[static_cast<std::size_t>(best)].residual)
          best = i;
      }
    }
    const double diameter = std::hypot(hi_x - lo_x, hi_y - lo_y);

    if (any_candidate && diameter <= point_like) {
      const FloorCell& f = floor_cells[static_cast<std::size_t>(best)];
      FixedPointRecord rec;
      rec.z = reduce_torus(f.center);
      rec.rho = rho;
      rec.residual = f.residual;
      records.push_back(rec);
    } else {
      // An extended cluster (or one that never met the tolerance) must not
      // masquerade as a finite set of fixed points.
      for (const int i : group) {
        const FloorCell& f = floor_cells[static_cast<std::size_t>(i)];
        Cell c{f.center, f.side, 0};
        note_unresolved(c, UnresolvedCell::Reason::kFloor);
      }
    }
  }

  // ── dedup modulo ℤ² at the requested cell granularity ───────────────────
  std::sort(records.begin(), records.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) {
              return a.residual < b.residual;
            });
  for (const FixedPointRecord& rec : records) {
    bool close = false;
    for (const FixedPointRecord& kept : out.records) {
      if (torus_distance(rec.z, kept.z) < cell) {
        close = true;
        break;
      }
    }
    if (!close) out.records.push_back(rec);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) {
              return a.z.x != b.z.x ? a.z.x < b.z.x : a.z.y < b.z.y;
            });
  return out;
}

// ── Lefschetz index ─────────────────────────────────────────────────────────
long long lefschetz_index(const LiftedMap& map, const RationalVector& rho,
                          Vec2 center, double radius, int samples) {
  if (!is_finite(center) || !(radius > 0.0) || !std::isfinite(radius))
    throw usage_error("lefschetz_index: bad circle");
  if (samples < 8) throw usage_error("lefschetz_index: samples must be ≥ 8");

  constexpr long long kMaxSamples = 1LL << 22;
  for (long long n = samples; n <= kMaxSamples; n *= 2) {
    std::vector<Vec2> g(static_cast<std::size_t>(n));
    double min_norm = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < n; ++i) {
      const double th = 2.0 * M_PI * static_cast<double>(i) /
                        static_cast<double>(n);
      const Vec2 z{center.x + radius * std::cos(th),
                   center.y + radius * std::sin(th)};
      g[static_cast<std::size_t>(i)] = rho_displacement(map, rho, z);
      min_norm = std::min(min_norm, norm(g[static_cast<std::size_t>(i)]));
    }
    double max_step = 0.0;
    for (long long i = 0; i < n; ++i) {
      const Vec2 a = g[static_cast<std::size_t>(i)];
      const Vec2 b = g[static_cast<std::size_t>((i + 1) % n)];
      max_step = std::max(max_step, norm(b - a));
    }
    if (!(min_norm > 0.0) || min_norm < 10.0 * max_step) continue;

    double total = 0.0;
    bool sharp = true;
    for (long long i = 0; i < n && sharp; ++i) {
      const Vec2 a = g[static_cast<std::size_t>(i)];
      const Vec2 b = g[static_cast<std::size_t>((i + 1) % n)];
      const double inc = std::atan2(cross(a, b), dot(a, b));
      if (std::fabs(inc) >= 0.5 * M_PI) sharp = false;
      total += inc;
    }
    if (!sharp) continue;
    const double winding = total / (2.0 * M_PI);
    const double rounded = std::nearbyint(winding);
    if (std::fabs(winding - rounded) > 1e-6) continue;
    return static_cast<long long>(rounded);
  }
  throw numerical_error(
      "NEAR_ZERO_ON_CIRCLE: the displacement cannot be bounded away from "
      "zero on the sampling circle after refinement");
}

// ── directional advance probe ───────────────────────────────────────────────
TrivializabilityResult trivializability_probe(const LiftedMap& map, Vec2 z0,
                                              double r_inner, double r_outer,
                                              int samples) {
  if (!is_finite(z0)) throw usage_error("trivializability_probe: bad point");
  if (!(0.0 < r_inner && r_inner < r_outer))
    throw usage_error(
        "trivializability_probe: requires 0 < r_inner < r_outer");
  if (samples < 16)
    throw usage_error("trivializability_probe: samples must be ≥ 16");
  if (norm(evaluate(map, z0) - z0) > 1e-9)
    throw usage_error(
        "trivializability_probe: z0 is not a fixed point to 1e-9");

  const int n_rings = std::max(8, static_cast<int>(std::sqrt(samples / 4)));
  const int n_ang = std::max(16, samples / n_rings);

  TrivializabilityResult res;
  res.min_advance = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_rings; ++j) {
    const double frac = n_rings == 1
                            ? 0.0
                            : static_cast<double>(j) / (n_rings - 1);
    const double r = r_outer * std::pow(r_inner / r_outer, frac);
    // Stagger rings so the rays do not all share the same angles.
    const double stagger = 2.0 * M_PI * static_cast<double>(j) /
                           (static_cast<double>(n_rings) * n_ang);
    for (int k = 0; k < n_ang; ++k) {
      const double th = 2.0 * M_PI * k / n_ang + stagger;
      const Vec2 z{z0.x + r * std::cos(th), z0.y + r * std::sin(th)};
      const Vec2 fz = evaluate(map, z);
      ++res.total_samples;
      if (fz == z) {
        ++res.fixed_samples;  // exactly fixed: exempt from strict advance
        continue;
      }
      const double advance = fz.x - z.x;
      if (advance < res.min_advance) {
        res.min_advance = advance;
        res.witness = z;
      }
    }
  }
  if (res.fixed_samples == res.total_samples) {
    res.pass = true;  // vacuous: nothing moved
    res.min_advance = 0.0;
    return res;
  }
  res.pass = res.min_advance > 0.0;
  return res;
}

}  // namespace rotaset
