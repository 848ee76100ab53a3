#pragma once
/// Fixed points of f^q − (p, r): a certified cell search over the
/// fundamental domain, Lefschetz indices by adaptive winding numbers, and a
/// directional advance probe around a fixed point.
///
/// The search subdivides cells it cannot certify displacement-free (per-row
/// or full-vector local Lipschitz certificates) until the cell diameter
/// falls below the residual tolerance. Floor cells cluster into point-like
/// records; clusters of non-point-like extent — identity regions, curves of
/// fixed points — are reported UNRESOLVED instead of being passed off as a
/// finite fixed-point set, as are cells still queued when the evaluation
/// budget runs out.

#include <cstdint>
#include <optional>
#include <vector>

#include "rotaset/geometry.hpp"
#include "rotaset/map_core.hpp"

namespace rotaset {

// ── displacement field ──────────────────────────────────────────────────────
/// g(z) = f^q(z) − z − (p, r); fixed points of f^q − (p, r) are its zeros.
Vec2 rho_displacement(const LiftedMap& map, const RationalVector& rho,
                      Vec2 z);

// ── certified search ────────────────────────────────────────────────────────
struct FixedPointRecord {
  Vec2 z;                          // representative in [0,1)²
  RationalVector rho;
  double residual = 0.0;           // |g(z)| at the reported point
  std::optional<long long> index;  // filled on demand via lefschetz_index
};

struct UnresolvedCell {
  enum class Reason {
    kFloor,   // reached the size floor: |g| above tol yet not certifiable
    kBudget,  // still queued when the evaluation budget ran out
  };
  Vec2 center;
  double side = 0.0;
  Reason reason = Reason::kFloor;
};

struct FixedPointSearch {
  std::vector<FixedPointRecord> records;   // point-like zeros, deduplicated
  std::vector<UnresolvedCell> unresolved;  // storage capped; see total below
  std::size_t unresolved_total = 0;
  long long map_evaluations = 0;  // applications of the underlying map
  bool budget_exhausted = false;
};

/// Covers [0,1)² with cells of side ≤ cell (usage_error unless
/// 0 < cell ≤ 0.1 and tol > 0). `budget` caps applications of `map`;
/// remaining cells are reported rather than dropped.
FixedPointSearch find_fixed_points(const LiftedMap& map,
                                   const RationalVector& rho, double cell,
                                   double tol,
                                   long long budget = 20000000);

// ── Lefschetz index ─────────────────────────────────────────────────────────
/// Winding number of g around the circle of the given radius: principal
/// angle increments, sample count doubling until the minimum of |g| on the
/// circle dominates the inter-sample variation tenfold (every increment is
/// then below π/2, making the integer unambiguous). Throws
/// numerical_error("NEAR_ZERO_ON_CIRCLE …") when refinement cannot achieve
/// that — the circle passes too near a zero of g.
long long lefschetz_index(const LiftedMap& map, const RationalVector& rho,
                          Vec2 center, double radius, int samples = 256);

// ── directional advance probe ───────────────────────────────────────────────
/// Samples rings between r_outer and r_inner around the fixed point z0
/// (usage_error when |f(z0) − z0| > 1e−9) and checks the strict advance
/// p₁(f(z)) > p₁(z) in the identity chart; callers align other charts by
/// conjugating the map first. Sample points that f fixes exactly are counted
/// and exempted: they witness that z0 is not isolated, not that the moving
/// set escapes its advance cone. PASS certifies only the sampled chart and
/// a FAIL does not refute a cleverer chart.
struct TrivializabilityResult {
  bool pass = false;
  Vec2 witness;               // advance minimizer over moving samples
  double min_advance = 0.0;   // min p₁(f(z)) − p₁(z) over moving samples
  long long fixed_samples = 0;
  long long total_samples = 0;
};

TrivializabilityResult trivializability_probe(const LiftedMap& map, Vec2 z0,
                                              double r_inner, double r_outer,
                                              int samples = 4096);

}  // namespace rotaset
