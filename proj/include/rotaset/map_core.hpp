#pragma once
/// Lifted torus maps and their algebra. A LiftedMap is an evaluator on the
/// plane that commutes with integer translations, together with metadata:
/// a display name, named parameters, an optional exact inverse, an optional
/// global Lipschitz bound, optional local Lipschitz fields (full and
/// per-output-row, evaluated on a disk: field(center, radius) bounds the
/// Lipschitz constant of the map — or of one output component — over that
/// disk), and a list of *claimed* marked periodic orbits that downstream
/// estimators verify before trusting. compose/power/minus propagate
/// whatever metadata survives the operation.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rotaset/geometry.hpp"

namespace rotaset {

// ── rational rotation vectors ──────────────────────────────────────────────
/// (p/q, r/q) in lowest terms with q ≥ 1; gcd(p, r, q) = 1 after
/// normalization (the canonical representative of a rational vector).
struct RationalVector {
  long long p = 0;
  long long r = 0;
  long long q = 1;

  RationalVector() = default;
  RationalVector(long long p_, long long r_, long long q_);

  double x() const { return static_cast<double>(p) / static_cast<double>(q); }
  double y() const { return static_cast<double>(r) / static_cast<double>(q); }
  Vec2 vec() const { return {x(), y()}; }
};

bool operator==(const RationalVector& a, const RationalVector& b);

// ── marked orbits ──────────────────────────────────────────────────────────
/// A claim that f^period(z) = z + offset. Estimators iterate the map to
/// check the claim (tolerance 1e-9) and ignore it on failure.
struct MarkedOrbit {
  Vec2 z;
  long long period = 1;
  Vec2 offset;  // integer translation reached after `period` steps
};

// ── LiftedMap ──────────────────────────────────────────────────────────────
using EvalFn = std::function<Vec2(Vec2)>;
/// Bounds the Lipschitz constant of the map (or one of its output rows)
/// over the closed disk B(center, radius).
using LipFieldFn = std::function<double(Vec2, double)>;

struct LiftedMap {
  EvalFn eval;
  std::string name;
  std::map<std::string, double> params;

  EvalFn inverse;               // empty when no exact inverse is known
  double lipschitz_bound = 0.0; // 0 = unknown
  LipFieldFn local_lip;         // full Jacobian-norm bound; may be empty
  LipFieldFn local_lip_x;       // row bound for the x output; may be empty
  LipFieldFn local_lip_y;       // row bound for the y output; may be empty
  std::vector<MarkedOrbit> marked_orbits;

  bool has_inverse() const { return static_cast<bool>(inverse); }
};

/// Evaluate with finiteness checking (map_definition_error on NaN/∞ or a
/// missing evaluator).
Vec2 evaluate(const LiftedMap& map, Vec2 z);

/// Local Lipschitz bound of `map` on B(center, radius): the dedicated field
/// if present, else the global bound, else a conservative default.
double local_lip_bound(const LiftedMap& map, Vec2 center, double radius);
double local_lip_bound_x(const LiftedMap& map, Vec2 center, double radius);
double local_lip_bound_y(const LiftedMap& map, Vec2 center, double radius);

// ── periodicity check ──────────────────────────────────────────────────────
struct PeriodicityReport {
  double max_defect = 0.0;  // max over samples/offsets of |f(z+m) − f(z) − m|
  Vec2 worst_point;
  bool pass = false;        // max_defect ≤ tol
};

/// Samples `n_samples` seeded points z in [0,1)² and all integer offsets
/// m ∈ {−1,0,1}², measuring |f(z+m) − f(z) − m|.
PeriodicityReport check_periodicity(const LiftedMap& map, int n_samples,
                                    double tol,
                                    std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

// ── algebra ────────────────────────────────────────────────────────────────
/// compose(a, b)(z) = a(b(z)) — b is applied first.
LiftedMap compose(const LiftedMap& a, const LiftedMap& b);
/// n-fold composition, n ≥ 1 (usage_error otherwise).
LiftedMap power(const LiftedMap& f, long long n);
/// minus(f, v)(z) = f(z) − v.
LiftedMap minus(const LiftedMap& f, Vec2 v);

LiftedMap identity_map();
LiftedMap translation_map(Vec2 v);
/// Conjugation by the coordinate swap S(x, y) = (y, x): returns S∘f∘S.
/// Inverse and Lipschitz data transform exactly; the Jacobian rows swap, so
/// the per-row local fields exchange (queried at the swapped center). Marked
/// orbits carry over with point and offset swapped.
LiftedMap swap_xy_conjugate(const LiftedMap& f);

// ── small numeric helpers shared across modules ────────────────────────────
/// Fractional part in [0,1) (handles negatives).
double fract(double t);
/// Distance from t to the nearest integer.
double dist_to_int(double t);
/// Reduce z into [0,1)² componentwise.
Vec2 reduce_torus(Vec2 z);
/// Distance between z and w on the torus (mod ℤ²), Euclidean.
double torus_distance(Vec2 z, Vec2 w);

}  // namespace rotaset
