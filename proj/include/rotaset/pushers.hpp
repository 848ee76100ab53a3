#pragma once
/// Compactly supported free homeomorphisms ("pushers") used to stitch
/// heteroclinic chains and to open up degenerate rotation sets. The workhorse
/// is the elliptic annular twist: inside an ellipse aligned with a jump
/// segment [w1, w2], points rotate (in normalized elliptic coordinates) by a
/// radius-dependent angle that is 0 near the center, exactly π on a plateau
/// band containing the two endpoints, and 0 again at the rim. On the plateau
/// the map is the exact point reflection z ↦ (w1 + w2) − z, so w1 ↦ w2 up to
/// one rounding of the precomputed sum, with local Lipschitz constant exactly
/// 1. The normalized-coordinate rotation preserves the normalized radius, so
/// the inverse is the same lookup with the opposite angle, and the pointwise
/// Jacobian determinant is 1: every pusher is exactly area-preserving.
///
/// A second profile, the rotor, inverts that shape: the whole core t ≤ 1/2
/// (which contains both endpoints) turns by exactly π — again the exact
/// point reflection — and the angle tapers linearly from π to 0 on the rim
/// band t ∈ [1/2, 1]. Rotors suit chains of small disks where each carrier
/// segment spans the disk's middle rather than hugging its rim.
///
/// A TwistStack bundles many twists with pairwise-disjoint supports (the
/// caller validates disjointness) into a single evaluator with an
/// interval-indexed lookup, periodized so the result commutes with integer
/// translations. A separate round twist serves the expression grammar.

#include <string>
#include <vector>

#include "rotaset/geometry.hpp"
#include "rotaset/map_core.hpp"

namespace rotaset {

// ── radial twist profile ───────────────────────────────────────────────────
/// Angle profile on the normalized radius t: 0 on [0, 1/2], linear up to π at
/// t = 0.93, plateau π on [0.93, 0.97], linear back to 0 at t = 1, and 0
/// beyond. Continuous; |slope| is π/0.43 on the rise and π/0.03 on the fall.
double twist_profile(double t);

/// Rotor profile: exactly π on [0, 1/2], linear down to 0 at t = 1, and 0
/// beyond. Continuous; |slope| is 2π on the taper.
double rotor_profile(double t);

inline constexpr double kTwistCore = 0.50;       // identity for t ≤ this
inline constexpr double kTwistPlateauLo = 0.93;  // point reflection from here
inline constexpr double kTwistPlateauHi = 0.97;  // … to here
inline constexpr double kRotorCore = 0.50;       // point reflection ≤ this

// ── EllipticTwist ──────────────────────────────────────────────────────────
struct EllipticTwist {
  Vec2 center;       // midpoint of the endpoints
  Vec2 reflect_sum;  // w1 + w2, the plateau reflection constant
  Vec2 axis_u;       // unit vector along the major axis
  Vec2 axis_n;       // unit vector along the minor axis (left normal)
  double r_major = 0.0;
  double r_minor = 0.0;
  bool rotor = false;  // false: annular profile; true: rotor profile

  // Axis-aligned bounding box of the support ellipse {t < 1}.
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

  /// Normalized elliptic radius: 1 on the support boundary.
  double t_of(Vec2 z) const;
  bool in_support(Vec2 z) const { return t_of(z) < 1.0; }

  Vec2 apply(Vec2 z) const;
  Vec2 apply_inverse(Vec2 z) const;

  double cond() const { return r_major / r_minor; }
  /// Lipschitz bound over the disk B(c, r) (1 away from the ramp bands).
  double local_lip(Vec2 c, double r) const;
  /// Global Lipschitz bound (attained on the outer ramp).
  double lip_bound() const;
  /// max of ⟨ell, z⟩ over the closed support ellipse (support function).
  double sup_linear(Vec2 ell) const;
};

/// Builds the twist that carries w1 to w2: ellipse centered at the midpoint,
/// major radius factor·|w2 − w1|/2 along the segment, minor radius `minor`.
/// `factor` must put the endpoints inside the plateau band
/// (1/factor ∈ [0.932, 0.968]) and 0 < minor ≤ major is required.
EllipticTwist make_twist_through(Vec2 w1, Vec2 w2, double factor,
                                 double minor);

/// Rotor variant: same ellipse geometry, major radius factor·|w2 − w1|
/// (so the endpoints sit at normalized radius 1/(2·factor), inside the
/// reflecting core). Requires 1/(2·factor) ≤ 0.49 and 0 < minor ≤ major.
EllipticTwist make_rotor_through(Vec2 w1, Vec2 w2, double factor,
                                 double minor);

// ── TwistStack ─────────────────────────────────────────────────────────────
/// Applies whichever twist's support contains the queried point (supports
/// are pairwise disjoint by caller-side validation; all must lie inside
/// (−1/2, 1/2) × (0, 1) in periodized coordinates). Lookup is a binary
/// search over y-intervals with a precomputed bounded back-walk.
class TwistStack {
 public:
  TwistStack() = default;
  explicit TwistStack(std::vector<EllipticTwist> twists);

  const std::vector<EllipticTwist>& twists() const { return twists_; }
  bool empty() const { return twists_.empty(); }

  /// Index of the twist whose support contains the periodized point, or −1.
  int find_active(Vec2 z) const;

  Vec2 apply(Vec2 z) const;
  Vec2 apply_inverse(Vec2 z) const;
  double local_lip(Vec2 c, double r) const;
  double lip_bound() const { return lip_; }

 private:
  Vec2 apply_dir(Vec2 z, bool forward) const;

  std::vector<EllipticTwist> twists_;  // sorted by y_lo
  int back_depth_ = 0;                 // lookup back-walk bound
  double lip_ = 1.0;
};

/// Wraps a stack as a LiftedMap (exact inverse, Lipschitz data, no claims).
LiftedMap twist_stack_map(TwistStack stack, const std::string& name);

// ── periodized single twists ───────────────────────────────────────────────
// A twist whose support straddles lattice lines acts on the nearest integer
// translate of the queried point; displacements transfer back to the lift.
/// The nearest-translate frame of z relative to the twist's center.
Vec2 twist_frame(const EllipticTwist& tw, Vec2 z);
/// Normalized radius of the nearest translate of z.
double twist_t_periodized(const EllipticTwist& tw, Vec2 z);
/// Applies the twist (or its inverse) to the nearest translate of z.
Vec2 twist_apply_periodized(const EllipticTwist& tw, Vec2 z, bool forward);
/// A ∘ B as a LiftedMap with exact inverse and local Lipschitz data, both
/// factors acting on nearest translates (use disjoint supports).
LiftedMap twist_pair_map(const EllipticTwist& A, const EllipticTwist& B,
                         const std::string& name);

// ── round twist (grammar primitive) ────────────────────────────────────────
/// Rotation by `angle` about `center` for |z − center| ≤ r_inner, tapering
/// linearly to 0 at r_outer, identity outside; applied to the nearest
/// lattice translate (hence r_outer < 1/2 required). Exact inverse.
LiftedMap circular_twist_map(Vec2 center, double r_inner, double r_outer,
                             double angle);

}  // namespace rotaset
