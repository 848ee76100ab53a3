#pragma once
/// The dissipative torus example: f = f_V ∘ f_H, where f_H is a
/// horizontal-factor homeomorphism fixing a cusped neighborhood H̃ of the
/// horizontal lattice lines pointwise, pushing everything else weakly right
/// (strictly, off the vertical lines), sliding the vertical strip Ṽ weakly
/// down, and shearing a narrow horizontal band to the right; f_V is its
/// coordinate-swap conjugate. The composition fixes the lattice, realizes
/// rotation vectors (1,0) and (0,1) on marked period-1 orbits, and its
/// displacement field avoids the open negative cone pointwise — the
/// mechanism behind mode locking of the rational vertex (0,0).
///
/// lock_perturbation subtracts a vector in the open negative cone (the
/// perturbed map is fixed-point free); unlock_perturbation composes with two
/// tiny elliptic pushers that close heteroclinic chains along the axes into
/// periodic orbits of rotation vectors (0,−1/q) and (−1/q′,0), making (0,0)
/// an interior point of the rotation set.

#include "rotaset/geometry.hpp"
#include "rotaset/map_core.hpp"

namespace rotaset {

// ── parameters ─────────────────────────────────────────────────────────────
struct DissipativeParams {
  double eps = 0.05;             // strength of the push/slide vector field
  double delta = 0.012;          // shear band half-width around y = 1/2
  double shear_amplitude = 0.0;  // 0 ⇒ calibrate so the marked orbit closes
  double bump_sharpness = 0.05;  // s in the ramp profile σ(t) = t/(t+s)
};

// ── regions ────────────────────────────────────────────────────────────────
/// H̃ = {dist(y,ℤ) ≤ (1/2π)|sin πx|}, Ṽ its coordinate swap, C̃ the closure
/// of the complement of their union. Boundary points carry several flags.
struct RegionFlags {
  bool in_H = false;
  bool in_V = false;
  bool in_C = false;
};

RegionFlags region_membership(Vec2 z);

/// Signed gap functions: ≤ 0 exactly on the region, > 0 outside.
double gap_H(Vec2 z);  // dist(y,ℤ) − (1/2π)|sin πx|
double gap_V(Vec2 z);  // dist(x,ℤ) − (1/2π)|sin πy|

// ── builders ───────────────────────────────────────────────────────────────
/// Horizontal factor: (shear band) ∘ (Id + eps·(ξ, η)). Fixed set is exactly
/// H̃; carries an iterative inverse and local Lipschitz row fields.
LiftedMap build_fH(const DissipativeParams& params);
/// Coordinate-swap conjugate of build_fH.
LiftedMap build_fV(const DissipativeParams& params);
/// f = f_V ∘ f_H with marked orbits: (0,0) fixed, z₁ ↦ z₁+(1,0),
/// z₁′ ↦ z₁′+(0,1), all period 1.
LiftedMap build_example(const DissipativeParams& params);

// ── heteroclinic data ──────────────────────────────────────────────────────
/// A start z0 = (0, y0) on the invariant vertical line whose forward orbit
/// under f enters the 1e−3 ball of (0,0) and whose backward orbit enters the
/// 1e−3 ball of (0,1), with every orbit point clear of the shear band.
struct HeteroclinicData {
  Vec2 z0;
  long long forward_hits = 0;    // iterations to reach the ball at (0,0)
  long long backward_hits = 0;   // iterations to reach the ball at (0,1)
  double strip_clearance = 0.0;  // min over the orbit of |y − 1/2| − delta
};

/// Bisects the start height so that one forward step jumps across the band.
/// Throws numerical_error("SEARCH_FAILED …") when the window collapses.
HeteroclinicData find_heteroclinic_start(const DissipativeParams& params);

// ── perturbations ──────────────────────────────────────────────────────────
/// minus(f, v) for v in the open negative cone with |v| ≤ 0.05.
LiftedMap lock_perturbation(const LiftedMap& f, Vec2 v);

struct UnlockResult {
  LiftedMap map;           // f′ = P ∘ f with two elliptic pushers P = A ∘ B
  long long q = 0;         // f′^q(z0) = z0 − (0,1)
  long long q_prime = 0;   // f′^{q′}(z0′) = z0′ − (1,0)
  double max_displacement = 0.0;  // sup |f′ − f| ≤ 2·(rA + rB), the pushers'
                                  // major radii (their supports may overlap)
};

/// Closes the two axis heteroclinic chains with pushers of major radius
/// ≤ push_radius. The vertical-axis chain comes from `het`; the horizontal
/// one is its coordinate-swap mirror. Validates that the pusher supports
/// avoid every retained orbit and marked point except the designated jump
/// sources (numerical_error("SUPPORT_OVERLAP …") otherwise) and that the
/// recorded periodic orbits close to 1e−9.
UnlockResult unlock_perturbation(const LiftedMap& f,
                                 const HeteroclinicData& het,
                                 double push_radius,
                                 const DissipativeParams& params);

}  // namespace rotaset
