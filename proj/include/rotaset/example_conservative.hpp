#pragma once
/// Area-preserving torus example with a mode-locked rational vertex.
///
/// The construction folds each horizontal of the unit strip into a sawtooth
/// leaf (the piecewise map h), conjugates a plain horizontal slide through h
/// to get a leaf-wise slide f1 that fixes a bowtie-shaped set pointwise and
/// otherwise displaces strictly into a flat horizontal cone, then stitches a
/// bi-infinite (truncated) heteroclinic chain through a stack of small
/// area-preserving elliptic rotors and one calibrated shear ratchet. The
/// horizontal factor fH moves every point weakly right; composing with its
/// coordinate-swapped copy fV gives a homeomorphism f whose mean-displacement
/// hull is the triangle hull{(0,0),(1,0),(0,1)} with the vertex (0,0) carried
/// by the unique fixed point at the lattice. Every factor preserves area
/// pointwise (unit Jacobian determinant), so f does too.
///
/// All maps commute with integer translations. Marked orbits on the built
/// examples record exact rational displacement witnesses.

#include <cstdint>
#include <vector>

#include "rotaset/example_dissipative.hpp"  // UnlockResult
#include "rotaset/map_core.hpp"
#include "rotaset/pushers.hpp"

namespace rotaset {

// ── parameters ─────────────────────────────────────────────────────────────
struct ConservativeParams {
  double alpha = 0.1;   // bowtie slope / fold amplitude, in (0, 1/10]
  double beta = 0.9;    // chain contraction rate, in (0, 1)
  double a = 0.51;      // ratchet shear support: lower foot
  double b = 0.545;     // ratchet shear support: upper foot
  double c = 0.525;     // ratchet shear support: peak (a < c < b)
  int truncation = 125;         // chain half-length K (≥ 2)
  double disk_radius_fraction = 0.25;  // rotor minor radius / half-segment
  double phi_sharpness = 1.0;   // shear profile power on the unit tent, ≥ 1
};

// ── fold geometry ──────────────────────────────────────────────────────────
/// Peak height of the fold leaf through height y: the image of each domain
/// period's midpoint. Strictly increasing from theta(0) = alpha to
/// theta(1) = 1 − alpha with theta(1/2) = 1/2, and chosen so the fold
/// preserves area between consecutive leaves. Requires y in [0, 1].
double theta(double y, double alpha);

/// d/dy of theta. Positive on [0, 1] for alpha ≤ 1/10.
double theta_slope(double y, double alpha);

/// The fold map of the closed unit strip R × [0, 1]: periodic in x with
/// period 1 − alpha in the domain and period 1 in the image, identity on the
/// central slab |x| ≤ 2·alpha·dist(y, Z) (bitwise), and otherwise bending
/// each horizontal into the piecewise leaf through (±(1 − dist-slab), y) with
/// peak (1/2, theta(y)). Unit Jacobian determinant pointwise. Throws
/// usage_error when z.y is outside [0, 1].
Vec2 h_map(Vec2 z, double alpha);

/// Exact inverse of h_map on its image (the region on or above the bottom
/// leaf, in folded coordinates). Identity on the central slab (bitwise).
/// Throws usage_error when the input lies below the folded image region.
Vec2 h_inverse(Vec2 z, double alpha);

/// Horizontal slide (x, y) ↦ (x + alpha·dist(y, Z), y); exact inverse.
LiftedMap build_base_slide(double alpha);

/// Leaf-wise slide h ∘ slide ∘ h⁻¹, extended periodically to the plane:
/// fixes the bowtie {dist(y,Z) ≤ 2·alpha·dist(x,Z)} pointwise (returns the
/// input verbatim there) and displaces every other point with Δx > 0 and
/// |Δy| ≤ 2·alpha·Δx. Exact inverse; local Lipschitz row fields.
LiftedMap build_f1(double alpha);

// ── heteroclinic chain ─────────────────────────────────────────────────────
/// Geometry of the rotor chain: heights y_k for k = −K…K (stored ascending
/// in k, i.e. descending in value), and one rotor per consecutive pair
/// carrying the slide image of (0, y_k) to (0, y_{k+1}).
struct ConservativeChain {
  double alpha = 0.0;
  double beta = 0.0;
  int truncation = 0;              // K
  std::vector<double> heights;     // size 2K + 1, heights[j] = y_{j − K}
  TwistStack twists;               // 2K rotors, disjoint supports

  /// y_k for k in [−K, K].
  double height(int k) const { return heights[static_cast<size_t>(k + truncation)]; }
};

/// Builds and validates the chain: y_0 = 1/2, y_{k+1} = beta·y_k downward,
/// y_{−k} = 1 − u_k with u_0 = 1/2, u_{k+1} = beta·u_k upward. Validates
/// that every rotor support sits strictly inside the right-leaning wedge
/// {dist(x,Z) < 2·alpha·dist(y,Z)}, that supports are pairwise disjoint,
/// and that each rotor's support is separated from its f1-preimage by a
/// diagonal half-plane (so points can never be pushed left twice). Throws
/// numerical_error("DISK_PACKING_FAILED: …") when any check fails.
ConservativeChain build_chain(double alpha, double beta, int truncation,
                              double disk_radius_fraction = 0.25);

/// The chain map g ∘ f1 (rotor stack after the leaf slide).
LiftedMap apply_chain(const ConservativeChain& chain, const LiftedMap& f1);

// ── horizontal factor and full example ─────────────────────────────────────
/// g1 ∘ g ∘ f1: adds the calibrated tent-profile shear that ratchets the
/// distinguished point z1 = (alpha/2 − alpha(c − 1/2), c) one full period
/// right (bitwise), completing the heteroclinic loop. Every point moves
/// weakly right.
LiftedMap build_fH_conservative(const ConservativeParams& params);

/// The full example fV ∘ fH with fV the coordinate-swapped copy of fH.
/// Marked orbits witness the fixed origin and the period-1 displacements
/// (1,0) and (0,1).
LiftedMap build_example_conservative(const ConservativeParams& params);

/// Opens the degenerate vertex of the chain example: composes f with a pair
/// of area-preserving elliptic twist pushers (one per diagonal mirror) whose
/// supports meet the truncated chain ends, creating periodic orbits of
/// period q = 2K + 1 with displacements (0,−1) and (−1,0). Both pushers fit
/// inside push_radius. Throws numerical_error("SUPPORT_OVERLAP: …") when a
/// pusher support touches orbit points it must leave alone.
UnlockResult conservative_unlock_perturbation(const LiftedMap& f,
                                              const ConservativeParams& params,
                                              double push_radius);

// ── area diagnostics ───────────────────────────────────────────────────────
/// Monte-Carlo area-preservation check: maps the boundaries of n_boxes random
/// axis-aligned boxes (side `box_side`, corners uniform in the unit square),
/// refines each boundary polyline adaptively, and returns the maximum
/// relative defect |area(image) − area(box)| / area(box). Deterministic for
/// fixed arguments; per-box substreams make the result independent of
/// evaluation order. samples_per_box seeds the initial boundary resolution.
double area_preservation_check(const LiftedMap& map, int n_boxes,
                               int samples_per_box, std::uint64_t seed,
                               double box_side = 0.05);

}  // namespace rotaset
