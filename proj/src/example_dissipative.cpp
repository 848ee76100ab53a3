/// Dissipative example construction. Numerical contracts built in:
///  • the ramp σ(t) = t₊/(t₊ + s) is exactly 0 for t ≤ 0, so the fixed sets
///    of the factor maps are exact in floating point, not approximate;
///  • the shear amplitude is calibrated as A = fl(fl(x₁+1) − x₁′) with
///    x₁′ = (Id + ε(ξ,η))(z₁).x, which makes the marked jump close bit-exactly
///    (|A − (T − x₁′)| ≤ 2⁻⁵⁴ < half-ulp of T ∈ [1,2), so fl(x₁′ + A) = T);
///  • per-output-row local Lipschitz fields are provided so that fixed-point
///    certification can exploit the row that stays tame where the other one
///    is steep (the shear band's x-row is ~A/δ but its y-row is exactly 1).

#include "rotaset/example_dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rotaset/errors.hpp"
#include "rotaset/pushers.hpp"

namespace rotaset {

namespace {

const double kK1 = 0.5 / M_PI;  // half-width scale of the cusp regions

double pos(double t) { return t > 0.0 ? t : 0.0; }

// Ramp: 0 for t ≤ 0, increasing to 1, slope ≤ 1/s (attained at 0⁺).
double sigma(double t, double s) {
  const double u = pos(t);
  return u / (u + s);
}
// sup σ′ over arguments ≥ lo (σ′ decreasing where defined; 1/s at the crease)
double sigma_slope_sup(double lo, double s) {
  const double u = pos(lo);
  return s / ((u + s) * (u + s));
}

const double kGradGap = 1.119;  // |∇gap| ≤ √(1 + 1/4), rounded up

struct Fields {
  double eps, s;

  double xi(Vec2 z) const {
    const double sp = std::sin(M_PI * z.x);
    return sp * sp * sigma(gap_H(z), s);
  }
  double eta(Vec2 z) const { return -sigma(pos(-gap_V(z)), s); }

  // ‖∇ξ‖ over B(c, r): |π sin 2πx|·σ + sin²(πx)·σ′·‖∇gap_H‖, each supped.
  double xi_lip(Vec2 c, double r) const {
    const double dxr = dist_to_int(c.x) + r;
    const double gh = gap_H(c);
    const double hi = gh + kGradGap * r;
    if (hi <= 0.0) return 0.0;  // the whole disk sits inside H̃
    const double lo = gh - kGradGap * r;
    const double term1 =
        M_PI * std::min(1.0, 2.0 * M_PI * dxr) * sigma(hi, s);
    const double sin_sq = std::min(1.0, (M_PI * dxr) * (M_PI * dxr));
    const double term2 = sin_sq * sigma_slope_sup(lo, s) * kGradGap;
    return term1 + term2;
  }
  // ‖∇η‖ over B(c, r): σ′ sup over the (−gap_V)-range times ‖∇gap_V‖.
  double eta_lip(Vec2 c, double r) const {
    const double m = -gap_V(c);
    if (m + kGradGap * r <= 0.0) return 0.0;  // disk clear of int Ṽ
    return sigma_slope_sup(m - kGradGap * r, s) * kGradGap;
  }
};

// ── the push/slide factor f_eps = Id + eps·(ξ, η) ──────────────────────────
Vec2 invert_f_eps(const Fields& F, double eps, Vec2 w) {
  Vec2 z = w;
  auto residual = [&](Vec2 p) {
    return Vec2{p.x + eps * F.xi(p) - w.x, p.y + eps * F.eta(p) - w.y};
  };
  const double tol = 1e-13 * std::max(1.0, norm_inf(w));
  for (int it = 0; it < 60; ++it) {
    const Vec2 r = residual(z);
    if (norm_inf(r) <= tol) return z;
    z = z - r;  // Picard: z ← w − eps·(ξ, η)(z)
  }
  // Damped finite-difference Newton fallback for the stiff creases.
  for (int it = 0; it < 60; ++it) {
    Vec2 r = residual(z);
    double rn = norm(r);
    if (rn <= tol) return z;
    const double h = 1e-7;
    const Vec2 rx = residual({z.x + h, z.y});
    const Vec2 ry = residual({z.x, z.y + h});
    const double a = (rx.x - r.x) / h, b = (ry.x - r.x) / h;
    const double c = (rx.y - r.y) / h, d = (ry.y - r.y) / h;
    const double det = a * d - b * c;
    if (std::fabs(det) < 1e-9) break;
    const Vec2 step{(d * r.x - b * r.y) / det, (-c * r.x + a * r.y) / det};
    double lam = 1.0;
    bool improved = false;
    while (lam >= 1.0 / 64.0) {
      const Vec2 cand = z - lam * step;
      if (norm(residual(cand)) < rn) {
        z = cand;
        improved = true;
        break;
      }
      lam *= 0.5;
    }
    if (!improved) break;
  }
  if (norm_inf(residual(z)) <= 1e-10 * std::max(1.0, norm_inf(w))) return z;
  throw numerical_error("example_dissipative: inverse iteration failed");
}

LiftedMap build_f_eps(const DissipativeParams& p) {
  const Fields F{p.eps, p.bump_sharpness};
  const double eps = p.eps;
  LiftedMap m;
  m.name = "diss_push";
  m.eval = [F, eps](Vec2 z) {
    return Vec2{z.x + eps * F.xi(z), z.y + eps * F.eta(z)};
  };
  m.inverse = [F, eps](Vec2 w) { return invert_f_eps(F, eps, w); };
  // ‖∇ξ‖ ≤ π + (1/s)·kGradGap, ‖∇η‖ ≤ (1/s)·kGradGap.
  const double gx = M_PI + kGradGap / p.bump_sharpness;
  const double gy = kGradGap / p.bump_sharpness;
  m.lipschitz_bound = 1.0 + eps * std::hypot(gx, gy);
  m.local_lip = [F, eps](Vec2 c, double r) {
    return 1.0 + eps * std::hypot(F.xi_lip(c, r), F.eta_lip(c, r));
  };
  m.local_lip_x = [F, eps](Vec2 c, double r) {
    return 1.0 + eps * F.xi_lip(c, r);
  };
  m.local_lip_y = [F, eps](Vec2 c, double r) {
    return 1.0 + eps * F.eta_lip(c, r);
  };
  return m;
}

// ── the band shear (x, y) ↦ (x + φ(y), y) ──────────────────────────────────
double tent_profile(double y, double amp, double delta) {
  return amp * pos(1.0 - std::fabs(fract(y) - 0.5) / delta);
}
// Toroidal distance from y to the band [1/2 − δ, 1/2 + δ] (band is centered,
// so no wrap is ever shorter).
double band_distance(double y, double delta) {
  return pos(std::fabs(fract(y) - 0.5) - delta);
}

LiftedMap build_tent(double amp, double delta) {
  LiftedMap m;
  m.name = "diss_shear";
  m.params = {{"amp", amp}, {"delta", delta}};
  m.eval = [amp, delta](Vec2 z) {
    return Vec2{z.x + tent_profile(z.y, amp, delta), z.y};
  };
  m.inverse = [amp, delta](Vec2 z) {
    return Vec2{z.x - tent_profile(z.y, amp, delta), z.y};
  };
  const double steep = std::hypot(1.0, amp / delta);
  m.lipschitz_bound = steep;
  m.local_lip = [amp, delta, steep](Vec2 c, double r) {
    return band_distance(c.y, delta) > r ? 1.0 : steep;
  };
  m.local_lip_x = m.local_lip;
  m.local_lip_y = [](Vec2, double) { return 1.0; };
  return m;
}

void validate_params(const DissipativeParams& p) {
  if (!(p.eps > 0.0 && p.eps <= 0.2))
    throw usage_error("DissipativeParams: eps must lie in (0, 0.2]");
  if (!(p.delta > 0.0 && p.delta < 0.5 - kK1))
    throw usage_error("DissipativeParams: delta must lie in (0, 1/2 − 1/2π)");
  if (!(p.bump_sharpness > 0.0))
    throw usage_error("DissipativeParams: bump_sharpness must be positive");
  if (!(p.shear_amplitude >= 0.0 && p.shear_amplitude <= 4.0))
    throw usage_error("DissipativeParams: shear_amplitude out of range");
}

Vec2 marked_z1() { return {kK1, 0.5}; }

// ── axis dynamics ──────────────────────────────────────────────────────────
// On {0}×ℝ the push factor acts as (0, y) ↦ (0, F(y)); the full composite
// agrees with it bit-for-bit wherever F(y) misses the shear band (the tent
// then contributes exactly zero, and the mirrored factor's ramps both vanish
// on the axis). All orbit segments used below stay off the band's pullback,
// but bisection probes may cross it, so the axis map is taken from the push
// factor, which is insensitive to the band.
double axis_forward(const LiftedMap& push, double y) {
  const Vec2 w = push.eval({0.0, y});
  if (w.x != 0.0)
    throw map_definition_error(
        "example_dissipative: the push factor moved the vertical axis");
  return w.y;
}

double axis_backward(const LiftedMap& push, double target) {
  // F(y) = y − eps·σ(…) with F′ ∈ [1/2, 1]; bracket [target, target + 0.05].
  double lo = target, hi = target + 0.05;
  if (!(axis_forward(push, hi) >= target))
    throw numerical_error(
        "example_dissipative: axis backward step bracket failed");
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (axis_forward(push, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// The active annulus of a twist: normalized radii where it moves points.
bool in_active_zone(const EllipticTwist& tw, Vec2 z) {
  const double t = twist_t_periodized(tw, z);
  return t > 0.45 && t < 1.05;
}

}  // namespace

// ── regions ────────────────────────────────────────────────────────────────
double gap_H(Vec2 z) {
  return dist_to_int(z.y) - kK1 * std::fabs(std::sin(M_PI * z.x));
}
double gap_V(Vec2 z) {
  return dist_to_int(z.x) - kK1 * std::fabs(std::sin(M_PI * z.y));
}

RegionFlags region_membership(Vec2 z) {
  if (!is_finite(z)) throw usage_error("region_membership: non-finite point");
  const double gh = gap_H(z), gv = gap_V(z);
  RegionFlags f;
  f.in_H = gh <= 0.0;
  f.in_V = gv <= 0.0;
  f.in_C = gh >= 0.0 && gv >= 0.0;
  return f;
}

// ── builders ───────────────────────────────────────────────────────────────
LiftedMap build_fH(const DissipativeParams& p) {
  validate_params(p);
  LiftedMap push = build_f_eps(p);

  // Calibrate the shear amplitude so the marked point's jump closes exactly:
  // A = fl(fl(x₁+1) − x₁′). |A − (T − x₁′)| ≤ 2⁻⁵⁴ because T − x₁′ < 1, and
  // half-ulp(T) = 2⁻⁵³ for T ∈ [1, 2), so fl(x₁′ + A) = T bit-exactly.
  const Vec2 z1 = marked_z1();
  const Vec2 z1p = push.eval(z1);
  if (z1p.y != z1.y)
    throw map_definition_error(
        "build_fH: the marked point must keep its height under the push");
  double amp = p.shear_amplitude;
  if (amp == 0.0) amp = (z1.x + 1.0) - z1p.x;
  LiftedMap tent = build_tent(amp, p.delta);

  LiftedMap fH = compose(tent, push);
  fH.name = "example_dissipative_fH";
  fH.params = {{"eps", p.eps},
               {"delta", p.delta},
               {"sharpness", p.bump_sharpness},
               {"shear_amplitude", amp}};
  if (p.shear_amplitude == 0.0 && fH.eval(z1).x != z1.x + 1.0)
    throw map_definition_error(
        "build_fH: shear calibration failed to close the marked jump");
  fH.marked_orbits = {{Vec2{0.0, 0.0}, 1, Vec2{0.0, 0.0}},
                      {z1, 1, Vec2{1.0, 0.0}}};

  // Sampled self-checks of the construction's pointwise claims.
  std::uint64_t st = 0x5eed5eedULL;
  for (int i = 0; i < 200; ++i) {
    const double x = uniform01(st), u = 2.0 * uniform01(st) - 1.0;
    const Vec2 zin{x, u * kK1 * std::fabs(std::sin(M_PI * x))};
    if (!(norm_inf(fH.eval(zin) - zin) == 0.0))
      throw map_definition_error("build_fH: a point of H̃ moved");
    const Vec2 z{uniform01(st), uniform01(st)};
    const Vec2 w = fH.eval(z);
    if (w.x < z.x - 1e-15 || w.y > z.y + 1e-15)
      throw map_definition_error(
          "build_fH: displacement left the right/down cone");
  }
  return fH;
}

LiftedMap build_fV(const DissipativeParams& p) {
  LiftedMap fV = swap_xy_conjugate(build_fH(p));
  fV.name = "example_dissipative_fV";
  return fV;
}

LiftedMap build_example(const DissipativeParams& p) {
  LiftedMap fH = build_fH(p);
  LiftedMap f = compose(swap_xy_conjugate(fH), fH);
  f.name = "example_dissipative";
  f.params = {{"eps", p.eps},
              {"delta", p.delta},
              {"sharpness", p.bump_sharpness}};
  const Vec2 z1 = marked_z1();
  const Vec2 z1v{0.5, kK1};
  f.marked_orbits = {{Vec2{0.0, 0.0}, 1, Vec2{0.0, 0.0}},
                     {z1, 1, Vec2{1.0, 0.0}},
                     {z1v, 1, Vec2{0.0, 1.0}}};
  for (const MarkedOrbit& mo : f.marked_orbits) {
    if (norm_inf(f.eval(mo.z) - mo.z - mo.offset) > 1e-9)
      throw map_definition_error(
          "build_example: a marked orbit failed to close");
  }
  std::uint64_t st = 0xd15517a71feULL;
  for (int i = 0; i < 300; ++i) {
    const Vec2 z{uniform01(st) * 3.0 - 1.0, uniform01(st) * 3.0 - 1.0};
    const Vec2 d = f.eval(z) - z;
    if (std::max(d.x, d.y) < -1e-12)
      throw map_definition_error(
          "build_example: displacement entered the open negative cone");
  }
  return f;
}

// ── heteroclinic start ─────────────────────────────────────────────────────
HeteroclinicData find_heteroclinic_start(const DissipativeParams& p) {
  validate_params(p);
  const LiftedMap f = build_f_eps(p);
  const double delta = p.delta;
  const double lo = 0.5 + delta, strip_bottom = 0.5 - delta;

  if (!(axis_forward(f, lo + 1e-9) < strip_bottom))
    throw numerical_error(
        "SEARCH_FAILED: one step from just above the band cannot clear it; "
        "shrink delta");
  double a = lo + 1e-9, b = 0.9;
  if (!(axis_forward(f, b) >= strip_bottom))
    throw numerical_error("SEARCH_FAILED: no bracket for the jump height");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + b);
    if (axis_forward(f, mid) < strip_bottom)
      a = mid;
    else
      b = mid;
  }
  if (!(a - lo >= 1e-4))
    throw numerical_error(
        "SEARCH_FAILED: feasible start window narrower than 1e-4; shrink "
        "delta");
  HeteroclinicData out;
  out.z0 = {0.0, 0.5 * (lo + a)};
  out.strip_clearance = std::fabs(out.z0.y - 0.5) - delta;

  double y = out.z0.y;
  long long n = 0;
  while (y > 1e-3) {
    y = axis_forward(f, y);
    out.strip_clearance =
        std::min(out.strip_clearance, std::fabs(y - 0.5) - delta);
    if (++n > 100000)
      throw numerical_error(
          "SEARCH_FAILED: forward orbit did not reach the origin ball");
  }
  out.forward_hits = n;
  y = out.z0.y;
  n = 0;
  while (y < 1.0 - 1e-3) {
    y = axis_backward(f, y);
    out.strip_clearance =
        std::min(out.strip_clearance, std::fabs(y - 0.5) - delta);
    if (++n > 100000)
      throw numerical_error(
          "SEARCH_FAILED: backward orbit did not reach the (0,1) ball");
  }
  out.backward_hits = n;
  if (!(out.strip_clearance > 0.0))
    throw numerical_error(
        "SEARCH_FAILED: the computed orbit touches the shear band");
  return out;
}

// ── perturbations ──────────────────────────────────────────────────────────
LiftedMap lock_perturbation(const LiftedMap& f, Vec2 v) {
  if (!(v.x < 0.0 && v.y < 0.0))
    throw usage_error(
        "lock_perturbation: v must lie in the open negative cone");
  if (!(norm(v) <= 0.05))
    throw usage_error("lock_perturbation: |v| must be ≤ 0.05");
  LiftedMap g = minus(f, v);
  g.name = f.name + "_lock";
  return g;
}

UnlockResult unlock_perturbation(const LiftedMap& f,
                                 const HeteroclinicData& het,
                                 double push_radius,
                                 const DissipativeParams& params) {
  validate_params(params);
  if (!(push_radius > 0.0 && push_radius <= 0.25))
    throw usage_error("unlock_perturbation: push_radius must be in (0, 0.25]");
  if (!(het.z0.x == 0.0 && het.z0.y > 0.5 && het.z0.y < 1.0))
    throw usage_error("unlock_perturbation: invalid heteroclinic start");

  const double scale = std::min(1e-4, push_radius / 3.0);
  const LiftedMap push = build_f_eps(params);

  // Forward chain y_0 > y_1 > … until the scale, backward chain toward 1.
  std::vector<double> fwd{het.z0.y};
  while (fwd.back() > scale) {
    fwd.push_back(axis_forward(push, fwd.back()));
    if (fwd.size() > 100000)
      throw numerical_error("SEARCH_FAILED: forward chain stalled");
  }
  std::vector<double> bwd{het.z0.y};  // heights above, approaching 1
  while (1.0 - bwd.back() > scale) {
    bwd.push_back(axis_backward(push, bwd.back()));
    if (bwd.size() > 100000)
      throw numerical_error("SEARCH_FAILED: backward chain stalled");
  }
  // Balance the two tail scales so one ellipse covers the jump comfortably.
  auto ratio = [&] {
    return fwd.back() / (1.0 - bwd.back());
  };
  for (int guard = 0; ratio() > 1.42 || ratio() < 1.0 / 1.42; ++guard) {
    if (guard > 200)
      throw numerical_error("SEARCH_FAILED: chain balancing did not settle");
    if (ratio() > 1.42)
      fwd.push_back(axis_forward(push, fwd.back()));
    else
      bwd.push_back(axis_backward(push, bwd.back()));
  }

  const long long n_star = static_cast<long long>(fwd.size()) - 1;
  const long long m_steps = static_cast<long long>(bwd.size()) - 1;
  const Vec2 w1{0.0, fwd.back()};
  const Vec2 w2{0.0, bwd.back() - 1.0};
  const double gap = norm(w2 - w1);
  const EllipticTwist A = make_twist_through(w1, w2, 1.05, 0.2 * (gap / 2.0));
  const EllipticTwist B = make_twist_through(
      Vec2{w1.y, w1.x}, Vec2{w2.y, w2.x}, 1.05, 0.2 * (gap / 2.0));
  if (!(A.r_major <= push_radius))
    throw usage_error(
        "unlock_perturbation: push_radius is smaller than the chain-tail "
        "ellipse; increase it");

  UnlockResult out;
  out.q = n_star + m_steps;
  out.q_prime = out.q;  // the horizontal chain is the exact mirror
  out.max_displacement = 2.0 * A.r_major;

  LiftedMap P = twist_pair_map(A, B, "pusher_pair");
  LiftedMap fp = compose(P, f);
  fp.name = "example_dissipative_unlock";
  fp.params = f.params;
  fp.params["q"] = static_cast<double>(out.q);
  fp.params["q_prime"] = static_cast<double>(out.q_prime);
  fp.params["push_radius"] = push_radius;

  // Retained marked points must sit clear of both active annuli, and their
  // images must be bit-fixed by the pushers.
  for (const MarkedOrbit& mo : f.marked_orbits) {
    const Vec2 img = f.eval(mo.z);
    for (const Vec2& pt : {mo.z, img}) {
      if (in_active_zone(A, pt) || in_active_zone(B, pt))
        throw numerical_error(
            "SUPPORT_OVERLAP: a marked point grazes a pusher's active zone");
    }
    if (!(P.eval(img) == img))
      throw numerical_error(
          "SUPPORT_OVERLAP: a pusher moved a retained marked image");
    fp.marked_orbits.push_back(mo);
  }

  // Walk both designated periodic orbits, checking that every intermediate
  // image is bit-fixed except the designated jump, which must land in the
  // jump pusher's plateau and be bit-fixed by the other pusher.
  struct Chain {
    Vec2 start, offset;
    const EllipticTwist *jumper, *other;
    long long jump_index;
  };
  const Vec2 z0v = het.z0;
  const Vec2 z0h{het.z0.y, het.z0.x};
  const Chain chains[2] = {
      {z0v, Vec2{0.0, -1.0}, &A, &B, n_star - 1},
      {z0h, Vec2{-1.0, 0.0}, &B, &A, n_star - 1},
  };
  for (const Chain& ch : chains) {
    Vec2 z = ch.start;
    if (in_active_zone(A, z) || in_active_zone(B, z))
      throw numerical_error(
          "SUPPORT_OVERLAP: the chain start grazes a pusher");
    for (long long j = 0; j < out.q; ++j) {
      const Vec2 w = f.eval(z);
      const Vec2 pw = P.eval(w);
      if (j == ch.jump_index) {
        const double t = twist_t_periodized(*ch.jumper, w);
        if (!(t > kTwistPlateauLo && t < kTwistPlateauHi))
          throw numerical_error(
              "SUPPORT_OVERLAP: the designated jump point left the plateau");
        if (in_active_zone(*ch.other, w))
          throw numerical_error(
              "SUPPORT_OVERLAP: the other pusher grazes the jump point");
      } else {
        if (in_active_zone(A, w) || in_active_zone(B, w))
          throw numerical_error(
              "SUPPORT_OVERLAP: a chain point grazes a pusher's active zone");
        if (!(pw == w))
          throw numerical_error(
              "SUPPORT_OVERLAP: a pusher moved an untargeted chain point");
      }
      z = pw;
    }
    if (norm_inf(z - ch.start - ch.offset) > 1e-9)
      throw numerical_error(
          "SUPPORT_OVERLAP: the closed chain failed to return (numerical "
          "drift)");
    fp.marked_orbits.push_back({ch.start, out.q, ch.offset});
  }
  out.map = std::move(fp);
  return out;
}

}  // namespace rotaset
