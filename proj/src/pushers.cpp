/// Elliptic annular and rotor twists and their stacked lookup. Numerical
/// contract: the reflecting branch (annular plateau, rotor core) is
/// implemented as reflect_sum − z (no trigonometry), so endpoint jumps are
/// exact to one rounding of the precomputed sum and the local Lipschitz
/// constant there is exactly 1; ramp branches rotate in normalized elliptic
/// coordinates, which preserves the normalized radius and hence makes angle
/// negation an exact inverse.

#include "rotaset/pushers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rotaset/errors.hpp"

namespace rotaset {

namespace {
constexpr double kInnerSlope = M_PI / (kTwistPlateauLo - kTwistCore);
constexpr double kOuterSlope = M_PI / (1.0 - kTwistPlateauHi);
constexpr double kRotorSlope = M_PI / (1.0 - kRotorCore);
}  // namespace

// ── profiles ───────────────────────────────────────────────────────────────
double twist_profile(double t) {
  if (t <= kTwistCore || t >= 1.0) return 0.0;
  if (t < kTwistPlateauLo) return (t - kTwistCore) * kInnerSlope;
  if (t <= kTwistPlateauHi) return M_PI;
  return (1.0 - t) * kOuterSlope;
}

double rotor_profile(double t) {
  if (t <= kRotorCore) return M_PI;
  if (t >= 1.0) return 0.0;
  return (1.0 - t) * kRotorSlope;
}

// ── EllipticTwist ──────────────────────────────────────────────────────────
double EllipticTwist::t_of(Vec2 z) const {
  const Vec2 d = z - center;
  const double a = dot(d, axis_u) / r_major;
  const double b = dot(d, axis_n) / r_minor;
  return std::hypot(a, b);
}

static Vec2 twist_apply_signed(const EllipticTwist& tw, Vec2 z, double sign) {
  const Vec2 d = z - tw.center;
  const double a = dot(d, tw.axis_u) / tw.r_major;
  const double b = dot(d, tw.axis_n) / tw.r_minor;
  const double t = std::hypot(a, b);
  if (t >= 1.0) return z;
  if (tw.rotor) {
    if (t <= kRotorCore)
      return tw.reflect_sum - z;  // exact point reflection; sign irrelevant
  } else {
    if (t <= kTwistCore) return z;
    if (t >= kTwistPlateauLo && t <= kTwistPlateauHi)
      return tw.reflect_sum - z;  // exact point reflection; sign irrelevant
  }
  const double psi = sign * (tw.rotor ? rotor_profile(t) : twist_profile(t));
  const double ca = std::cos(psi), sa = std::sin(psi);
  const double ra = ca * a - sa * b;
  const double rb = sa * a + ca * b;
  return tw.center + (tw.r_major * ra) * tw.axis_u +
         (tw.r_minor * rb) * tw.axis_n;
}

Vec2 EllipticTwist::apply(Vec2 z) const {
  return twist_apply_signed(*this, z, +1.0);
}
Vec2 EllipticTwist::apply_inverse(Vec2 z) const {
  return twist_apply_signed(*this, z, -1.0);
}

double EllipticTwist::local_lip(Vec2 c, double r) const {
  const double tc = t_of(c);
  const double dt = r / r_minor;  // the coordinate map has norm 1/r_minor
  const double lo = std::max(0.0, tc - dt);
  const double hi = tc + dt;
  if (rotor) {
    if (lo >= 1.0 || hi <= kRotorCore) return 1.0;  // identity or reflection
    const double th = std::min(hi, 1.0);
    return cond() * (1.0 + th * kRotorSlope);
  }
  if (lo >= 1.0 || hi <= kTwistCore) return 1.0;
  double best = 1.0;  // identity and plateau zones are 1-Lipschitz
  if (hi > kTwistCore && lo < kTwistPlateauLo) {
    const double th = std::min(hi, kTwistPlateauLo);
    best = std::max(best, cond() * (1.0 + th * kInnerSlope));
  }
  if (hi > kTwistPlateauHi && lo < 1.0) {
    const double th = std::min(hi, 1.0);
    best = std::max(best, cond() * (1.0 + th * kOuterSlope));
  }
  return best;
}

double EllipticTwist::lip_bound() const {
  return cond() * (1.0 + (rotor ? kRotorSlope : kOuterSlope));
}

double EllipticTwist::sup_linear(Vec2 ell) const {
  const double along = r_major * dot(ell, axis_u);
  const double across = r_minor * dot(ell, axis_n);
  return dot(ell, center) + std::hypot(along, across);
}

EllipticTwist make_twist_through(Vec2 w1, Vec2 w2, double factor,
                                 double minor) {
  if (!is_finite(w1) || !is_finite(w2))
    throw usage_error("make_twist_through: non-finite endpoints");
  const Vec2 gamma = w2 - w1;
  const double len = norm(gamma);
  if (!(len > 0.0))
    throw usage_error("make_twist_through: coincident endpoints");
  const double t0 = 1.0 / factor;
  if (!(t0 >= kTwistPlateauLo + 0.002 && t0 <= kTwistPlateauHi - 0.002))
    throw usage_error(
        "make_twist_through: factor must put the endpoints strictly inside "
        "the plateau band");
  EllipticTwist tw;
  tw.reflect_sum = w1 + w2;
  tw.center = 0.5 * tw.reflect_sum;
  tw.axis_u = (1.0 / len) * gamma;
  tw.axis_n = Vec2{-tw.axis_u.y, tw.axis_u.x};
  tw.r_major = factor * (len / 2.0);
  tw.r_minor = minor;
  if (!(minor > 0.0) || minor > tw.r_major)
    throw usage_error("make_twist_through: need 0 < minor ≤ major");
  const double ex = std::hypot(tw.r_major * tw.axis_u.x,
                               tw.r_minor * tw.axis_n.x);
  const double ey = std::hypot(tw.r_major * tw.axis_u.y,
                               tw.r_minor * tw.axis_n.y);
  tw.x_lo = tw.center.x - ex;
  tw.x_hi = tw.center.x + ex;
  tw.y_lo = tw.center.y - ey;
  tw.y_hi = tw.center.y + ey;
  return tw;
}

EllipticTwist make_rotor_through(Vec2 w1, Vec2 w2, double factor,
                                 double minor) {
  if (!is_finite(w1) || !is_finite(w2))
    throw usage_error("make_rotor_through: non-finite endpoints");
  const Vec2 gamma = w2 - w1;
  const double len = norm(gamma);
  if (!(len > 0.0))
    throw usage_error("make_rotor_through: coincident endpoints");
  // Endpoints land at normalized radius 1/(2·factor); keep them strictly
  // inside the reflecting core.
  if (!(factor >= 1.0 / (2.0 * (kRotorCore - 0.01))))
    throw usage_error(
        "make_rotor_through: factor must put the endpoints strictly inside "
        "the reflecting core");
  EllipticTwist tw;
  tw.rotor = true;
  tw.reflect_sum = w1 + w2;
  tw.center = 0.5 * tw.reflect_sum;
  tw.axis_u = (1.0 / len) * gamma;
  tw.axis_n = Vec2{-tw.axis_u.y, tw.axis_u.x};
  tw.r_major = factor * len;
  tw.r_minor = minor;
  if (!(minor > 0.0) || minor > tw.r_major)
    throw usage_error("make_rotor_through: need 0 < minor ≤ major");
  const double ex = std::hypot(tw.r_major * tw.axis_u.x,
                               tw.r_minor * tw.axis_n.x);
  const double ey = std::hypot(tw.r_major * tw.axis_u.y,
                               tw.r_minor * tw.axis_n.y);
  tw.x_lo = tw.center.x - ex;
  tw.x_hi = tw.center.x + ex;
  tw.y_lo = tw.center.y - ey;
  tw.y_hi = tw.center.y + ey;
  return tw;
}

// ── TwistStack ─────────────────────────────────────────────────────────────
TwistStack::TwistStack(std::vector<EllipticTwist> twists)
    : twists_(std::move(twists)) {
  for (const EllipticTwist& tw : twists_) {
    if (!(tw.x_lo > -0.5 && tw.x_hi < 0.5 && tw.y_lo > 0.0 && tw.y_hi < 1.0))
      throw usage_error(
          "TwistStack: a support leaves (−1/2,1/2) × (0,1); the periodized "
          "lookup would miss it");
  }
  std::sort(twists_.begin(), twists_.end(),
            [](const EllipticTwist& a, const EllipticTwist& b) {
              return a.y_lo < b.y_lo;
            });
  // back_depth bounds how far below the last interval starting ≤ y a
  // containing interval can sit: max over i of i − min{j : y_hi_j ≥ y_lo_i}.
  for (std::size_t i = 0; i < twists_.size(); ++i) {
    std::size_t j = 0;
    while (j < i && twists_[j].y_hi < twists_[i].y_lo) ++j;
    back_depth_ = std::max(back_depth_, static_cast<int>(i - j));
    lip_ = std::max(lip_, twists_[i].lip_bound());
  }
}

static Vec2 periodize_xy(Vec2 z) {
  return {z.x - std::round(z.x), z.y - std::floor(z.y)};
}

int TwistStack::find_active(Vec2 z) const {
  if (twists_.empty()) return -1;
  const Vec2 w = periodize_xy(z);
  // First index with y_lo > w.y, then walk back over possible containers.
  int idx = static_cast<int>(
      std::upper_bound(twists_.begin(), twists_.end(), w.y,
                       [](double y, const EllipticTwist& tw) {
                         return y < tw.y_lo;
                       }) -
      twists_.begin());
  for (int j = idx - 1; j >= 0 && j >= idx - 1 - back_depth_; --j) {
    const EllipticTwist& tw = twists_[j];
    if (tw.y_hi < w.y) continue;
    if (w.x < tw.x_lo || w.x > tw.x_hi) continue;
    if (tw.t_of(w) < 1.0) return j;
  }
  return -1;
}

Vec2 TwistStack::apply_dir(Vec2 z, bool forward) const {
  const int j = find_active(z);
  if (j < 0) return z;
  const Vec2 w = periodize_xy(z);
  const Vec2 r = forward ? twists_[j].apply(w) : twists_[j].apply_inverse(w);
  return {z.x + (r.x - w.x), z.y + (r.y - w.y)};
}

Vec2 TwistStack::apply(Vec2 z) const { return apply_dir(z, true); }
Vec2 TwistStack::apply_inverse(Vec2 z) const { return apply_dir(z, false); }

double TwistStack::local_lip(Vec2 c, double r) const {
  if (twists_.empty()) return 1.0;
  if (r >= 0.2) return lip_;  // disk spans periods; fall back to the global
  const Vec2 w = periodize_xy(c);
  double best = 1.0;
  for (int dy = -1; dy <= 1; ++dy) {
    const double qy = w.y + static_cast<double>(dy);
    // All twists with [y_lo, y_hi] meeting [qy − r, qy + r].
    int idx = static_cast<int>(
        std::upper_bound(twists_.begin(), twists_.end(), qy + r,
                         [](double y, const EllipticTwist& tw) {
                           return y < tw.y_lo;
                         }) -
        twists_.begin());
    // Walk back: every twist with y_lo inside the range matches outright;
    // once y_lo drops below the range, only the next back_depth+1 entries
    // can still reach it (point-stab bound at qy − r).
    int below = 0;
    for (int j = idx - 1; j >= 0; --j) {
      const EllipticTwist& tw = twists_[j];
      if (tw.y_lo < qy - r) {
        ++below;
        if (below > back_depth_ + 1) break;
      }
      if (tw.y_hi >= qy - r)
        best = std::max(best, tw.local_lip({w.x, qy}, r));
    }
  }
  return best;
}

LiftedMap twist_stack_map(TwistStack stack, const std::string& name) {
  auto shared = std::make_shared<const TwistStack>(std::move(stack));
  LiftedMap m;
  m.name = name;
  m.eval = [shared](Vec2 z) { return shared->apply(z); };
  m.inverse = [shared](Vec2 z) { return shared->apply_inverse(z); };
  m.lipschitz_bound = shared->lip_bound();
  m.local_lip = [shared](Vec2 c, double r) { return shared->local_lip(c, r); };
  m.local_lip_x = m.local_lip;
  m.local_lip_y = m.local_lip;
  return m;
}

// ── periodized single twists ───────────────────────────────────────────────
Vec2 twist_frame(const EllipticTwist& tw, Vec2 z) {
  const Vec2 d = z - tw.center;
  return {z.x - std::round(d.x), z.y - std::round(d.y)};
}

double twist_t_periodized(const EllipticTwist& tw, Vec2 z) {
  return tw.t_of(twist_frame(tw, z));
}

Vec2 twist_apply_periodized(const EllipticTwist& tw, Vec2 z, bool forward) {
  const Vec2 w = twist_frame(tw, z);
  if (tw.t_of(w) >= 1.0) return z;
  const Vec2 r = forward ? tw.apply(w) : tw.apply_inverse(w);
  return {z.x + (r.x - w.x), z.y + (r.y - w.y)};
}

LiftedMap twist_pair_map(const EllipticTwist& A, const EllipticTwist& B,
                         const std::string& name) {
  LiftedMap m;
  m.name = name;
  m.eval = [A, B](Vec2 z) {
    return twist_apply_periodized(A, twist_apply_periodized(B, z, true), true);
  };
  m.inverse = [A, B](Vec2 z) {
    return twist_apply_periodized(B, twist_apply_periodized(A, z, false),
                                  false);
  };
  m.lipschitz_bound = A.lip_bound() * B.lip_bound();
  auto field = [A, B](Vec2 c, double r) {
    if (r >= 0.2) return A.lip_bound() * B.lip_bound();
    const double lb = B.local_lip(twist_frame(B, c), r);
    const Vec2 mid = twist_apply_periodized(B, c, true);
    return A.local_lip(twist_frame(A, mid), r * lb) * lb;
  };
  m.local_lip = field;
  m.local_lip_x = field;
  m.local_lip_y = field;
  return m;
}

// ── round twist ────────────────────────────────────────────────────────────
LiftedMap circular_twist_map(Vec2 center, double r_inner, double r_outer,
                             double angle) {
  if (!is_finite(center) || !std::isfinite(angle))
    throw usage_error("circular_twist_map: non-finite parameters");
  if (!(r_inner > 0.0 && r_inner < r_outer && r_outer < 0.5))
    throw usage_error(
        "circular_twist_map: need 0 < r_inner < r_outer < 1/2");
  LiftedMap m;
  m.name = "twist";
  m.params = {{"cx", center.x}, {"cy", center.y}, {"r_inner", r_inner},
              {"r_outer", r_outer},               {"angle", angle}};
  const double taper = std::fabs(angle) / (r_outer - r_inner);
  auto eval_signed = [center, r_inner, r_outer, angle](Vec2 z, double sign) {
    const Vec2 d = z - center;
    const Vec2 shift{std::round(d.x), std::round(d.y)};
    const Vec2 p = d - shift;  // nearest-translate offset from the center
    const double rho = norm(p);
    if (rho >= r_outer) return z;
    const double frac =
        rho <= r_inner ? 1.0 : (r_outer - rho) / (r_outer - r_inner);
    const double psi = sign * angle * frac;
    const double ca = std::cos(psi), sa = std::sin(psi);
    const Vec2 q{ca * p.x - sa * p.y, sa * p.x + ca * p.y};
    return center + shift + q;
  };
  m.eval = [eval_signed](Vec2 z) { return eval_signed(z, +1.0); };
  m.inverse = [eval_signed](Vec2 z) { return eval_signed(z, -1.0); };
  m.lipschitz_bound = 1.0 + r_outer * taper;
  auto field = [center, r_inner, r_outer, taper](Vec2 c, double r) {
    if (r >= 0.2) return 1.0 + r_outer * taper;
    const Vec2 d = c - center;
    const Vec2 p{d.x - std::round(d.x), d.y - std::round(d.y)};
    const double rho = norm(p);
    if (rho - r >= r_outer || rho + r <= r_inner) return 1.0;  // rigid zones
    const double hi = std::min(rho + r, r_outer);
    return 1.0 + hi * taper;
  };
  m.local_lip = field;
  m.local_lip_x = field;
  m.local_lip_y = field;
  return m;
}

}  // namespace rotaset
