/// Area-preserving torus example built from a leaf fold, a rotor chain and a
/// calibrated shear ratchet. Numerical contract highlights:
///  - the fold h and its inverse return slab points verbatim (the central
///    slab is the bitwise fixed set), and the quadratic leaf
///    reparametrization uses the stable root so its denominator stays away
///    from zero for every admissible slope parameter;
///  - the leaf-wise slide f1 tests bowtie membership before doing any
///    arithmetic, so its fixed set is exact to the bit;
///  - chain rotors move their carrier endpoints by an exact point
///    reflection, so orbits march down the chain with only one rounding of a
///    precomputed sum per step;
///  - the shear amplitude is calibrated from the evaluated jump source, which
///    makes the ratcheted jump land exactly on the translated start (the
///    calibration error is below half an ulp of the target).

#include "rotaset/example_conservative.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rotaset/errors.hpp"

namespace rotaset {

namespace {

void validate_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha <= 0.1))
    throw usage_error(std::string(who) + ": alpha must lie in (0, 1/10]");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(Vec2 z) { return "(" + fmt(z.x) + ", " + fmt(z.y) + ")"; }

// Horizontal slide distance at height y.
double slide_of(double y, double alpha) { return alpha * dist_to_int(y); }

// Central slab half-width at reduced height yh ∈ [0, 1/2] (doubling is
// exact, so this matches 2·alpha·dist both ways of rounding).
double slab_halfwidth(double yh, double alpha) { return 2.0 * (alpha * yh); }

// ── leaf sweep coefficients ────────────────────────────────────────────────
// On the rising half-leaf the horizontal offset s from the slab edge and the
// normalized leaf parameter σ ∈ [0, 1] are linked by s = P σ + Q σ²/2; P and
// Q are the first- and second-order sweep rates that make the sweep between
// consecutive leaves area-preserving, and R = P + Q/2 is the full half-leaf
// offset in the domain.
struct Fold {
  double w = 0.0;   // slab half-width
  double th = 0.0;  // leaf peak height
  double P = 0.0;
  double Q = 0.0;
  double R = 0.0;
};

Fold fold_at(double yh, double alpha) {
  Fold f;
  f.w = slab_halfwidth(yh, alpha);
  f.th = theta(yh, alpha);
  f.P = 0.5 - 2.0 * alpha * f.th;
  f.R = 0.5 * (1.0 - alpha) - f.w;
  f.Q = 2.0 * (f.R - f.P);
  return f;
}

// σ from the offset s ∈ [0, R], stable quadratic root.
double sigma_from_offset(const Fold& f, double s) {
  const double disc = std::max(0.0, f.P * f.P + 2.0 * f.Q * s);
  const double sigma = 2.0 * s / (f.P + std::sqrt(disc));
  return std::clamp(sigma, 0.0, 1.0);
}

// ── interval bounds on the fold partials ───────────────────────────────────
// Magnitude bounds for the partial derivatives of the non-slab fold piece
// over reduced heights [ylo, yhi] ⊂ [0, 1/2] and the full leaf parameter
// range σ ∈ [0, 1]. The same four ingredients bound the rows of h and (via
// the unit-determinant adjugate) the rows of h⁻¹.
struct FoldRows {
  double rx_h = 1.0;     // row (u_x, u_y) of h
  double ry_h = 1.0;     // row (v_x, v_y) of h
  double rx_hinv = 1.0;  // row (v_y, −u_y) of h⁻¹
  double ry_hinv = 1.0;  // row (−v_x, u_x) of h⁻¹
  double full_h = 1.0;
  double full_hinv = 1.0;
};

FoldRows fold_rows_bound(double ylo, double yhi, double alpha) {
  ylo = std::clamp(ylo, 0.0, 0.5);
  yhi = std::clamp(yhi, ylo, 0.5);
  const double wlo = slab_halfwidth(ylo, alpha);
  // θ′ decreases with height; θ − y decreases as well.
  const double thp_hi = theta_slope(ylo, alpha);
  const double thp_lo = theta_slope(yhi, alpha);
  const double tmy_hi = theta(ylo, alpha) - ylo;
  // E = P + Qσ is smallest at σ = 1 (Q < 0) and decreases with height.
  const Fold fhi = fold_at(yhi, alpha);
  const double minE = fhi.P + fhi.Q;
  if (!(minE > 1e-3))
    throw map_definition_error(
        "fold_rows_bound: degenerate sweep denominator " + fmt(minE));
  const double wprime = 2.0 * alpha;
  const double ux = (0.5 - wlo) / minE;
  const double vx = tmy_hi / minE;
  // |σ_y| ≤ (w′ + |P′| + |Q′|/2)/minE with P′ = −2αθ′, Q′ = 4α(θ′ − 1).
  const double sy =
      (wprime + 2.0 * alpha * thp_hi + 2.0 * alpha * (1.0 - thp_lo)) / minE;
  const double uy = wprime + sy * (0.5 - wlo);
  const double vy = 1.0 + (1.0 - thp_lo) + sy * tmy_hi;
  FoldRows r;
  r.rx_h = std::max(1.0, std::hypot(ux, uy));
  r.ry_h = std::max(1.0, std::hypot(vx, vy));
  r.rx_hinv = std::max(1.0, std::hypot(vy, uy));
  r.ry_hinv = std::max(1.0, std::hypot(vx, ux));
  r.full_h = std::hypot(r.rx_h, r.ry_h);
  r.full_hinv = std::hypot(r.rx_hinv, r.ry_hinv);
  return r;
}

}  // namespace

// ── fold geometry ──────────────────────────────────────────────────────────
double theta(double y, double alpha) {
  validate_alpha(alpha, "theta");
  if (!(y >= 0.0 && y <= 1.0))
    throw usage_error("theta: y must lie in [0, 1]");
  if (y == 0.5) return 0.5;
  if (y > 0.5) return 1.0 - theta(1.0 - y, alpha);
  const double den = 1.0 - 4.0 * alpha * y;
  return (alpha + y * (1.0 - 2.0 * alpha - 4.0 * alpha * y)) / den;
}

double theta_slope(double y, double alpha) {
  validate_alpha(alpha, "theta_slope");
  if (!(y >= 0.0 && y <= 1.0))
    throw usage_error("theta_slope: y must lie in [0, 1]");
  if (y > 0.5) y = 1.0 - y;
  const double den = 1.0 - 4.0 * alpha * y;
  return 1.0 - 2.0 * alpha * (1.0 - 2.0 * alpha) / (den * den);
}

Vec2 h_map(Vec2 z, double alpha) {
  validate_alpha(alpha, "h_map");
  if (!is_finite(z)) throw usage_error("h_map: non-finite input");
  if (!(z.y >= 0.0 && z.y <= 1.0))
    throw usage_error("h_map: y must lie in [0, 1]");
  const bool flip = z.y > 0.5;
  const double yh = flip ? 1.0 - z.y : z.y;  // exact
  const double p = 1.0 - alpha;              // domain x-period
  const double k = std::nearbyint(z.x / p);
  const double x0 = z.x - k * p;
  const double w = slab_halfwidth(yh, alpha);
  const double ax = std::fabs(x0);
  if (ax <= w) return {k + x0, z.y};  // slab: shifted verbatim (exact at k=0)
  const Fold f = fold_at(yh, alpha);
  const double s = std::clamp(ax - w, 0.0, f.R);
  const double sigma = sigma_from_offset(f, s);
  const double u0 = w + sigma * (0.5 - w);
  const double vh = yh + sigma * (f.th - yh);
  return {k + std::copysign(u0, x0), flip ? 1.0 - vh : vh};
}

Vec2 h_inverse(Vec2 z, double alpha) {
  validate_alpha(alpha, "h_inverse");
  if (!is_finite(z)) throw usage_error("h_inverse: non-finite input");
  if (!(z.y >= 0.0 && z.y <= 1.0))
    throw usage_error("h_inverse: y must lie in [0, 1]");
  const bool flip = z.y > 0.5;
  const double vh = flip ? 1.0 - z.y : z.y;  // exact
  const double p = 1.0 - alpha;
  const double k = std::nearbyint(z.x);
  const double u0 = z.x - k;  // exact
  const double au = std::fabs(u0);
  const double wv = slab_halfwidth(vh, alpha);
  if (au <= wv) return {k * p + u0, z.y};  // slab: verbatim at k = 0
  // Solve for the preimage height t ∈ [0, vh]:
  //   G(t) = t + σ_lin(t)·(θ(t) − t) − vh,  σ_lin(t) = (au − w(t))/(1/2 − w(t)).
  // G is strictly increasing (G′ ≥ 0.67 for alpha ≤ 1/10) and
  // G(0) = 2·alpha·au − vh, which is exactly the bottom-leaf test.
  const double g_zero = 2.0 * alpha * au - vh;
  if (g_zero > 1e-12)
    throw usage_error("h_inverse: input lies below the folded image region");
  double t = vh;
  if (g_zero < 0.0) {
    double lo = 0.0, hi = vh;
    t = vh;  // G(vh) ≥ 0
    for (int it = 0; it < 200; ++it) {
      const double wt = slab_halfwidth(t, alpha);
      const double denom = 0.5 - wt;
      const double sl = (au - wt) / denom;
      const double th = theta(t, alpha);
      const double g = t + sl * (th - t) - vh;
      if (std::fabs(g) <= 1e-15) break;
      if (g < 0.0)
        lo = t;
      else
        hi = t;
      const double slp = 2.0 * alpha * (au - 0.5) / (denom * denom);
      const double gp =
          1.0 + slp * (th - t) + sl * (theta_slope(t, alpha) - 1.0);
      double tn = t - g / gp;
      if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
      if (hi - lo <= 1e-16) {
        t = 0.5 * (lo + hi);
        break;
      }
      t = tn;
    }
  } else {
    t = 0.0;  // at (or a rounding below) the bottom leaf
  }
  const double wt = slab_halfwidth(t, alpha);
  const double sigma = std::clamp((au - wt) / (0.5 - wt), 0.0, 1.0);
  const Fold f = fold_at(t, alpha);
  const double s = std::min(f.R, f.P * sigma + 0.5 * f.Q * sigma * sigma);
  const double x0 = wt + s;
  return {k * p + std::copysign(x0, u0), flip ? 1.0 - t : t};
}

// ── base slide ─────────────────────────────────────────────────────────────
LiftedMap build_base_slide(double alpha) {
  validate_alpha(alpha, "build_base_slide");
  LiftedMap m;
  m.name = "cons_slide";
  m.params = {{"alpha", alpha}};
  m.eval = [alpha](Vec2 z) -> Vec2 {
    return {z.x + slide_of(z.y, alpha), z.y};
  };
  m.inverse = [alpha](Vec2 z) -> Vec2 {
    return {z.x - slide_of(z.y, alpha), z.y};
  };
  const double row = std::hypot(1.0, alpha);
  m.lipschitz_bound = 1.0 + alpha;
  m.local_lip = [alpha](Vec2, double) { return 1.0 + alpha; };
  m.local_lip_x = [row](Vec2, double) { return row; };
  m.local_lip_y = [](Vec2, double) { return 1.0; };
  return m;
}

// ── leaf-wise slide ────────────────────────────────────────────────────────
namespace {

// Shared evaluator for f1 and its inverse: bowtie points pass through
// verbatim; everything else rides its fold leaf by ±slide.
Vec2 f1_eval_signed(Vec2 z, double alpha, double sign) {
  double jy = std::floor(z.y);
  double y0 = z.y - jy;
  if (y0 >= 1.0) {  // rounding guard for y just below an integer
    jy += 1.0;
    y0 = 0.0;
  }
  const double dy = std::min(y0, 1.0 - y0);
  const double dx = dist_to_int(z.x);
  if (dy <= 2.0 * alpha * dx) return z;  // bowtie: fixed verbatim
  const Vec2 pin = h_inverse({z.x, y0}, alpha);
  const Vec2 slid{pin.x + sign * slide_of(pin.y, alpha), pin.y};
  const Vec2 out = h_map(slid, alpha);
  return {out.x, out.y + jy};
}

struct F1Rows {
  double lx = 1.0, ly = 1.0, full = 1.0;
};

F1Rows f1_rows(Vec2 c, double r, double alpha, const F1Rows& global) {
  if (r >= 0.25) return global;
  const double dyc = dist_to_int(c.y);
  const double dxc = dist_to_int(c.x);
  // Whole ball inside the bowtie ⇒ identity rows (dist is 1-Lipschitz).
  if (dyc + r <= 2.0 * alpha * (dxc - r)) return {1.0, 1.0, 1.0};
  // Preimage heights never exceed image heights, so the reduced-height
  // interval [0, min(1/2, dyc + r)] covers both fold factors.
  const FoldRows fr = fold_rows_bound(0.0, dyc + r, alpha);
  const double mid = 1.0 + alpha;  // slide operator norm bound
  F1Rows out;
  out.lx = std::max(1.0, fr.rx_h * mid * fr.full_hinv);
  out.ly = std::max(1.0, fr.ry_h * mid * fr.full_hinv);
  out.full = std::max(1.0, fr.full_h * mid * fr.full_hinv);
  return out;
}

}  // namespace

LiftedMap build_f1(double alpha) {
  validate_alpha(alpha, "build_f1");
  LiftedMap m;
  m.name = "cons_fold";
  m.params = {{"alpha", alpha}};
  m.eval = [alpha](Vec2 z) { return f1_eval_signed(z, alpha, +1.0); };
  m.inverse = [alpha](Vec2 z) { return f1_eval_signed(z, alpha, -1.0); };
  const FoldRows g = fold_rows_bound(0.0, 0.5, alpha);
  F1Rows global;
  global.lx = std::max(1.0, g.rx_h * (1.0 + alpha) * g.full_hinv);
  global.ly = std::max(1.0, g.ry_h * (1.0 + alpha) * g.full_hinv);
  global.full = std::max(1.0, g.full_h * (1.0 + alpha) * g.full_hinv);
  m.lipschitz_bound = global.full;
  m.local_lip = [alpha, global](Vec2 c, double r) {
    return f1_rows(c, r, alpha, global).full;
  };
  m.local_lip_x = [alpha, global](Vec2 c, double r) {
    return f1_rows(c, r, alpha, global).lx;
  };
  m.local_lip_y = [alpha, global](Vec2 c, double r) {
    return f1_rows(c, r, alpha, global).ly;
  };
  return m;
}

// ── heteroclinic chain ─────────────────────────────────────────────────────
namespace {

constexpr int kRimSamples = 64;
constexpr double kRotorFactor = 1.05;  // endpoints at t = 1/(2·1.05) ≈ 0.476

std::vector<Vec2> rim_points(const EllipticTwist& tw, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * M_PI * i / n;
    pts.push_back(tw.center + (tw.r_major * std::cos(phi)) * tw.axis_u +
                  (tw.r_minor * std::sin(phi)) * tw.axis_n);
  }
  return pts;
}

[[noreturn]] void packing_fail(int k, const std::string& what) {
  throw numerical_error("DISK_PACKING_FAILED: rotor k=" + std::to_string(k) +
                        " " + what);
}

}  // namespace

ConservativeChain build_chain(double alpha, double beta, int truncation,
                              double disk_radius_fraction) {
  validate_alpha(alpha, "build_chain");
  if (!(beta > 0.0 && beta < 1.0))
    throw usage_error("build_chain: beta must lie in (0, 1)");
  if (truncation < 2)
    throw usage_error("build_chain: truncation must be at least 2");
  if (!(disk_radius_fraction > 0.0 && disk_radius_fraction <= 0.5))
    throw usage_error(
        "build_chain: disk_radius_fraction must lie in (0, 1/2]");

  ConservativeChain ch;
  ch.alpha = alpha;
  ch.beta = beta;
  ch.truncation = truncation;
  const int K = truncation;
  ch.heights.assign(static_cast<size_t>(2 * K + 1), 0.0);
  ch.heights[static_cast<size_t>(K)] = 0.5;
  for (int k = 1; k <= K; ++k)
    ch.heights[static_cast<size_t>(K + k)] =
        beta * ch.heights[static_cast<size_t>(K + k - 1)];
  double u = 0.5;  // mirrors the downward recursion bitwise
  for (int k = 1; k <= K; ++k) {
    u = beta * u;
    ch.heights[static_cast<size_t>(K - k)] = 1.0 - u;
  }
  if (!(ch.height(K) > 0.0 && ch.height(-K) < 1.0))
    throw numerical_error(
        "DISK_PACKING_FAILED: chain heights collapsed at this truncation");

  const LiftedMap f1 = build_f1(alpha);
  std::vector<EllipticTwist> rotors;
  rotors.reserve(static_cast<size_t>(2 * K));
  for (int k = -K; k < K; ++k) {
    const double yk = ch.height(k);
    const double yk1 = ch.height(k + 1);
    const Vec2 w1{slide_of(yk, alpha), yk};
    const Vec2 w2{0.0, yk1};
    // The slide image of the axis point must be the rotor's first endpoint.
    const Vec2 img = f1.eval({0.0, yk});
    if (!(img.x == w1.x && img.y == w1.y))
      throw map_definition_error(
          "build_chain: slide image mismatch at k=" + std::to_string(k) +
          ": " + fmt(img) + " vs " + fmt(w1));
    const double len = norm(w2 - w1);
    EllipticTwist tw = make_rotor_through(
        w1, w2, kRotorFactor, disk_radius_fraction * (len / 2.0));
    const Vec2 moved = tw.apply(w1);
    if (!(norm(moved - w2) <= 1e-12))
      packing_fail(k, "does not carry its endpoint (" + fmt(moved) + " vs " +
                          fmt(w2) + ")");
    rotors.push_back(tw);
  }

  // (1) every support sits strictly inside the right-leaning wedge and the
  // periodization window.
  for (int k = -K; k < K; ++k) {
    const EllipticTwist& tw = rotors[static_cast<size_t>(k + K)];
    if (!(tw.x_lo > -0.5 && tw.x_hi < 0.5 && tw.y_lo > 0.0 && tw.y_hi < 1.0))
      packing_fail(k, "support leaves the periodization window");
    for (const Vec2& z : rim_points(tw, kRimSamples)) {
      if (!(dist_to_int(z.x) < 2.0 * alpha * dist_to_int(z.y)))
        packing_fail(k, "support leaves the wedge at " + fmt(z));
    }
  }
  // (2) pairwise disjoint supports (AABB prefilter, then rim separation).
  for (int i = 0; i < 2 * K; ++i) {
    for (int j = i + 1; j < 2 * K; ++j) {
      const EllipticTwist& ti = rotors[static_cast<size_t>(i)];
      const EllipticTwist& tj = rotors[static_cast<size_t>(j)];
      if (ti.x_hi < tj.x_lo || tj.x_hi < ti.x_lo || ti.y_hi < tj.y_lo ||
          tj.y_hi < ti.y_lo)
        continue;
      if (!(tj.t_of(ti.center) > 1.0 && ti.t_of(tj.center) > 1.0))
        packing_fail(i - K, "contains the center of rotor k=" +
                                std::to_string(j - K));
      for (const Vec2& z : rim_points(ti, kRimSamples))
        if (!(tj.t_of(z) > 1.0))
          packing_fail(i - K,
                       "support meets rotor k=" + std::to_string(j - K));
      for (const Vec2& z : rim_points(tj, kRimSamples))
        if (!(ti.t_of(z) > 1.0))
          packing_fail(j - K,
                       "support meets rotor k=" + std::to_string(i - K));
    }
  }
  // (3) no rotor meets its own leaf-slide image: the image of the rim stays
  // outside the support and the center's preimage stays outside, so the
  // image disk and the support are disjoint and no point is pushed by the
  // same rotor twice in a row.
  for (int k = -K; k < K; ++k) {
    const EllipticTwist& tw = rotors[static_cast<size_t>(k + K)];
    for (const Vec2& z : rim_points(tw, kRimSamples)) {
      if (!(tw.t_of(f1.eval(z)) > 1.0))
        packing_fail(k, "meets its own slide image near " + fmt(z));
    }
    if (!(tw.t_of(f1.inverse(tw.center)) > 1.0))
      packing_fail(k, "has its center inside its own slide image");
  }

  ch.twists = TwistStack(std::move(rotors));
  return ch;
}

LiftedMap apply_chain(const ConservativeChain& chain, const LiftedMap& f1) {
  return compose(twist_stack_map(chain.twists, "cons_rotors"), f1);
}

// ── horizontal factor ──────────────────────────────────────────────────────
namespace {

void validate_conservative_params(const ConservativeParams& p,
                                  const char* who) {
  validate_alpha(p.alpha, who);
  if (!(p.beta > 0.0 && p.beta < 1.0))
    throw usage_error(std::string(who) + ": beta must lie in (0, 1)");
  if (p.truncation < 2)
    throw usage_error(std::string(who) + ": truncation must be at least 2");
  if (!(p.disk_radius_fraction > 0.0 && p.disk_radius_fraction <= 0.5))
    throw usage_error(std::string(who) +
                      ": disk_radius_fraction must lie in (0, 1/2]");
  if (!(p.a > 0.5 && p.a < p.c && p.c < p.b))
    throw usage_error(std::string(who) +
                      ": shear feet must satisfy 1/2 < a < c < b");
  const double y_minus1 = 1.0 - p.beta * 0.5;
  if (!(p.b < y_minus1 && p.b < 1.0 - p.alpha))
    throw usage_error(std::string(who) +
                      ": shear support must end below the first chain height "
                      "and below 1 - alpha");
  if (!(p.phi_sharpness >= 1.0 && p.phi_sharpness <= 8.0))
    throw usage_error(std::string(who) +
                      ": phi_sharpness must lie in [1, 8]");
}

// Tent-profile shear x ↦ x + phi(y): phi vanishes outside (a, b) (those
// points pass through verbatim), rises to exactly `amplitude` at y = c.
LiftedMap build_ratchet_shear(double a, double b, double c, double amplitude,
                              double sharpness) {
  auto phi = [a, b, c, amplitude, sharpness](double y) -> double {
    const double yf = fract(y);
    if (yf <= a || yf >= b) return 0.0;
    const double t =
        yf < c ? (yf - a) / (c - a) : (b - yf) / (b - c);
    return amplitude * std::pow(std::clamp(t, 0.0, 1.0), sharpness);
  };
  LiftedMap m;
  m.name = "cons_ratchet";
  m.params = {{"a", a}, {"b", b}, {"c", c}, {"amplitude", amplitude},
              {"sharpness", sharpness}};
  m.eval = [phi](Vec2 z) -> Vec2 {
    const double s = phi(z.y);
    if (s == 0.0) return z;
    return {z.x + s, z.y};
  };
  m.inverse = [phi](Vec2 z) -> Vec2 {
    const double s = phi(z.y);
    if (s == 0.0) return z;
    return {z.x - s, z.y};
  };
  const double slope =
      amplitude * sharpness / std::min(c - a, b - c);
  const double rowx = std::hypot(1.0, slope);
  // True only where the ball meets the support strip in reduced height.
  auto strip_touch = [a, b](Vec2 center, double r) {
    if (r >= 0.5) return true;
    const double yf = fract(center.y);
    const double lo = yf - r, hi = yf + r;
    return (hi > a && lo < b) || (hi - 1.0 > a) || (lo + 1.0 < b);
  };
  m.lipschitz_bound = std::hypot(rowx, 1.0);
  m.local_lip = [strip_touch, rowx](Vec2 c2, double r) {
    return strip_touch(c2, r) ? std::hypot(rowx, 1.0) : 1.0;
  };
  m.local_lip_x = [strip_touch, rowx](Vec2 c2, double r) {
    return strip_touch(c2, r) ? rowx : 1.0;
  };
  m.local_lip_y = [](Vec2, double) { return 1.0; };
  return m;
}

}  // namespace

LiftedMap build_fH_conservative(const ConservativeParams& params) {
  validate_conservative_params(params, "build_fH_conservative");
  const double alpha = params.alpha;
  const LiftedMap f1 = build_f1(alpha);
  const ConservativeChain chain =
      build_chain(alpha, params.beta, params.truncation,
                  params.disk_radius_fraction);
  const LiftedMap f2 = apply_chain(chain, f1);

  // The shear support must avoid every chain height.
  for (int k = -chain.truncation; k <= chain.truncation; ++k) {
    const double y = chain.height(k);
    if (y > params.a && y < params.b)
      throw usage_error(
          "build_fH_conservative: chain height inside the shear support");
  }

  // Jump source: the point of the fold boundary at height c whose slide
  // image is the slab edge (w(c), c). Using the same rounding as the slide
  // keeps the hop bitwise.
  const double c = params.c;
  const Vec2 z1{slide_of(c, alpha), c};
  {
    // Tie to the closed form alpha/2 − alpha·(c − 1/2).
    const double closed = 0.5 * alpha - alpha * (c - 0.5);
    if (!(std::fabs(z1.x - closed) <= 1e-15))
      throw map_definition_error(
          "build_fH_conservative: jump source drifted from its closed form");
  }
  const double wc = slab_halfwidth(1.0 - c, alpha);
  const Vec2 img1 = f2.eval(z1);
  if (!(img1.x == wc && img1.y == c))
    throw map_definition_error(
        "build_fH_conservative: shear calibration saw unexpected slide image " +
        fmt(img1) + " (wanted (" + fmt(wc) + ", " + fmt(c) + "))");

  // Amplitude calibrated so the ratcheted jump lands exactly on the
  // translated start: wc + amp == z1.x + 1 bitwise (amp is within half an
  // ulp of the exact gap, so the final rounding recovers the target).
  const double target = z1.x + 1.0;
  const double amp = target - wc;
  if (!(wc + amp == target))
    throw map_definition_error(
        "build_fH_conservative: shear amplitude failed to close the jump");
  const double printed = 1.0 - 0.5 * alpha + alpha * (c - 0.5);
  if (!(std::fabs(amp - printed) <= 1e-12))
    throw map_definition_error(
        "build_fH_conservative: shear amplitude " + fmt(amp) +
        " is far from its closed form " + fmt(printed));

  // The rotor supports must stay clear of the jump anchors.
  for (const EllipticTwist& tw : chain.twists.twists()) {
    if (!(twist_t_periodized(tw, z1) > 1.05 &&
          twist_t_periodized(tw, {wc, c}) > 1.05))
      throw numerical_error(
          "DISK_PACKING_FAILED: rotor support meets the shear anchors");
  }

  const LiftedMap g1 =
      build_ratchet_shear(params.a, params.b, c, amp, params.phi_sharpness);
  LiftedMap fH = compose(g1, f2);
  fH.name = "example_conservative_fH";
  fH.params = {{"alpha", alpha},        {"beta", params.beta},
               {"a", params.a},         {"b", params.b},
               {"c", c},                {"truncation",
                                         static_cast<double>(params.truncation)},
               {"disk_radius_fraction", params.disk_radius_fraction},
               {"phi_sharpness", params.phi_sharpness}};

  // Construction self-checks: the fixed origin, the bitwise jump, and the
  // chain march (forward to the tip, backward to the upper truncation).
  {
    const Vec2 o = fH.eval({0.0, 0.0});
    if (!(o.x == 0.0 && o.y == 0.0))
      throw map_definition_error(
          "build_fH_conservative: origin is not fixed");
    const Vec2 jump = fH.eval(z1);
    if (!(jump.x == target && jump.y == c))
      throw map_definition_error(
          "build_fH_conservative: ratcheted jump missed its target: " +
          fmt(jump));
    const int K = chain.truncation;
    Vec2 zmarch{0.0, chain.height(-K)};
    for (int k = -K; k < K; ++k) {
      zmarch = fH.eval(zmarch);
      const Vec2 want{0.0, chain.height(k + 1)};
      if (!(std::fabs(zmarch.x - want.x) <= 1e-11 &&
            std::fabs(zmarch.y - want.y) <= 1e-11))
        throw numerical_error(
            "CHAIN_TRANSPORT_FAILED: forward march lost the chain at k=" +
            std::to_string(k) + ": " + fmt(zmarch));
    }
    const Vec2 tip = fH.eval({0.0, chain.height(K)});
    const Vec2 tip_want{slide_of(chain.height(K), alpha), chain.height(K)};
    if (!(tip.x == tip_want.x && tip.y == tip_want.y))
      throw numerical_error(
          "CHAIN_TRANSPORT_FAILED: chain tip is not the slide image " +
          fmt(tip));
    Vec2 zback{0.0, 0.5};
    for (int k = 0; k > -K; --k) {
      zback = fH.inverse(zback);
      const Vec2 want{0.0, chain.height(k - 1)};
      if (!(std::fabs(zback.x - want.x) <= 1e-11 &&
            std::fabs(zback.y - want.y) <= 1e-11))
        throw numerical_error(
            "CHAIN_TRANSPORT_FAILED: backward march lost the chain at k=" +
            std::to_string(k) + ": " + fmt(zback));
    }
  }

  MarkedOrbit fixed_origin;
  fixed_origin.z = {0.0, 0.0};
  fixed_origin.period = 1;
  fixed_origin.offset = {0.0, 0.0};
  MarkedOrbit hop;
  hop.z = z1;
  hop.period = 1;
  hop.offset = {1.0, 0.0};
  fH.marked_orbits = {fixed_origin, hop};
  return fH;
}

// ── full example ───────────────────────────────────────────────────────────
LiftedMap build_example_conservative(const ConservativeParams& params) {
  LiftedMap fH = build_fH_conservative(params);
  LiftedMap fV = swap_xy_conjugate(fH);
  fV.name = "example_conservative_fV";
  LiftedMap f = compose(fV, fH);
  f.name = "example_conservative";
  f.params = fH.params;

  const Vec2 z1 = fH.marked_orbits[1].z;
  MarkedOrbit fixed_origin;
  fixed_origin.z = {0.0, 0.0};
  fixed_origin.period = 1;
  fixed_origin.offset = {0.0, 0.0};
  MarkedOrbit right;
  right.z = z1;
  right.period = 1;
  right.offset = {1.0, 0.0};
  MarkedOrbit up;
  up.z = {z1.y, z1.x};
  up.period = 1;
  up.offset = {0.0, 1.0};
  f.marked_orbits = {fixed_origin, right, up};

  for (const MarkedOrbit& mo : f.marked_orbits) {
    const Vec2 got = f.eval(mo.z);
    const Vec2 want = mo.z + mo.offset;
    if (!(std::fabs(got.x - want.x) <= 1e-12 &&
          std::fabs(got.y - want.y) <= 1e-12))
      throw map_definition_error(
          "build_example_conservative: marked orbit failed at " + fmt(mo.z) +
          ": " + fmt(got) + " vs " + fmt(want));
  }
  return f;
}

// ── unlock ─────────────────────────────────────────────────────────────────
UnlockResult conservative_unlock_perturbation(const LiftedMap& f,
                                              const ConservativeParams& params,
                                              double push_radius) {
  validate_conservative_params(params, "conservative_unlock_perturbation");
  if (!(push_radius > 0.0 && push_radius <= 0.25))
    throw usage_error(
        "conservative_unlock_perturbation: push_radius must lie in (0, 1/4]");
  if (!f.eval)
    throw usage_error(
        "conservative_unlock_perturbation: map needs an evaluator");

  // Recreate the chain heights (bitwise identical recursion).
  const int K = params.truncation;
  double yK = 0.5, uK = 0.5;
  for (int k = 0; k < K; ++k) {
    yK = params.beta * yK;
    uK = params.beta * uK;
  }
  const double y_lo = yK;            // lowest chain height
  const double y_hi = 1.0 - uK;      // highest chain height

  // The truncated tip and the wrapped top of the chain.
  const Vec2 start{0.0, y_hi};
  const Vec2 tip_want{slide_of(y_lo, params.alpha), y_lo};
  const Vec2 tip = f.eval({0.0, y_lo});
  if (!(tip.x == tip_want.x && tip.y == tip_want.y))
    throw numerical_error(
        "SUPPORT_OVERLAP: chain tip moved before the pusher was placed: " +
        fmt(tip));
  const Vec2 w2{0.0, y_hi - 1.0};
  const double len = norm(w2 - tip);
  const double r_major = 1.05 * (len / 2.0);
  if (!(r_major <= push_radius))
    throw usage_error(
        "conservative_unlock_perturbation: push_radius is below the chain "
        "gap radius " + fmt(r_major));
  const double minor = 0.2 * r_major;
  const EllipticTwist A = make_twist_through(tip, w2, 1.05, minor);
  const EllipticTwist B = make_twist_through(
      {tip.y, tip.x}, {w2.y, w2.x}, 1.05, minor);  // exact diagonal mirror

  LiftedMap P = twist_pair_map(A, B, "cons_pushers");

  // Marked points of f must be left verbatim by both pushers: either far
  // outside the support or inside the rigid core.
  auto untouched = [&](Vec2 z) {
    const double ta = twist_t_periodized(A, z);
    const double tb = twist_t_periodized(B, z);
    const bool ok_a = ta >= 1.02 || ta <= 0.45;
    const bool ok_b = tb >= 1.02 || tb <= 0.45;
    if (!(ok_a && ok_b)) return false;
    const Vec2 moved = P.eval(z);
    return moved.x == z.x && moved.y == z.y;
  };
  for (const MarkedOrbit& mo : f.marked_orbits) {
    if (!untouched(mo.z) || !untouched(mo.z + mo.offset))
      throw numerical_error(
          "SUPPORT_OVERLAP: pusher support touches the marked point " +
          fmt(mo.z));
  }

  // Replay both closed chains: the pushers must pass every intermediate
  // point through verbatim and jump exactly once, at the truncated tip.
  const long long q = 2LL * K + 1LL;
  auto replay = [&](Vec2 z0, const EllipticTwist& jumper,
                    const EllipticTwist& other, Vec2 closure_offset) {
    Vec2 z = z0;
    for (long long j = 0; j < q; ++j) {
      const Vec2 w = f.eval(z);
      const double tj = twist_t_periodized(jumper, w);
      const double to = twist_t_periodized(other, w);
      if (j + 1 < q) {
        if (!(tj >= 1.02 && to >= 1.02))
          throw numerical_error(
              "SUPPORT_OVERLAP: pusher support touches chain step " +
              std::to_string(j) + " at " + fmt(w));
      } else {
        if (!(tj >= kTwistPlateauLo + 0.002 && tj <= kTwistPlateauHi - 0.002))
          throw numerical_error(
              "SUPPORT_OVERLAP: chain tip missed the pusher plateau (t=" +
              fmt(tj) + ")");
        if (!(to >= 1.02))
          throw numerical_error(
              "SUPPORT_OVERLAP: mirror pusher reaches the other chain's tip");
      }
      z = P.eval(w);
      if (j + 1 < q && !(z.x == w.x && z.y == w.y))
        throw numerical_error(
            "SUPPORT_OVERLAP: pusher moved an intermediate chain point " +
            fmt(w));
    }
    const Vec2 want = z0 + closure_offset;
    if (!(std::fabs(z.x - want.x) <= 1e-9 &&
          std::fabs(z.y - want.y) <= 1e-9))
      throw numerical_error(
          "SUPPORT_OVERLAP: unlocked chain failed to close: " + fmt(z) +
          " vs " + fmt(want));
  };
  replay(start, A, B, {0.0, -1.0});
  replay({start.y, start.x}, B, A, {-1.0, 0.0});

  UnlockResult res;
  res.map = compose(P, f);
  res.map.name = "example_conservative_unlock";
  res.map.params = f.params;
  res.map.params["push_radius"] = push_radius;
  res.map.params["q"] = static_cast<double>(q);
  res.q = q;
  res.q_prime = q;
  res.max_displacement = 2.0 * (A.r_major + B.r_major);

  res.map.marked_orbits = f.marked_orbits;
  MarkedOrbit down;
  down.z = start;
  down.period = q;
  down.offset = {0.0, -1.0};
  MarkedOrbit left;
  left.z = {start.y, start.x};
  left.period = q;
  left.offset = {-1.0, 0.0};
  res.map.marked_orbits.push_back(down);
  res.map.marked_orbits.push_back(left);
  return res;
}

// ── area diagnostics ───────────────────────────────────────────────────────
namespace {

// Adaptive image of one boundary segment: appends refined image points of
// (z(t0), z(t1)] to `out`, splitting while the image midpoint sags away from
// the chord or the chord stays long.
void refine_edge(const LiftedMap& map, Vec2 a, Vec2 b, Vec2 fa, Vec2 fb,
                 double sag_tol, double chord_tol, int depth,
                 std::vector<Vec2>& out) {
  const Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const Vec2 fm = evaluate(map, mid);
  const Vec2 chord_mid{0.5 * (fa.x + fb.x), 0.5 * (fa.y + fb.y)};
  const double sag = norm(fm - chord_mid);
  const double chord = norm(fb - fa);
  // The factor maps couple a rotor taper band to the steep ratchet strip in
  // thin regions where the local derivative reaches ~1e4, so the image of a
  // short segment can be a long wiggling arc; the depth cap must allow
  // chords to shrink by ~6 orders of magnitude there.
  if (depth > 0 && (sag > sag_tol || chord > chord_tol)) {
    refine_edge(map, a, mid, fa, fm, sag_tol, chord_tol, depth - 1, out);
    refine_edge(map, mid, b, fm, fb, sag_tol, chord_tol, depth - 1, out);
    return;
  }
  out.push_back(fb);
}

}  // namespace

double area_preservation_check(const LiftedMap& map, int n_boxes,
                               int samples_per_box, std::uint64_t seed,
                               double box_side) {
  if (!map.eval) throw usage_error("area_preservation_check: map needs eval");
  if (n_boxes < 1)
    throw usage_error("area_preservation_check: need at least one box");
  if (samples_per_box < 2)
    throw usage_error("area_preservation_check: need samples_per_box >= 2");
  if (!(box_side > 0.0 && box_side <= 0.5))
    throw usage_error("area_preservation_check: box_side must be in (0, 1/2]");

  const double sag_tol = 2e-4 * box_side;
  const double chord_tol = 0.05 * box_side;
  double worst = 0.0;
  for (int i = 0; i < n_boxes; ++i) {
    // Independent substream per box: the result does not depend on the
    // evaluation order.
    std::uint64_t state =
        seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
    splitmix64(state);
    const double cx = uniform01(state);
    const double cy = uniform01(state);
    std::vector<Vec2> corners = {{cx, cy},
                                 {cx + box_side, cy},
                                 {cx + box_side, cy + box_side},
                                 {cx, cy + box_side}};
    std::vector<Vec2> poly;
    poly.reserve(static_cast<size_t>(8 * samples_per_box));
    for (int e = 0; e < 4; ++e) {
      const Vec2 p0 = corners[static_cast<size_t>(e)];
      const Vec2 p1 = corners[static_cast<size_t>((e + 1) % 4)];
      Vec2 prev = p0;
      Vec2 fprev = evaluate(map, prev);
      if (e == 0) poly.push_back(fprev);
      for (int sNum = 1; sNum <= samples_per_box; ++sNum) {
        const double t = static_cast<double>(sNum) / samples_per_box;
        const Vec2 cur{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
        const Vec2 fcur = evaluate(map, cur);
        refine_edge(map, prev, cur, fprev, fcur, sag_tol, chord_tol, 26,
                    poly);
        prev = cur;
        fprev = fcur;
      }
    }
    // Signed shoelace area of the refined image polygon.
    double twice_area = 0.0;
    for (size_t j = 0; j + 1 < poly.size(); ++j)
      twice_area += cross(poly[j], poly[j + 1]);
    twice_area += cross(poly.back(), poly.front());
    const double area = 0.5 * twice_area;
    const double box_area = box_side * box_side;
    worst = std::max(worst, std::fabs(area - box_area) / box_area);
  }
  return worst;
}

}  // namespace rotaset
