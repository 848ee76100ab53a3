/// Area-preserving example: fold geometry oracles (leaf straightening,
/// between-leaf area balance, unit Jacobian), the exact fixed bowtie of the
/// leaf-wise slide, rotor chain transport, the calibrated shear hop, marked
/// orbits of the full map, the unlock pushers, and the Monte-Carlo area
/// diagnostic. Local Lipschitz fields are validated against sampled
/// difference quotients since the fixed-point certifier relies on them.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rotaset/errors.hpp"
#include "rotaset/example_conservative.hpp"
#include "rotaset/map_core.hpp"
#include "rotaset/pushers.hpp"

using namespace rotaset;

namespace {

constexpr double kAlpha = 0.1;

ConservativeParams defaults() { return ConservativeParams{}; }

const LiftedMap& full_map() {
  static const LiftedMap f = build_example_conservative(defaults());
  return f;
}

double quad_area(const Vec2 (&v)[4]) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += cross(v[i], v[(i + 1) % 4]);
  return std::fabs(0.5 * s);
}

double slide(double y) { return kAlpha * dist_to_int(y); }
double halfwidth(double y) { return 2.0 * (kAlpha * dist_to_int(y)); }

}  // namespace

// ── fold profile ───────────────────────────────────────────────────────────
TEST_CASE("leaf peak profile: endpoints, symmetry, monotone slope") {
  CHECK(theta(0.0, kAlpha) == kAlpha);
  CHECK(theta(1.0, kAlpha) == 1.0 - kAlpha);
  CHECK(theta(0.5, kAlpha) == 0.5);

  double prev = theta(0.0, kAlpha);
  double prev_slope = theta_slope(0.0, kAlpha);
  for (int i = 1; i <= 1000; ++i) {
    const double y = i / 2000.0;  // sweep [0, 1/2]
    const double t = theta(y, kAlpha);
    const double s = theta_slope(y, kAlpha);
    CHECK(t > prev);           // strictly increasing
    CHECK(t >= y);             // leaves never bend below their height
    CHECK(t - y <= kAlpha);    // ... and rise at most alpha above it
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
    CHECK(s <= prev_slope + 1e-15);  // slope decreases toward the middle
    prev = t;
    prev_slope = s;
  }

  // Odd symmetry about the midline and a finite-difference slope check.
  std::uint64_t st = 11;
  for (int i = 0; i < 2000; ++i) {
    const double y = uniform01(st);
    CHECK(std::fabs(theta(y, kAlpha) + theta(1.0 - y, kAlpha) - 1.0) <=
          1e-15);
    if (y > 1e-4 && y < 0.5 - 1e-4) {
      const double d = 1e-6;
      const double fd =
          (theta(y + d, kAlpha) - theta(y - d, kAlpha)) / (2.0 * d);
      CHECK(std::fabs(fd - theta_slope(y, kAlpha)) <= 1e-6);
    }
  }

  CHECK_THROWS_AS(theta(-0.1, kAlpha), usage_error);
  CHECK_THROWS_AS(theta(0.3, 0.3), usage_error);
}

TEST_CASE("fold balances the area between consecutive leaves") {
  // The region between the leaf at height y and the middle leaf must keep
  // its area when the fold straightens it: the domain trapezoid between the
  // two leaf carriers matches the image quadrilateral spanned by the bent
  // leaves. This pins the peak profile uniquely.
  for (int i = 1; i < 1000; ++i) {
    const double y = 0.5 * i / 1000.0;
    const double w = halfwidth(y);
    const Vec2 dom[4] = {{kAlpha, 0.5},
                         {0.5 * (1.0 - kAlpha), 0.5},
                         {0.5 * (1.0 - kAlpha), y},
                         {w, y}};
    const Vec2 img[4] = {{kAlpha, 0.5},
                         {0.5, 0.5},
                         {0.5, theta(y, kAlpha)},
                         {w, y}};
    CHECK(std::fabs(quad_area(dom) - quad_area(img)) <= 1e-12);
  }
}

// ── fold map ───────────────────────────────────────────────────────────────
TEST_CASE("fold fixes its central slab verbatim and straightens leaves") {
  std::uint64_t st = 21;
  for (int i = 0; i < 3000; ++i) {
    const double y = uniform01(st);
    const double w = halfwidth(y);
    const double x = (2.0 * uniform01(st) - 1.0) * w;
    const Vec2 z{x, y};
    const Vec2 out = h_map(z, kAlpha);
    CHECK(out.x == z.x);  // bitwise pass-through
    CHECK(out.y == z.y);
    const Vec2 back = h_inverse(z, kAlpha);
    CHECK(back.x == z.x);
    CHECK(back.y == z.y);
  }

  // Each horizontal half-leaf maps onto the straight segment from the slab
  // edge to the midline peak; the leaf midpoint reaches the peak itself.
  for (int i = 0; i < 2000; ++i) {
    const double y = uniform01(st);
    const double w = halfwidth(y);
    const double edge = 0.5 * (1.0 - kAlpha);
    const Vec2 a{w, y};                        // leaf start (slab edge)
    const Vec2 b{0.5, theta(y, kAlpha)};       // leaf peak
    const double s = uniform01(st) * (edge - w);
    const Vec2 out = h_map({w + s, y}, kAlpha);
    CHECK(std::fabs(cross(out - a, b - a)) <= 1e-12);
    CHECK(out.x >= a.x - 1e-15);
    CHECK(out.x <= b.x + 1e-15);

    const Vec2 peak = h_map({edge, y}, kAlpha);
    CHECK(std::fabs(peak.x - 0.5) <= 5e-14);
    CHECK(std::fabs(peak.y - theta(y, kAlpha)) <= 5e-14);

    // Mirror edge of the next slab: one domain period to the right.
    const Vec2 wrap = h_map({(1.0 - kAlpha) - w, y}, kAlpha);
    CHECK(std::fabs(wrap.x - (1.0 - w)) <= 1e-12);
    CHECK(std::fabs(wrap.y - y) <= 1e-12);
  }
}

TEST_CASE("fold is periodic with mismatched domain and image periods") {
  std::uint64_t st = 31;
  const double p = 1.0 - kAlpha;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 z{(uniform01(st) - 0.5) * p, uniform01(st)};
    const Vec2 base = h_map(z, kAlpha);
    for (int k = -2; k <= 2; ++k) {
      const Vec2 shifted = h_map({z.x + k * p, z.y}, kAlpha);
      CHECK(std::fabs(shifted.x - (base.x + k)) <= 1e-12);
      CHECK(std::fabs(shifted.y - base.y) <= 1e-12);
    }
  }
}

TEST_CASE("fold round-trips and rejects points below its image") {
  std::uint64_t st = 41;
  const double p = 1.0 - kAlpha;
  for (int i = 0; i < 5000; ++i) {
    const Vec2 z{(uniform01(st) - 0.5) * 3.0 * p, uniform01(st)};
    const Vec2 fwd = h_map(z, kAlpha);
    const Vec2 back = h_inverse(fwd, kAlpha);
    CHECK(std::fabs(back.x - z.x) <= 1e-9);
    CHECK(std::fabs(back.y - z.y) <= 1e-9);
  }
  // Points in the image round-trip the other way as well.
  for (int i = 0; i < 5000; ++i) {
    const Vec2 z{(uniform01(st) - 0.5) * p, uniform01(st)};
    const Vec2 img = h_map(z, kAlpha);
    const Vec2 again = h_map(h_inverse(img, kAlpha), kAlpha);
    CHECK(std::fabs(again.x - img.x) <= 1e-9);
    CHECK(std::fabs(again.y - img.y) <= 1e-9);
  }
  // The open wedge under the bottom leaf lies outside the image.
  CHECK_THROWS_AS(h_inverse({0.3, 0.01}, kAlpha), usage_error);
  CHECK_THROWS_AS(h_inverse({-0.4, 0.02}, kAlpha), usage_error);
  CHECK_THROWS_AS(h_map({0.0, 1.5}, kAlpha), usage_error);
  CHECK_THROWS_AS(h_inverse({0.0, -0.5}, kAlpha), usage_error);
}

TEST_CASE("fold has unit Jacobian away from its creases") {
  std::uint64_t st = 51;
  const double d = 1e-6;
  int tested = 0;
  while (tested < 2000) {
    const double y = 0.02 + 0.96 * uniform01(st);
    const double yh = dist_to_int(y);
    const double w = halfwidth(yh);
    const double edge = 0.5 * (1.0 - kAlpha);
    const double s = uniform01(st) * (edge - w);
    if (s < 1e-3 || s > edge - w - 1e-3) continue;  // keep off the creases
    if (std::fabs(y - 0.5) < 1e-3) continue;
    const double x = (uniform01(st) < 0.5 ? -1.0 : 1.0) * (w + s);
    auto at = [&](double ax, double ay) { return h_map({ax, ay}, kAlpha); };
    const Vec2 xp = at(x + d, y), xm = at(x - d, y);
    const Vec2 yp = at(x, y + d), ym = at(x, y - d);
    const double det = ((xp.x - xm.x) * (yp.y - ym.y) -
                        (yp.x - ym.x) * (xp.y - xm.y)) /
                       (4.0 * d * d);
    CHECK(std::fabs(det - 1.0) <= 1e-4);
    ++tested;
  }

  // Forward image of a few safe boxes keeps its area to high accuracy.
  for (int b = 0; b < 5; ++b) {
    const double cx = -0.3 + 0.15 * b;
    const double cy = 0.1 + 0.06 * b;
    const double side = 0.04;
    std::vector<Vec2> poly;
    const int m = 400;
    const Vec2 corners[4] = {{cx, cy},
                             {cx + side, cy},
                             {cx + side, cy + side},
                             {cx, cy + side}};
    for (int e = 0; e < 4; ++e) {
      for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / m;
        const Vec2 q = corners[e] + t * (corners[(e + 1) % 4] - corners[e]);
        poly.push_back(h_map(q, kAlpha));
      }
    }
    double twice = 0.0;
    for (size_t i = 0; i < poly.size(); ++i)
      twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    CHECK(std::fabs(std::fabs(0.5 * twice) - side * side) / (side * side) <=
          1e-4);
  }
}

// ── leaf-wise slide ────────────────────────────────────────────────────────
TEST_CASE("leaf-wise slide fixes the bowtie exactly and matches the base "
          "slide on the straight band") {
  const LiftedMap f1 = build_f1(kAlpha);
  const LiftedMap base = build_base_slide(kAlpha);

  std::uint64_t st = 61;
  for (int i = 0; i < 4000; ++i) {
    // Bowtie points (dist to the nearest integer height within 2·alpha times
    // the horizontal distance) are fixed bitwise.
    const double x = 4.0 * uniform01(st) - 2.0;
    const double dmax = 2.0 * (kAlpha * dist_to_int(x));
    const double dy = uniform01(st) * dmax;
    const double y = (uniform01(st) < 0.5) ? std::floor(4.0 * uniform01(st)) + dy
                                           : std::ceil(4.0 * uniform01(st)) - dy;
    const Vec2 z{x, y};
    const Vec2 out = f1.eval(z);
    CHECK(out.x == z.x);
    CHECK(out.y == z.y);
  }

  for (int i = 0; i < 4000; ++i) {
    // On the band from the left slab edge to the carrier line the map is
    // exactly the base slide (bitwise), and past the carrier line it runs
    // strictly ahead of it.
    const double y = 0.05 + 0.9 * uniform01(st);
    if (dist_to_int(y) < 0.02) continue;
    const double d = slide(y);
    const double w = halfwidth(y);
    const double x = -w + uniform01(st) * (d + w);
    const Vec2 z{x, y};
    const Vec2 a = f1.eval(z);
    const Vec2 b = base.eval(z);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);

    const Vec2 carrier{d, y};
    const Vec2 hop = f1.eval(carrier);
    CHECK(hop.x == w);  // carrier line lands exactly on the slab edge
    CHECK(hop.y == y);

    const double xr = d + 1e-3 + uniform01(st) * (w - d - 1e-3);
    const Vec2 ahead = f1.eval({xr, y});
    CHECK(ahead.x > base.eval({xr, y}).x + 1e-12);
  }
}

TEST_CASE("leaf-wise slide pushes rightward inside a flat displacement cone") {
  const LiftedMap f1 = build_f1(kAlpha);
  std::uint64_t st = 71;
  int kept = 0;
  while (kept < 10000) {
    const Vec2 z{3.0 * uniform01(st) - 1.5, 3.0 * uniform01(st) - 1.5};
    const double dy = dist_to_int(z.y);
    const double dx = dist_to_int(z.x);
    if (dy <= 2.0 * kAlpha * dx + 1e-6) continue;  // skip the fixed bowtie
    const Vec2 out = f1.eval(z);
    const double mx = out.x - z.x;
    const double my = out.y - z.y;
    CHECK(mx > 1e-9);
    CHECK(std::fabs(my) <= 2.0 * kAlpha * mx * (1.0 + 1e-6) + 1e-15);
    ++kept;
  }
}

TEST_CASE("leaf-wise slide inverts, is periodic, and advertises sound "
          "Lipschitz fields") {
  const LiftedMap f1 = build_f1(kAlpha);
  CHECK(check_periodicity(f1, 2000, 1e-12).pass);

  std::uint64_t st = 81;
  for (int i = 0; i < 4000; ++i) {
    const Vec2 z{3.0 * uniform01(st) - 1.5, 3.0 * uniform01(st) - 1.5};
    const Vec2 rt = f1.inverse(f1.eval(z));
    CHECK(std::fabs(rt.x - z.x) <= 1e-9);
    CHECK(std::fabs(rt.y - z.y) <= 1e-9);
  }

  for (int i = 0; i < 3000; ++i) {
    const Vec2 c{2.0 * uniform01(st), 2.0 * uniform01(st)};
    const double r = 1e-4 + uniform01(st) * 0.05;
    const double lf = local_lip_bound(f1, c, r);
    const double lx = local_lip_bound_x(f1, c, r);
    const double ly = local_lip_bound_y(f1, c, r);
    CHECK(lf <= f1.lipschitz_bound * (1.0 + 1e-12));
    for (int p = 0; p < 4; ++p) {
      const double ang = 2.0 * M_PI * uniform01(st);
      const double rr = r * uniform01(st);
      const Vec2 z1{c.x + rr * std::cos(ang), c.y + rr * std::sin(ang)};
      const double ang2 = 2.0 * M_PI * uniform01(st);
      const double rr2 = r * uniform01(st);
      const Vec2 z2{c.x + rr2 * std::cos(ang2), c.y + rr2 * std::sin(ang2)};
      const double gap = norm(z1 - z2);
      if (gap < 1e-12) continue;
      const Vec2 w1 = f1.eval(z1);
      const Vec2 w2 = f1.eval(z2);
      const double tol = 1e-9 * gap + 1e-15;
      CHECK(norm(w1 - w2) <= lf * gap + tol);
      CHECK(std::fabs(w1.x - w2.x) <= lx * gap + tol);
      CHECK(std::fabs(w1.y - w2.y) <= ly * gap + tol);
    }
  }
}

// ── rotor chain ────────────────────────────────────────────────────────────
TEST_CASE("chain heights follow the geometric ladder bitwise") {
  // Ratio 3/4 keeps every height an exact dyadic, so the recursions are
  // checkable bitwise.
  const ConservativeChain ch = build_chain(kAlpha, 0.75, 2, 0.1);
  CHECK(ch.height(0) == 0.5);
  CHECK(ch.height(1) == 0.375);
  CHECK(ch.height(2) == 0.28125);
  CHECK(ch.height(-1) == 0.625);
  CHECK(ch.height(-2) == 0.71875);
  CHECK(ch.twists.twists().size() == 4);

  CHECK_THROWS_AS(build_chain(kAlpha, 1.0, 5), usage_error);
  CHECK_THROWS_AS(build_chain(kAlpha, 0.9, 1), usage_error);
  CHECK_THROWS_AS(build_chain(kAlpha, 0.9, 10, 0.9), usage_error);
  // A ratio of 1/2 spaces the anchors so far apart that the connecting
  // rotor cannot stay inside the displacement wedge; the packing
  // validator must reject it rather than build an unsound chain.
  CHECK_THROWS_AS(build_chain(kAlpha, 0.5, 2), numerical_error);
}

TEST_CASE("chain rotors carry each slab-edge image to the next axis point") {
  const ConservativeChain ch = build_chain(kAlpha, 0.9, 125);
  const int K = ch.truncation;
  CHECK(static_cast<int>(ch.twists.twists().size()) == 2 * K);
  const LiftedMap f1 = build_f1(kAlpha);
  for (int k = -K; k < K; ++k) {
    // The stack stores its twists sorted for lookup; apply() finds the one
    // whose core holds this slab-edge image.
    const Vec2 w1 = f1.eval({0.0, ch.height(k)});
    const Vec2 moved = ch.twists.apply(w1);
    CHECK(std::fabs(moved.x - 0.0) <= 1e-12);
    CHECK(std::fabs(moved.y - ch.height(k + 1)) <= 1e-12);
  }
  // Points on and outside the rim pass through verbatim.
  std::uint64_t st = 91;
  for (int i = 0; i < 2000; ++i) {
    const size_t j = static_cast<size_t>(splitmix64(st) % (2 * K));
    const EllipticTwist& tw = ch.twists.twists()[j];
    const double phi = 2.0 * M_PI * uniform01(st);
    const double blow = 1.0 + uniform01(st);
    const Vec2 z = tw.center + blow * (tw.r_major * std::cos(phi)) * tw.axis_u +
                   blow * (tw.r_minor * std::sin(phi)) * tw.axis_n;
    const Vec2 out = tw.apply(z);
    CHECK(out.x == z.x);
    CHECK(out.y == z.y);
  }
}

// ── horizontal factor ──────────────────────────────────────────────────────
TEST_CASE("horizontal factor hops the marked point and marches the chain") {
  const LiftedMap fH = build_fH_conservative(defaults());
  REQUIRE(fH.marked_orbits.size() == 2);

  const Vec2 o = fH.eval({0.0, 0.0});
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);

  const Vec2 z1 = fH.marked_orbits[1].z;
  CHECK(z1.x == slide(defaults().c));
  CHECK(z1.y == defaults().c);
  const Vec2 hop = fH.eval(z1);
  CHECK(hop.x == z1.x + 1.0);
  CHECK(hop.y == z1.y);

  // March the full ladder: top of the chain down to the truncated tip.
  const ConservativeChain ch = build_chain(kAlpha, defaults().beta,
                                           defaults().truncation);
  const int K = ch.truncation;
  Vec2 z{0.0, ch.height(-K)};
  for (int k = -K; k < K; ++k) {
    z = fH.eval(z);
    CHECK(std::fabs(z.x) <= 1e-11);
    CHECK(std::fabs(z.y - ch.height(k + 1)) <= 1e-11);
  }
  const Vec2 tip = fH.eval({0.0, ch.height(K)});
  CHECK(tip.x == slide(ch.height(K)));
  CHECK(tip.y == ch.height(K));

  CHECK(check_periodicity(fH, 1500, 1e-9).pass);
}

TEST_CASE("horizontal factor validates its parameters") {
  auto bad = [](auto mut) {
    ConservativeParams p;
    mut(p);
    return p;
  };
  CHECK_THROWS_AS(
      build_fH_conservative(bad([](ConservativeParams& p) { p.a = 0.4; })),
      usage_error);
  CHECK_THROWS_AS(
      build_fH_conservative(bad([](ConservativeParams& p) { p.c = 0.6; })),
      usage_error);
  CHECK_THROWS_AS(
      build_fH_conservative(bad([](ConservativeParams& p) { p.b = 0.95; })),
      usage_error);
  CHECK_THROWS_AS(build_fH_conservative(
                      bad([](ConservativeParams& p) { p.phi_sharpness = 0.5; })),
                  usage_error);
  CHECK_THROWS_AS(build_fH_conservative(
                      bad([](ConservativeParams& p) { p.alpha = 0.2; })),
                  usage_error);
  CHECK_THROWS_AS(build_fH_conservative(
                      bad([](ConservativeParams& p) { p.truncation = 0; })),
                  usage_error);
}

// ── full map ───────────────────────────────────────────────────────────────
TEST_CASE("full map fixes the origin and hops both marked satellites") {
  const LiftedMap& f = full_map();
  REQUIRE(f.marked_orbits.size() == 3);
  for (const MarkedOrbit& mo : f.marked_orbits) {
    CHECK(mo.period == 1);
    const Vec2 got = f.eval(mo.z);
    const Vec2 want = mo.z + mo.offset;
    CHECK(std::fabs(got.x - want.x) <= 1e-12);
    CHECK(std::fabs(got.y - want.y) <= 1e-12);
  }
  CHECK(check_periodicity(f, 300, 1e-9).pass);

  std::uint64_t st = 111;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 z{3.0 * uniform01(st) - 1.5, 3.0 * uniform01(st) - 1.5};
    const Vec2 rt = f.inverse(f.eval(z));
    CHECK(std::fabs(rt.x - z.x) <= 1e-8);
    CHECK(std::fabs(rt.y - z.y) <= 1e-8);
  }
}

TEST_CASE("full map keeps its carrier lines on the advancing side") {
  const LiftedMap& f = full_map();
  std::uint64_t st = 121;
  for (int i = 0; i < 3000; ++i) {
    // Vertical carrier: x = alpha·dist(y). Its image stays weakly right of
    // the carrier through every factor.
    const double y = uniform01(st);
    const Vec2 v = f.eval({slide(y), y});
    CHECK(v.x - kAlpha * dist_to_int(v.y) >= -1e-12);
    // Horizontal carrier: y = alpha·dist(x) maps weakly above itself.
    const double x = uniform01(st);
    const Vec2 h = f.eval({x, slide(x)});
    CHECK(h.y - kAlpha * dist_to_int(h.x) >= -1e-12);
  }
  // No sampled point is displaced along the negative diagonal.
  for (int i = 0; i < 10000; ++i) {
    const Vec2 z{3.0 * uniform01(st) - 1.5, 3.0 * uniform01(st) - 1.5};
    const Vec2 out = f.eval(z);
    const double mx = out.x - z.x;
    const double my = out.y - z.y;
    CHECK_FALSE((mx < -1e-12 && my < -1e-12 && std::fabs(mx - my) <= 1e-12));
  }
}

// ── unlock ─────────────────────────────────────────────────────────────────
TEST_CASE("unlock pushers splice both truncated chains into periodic orbits") {
  const LiftedMap& f = full_map();
  const ConservativeParams p = defaults();
  const UnlockResult u = conservative_unlock_perturbation(f, p, 1e-3);
  CHECK(u.q == 2 * p.truncation + 1);
  CHECK(u.q_prime == u.q);
  CHECK(u.max_displacement > 0.0);
  CHECK(u.max_displacement <= 1e-5);
  REQUIRE(u.map.marked_orbits.size() == 5);

  // Replay the two new periodic orbits end to end.
  double yK = 0.5, uK = 0.5;
  for (int k = 0; k < p.truncation; ++k) {
    yK = p.beta * yK;
    uK = p.beta * uK;
  }
  const double y_hi = 1.0 - uK;
  Vec2 z{0.0, y_hi};
  for (long long j = 0; j < u.q; ++j) z = u.map.eval(z);
  CHECK(std::fabs(z.x - 0.0) <= 1e-9);
  CHECK(std::fabs(z.y - (y_hi - 1.0)) <= 1e-9);

  Vec2 zm{y_hi, 0.0};
  for (long long j = 0; j < u.q; ++j) zm = u.map.eval(zm);
  CHECK(std::fabs(zm.x - (y_hi - 1.0)) <= 1e-9);
  CHECK(std::fabs(zm.y - 0.0) <= 1e-9);

  // The original marked orbits survive untouched.
  for (size_t i = 0; i < 3; ++i) {
    const MarkedOrbit& mo = u.map.marked_orbits[i];
    const Vec2 got = u.map.eval(mo.z);
    const Vec2 want = mo.z + mo.offset;
    CHECK(std::fabs(got.x - want.x) <= 1e-12);
    CHECK(std::fabs(got.y - want.y) <= 1e-12);
  }

  CHECK(check_periodicity(u.map, 800, 1e-9).pass);
  CHECK_THROWS_AS(conservative_unlock_perturbation(f, p, 1e-8), usage_error);
  CHECK_THROWS_AS(conservative_unlock_perturbation(f, p, 0.5), usage_error);
}

// ── area diagnostic ────────────────────────────────────────────────────────
TEST_CASE("area diagnostic scores rigid and linear test maps correctly") {
  LiftedMap shift;
  shift.name = "shift";
  shift.eval = [](Vec2 z) -> Vec2 { return {z.x + 0.3, z.y - 0.7}; };
  CHECK(area_preservation_check(shift, 20, 4, 7) <= 1e-12);

  LiftedMap squeeze;
  squeeze.name = "squeeze";
  squeeze.eval = [](Vec2 z) -> Vec2 { return {2.0 * z.x, 0.5 * z.y}; };
  CHECK(area_preservation_check(squeeze, 20, 4, 7) <= 1e-9);

  LiftedMap expand;
  expand.name = "expand";
  expand.eval = [](Vec2 z) -> Vec2 { return {2.0 * z.x, z.y}; };
  const double defect = area_preservation_check(expand, 20, 4, 7);
  CHECK(std::fabs(defect - 1.0) <= 1e-9);

  CHECK_THROWS_AS(area_preservation_check(shift, 0, 4, 7), usage_error);
  CHECK_THROWS_AS(area_preservation_check(shift, 5, 1, 7), usage_error);
}

TEST_CASE("full map passes the Monte-Carlo area check") {
  const double defect = area_preservation_check(full_map(), 60, 3, 2026);
  CHECK(defect <= 1e-2);
}
