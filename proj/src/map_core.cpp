/// LiftedMap algebra. Composition chains evaluators and, when both factors
/// carry them, inverses (in reverse order) and Lipschitz data. Local
/// Lipschitz fields compose by tracking the image disk: the outer factor is
/// queried at the inner factor's image center with the inflated radius, and
/// row bounds use row(outer at image) × full(inner) — the row of a Jacobian
/// product is the outer row times the full inner matrix.

#include "rotaset/map_core.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "rotaset/errors.hpp"

namespace rotaset {

// ── RationalVector ─────────────────────────────────────────────────────────
RationalVector::RationalVector(long long p_, long long r_, long long q_)
    : p(p_), r(r_), q(q_) {
  if (q <= 0) throw usage_error("RationalVector: q must be ≥ 1");
  long long g = std::gcd(std::gcd(std::llabs(p), std::llabs(r)), q);
  if (g > 1) { p /= g; r /= g; q /= g; }
}

bool operator==(const RationalVector& a, const RationalVector& b) {
  return a.p == b.p && a.r == b.r && a.q == b.q;
}

// ── evaluation ─────────────────────────────────────────────────────────────
Vec2 evaluate(const LiftedMap& map, Vec2 z) {
  if (!map.eval) throw map_definition_error("evaluate: map has no evaluator");
  if (!is_finite(z)) throw usage_error("evaluate: non-finite input point");
  const Vec2 w = map.eval(z);
  if (!is_finite(w))
    throw map_definition_error("evaluate: map '" + map.name +
                               "' produced a non-finite value");
  return w;
}

static double safe_field(const LipFieldFn& field, double global, Vec2 c,
                         double r) {
  if (field) return field(c, r);
  if (global > 0.0) return global;
  return 1e6;  // conservative default: effectively "unknown, refine further"
}

double local_lip_bound(const LiftedMap& m, Vec2 c, double r) {
  return safe_field(m.local_lip, m.lipschitz_bound, c, r);
}
double local_lip_bound_x(const LiftedMap& m, Vec2 c, double r) {
  if (m.local_lip_x) return m.local_lip_x(c, r);
  return local_lip_bound(m, c, r);
}
double local_lip_bound_y(const LiftedMap& m, Vec2 c, double r) {
  if (m.local_lip_y) return m.local_lip_y(c, r);
  return local_lip_bound(m, c, r);
}

// ── periodicity ────────────────────────────────────────────────────────────
PeriodicityReport check_periodicity(const LiftedMap& map, int n_samples,
                                    double tol, std::uint64_t seed) {
  if (n_samples <= 0) throw usage_error("check_periodicity: n_samples ≥ 1");
  if (tol <= 0.0) throw usage_error("check_periodicity: tol > 0 required");
  PeriodicityReport rep;
  std::uint64_t state = seed;
  for (int i = 0; i < n_samples; ++i) {
    const Vec2 z{uniform01(state), uniform01(state)};
    const Vec2 fz = evaluate(map, z);
    for (int mx = -1; mx <= 1; ++mx) {
      for (int my = -1; my <= 1; ++my) {
        if (mx == 0 && my == 0) continue;
        const Vec2 m{static_cast<double>(mx), static_cast<double>(my)};
        const Vec2 defect = evaluate(map, z + m) - fz - m;
        const double d = norm_inf(defect);
        if (d > rep.max_defect) {
          rep.max_defect = d;
          rep.worst_point = z;
        }
      }
    }
  }
  rep.pass = rep.max_defect <= tol;
  return rep;
}

// ── algebra ────────────────────────────────────────────────────────────────
LiftedMap compose(const LiftedMap& a, const LiftedMap& b) {
  if (!a.eval || !b.eval)
    throw map_definition_error("compose: both maps need evaluators");
  LiftedMap c;
  EvalFn ae = a.eval, be = b.eval;
  c.eval = [ae, be](Vec2 z) { return ae(be(z)); };
  c.name = a.name + "∘" + b.name;
  if (a.has_inverse() && b.has_inverse()) {
    EvalFn ai = a.inverse, bi = b.inverse;
    c.inverse = [ai, bi](Vec2 z) { return bi(ai(z)); };
  }
  if (a.lipschitz_bound > 0.0 && b.lipschitz_bound > 0.0)
    c.lipschitz_bound = a.lipschitz_bound * b.lipschitz_bound;

  // Local fields: query the outer factor on the image disk of the inner.
  const LiftedMap as = a, bs = b;  // copies captured by value
  if (a.local_lip || a.lipschitz_bound > 0.0 || b.local_lip ||
      b.lipschitz_bound > 0.0) {
    c.local_lip = [as, bs](Vec2 center, double radius) {
      const double lb = local_lip_bound(bs, center, radius);
      const Vec2 ic = bs.eval(center);
      return local_lip_bound(as, ic, radius * lb) * lb;
    };
    c.local_lip_x = [as, bs](Vec2 center, double radius) {
      const double lb = local_lip_bound(bs, center, radius);
      const Vec2 ic = bs.eval(center);
      return local_lip_bound_x(as, ic, radius * lb) * lb;
    };
    c.local_lip_y = [as, bs](Vec2 center, double radius) {
      const double lb = local_lip_bound(bs, center, radius);
      const Vec2 ic = bs.eval(center);
      return local_lip_bound_y(as, ic, radius * lb) * lb;
    };
  }
  return c;
}

LiftedMap power(const LiftedMap& f, long long n) {
  if (n < 1) throw usage_error("power: exponent must be ≥ 1");
  LiftedMap g = f;
  g.name = f.name + "^" + std::to_string(n);
  if (n == 1) return g;
  EvalFn fe = f.eval;
  g.eval = [fe, n](Vec2 z) {
    for (long long i = 0; i < n; ++i) z = fe(z);
    return z;
  };
  if (f.has_inverse()) {
    EvalFn fi = f.inverse;
    g.inverse = [fi, n](Vec2 z) {
      for (long long i = 0; i < n; ++i) z = fi(z);
      return z;
    };
  }
  if (f.lipschitz_bound > 0.0)
    g.lipschitz_bound = std::pow(f.lipschitz_bound, static_cast<double>(n));
  const LiftedMap fs = f;
  if (f.local_lip || f.lipschitz_bound > 0.0) {
    g.local_lip = [fs, n](Vec2 center, double radius) {
      double total = 1.0;
      Vec2 c = center;
      double r = radius;
      for (long long i = 0; i < n; ++i) {
        const double l = local_lip_bound(fs, c, r);
        total *= l;
        c = fs.eval(c);
        r *= l;
      }
      return total;
    };
    g.local_lip_x = [fs, n](Vec2 center, double radius) {
      double inner = 1.0;
      Vec2 c = center;
      double r = radius;
      for (long long i = 0; i + 1 < n; ++i) {
        const double l = local_lip_bound(fs, c, r);
        inner *= l;
        c = fs.eval(c);
        r *= l;
      }
      return inner * local_lip_bound_x(fs, c, r);
    };
    g.local_lip_y = [fs, n](Vec2 center, double radius) {
      double inner = 1.0;
      Vec2 c = center;
      double r = radius;
      for (long long i = 0; i + 1 < n; ++i) {
        const double l = local_lip_bound(fs, c, r);
        inner *= l;
        c = fs.eval(c);
        r *= l;
      }
      return inner * local_lip_bound_y(fs, c, r);
    };
  }
  g.marked_orbits.clear();
  return g;
}

LiftedMap minus(const LiftedMap& f, Vec2 v) {
  if (!f.eval) throw map_definition_error("minus: map needs an evaluator");
  if (!is_finite(v)) throw usage_error("minus: non-finite translation");
  LiftedMap g = f;
  char buf[64];
  std::snprintf(buf, sizeof buf, "−(%g %g)", v.x, v.y);
  g.name = f.name + buf;
  EvalFn fe = f.eval;
  g.eval = [fe, v](Vec2 z) { return fe(z) - v; };
  if (f.has_inverse()) {
    EvalFn fi = f.inverse;
    g.inverse = [fi, v](Vec2 z) { return fi(z + v); };
  }
  g.marked_orbits.clear();  // rotation vectors shift; claims no longer hold
  return g;
}

LiftedMap identity_map() {
  LiftedMap m;
  m.eval = [](Vec2 z) { return z; };
  m.inverse = [](Vec2 z) { return z; };
  m.name = "identity";
  m.lipschitz_bound = 1.0;
  m.local_lip = [](Vec2, double) { return 1.0; };
  m.local_lip_x = [](Vec2, double) { return 1.0; };
  m.local_lip_y = [](Vec2, double) { return 1.0; };
  return m;
}

LiftedMap translation_map(Vec2 v) {
  if (!is_finite(v)) throw usage_error("translation_map: non-finite vector");
  LiftedMap m;
  m.eval = [v](Vec2 z) { return z + v; };
  m.inverse = [v](Vec2 z) { return z - v; };
  m.name = "translation";
  m.params = {{"x", v.x}, {"y", v.y}};
  m.lipschitz_bound = 1.0;
  m.local_lip = [](Vec2, double) { return 1.0; };
  m.local_lip_x = [](Vec2, double) { return 1.0; };
  m.local_lip_y = [](Vec2, double) { return 1.0; };
  return m;
}

LiftedMap swap_xy_conjugate(const LiftedMap& f) {
  if (!f.eval)
    throw map_definition_error("swap_xy_conjugate: map needs an evaluator");
  LiftedMap g;
  EvalFn fe = f.eval;
  g.eval = [fe](Vec2 z) {
    const Vec2 w = fe({z.y, z.x});
    return Vec2{w.y, w.x};
  };
  g.name = "swap(" + f.name + ")";
  g.params = f.params;
  if (f.has_inverse()) {
    EvalFn fi = f.inverse;
    g.inverse = [fi](Vec2 z) {
      const Vec2 w = fi({z.y, z.x});
      return Vec2{w.y, w.x};
    };
  }
  g.lipschitz_bound = f.lipschitz_bound;
  const LiftedMap fs = f;
  if (f.local_lip || f.lipschitz_bound > 0.0) {
    g.local_lip = [fs](Vec2 c, double r) {
      return local_lip_bound(fs, {c.y, c.x}, r);
    };
    g.local_lip_x = [fs](Vec2 c, double r) {
      return local_lip_bound_y(fs, {c.y, c.x}, r);
    };
    g.local_lip_y = [fs](Vec2 c, double r) {
      return local_lip_bound_x(fs, {c.y, c.x}, r);
    };
  }
  for (const MarkedOrbit& mo : f.marked_orbits) {
    MarkedOrbit sm;
    sm.z = {mo.z.y, mo.z.x};
    sm.period = mo.period;
    sm.offset = {mo.offset.y, mo.offset.x};
    g.marked_orbits.push_back(sm);
  }
  return g;
}

// ── torus helpers ──────────────────────────────────────────────────────────
double fract(double t) {
  double f = t - std::floor(t);
  if (f >= 1.0) f = 0.0;  // guard against rounding at the top edge
  return f;
}

double dist_to_int(double t) {
  const double f = fract(t);
  return std::min(f, 1.0 - f);
}

Vec2 reduce_torus(Vec2 z) { return {fract(z.x), fract(z.y)}; }

double torus_distance(Vec2 z, Vec2 w) {
  const double dx = dist_to_int(z.x - w.x);
  const double dy = dist_to_int(z.y - w.y);
  return std::hypot(dx, dy);
}

}  // namespace rotaset
