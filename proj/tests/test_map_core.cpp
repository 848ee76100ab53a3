/// Core lifted-map checks: periodicity verification, composition and power
/// algebra, translation subtraction, inverse round trips, and the rational
/// vector normalization used to name candidate rotation vectors.

#include <doctest.h>

#include <cmath>

#include "rotaset/map_core.hpp"

using namespace rotaset;

namespace {

// A smooth degree-one lift used as a generic test subject:
//   (x, y) -> (x + 0.25 + 0.1 sin 2πy, y + 0.1 sin 2πx).
LiftedMap smooth_test_map() {
  LiftedMap m;
  m.name = "smooth_test";
  m.eval = [](Vec2 z) -> Vec2 {
    return {z.x + 0.25 + 0.1 * std::sin(2 * M_PI * z.y),
            z.y + 0.1 * std::sin(2 * M_PI * z.x)};
  };
  m.lipschitz_bound = 1.0 + 0.2 * M_PI;
  return m;
}

}  // namespace

TEST_CASE("platform provides an exact sin at the quarter period") {
  // Calibration of the marked points relies on this identity holding in
  // floating point on the build platform.
  CHECK(std::sin(M_PI * 0.5) == 1.0);
}

TEST_CASE("periodicity check accepts genuine lifts") {
  const PeriodicityReport a = check_periodicity(identity_map(), 2000, 1e-12);
  CHECK(a.pass);
  // The check's own z+m arithmetic rounds near |z| ≈ 1, so even the identity
  // shows a defect of order one ulp.
  CHECK(a.max_defect <= 1e-15);

  const PeriodicityReport b =
      check_periodicity(translation_map({0.3, -0.7}), 2000, 1e-12);
  CHECK(b.pass);

  const PeriodicityReport c = check_periodicity(smooth_test_map(), 2000, 1e-9);
  CHECK(c.pass);
  CHECK(c.max_defect <= 1e-9);
}

TEST_CASE("periodicity check rejects a non-lift") {
  LiftedMap bad;
  bad.name = "not_a_lift";
  bad.eval = [](Vec2 z) -> Vec2 { return {z.x * 1.5, z.y}; };
  const PeriodicityReport r = check_periodicity(bad, 500, 1e-9);
  CHECK(!r.pass);
  CHECK(r.max_defect > 0.1);
}

TEST_CASE("compose and power agree with direct iteration") {
  const LiftedMap f = smooth_test_map();
  const LiftedMap ff = compose(f, f);
  const LiftedMap f2 = power(f, 2);
  const LiftedMap f3 = power(f, 3);

  std::uint64_t state = 99;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 z{4.0 * uniform01(state) - 2.0, 4.0 * uniform01(state) - 2.0};
    const Vec2 w1 = evaluate(f, evaluate(f, z));
    const Vec2 w2 = evaluate(ff, z);
    const Vec2 w3 = evaluate(f2, z);
    CHECK(norm(w1 - w2) == 0.0);  // identical call sequence, identical floats
    CHECK(norm(w1 - w3) == 0.0);
    const Vec2 v1 = evaluate(f, evaluate(f2, z));
    const Vec2 v2 = evaluate(f3, z);
    CHECK(norm(v1 - v2) <= 1e-12);
  }
}

TEST_CASE("power addition law holds numerically") {
  const LiftedMap f = smooth_test_map();
  const LiftedMap f5 = power(f, 5);
  const LiftedMap f23 = compose(power(f, 2), power(f, 3));
  std::uint64_t state = 7;
  for (int i = 0; i < 500; ++i) {
    const Vec2 z{uniform01(state), uniform01(state)};
    CHECK(norm(evaluate(f5, z) - evaluate(f23, z)) <= 1e-9);
  }
}

TEST_CASE("minus subtracts a constant translation") {
  const LiftedMap f = smooth_test_map();
  const LiftedMap g = minus(f, {0.25, 0.0});
  std::uint64_t state = 5;
  for (int i = 0; i < 200; ++i) {
    const Vec2 z{uniform01(state), uniform01(state)};
    const Vec2 d = evaluate(f, z) - evaluate(g, z);
    CHECK(d.x == doctest::Approx(0.25));
    CHECK(d.y == doctest::Approx(0.0));
  }
  // Subtracting the drift of a pure translation yields fixed points (up to
  // the round trip's own rounding).
  const LiftedMap t = minus(translation_map({0.3, 0.4}), {0.3, 0.4});
  CHECK(norm(evaluate(t, {0.123, 0.456}) - Vec2{0.123, 0.456}) <= 1e-15);
  // Still a lift.
  CHECK(check_periodicity(g, 500, 1e-12).pass);
}

TEST_CASE("inverse round trip when an inverse is attached") {
  LiftedMap m = translation_map({0.3, -0.2});
  REQUIRE(m.has_inverse());
  std::uint64_t state = 31;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 z{6.0 * uniform01(state) - 3.0, 6.0 * uniform01(state) - 3.0};
    CHECK(norm(m.inverse(m.eval(z)) - z) <= 1e-12);
  }
  // compose propagates inverses in the right order: (a∘b)⁻¹ = b⁻¹∘a⁻¹.
  const LiftedMap c = compose(translation_map({0.1, 0.2}), m);
  REQUIRE(c.has_inverse());
  const Vec2 z{0.4, 0.9};
  CHECK(norm(c.inverse(c.eval(z)) - z) <= 1e-12);
  // minus keeps invertibility.
  const LiftedMap d = minus(c, {1.0, 2.0});
  REQUIRE(d.has_inverse());
  CHECK(norm(d.inverse(d.eval(z)) - z) <= 1e-12);
  // A map without an inverse reports so, and composition drops it.
  const LiftedMap f = smooth_test_map();
  CHECK(!f.has_inverse());
  CHECK(!compose(f, m).has_inverse());
}

TEST_CASE("rational vectors normalize to lowest terms") {
  const RationalVector a(2, 4, 2);
  CHECK(a.p == 1);
  CHECK(a.r == 2);
  CHECK(a.q == 1);
  const RationalVector b(0, 0, 7);
  CHECK(b.p == 0);
  CHECK(b.r == 0);
  CHECK(b.q == 1);
  const RationalVector c(-3, 6, 9);
  CHECK(c.p == -1);
  CHECK(c.r == 2);
  CHECK(c.q == 3);
  CHECK(c.x() == doctest::Approx(-1.0 / 3.0));
  CHECK(c.y() == doctest::Approx(2.0 / 3.0));
  CHECK(RationalVector(1, 0, 1) == RationalVector(2, 0, 2));
  CHECK_THROWS_AS(RationalVector(1, 1, 0), usage_error);
}

TEST_CASE("torus helpers reduce and measure correctly") {
  CHECK(fract(2.75) == doctest::Approx(0.75));
  CHECK(fract(-0.25) == doctest::Approx(0.75));
  CHECK(fract(3.0) == 0.0);
  CHECK(dist_to_int(0.75) == doctest::Approx(0.25));
  CHECK(dist_to_int(-1.1) == doctest::Approx(0.1));
  const Vec2 r = reduce_torus({2.25, -0.5});
  CHECK(r.x == doctest::Approx(0.25));
  CHECK(r.y == doctest::Approx(0.5));
  CHECK(torus_distance({0.05, 0.0}, {0.95, 0.0}) == doctest::Approx(0.1));
  CHECK(torus_distance({0.0, 0.99}, {0.0, 0.01}) == doctest::Approx(0.02));
}

TEST_CASE("evaluate rejects non-finite results") {
  LiftedMap nanmap;
  nanmap.name = "nan";
  nanmap.eval = [](Vec2) -> Vec2 { return {std::nan(""), 0.0}; };
  CHECK_THROWS_AS(evaluate(nanmap, {0.0, 0.0}), map_definition_error);
  LiftedMap ok = identity_map();
  CHECK_THROWS_AS(evaluate(ok, {std::nan(""), 0.0}), usage_error);
}

TEST_CASE("local lipschitz fields compose multiplicatively") {
  // Bare maps carrying only a global bound: the local queries must fall back
  // to it and multiply through composition and powers.
  LiftedMap a;
  a.name = "a";
  a.eval = [](Vec2 z) { return z; };
  a.lipschitz_bound = 2.0;
  LiftedMap b;
  b.name = "b";
  b.eval = [](Vec2 z) { return z; };
  b.lipschitz_bound = 3.0;
  const LiftedMap c = compose(a, b);
  CHECK(local_lip_bound(c, {0.0, 0.0}, 0.1) == doctest::Approx(6.0));
  const LiftedMap p = power(a, 4);
  CHECK(local_lip_bound(p, {0.0, 0.0}, 0.1) == doctest::Approx(16.0));
  // Row-wise bounds fall back to the full bound when no row field is set.
  CHECK(local_lip_bound_x(c, {0, 0}, 0.1) == doctest::Approx(6.0));
  CHECK(local_lip_bound_y(c, {0, 0}, 0.1) == doctest::Approx(6.0));
}
