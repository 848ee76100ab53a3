/// Map-expression checks: lexer and parser behavior (comments, commas,
/// rationals, line/column error reporting), canonical printing with an exact
/// parse(print(e)) round trip, and the builder's primitive dispatch with its
/// arity and range validation.

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rotaset/errors.hpp"
#include "rotaset/example_dissipative.hpp"
#include "rotaset/geometry.hpp"
#include "rotaset/map_core.hpp"
#include "rotaset/map_expr.hpp"

using namespace rotaset;

namespace {

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

/// Expect a map_definition_error whose message contains `needle`.
void check_rejects(const std::string& text, const std::string& needle) {
  try {
    build_map_from_text(text);
    FAIL_CHECK("no error for: " << text);
  } catch (const map_definition_error& e) {
    CHECK_MESSAGE(message_contains(e, needle),
                  "wanted '" << needle << "' in: " << e.what());
  }
}

}  // namespace

// ── parsing ─────────────────────────────────────────────────────────────────
TEST_CASE("parser reads nested calls, named pairs, rationals, and comments") {
  const std::string text =
      "# document comment\n"
      "minus(  # inline comment\n"
      "  compose(translation(1/2, -0.25), shear_x(0.125)),\n"
      "  v=(-0.01 +3/4)\n"
      ")\n";
  const MapExpression e = parse_map_expression(text);
  CHECK(e.name == "minus");
  REQUIRE(e.args.size() == 2);
  CHECK(e.args[0].kind == MapArg::Kind::Expr);
  const MapExpression& comp = e.args[0].child.front();
  CHECK(comp.name == "compose");
  REQUIRE(comp.args.size() == 2);
  CHECK(comp.args[0].child.front().name == "translation");
  CHECK(comp.args[0].child.front().args[0].x == 0.5);
  CHECK(comp.args[0].child.front().args[1].x == -0.25);
  CHECK(e.args[1].kind == MapArg::Kind::Pair);
  CHECK(e.args[1].param == "v");
  CHECK(e.args[1].x == -0.01);
  CHECK(e.args[1].y == 0.75);
}

TEST_CASE("parser reports syntax errors with line and column") {
  struct Case {
    const char* text;
    const char* where;
    const char* what;
  };
  const std::vector<Case> cases = {
      {"translation 0 1)", "line 1, column 13", "expected '('"},
      {"translation(0 1", "line 1, column 16", ""},
      {"translation(0 1))", "line 1, column 17", "trailing"},
      {"#c\n  frob(@)", "line 2, column 8", "unexpected character '@'"},
      {"translation(1/0 0)", "line 1, column 15", "zero denominator"},
      {"translation(1e999 0)", "line 1, column 13", "out of range"},
      {"translation(. 0)", "line 1, column 13", "malformed number"},
      {"minus(translation(0 0) v=)", "line 1, column 26", "after '='"},
      {"translation((0.1) 0)", "line 1, column 17", "second number"},
      {"", "line 1, column 1", "expected a primitive name"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    try {
      parse_map_expression(c.text);
      FAIL_CHECK("no error for: " << c.text);
    } catch (const map_definition_error& e) {
      CHECK_MESSAGE(message_contains(e, "syntax error"), e.what());
      CHECK_MESSAGE(message_contains(e, c.where),
                    "wanted '" << c.where << "' in: " << e.what());
      CHECK_MESSAGE(message_contains(e, c.what), e.what());
    }
  }
}

TEST_CASE("printer emits a canonical form that parses back identically") {
  const std::vector<std::string> sources = {
      "compose(translation(0 1), translation(1 0))",
      "minus(example_dissipative(eps=0.05), v=(-0.01 -0.01))",
      "power(translation(1/2 0), 2)",
      "bump_push(center=(0.25 0.75) radius=0.1 displacement=(0.02 -0.01))",
      "twist(center=(1/3 2/3) r_inner=0.05 r_outer=0.2 angle=-2.5)",
      "shear_y(0 0.5 0 -0.5)",
      "compose(shear_x(0.2) power(minus(translation(0.125 -3) v=(0 1e-7)) "
      "12) translation((4 5)))",
  };
  for (const std::string& src : sources) {
    CAPTURE(src);
    const MapExpression e = parse_map_expression(src);
    const std::string printed = print_map_expression(e);
    const MapExpression back = parse_map_expression(printed);
    CHECK(back == e);
    // Printing is idempotent: the canonical form reprints byte-identically.
    CHECK(print_map_expression(back) == printed);
  }
  CHECK(print_map_expression(parse_map_expression(
            "power(translation(1/2 0), 2)")) == "power(translation(0.5 0) 2)");
}

TEST_CASE("expression equality distinguishes names, arities, and payloads") {
  const MapExpression a = parse_map_expression("translation(0 1)");
  CHECK(a == parse_map_expression("translation(0, 1)  # comment"));
  CHECK(a != parse_map_expression("translation(0 1.0000000001)"));
  CHECK(a != parse_map_expression("translation((0 1))"));
  CHECK(a != parse_map_expression("shear_x(0)"));
  CHECK(parse_map_expression("minus(translation(0 0) v=(1 2))") !=
        parse_map_expression("minus(translation(0 0) (1 2))"));
}

// ── building: dispatch and validation ───────────────────────────────────────
TEST_CASE("builder instantiates the documented primitive forms") {
  // Both translation spellings denote the same map.
  const LiftedMap t1 = build_map_from_text("translation(0.3 0.7)");
  const LiftedMap t2 = build_map_from_text("translation((0.3 0.7))");
  const Vec2 img = evaluate(t1, {0.0, 0.0});
  CHECK(img.x == 0.3);
  CHECK(img.y == 0.7);
  CHECK(evaluate(t2, {0.25, 0.5}) == evaluate(t1, {0.25, 0.5}));

  const LiftedMap comp =
      build_map_from_text("compose(translation(0 1), translation(1 0))");
  const Vec2 c = evaluate(comp, {0.0, 0.0});
  CHECK(c.x == 1.0);
  CHECK(c.y == 1.0);

  const LiftedMap pw = build_map_from_text("power(translation(1/2 0), 2)");
  const Vec2 p = evaluate(pw, {0.0, 0.0});
  CHECK(p.x == 1.0);
  CHECK(p.y == 0.0);

  const LiftedMap mn =
      build_map_from_text("minus(translation(0 0) v=(-0.01 -0.01))");
  const Vec2 m = evaluate(mn, {0.0, 0.0});
  CHECK(m.x == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(m.y == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("builder rejects unknown primitives, bad arity, and bad ranges") {
  check_rejects("frobnicate()", "unknown primitive 'frobnicate'");
  check_rejects("translation()", "missing");
  check_rejects("translation(1)", "missing");
  check_rejects("translation(1 2 3)", "unexpected argument");
  check_rejects("translation(1 2 q=3)", "unknown parameter 'q'");
  check_rejects("compose(translation(0 0))", "at least 2");
  check_rejects("compose(translation(0 0) 5)", "sub-expressions");
  check_rejects("power(translation(0 0) 1.5)", "must be an integer");
  check_rejects("power(translation(0 0) 0)", "out of documented range");
  check_rejects("minus(translation(0 0) v=0.1)", "must be a pair");
  check_rejects("shear_x()", "at least 1");
  check_rejects("shear_x(amp=0.2)", "positional numbers only");
  check_rejects("bump_push(center=(0 0) radius=0.6 displacement=(0 0))",
                "radius");
  check_rejects("bump_push(center=(0 0) radius=0.1 displacement=(0.2 0))",
                "0.3");
  check_rejects("twist(center=(0 0) r_inner=0.2 r_outer=0.1 angle=1)",
                "0 < r_inner < r_outer");
  check_rejects("example_dissipative(eps=0.9)", "out of documented range");
  check_rejects("example_conservative(K=2.5)", "must be an integer");
  check_rejects("example_conservative(alpha=0.4)", "out of documented range");
}

// ── built primitives: behavior ──────────────────────────────────────────────
TEST_CASE("shear primitives displace along one axis by a periodic profile") {
  const LiftedMap sx = build_map_from_text("shear_x(0.2)");
  // Hump profile: amp·(1 − cos 2πt)/2 is 0 at integers, amp at half-integers.
  Vec2 z = evaluate(sx, {0.1, 0.5});
  CHECK(z.x == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(z.y == 0.5);
  z = evaluate(sx, {0.1, 1.0});
  CHECK(z.x == doctest::Approx(0.1).epsilon(1e-12));

  // Tabulated profile: piecewise-linear through v[j] at t = j/4, 1-periodic.
  const LiftedMap sy = build_map_from_text("shear_y(0 0.5 0 -0.5)");
  z = evaluate(sy, {0.125, 0.0});
  CHECK(z.y == doctest::Approx(0.25).epsilon(1e-12));
  z = evaluate(sy, {0.875, 0.0});  // between v[3] = -0.5 and v[0] = 0
  CHECK(z.y == doctest::Approx(-0.25).epsilon(1e-12));
  z = evaluate(sy, {-0.25, 0.0});  // fract(-0.25) = 0.75
  CHECK(z.y == doctest::Approx(-0.5).epsilon(1e-12));

  for (const LiftedMap* m : {&sx, &sy}) {
    CHECK(check_periodicity(*m, 400, 1e-12).pass);
    REQUIRE(m->has_inverse());
    std::uint64_t st = 7;
    for (int i = 0; i < 200; ++i) {
      const Vec2 w{4.0 * uniform01(st) - 2.0, 4.0 * uniform01(st) - 2.0};
      const Vec2 rt = m->inverse(m->eval(w));
      CHECK(norm(rt - w) <= 1e-12);
    }
  }
}

TEST_CASE("bump push displaces a disk and is the identity outside it") {
  const LiftedMap b = build_map_from_text(
      "bump_push(center=(0.25 0.75) radius=0.1 displacement=(0.02 -0.01))");
  // Full displacement at the center, applied around every lattice copy.
  Vec2 z = evaluate(b, {0.25, 0.75});
  CHECK(z.x == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(z.y == doctest::Approx(0.74).epsilon(1e-12));
  z = evaluate(b, {3.25, -1.25});
  CHECK(z.x == doctest::Approx(3.27).epsilon(1e-12));
  CHECK(z.y == doctest::Approx(-1.26).epsilon(1e-12));
  // Identity from the support boundary outward.
  const Vec2 out{0.25 + 0.1, 0.75};
  CHECK(evaluate(b, out) == out);
  CHECK(check_periodicity(b, 400, 1e-12).pass);
  std::uint64_t st = 11;
  for (int i = 0; i < 500; ++i) {
    const Vec2 w{uniform01(st), uniform01(st)};
    CHECK(norm(b.inverse(b.eval(w)) - w) <= 1e-12);
  }
}

TEST_CASE("twist rotates inside its core and tapers to rest at the rim") {
  const LiftedMap tw = build_map_from_text(
      "twist(center=(0.5 0.5) r_inner=0.1 r_outer=0.3 angle=1.5707963267948966)");
  // Inside the core: a quarter turn about the center.
  Vec2 z = evaluate(tw, {0.55, 0.5});
  CHECK(z.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z.y == doctest::Approx(0.55).epsilon(1e-12));
  // At the rim and beyond: identity.
  const Vec2 rim{0.5 + 0.3, 0.5};
  CHECK(evaluate(tw, rim) == rim);
  // Radius is invariant, so the reverse profile inverts exactly.
  std::uint64_t st = 13;
  for (int i = 0; i < 500; ++i) {
    const Vec2 w{2.0 * uniform01(st) - 1.0, 2.0 * uniform01(st) - 1.0};
    CHECK(norm(tw.inverse(tw.eval(w)) - w) <= 1e-12);
  }
  CHECK(check_periodicity(tw, 400, 1e-12).pass);
}

TEST_CASE("named construction parameters reach the example builders") {
  const LiftedMap from_text =
      build_map_from_text("example_dissipative(eps=0.04 delta=0.01)");
  DissipativeParams p;
  p.eps = 0.04;
  p.delta = 0.01;
  const LiftedMap direct = build_example(p);
  std::uint64_t st = 17;
  for (int i = 0; i < 50; ++i) {
    const Vec2 z{2.0 * uniform01(st) - 1.0, 2.0 * uniform01(st) - 1.0};
    CHECK(evaluate(from_text, z) == evaluate(direct, z));
  }
  CHECK(from_text.params.at("eps") == 0.04);
}

TEST_CASE("composite expressions keep the lift property and invert cleanly") {
  const LiftedMap f = build_map_from_text(
      "compose(shear_x(0.3), twist(center=(0.5 0.5) r_inner=0.05 "
      "r_outer=0.25 angle=2), bump_push(center=(0 0) radius=0.2 "
      "displacement=(0.05 0.03)))");
  CHECK(check_periodicity(f, 1000, 1e-9).pass);
  REQUIRE(f.has_inverse());
  std::uint64_t st = 23;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 z{6.0 * uniform01(st) - 3.0, 6.0 * uniform01(st) - 3.0};
    CHECK(norm(f.inverse(f.eval(z)) - z) <= 1e-7);
  }

  // power(f, a+b) agrees with compose(power(f,a), power(f,b)) pointwise.
  const LiftedMap p5 = build_map_from_text("power(shear_x(0.3) 5)");
  const LiftedMap p2 = build_map_from_text("power(shear_x(0.3) 2)");
  const LiftedMap p3 = build_map_from_text("power(shear_x(0.3) 3)");
  const LiftedMap p23 = compose(p2, p3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 z{4.0 * uniform01(st) - 2.0, 4.0 * uniform01(st) - 2.0};
    CHECK(norm(evaluate(p5, z) - evaluate(p23, z)) <= 1e-9);
  }
}
