/// Parser, canonical printer, and builder for the textual map-expression
/// language (grammar in the header): one expression per document, "#"
/// comments to end of line, commas read as whitespace, numbers in decimal or
/// rational "p/q" form. Parsing reports line/column on every syntax error;
/// building validates primitive names, arities, and parameter ranges.

#include "rotaset/map_expr.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rotaset/errors.hpp"
#include "rotaset/example_conservative.hpp"
#include "rotaset/example_dissipative.hpp"
#include "rotaset/geometry.hpp"

namespace rotaset {
namespace {

// ── tokens ──────────────────────────────────────────────────────────────────
struct Token {
  enum class Kind { Name, Number, LParen, RParen, Equals, End };
  Kind kind = Kind::End;
  std::string text;    // names keep their spelling
  double value = 0.0;  // numbers keep their value
  int line = 1;
  int col = 1;
};

[[noreturn]] void syntax_fail(int line, int col, const std::string& msg) {
  throw map_definition_error("syntax error: line " + std::to_string(line) +
                             ", column " + std::to_string(col) + ": " + msg);
}

bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9');
}
bool is_number_start(char c) {
  return (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

// ── lexer ───────────────────────────────────────────────────────────────────
class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      Token t;
      t.line = line_;
      t.col = col_;
      const char c = peek();
      if (c == '\0') {
        t.kind = Token::Kind::End;
        out.push_back(t);
        return out;
      }
      if (c == '(') {
        t.kind = Token::Kind::LParen;
        advance();
      } else if (c == ')') {
        t.kind = Token::Kind::RParen;
        advance();
      } else if (c == '=') {
        t.kind = Token::Kind::Equals;
        advance();
      } else if (is_name_start(c)) {
        t.kind = Token::Kind::Name;
        while (is_name_char(peek())) {
          t.text.push_back(peek());
          advance();
        }
      } else if (is_number_start(c)) {
        t.kind = Token::Kind::Number;
        t.value = scan_number(t.line, t.col);
      } else {
        syntax_fail(line_, col_, std::string("unexpected character '") + c +
                                     "'");
      }
      out.push_back(t);
    }
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    for (;;) {
      const char c = peek();
      if (c == '#') {
        while (peek() != '\0' && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ',') {
        advance();
      } else {
        return;
      }
    }
  }

  /// One decimal literal (sign, digits, '.', exponent), locale-independent.
  double scan_component(int line, int col) {
    std::size_t start = pos_;
    if (peek() == '+') {  // from_chars rejects a leading plus sign
      advance();
      start = pos_;
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + src_.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(value))
      syntax_fail(line, col, "number out of range");
    if (res.ec != std::errc() || res.ptr == first)
      syntax_fail(line, col, "malformed number");
    while (src_.data() + pos_ != res.ptr) advance();
    return value;
  }

  /// number := component ("/" component)?  — the rational form.
  double scan_number(int line, int col) {
    const double p = scan_component(line, col);
    if (peek() != '/') return p;
    advance();
    const int qline = line_, qcol = col_;
    const double q = scan_component(qline, qcol);
    if (q == 0.0) syntax_fail(qline, qcol, "zero denominator");
    const double value = p / q;
    if (!std::isfinite(value)) syntax_fail(line, col, "number out of range");
    return value;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ── recursive-descent parser ────────────────────────────────────────────────
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  MapExpression run() {
    MapExpression e = parse_expr(0);
    const Token& t = cur();
    if (t.kind != Token::Kind::End)
      syntax_fail(t.line, t.col, "trailing content after the expression");
    return e;
  }

 private:
  static constexpr int kMaxDepth = 64;

  const Token& cur() const { return toks_[idx_]; }
  const Token& ahead() const {
    return toks_[idx_ + 1 < toks_.size() ? idx_ + 1 : toks_.size() - 1];
  }
  const Token& take() { return toks_[idx_++]; }

  [[noreturn]] void fail_here(const std::string& msg) const {
    syntax_fail(cur().line, cur().col, msg);
  }

  void expect(Token::Kind kind, const char* what) {
    if (cur().kind != kind) fail_here(std::string("expected ") + what);
    ++idx_;
  }

  MapExpression parse_expr(int depth) {
    if (depth > kMaxDepth) fail_here("expression nested too deeply");
    if (cur().kind != Token::Kind::Name)
      fail_here("expected a primitive name");
    MapExpression e;
    e.name = take().text;
    expect(Token::Kind::LParen, "'(' after the primitive name");
    while (cur().kind != Token::Kind::RParen) {
      switch (cur().kind) {
        case Token::Kind::Number: {
          MapArg a;
          a.kind = MapArg::Kind::Number;
          a.x = take().value;
          e.args.push_back(std::move(a));
          break;
        }
        case Token::Kind::LParen:
          e.args.push_back(parse_pair(""));
          break;
        case Token::Kind::Name:
          if (ahead().kind == Token::Kind::Equals) {
            std::string param = take().text;
            take();  // '='
            if (cur().kind == Token::Kind::Number) {
              MapArg a;
              a.kind = MapArg::Kind::Number;
              a.param = std::move(param);
              a.x = take().value;
              e.args.push_back(std::move(a));
            } else if (cur().kind == Token::Kind::LParen) {
              e.args.push_back(parse_pair(param));
            } else {
              fail_here("expected a number or '(' after '='");
            }
          } else {
            MapArg a;
            a.kind = MapArg::Kind::Expr;
            a.child.push_back(parse_expr(depth + 1));
            e.args.push_back(std::move(a));
          }
          break;
        default:
          fail_here("expected an argument or ')'");
      }
    }
    take();  // ')'
    return e;
  }

  MapArg parse_pair(const std::string& param) {
    MapArg a;
    a.kind = MapArg::Kind::Pair;
    a.param = param;
    take();  // '('
    if (cur().kind != Token::Kind::Number)
      fail_here("expected the first number of a pair");
    a.x = take().value;
    if (cur().kind != Token::Kind::Number)
      fail_here("expected the second number of a pair");
    a.y = take().value;
    expect(Token::Kind::RParen, "')' closing a pair");
    return a;
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

// ── canonical printing ──────────────────────────────────────────────────────
/// Shortest decimal that round-trips to the identical double.
void print_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void print_expr(std::string& out, const MapExpression& e) {
  out += e.name;
  out += '(';
  bool first = true;
  for (const MapArg& a : e.args) {
    if (!first) out += ' ';
    first = false;
    if (!a.param.empty()) {
      out += a.param;
      out += '=';
    }
    switch (a.kind) {
      case MapArg::Kind::Number:
        print_number(out, a.x);
        break;
      case MapArg::Kind::Pair:
        out += '(';
        print_number(out, a.x);
        out += ' ';
        print_number(out, a.y);
        out += ')';
        break;
      case MapArg::Kind::Expr:
        print_expr(out, a.child.front());
        break;
    }
  }
  out += ')';
}

// ── argument extraction ─────────────────────────────────────────────────────
/// Pulls named or positional arguments out of one node, then verifies that
/// nothing was left over. Named lookup wins; positional arguments are
/// consumed in order.
class ArgReader {
 public:
  explicit ArgReader(const MapExpression& e)
      : e_(e), used_(e.args.size(), false) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw map_definition_error(e_.name + ": " + msg);
  }

  bool has(const std::string& param) const {
    return find_named(param) >= 0;
  }

  double number(const std::string& param) {
    const int i = locate(param, MapArg::Kind::Number, true);
    return e_.args[static_cast<std::size_t>(i)].x;
  }

  double number_or(const std::string& param, double fallback) {
    const int i = locate(param, MapArg::Kind::Number, false);
    return i < 0 ? fallback : e_.args[static_cast<std::size_t>(i)].x;
  }

  Vec2 pair(const std::string& param) {
    const int i = locate(param, MapArg::Kind::Pair, true);
    const MapArg& a = e_.args[static_cast<std::size_t>(i)];
    return {a.x, a.y};
  }

  const MapExpression& child() {
    const int i = locate("", MapArg::Kind::Expr, true);
    return e_.args[static_cast<std::size_t>(i)].child.front();
  }

  /// All arguments must be positional numbers (the tabulated-profile form).
  std::vector<double> all_numbers(std::size_t min_count) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < e_.args.size(); ++i) {
      const MapArg& a = e_.args[i];
      if (a.kind != MapArg::Kind::Number || !a.param.empty())
        fail("arity mismatch: expects positional numbers only");
      used_[i] = true;
      vals.push_back(a.x);
    }
    if (vals.size() < min_count)
      fail("arity mismatch: expects at least " + std::to_string(min_count) +
           " number(s)");
    return vals;
  }

  /// Every argument, which must be a positional sub-expression (compose).
  std::vector<const MapExpression*> all_children(std::size_t min_count) {
    std::vector<const MapExpression*> kids;
    for (std::size_t i = 0; i < e_.args.size(); ++i) {
      const MapArg& a = e_.args[i];
      if (a.kind != MapArg::Kind::Expr || !a.param.empty())
        fail("arity mismatch: expects map sub-expressions only");
      used_[i] = true;
      kids.push_back(&a.child.front());
    }
    if (kids.size() < min_count)
      fail("arity mismatch: expects at least " + std::to_string(min_count) +
           " sub-expressions");
    return kids;
  }

  void finish() const {
    for (std::size_t i = 0; i < used_.size(); ++i) {
      if (used_[i]) continue;
      const MapArg& a = e_.args[i];
      if (!a.param.empty())
        fail("unknown parameter '" + a.param + "'");
      fail("arity mismatch: unexpected argument #" + std::to_string(i + 1));
    }
  }

 private:
  int find_named(const std::string& param) const {
    int found = -1;
    for (std::size_t i = 0; i < e_.args.size(); ++i) {
      if (e_.args[i].param != param || param.empty()) continue;
      if (found >= 0) fail("duplicate parameter '" + param + "'");
      found = static_cast<int>(i);
    }
    return found;
  }

  /// Named match first; otherwise the first unused positional argument.
  int locate(const std::string& param, MapArg::Kind kind, bool required) {
    int i = param.empty() ? -1 : find_named(param);
    if (i < 0) {
      for (std::size_t j = 0; j < e_.args.size(); ++j) {
        if (used_[j] || !e_.args[j].param.empty()) continue;
        i = static_cast<int>(j);
        break;
      }
    }
    if (i < 0) {
      if (!required) return -1;
      fail("arity mismatch: missing " +
           (param.empty() ? std::string("argument") : "'" + param + "'"));
    }
    const MapArg& a = e_.args[static_cast<std::size_t>(i)];
    if (a.kind != kind) {
      const char* want = kind == MapArg::Kind::Number ? "a number"
                         : kind == MapArg::Kind::Pair ? "a pair"
                                                      : "a sub-expression";
      fail("argument " + (param.empty() ? "" : "'" + param + "' ") +
           std::string("must be ") + want);
    }
    used_[static_cast<std::size_t>(i)] = true;
    return i;
  }

  const MapExpression& e_;
  std::vector<bool> used_;
};

long long integer_valued(ArgReader& args, const std::string& param,
                         double v) {
  if (!(std::floor(v) == v) || std::fabs(v) > 9.0e15)
    args.fail("'" + param + "' must be an integer");
  return static_cast<long long>(v);
}

// ── primitive evaluators defined by the grammar ─────────────────────────────
/// 1-periodic shear profile: single value = smooth hump amp·(1 − cos 2πt)/2;
/// several values = piecewise-linear interpolation through v[j] at t = j/k.
struct ShearProfile {
  std::vector<double> values;

  double at(double t) const {
    if (values.size() == 1)
      return values[0] * 0.5 * (1.0 - std::cos(2.0 * M_PI * t));
    const double k = static_cast<double>(values.size());
    const double u = fract(t) * k;
    std::size_t j = static_cast<std::size_t>(u);
    if (j >= values.size()) j = values.size() - 1;  // guard fract(t)*k == k
    const double frac = u - static_cast<double>(j);
    const double a = values[j];
    const double b = values[(j + 1) % values.size()];
    return a + frac * (b - a);
  }

  double max_slope() const {
    if (values.size() == 1) return M_PI * std::fabs(values[0]);
    const double k = static_cast<double>(values.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double step =
          std::fabs(values[(j + 1) % values.size()] - values[j]);
      worst = std::max(worst, step * k);
    }
    return worst;
  }
};

LiftedMap make_shear(bool horizontal, std::vector<double> values,
                     const std::string& name) {
  for (double v : values)
    if (!std::isfinite(v))
      throw map_definition_error(name + ": non-finite profile value");
  ShearProfile profile{std::move(values)};
  const double slope = profile.max_slope();

  LiftedMap m;
  m.name = name;
  if (profile.values.size() == 1) {
    m.params["amp"] = profile.values[0];
  } else {
    m.params["n"] = static_cast<double>(profile.values.size());
    for (std::size_t j = 0; j < profile.values.size(); ++j)
      m.params["v" + std::to_string(j)] = profile.values[j];
  }
  if (horizontal) {
    m.eval = [profile](Vec2 z) { return Vec2{z.x + profile.at(z.y), z.y}; };
    m.inverse = [profile](Vec2 z) {
      return Vec2{z.x - profile.at(z.y), z.y};
    };
    m.local_lip_x = [slope](Vec2, double) { return std::hypot(1.0, slope); };
    m.local_lip_y = [](Vec2, double) { return 1.0; };
  } else {
    m.eval = [profile](Vec2 z) { return Vec2{z.x, z.y + profile.at(z.x)}; };
    m.inverse = [profile](Vec2 z) {
      return Vec2{z.x, z.y - profile.at(z.x)};
    };
    m.local_lip_x = [](Vec2, double) { return 1.0; };
    m.local_lip_y = [slope](Vec2, double) { return std::hypot(1.0, slope); };
  }
  m.lipschitz_bound = 1.0 + slope;
  m.local_lip = [b = m.lipschitz_bound](Vec2, double) { return b; };
  return m;
}

/// Offset of z from the nearest lattice translate of `center`.
Vec2 nearest_offset(Vec2 z, Vec2 center) {
  const Vec2 w = z - center;
  return {w.x - std::nearbyint(w.x), w.y - std::nearbyint(w.y)};
}

LiftedMap make_bump_push(Vec2 center, double radius, Vec2 disp) {
  if (!is_finite(center) || !is_finite(disp) || !std::isfinite(radius))
    throw map_definition_error("bump_push: non-finite parameter");
  if (!(radius > 0.0 && radius < 0.5))
    throw map_definition_error("bump_push: radius must lie in (0, 1/2)");
  if (!(norm(disp) <= 0.3 * radius))
    throw map_definition_error(
        "bump_push: |displacement| must be at most 0.3·radius");

  const auto hump = [center, radius](Vec2 z) {
    const Vec2 w = nearest_offset(z, center);
    const double t = norm(w) / radius;
    return t >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(M_PI * t));
  };

  LiftedMap m;
  m.name = "bump_push";
  m.params = {{"cx", center.x},
              {"cy", center.y},
              {"radius", radius},
              {"dx", disp.x},
              {"dy", disp.y}};
  m.eval = [hump, disp](Vec2 z) { return z + hump(z) * disp; };
  // |d|·max|hump′|/radius ≤ 0.3·π/2 < 1, so w ↦ z − hump(w)·d contracts and
  // the fixed-point iteration converges to the unique preimage.
  m.inverse = [hump, disp](Vec2 z) {
    Vec2 w = z;
    for (int i = 0; i < 80; ++i) {
      const Vec2 next = z - hump(w) * disp;
      if (norm(next - w) <= 1e-16) return next;
      w = next;
    }
    return w;
  };
  const double grad = M_PI / (2.0 * radius);
  m.lipschitz_bound = 1.0 + norm(disp) * grad;
  m.local_lip = [b = m.lipschitz_bound](Vec2, double) { return b; };
  m.local_lip_x = [b = 1.0 + std::fabs(disp.x) * grad](Vec2, double) {
    return b;
  };
  m.local_lip_y = [b = 1.0 + std::fabs(disp.y) * grad](Vec2, double) {
    return b;
  };
  return m;
}

LiftedMap make_twist(Vec2 center, double r_inner, double r_outer,
                     double angle) {
  if (!is_finite(center) || !std::isfinite(r_inner) ||
      !std::isfinite(r_outer) || !std::isfinite(angle))
    throw map_definition_error("twist: non-finite parameter");
  if (!(0.0 < r_inner && r_inner < r_outer && r_outer < 0.5))
    throw map_definition_error("twist: requires 0 < r_inner < r_outer < 1/2");

  // Rotation preserves |w|, so running the same profile backwards is an
  // exact inverse.
  const auto turn = [center, r_inner, r_outer](Vec2 z, double ang) {
    const Vec2 w = nearest_offset(z, center);
    const double r = norm(w);
    if (r >= r_outer) return z;
    const double psi =
        ang * (r <= r_inner ? 1.0 : (r_outer - r) / (r_outer - r_inner));
    const double c = std::cos(psi), s = std::sin(psi);
    const Vec2 rot{c * w.x - s * w.y, s * w.x + c * w.y};
    return z + (rot - w);
  };

  LiftedMap m;
  m.name = "twist";
  m.params = {{"cx", center.x},
              {"cy", center.y},
              {"r_inner", r_inner},
              {"r_outer", r_outer},
              {"angle", angle}};
  m.eval = [turn, angle](Vec2 z) { return turn(z, angle); };
  m.inverse = [turn, angle](Vec2 z) { return turn(z, -angle); };
  m.lipschitz_bound =
      1.0 + std::fabs(angle) * (1.0 + r_outer / (r_outer - r_inner));
  m.local_lip = [b = m.lipschitz_bound](Vec2, double) { return b; };
  m.local_lip_x = m.local_lip;
  m.local_lip_y = m.local_lip;
  return m;
}

// ── building ────────────────────────────────────────────────────────────────
LiftedMap build_node(const MapExpression& e, int depth) {
  if (depth > 64)
    throw map_definition_error("expression nested too deeply to build");

  ArgReader args(e);
  if (e.name == "translation") {
    Vec2 v;
    if (args.has("v") || (!e.args.empty() &&
                          e.args.front().kind == MapArg::Kind::Pair)) {
      v = args.pair("v");
    } else {
      v.x = args.number("x");
      v.y = args.number("y");
    }
    args.finish();
    return translation_map(v);
  }
  if (e.name == "shear_x" || e.name == "shear_y") {
    std::vector<double> vals = args.all_numbers(1);
    args.finish();
    return make_shear(e.name == "shear_x", std::move(vals), e.name);
  }
  if (e.name == "bump_push") {
    const Vec2 center = args.pair("center");
    const double radius = args.number("radius");
    const Vec2 disp = args.pair("displacement");
    args.finish();
    return make_bump_push(center, radius, disp);
  }
  if (e.name == "twist") {
    const Vec2 center = args.pair("center");
    const double r_inner = args.number("r_inner");
    const double r_outer = args.number("r_outer");
    const double angle = args.number("angle");
    args.finish();
    return make_twist(center, r_inner, r_outer, angle);
  }
  if (e.name == "example_dissipative") {
    DissipativeParams p;
    p.eps = args.number_or("eps", p.eps);
    p.delta = args.number_or("delta", p.delta);
    p.bump_sharpness = args.number_or("sharpness", p.bump_sharpness);
    p.shear_amplitude = args.number_or("shear_amplitude", p.shear_amplitude);
    args.finish();
    return build_example(p);
  }
  if (e.name == "example_conservative") {
    ConservativeParams p;
    p.alpha = args.number_or("alpha", p.alpha);
    p.beta = args.number_or("beta", p.beta);
    p.a = args.number_or("a", p.a);
    p.b = args.number_or("b", p.b);
    p.c = args.number_or("c", p.c);
    if (args.has("K"))
      p.truncation = static_cast<int>(
          integer_valued(args, "K", args.number("K")));
    p.disk_radius_fraction =
        args.number_or("disk_radius_fraction", p.disk_radius_fraction);
    p.phi_sharpness = args.number_or("phi_sharpness", p.phi_sharpness);
    args.finish();
    return build_example_conservative(p);
  }
  if (e.name == "compose") {
    const std::vector<const MapExpression*> kids = args.all_children(2);
    args.finish();
    LiftedMap m = build_node(*kids.back(), depth + 1);
    for (std::size_t i = kids.size() - 1; i-- > 0;)
      m = compose(build_node(*kids[i], depth + 1), m);
    return m;
  }
  if (e.name == "power") {
    const MapExpression& base = args.child();
    const long long n =
        integer_valued(args, "n", args.number("n"));
    args.finish();
    return power(build_node(base, depth + 1), n);
  }
  if (e.name == "minus") {
    const MapExpression& base = args.child();
    const Vec2 v = args.pair("v");
    args.finish();
    return minus(build_node(base, depth + 1), v);
  }
  throw map_definition_error("unknown primitive '" + e.name + "'");
}

}  // namespace

// ── public API ──────────────────────────────────────────────────────────────
bool operator==(const MapArg& a, const MapArg& b) {
  if (a.kind != b.kind || a.param != b.param) return false;
  switch (a.kind) {
    case MapArg::Kind::Number:
      return a.x == b.x;
    case MapArg::Kind::Pair:
      return a.x == b.x && a.y == b.y;
    case MapArg::Kind::Expr:
      return a.child == b.child;
  }
  return false;
}

bool operator==(const MapExpression& a, const MapExpression& b) {
  return a.name == b.name && a.args == b.args;
}

MapExpression parse_map_expression(const std::string& text) {
  std::vector<Token> tokens = Lexer(text).run();
  return Parser(std::move(tokens)).run();
}

std::string print_map_expression(const MapExpression& expr) {
  std::string out;
  print_expr(out, expr);
  return out;
}

LiftedMap build_map(const MapExpression& expr) {
  try {
    return build_node(expr, 0);
  } catch (const usage_error& e) {
    // Builders validate their own ranges with usage errors; surfaced through
    // an expression they are definition problems of the described map.
    throw map_definition_error(
        std::string("parameter out of documented range: ") + e.what());
  }
}

LiftedMap build_map_from_text(const std::string& text) {
  return build_map(parse_map_expression(text));
}

}  // namespace rotaset
