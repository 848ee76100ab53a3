/// Textual map expressions: a whitespace-separated, s-expression-like syntax
/// for assembling lifted maps from named primitives. One expression per
/// document; "#" starts a comment running to end of line; commas are treated
/// as whitespace.
///
///   expr := name "(" arg* ")"
///   arg  := number | name "=" number | "(" number number ")"
///         | name "=" "(" number number ")" | expr
///
/// Numbers accept an optional rational form "p/q". Primitives:
///   translation(x y) | translation((x y))
///   shear_x(amp)                       x += amp·(1 − cos 2πy)/2
///   shear_y(amp)                       y += amp·(1 − cos 2πx)/2
///   bump_push(center=(cx cy) radius=r displacement=(dx dy)), |d| ≤ 0.3·r
///   twist(center=(cx cy) r_inner=a r_outer=b angle=t), 0 < a < b < 1/2
///   example_dissipative(eps=… delta=… sharpness=… shear_amplitude=…)
///   example_conservative(alpha=… beta=… a=… b=… c=… K=…)
///   compose(e1 e2 …)                   e1 ∘ e2 ∘ … (rightmost applied first)
///   power(e n)                         n ≥ 1
///   minus(e v=(vx vy))
/// Unlisted parameters fall back to the construction defaults.

#pragma once

#include <string>
#include <vector>

#include "rotaset/map_core.hpp"

namespace rotaset {

struct MapExpression;

/// One argument of an expression node. `param` is empty for positional
/// arguments. Kind selects which payload is meaningful: Number uses x,
/// Pair uses (x, y), Expr uses child.front().
struct MapArg {
  enum class Kind { Number, Pair, Expr };
  Kind kind = Kind::Number;
  std::string param;
  double x = 0.0;
  double y = 0.0;
  std::vector<MapExpression> child;  // size 1 when kind == Expr
};

struct MapExpression {
  std::string name;
  std::vector<MapArg> args;
};

bool operator==(const MapArg& a, const MapArg& b);
bool operator==(const MapExpression& a, const MapExpression& b);
inline bool operator!=(const MapExpression& a, const MapExpression& b) {
  return !(a == b);
}

/// Parses one expression (plus optional comments/whitespace). Syntax errors
/// carry "line L, column C". Throws map_definition_error.
MapExpression parse_map_expression(const std::string& text);

/// Prints in canonical single-line form. Numbers use the shortest
/// representation that parses back to the identical double, so
/// parse(print(e)) == e exactly.
std::string print_map_expression(const MapExpression& expr);

/// Instantiates the map an expression describes. Unknown primitives, arity
/// mismatches, and out-of-range parameters throw map_definition_error.
LiftedMap build_map(const MapExpression& expr);

/// parse + build in one step.
LiftedMap build_map_from_text(const std::string& text);

}  // namespace rotaset
