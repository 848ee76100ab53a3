#pragma once
/// Error taxonomy shared by every module. The three leaf classes map onto the
/// CLI's exit codes: usage_error → 2 (bad configuration / preconditions),
/// map_definition_error → 3 (a map cannot be parsed, built, or evaluated),
/// numerical_error → 4 (an algorithm gave up honestly: packing failures,
/// search windows collapsing, winding numbers undefined on the circle, …).

#include <stdexcept>
#include <string>

namespace rotaset {

// ── base ─────────────────────────────────────────────────────────────────
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// ── leaves ───────────────────────────────────────────────────────────────
struct usage_error : error {
  explicit usage_error(const std::string& what) : error(what) {}
};

struct map_definition_error : error {
  explicit map_definition_error(const std::string& what) : error(what) {}
};

struct numerical_error : error {
  explicit numerical_error(const std::string& what) : error(what) {}
};

}  // namespace rotaset
