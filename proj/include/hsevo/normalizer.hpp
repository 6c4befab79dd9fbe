#pragma once

#include <string>
#include <string_view>

#include "hsevo/archive.hpp"

namespace hsevo {

struct NormalizedSource {
  std::string text;
  IndividualId original_id{};
  // True when the source did not parse and only whitespace cleanup was applied.
  bool degraded = false;
};

// Canonical form of a heuristic program:
//   - comments removed, leading string-literal statements of the module and
//     of every def/class body removed (an emptied body becomes `pass`);
//   - one statement per line (`;` and single-line compound bodies split),
//     four-space indentation, bracketed continuations joined;
//   - one blank line around def/class blocks and after any top-level block,
//     no other blank lines;
//   - deterministic token spacing.
// Throws ParseError when the source does not lex/parse.
std::string normalize_text(std::string_view source);

NormalizedSource normalize(std::string_view source, IndividualId id = {});

// Strips blank lines and trailing whitespace only.
std::string fallback_normalize_text(std::string_view source);

// normalize(), degrading to fallback_normalize_text() on parse errors.
NormalizedSource normalize_or_fallback(std::string_view source, IndividualId id = {});

}  // namespace hsevo
