#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsevo/harmony_search.hpp"

namespace hsevo {

struct FunctionParameter {
  std::string name;
  bool has_default = false;
  std::size_t default_begin = 0;  // byte span of the default expression
  std::size_t default_end = 0;
  std::string default_text;
};

struct FunctionSignature {
  std::string name;
  std::vector<FunctionParameter> params;
};

// Top-level `def`s of a module, in source order. Throws ParseError.
std::vector<FunctionSignature> top_level_functions(std::string_view source);

// Picks the heuristic entry point: the first top-level def named `base` or
// `base_v<digits>`, else the last top-level def. nullopt when there is none.
std::optional<std::string> detect_entry_function(std::string_view source, std::string_view base);

// Checks that every range names a defaulted parameter of one top-level
// function and returns that function's name. Throws ParameterizationError.
std::string validate_parameterization(const ParameterizedHeuristic& ph);

// Rewrites the defaults of the ranged parameters to `values` (same order as
// ph.ranges). Values must lie within their ranges.
std::string specialize(const ParameterizedHeuristic& ph, const std::vector<double>& values);

}  // namespace hsevo
