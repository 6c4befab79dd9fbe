#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsevo {

struct NamedRange {
  std::string name;
  double low = 0.0;
  double high = 0.0;
};

// Contents of the first ``` fenced block, leading/trailing blank lines
// removed. Throws ExtractionError(no_fence).
std::string extract_code_block(std::string_view text);

// All fenced blocks, in order.
std::vector<std::string> fenced_blocks(std::string_view text);

// Parses `parameter_ranges = {'name': (lo, hi), ...}` (the assignment is
// optional). Order of entries is preserved.
std::vector<NamedRange> parse_parameter_ranges(std::string_view block);

struct CodeAndRanges {
  std::string program;
  std::vector<NamedRange> ranges;
};

// First block is the program, second the parameter_ranges mapping.
CodeAndRanges extract_code_and_ranges(std::string_view text);

}  // namespace hsevo
