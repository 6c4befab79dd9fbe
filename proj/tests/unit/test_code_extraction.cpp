#include "doctest.h"
#include "hsevo/code_extraction.hpp"
#include "hsevo/errors.hpp"

using namespace hsevo;

namespace {

ExtractionErrorKind kind_of(std::string_view text) {
  try {
    extract_code_and_ranges(text);
  } catch (const ExtractionError& e) {
    return e.kind();
  }
  FAIL("no ExtractionError");
  return ExtractionErrorKind::no_fence;
}

const char* kFig4b = R"(Here is the modified code:

```python
import numpy as np

def heuristics_v2(prize: np.ndarray, distance: np.ndarray, maxlen: float, reward_threshold: float = 0, distance_threshold: float = 0, cost_penalty_weight: float = 1) -> np.ndarray:
    reward_distance_ratio = prize / distance
    cost_penalty = np.exp(-distance)
    heuristics = (prize * prize[:, np.newaxis]) / (distance * distance) * cost_penalty
    heuristics[(distance > maxlen) | (reward_distance_ratio < reward_threshold) | (distance < distance_threshold)] = 0
    return heuristics
```

```python
parameter_ranges = {
    'reward_threshold': (0, 1),
    'distance_threshold': (0, 100),
    'cost_penalty_weight': (0, 2)
}
```
)";

}  // namespace

TEST_CASE("first fenced block is extracted") {
  CHECK(extract_code_block("text\n```python\n\nx = 1\n\n```\nmore") == "x = 1");
  CHECK(extract_code_block("```\ny = 2\n") == "y = 2");
  CHECK_THROWS_AS(extract_code_block("no code here"), ExtractionError);
}

TEST_CASE("parameter ranges from the harmony-search example") {
  const auto cr = extract_code_and_ranges(kFig4b);
  CHECK(cr.program.rfind("import numpy as np", 0) == 0);
  REQUIRE(cr.ranges.size() == 3);
  CHECK(cr.ranges[0].name == "reward_threshold");
  CHECK(cr.ranges[0].low == 0.0);
  CHECK(cr.ranges[0].high == 1.0);
  CHECK(cr.ranges[1].name == "distance_threshold");
  CHECK(cr.ranges[1].high == 100.0);
  CHECK(cr.ranges[2].name == "cost_penalty_weight");
  CHECK(cr.ranges[2].high == 2.0);
}

TEST_CASE("range syntax variants") {
  const auto r = parse_parameter_ranges("{\"a\": [-1.5e-1, 2], 'b': (3, 3),}");
  REQUIRE(r.size() == 2);
  CHECK(r[0].low == -0.15);
  CHECK(r[1].low == r[1].high);
}

TEST_CASE("extraction failures are classified") {
  CHECK(kind_of("prose only") == ExtractionErrorKind::no_fence);
  CHECK(kind_of("```\nx = 1\n```") == ExtractionErrorKind::missing_ranges);
  CHECK(kind_of("```\nx = 1\n```\n```\n{'a': (2, 1)}\n```") == ExtractionErrorKind::range_order);
  CHECK(kind_of("```\nx = 1\n```\n```\n{'a': (1, 2), 'a': (0, 1)}\n```") == ExtractionErrorKind::malformed_ranges);
  CHECK(kind_of("```\nx = 1\n```\n```\n{'a': (1, nan)}\n```") == ExtractionErrorKind::malformed_ranges);
  CHECK(kind_of("```\nx = 1\n```\n```\n{}\n```") == ExtractionErrorKind::malformed_ranges);
}
