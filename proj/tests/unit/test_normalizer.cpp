#include "doctest.h"
#include "hsevo/errors.hpp"
#include "hsevo/normalizer.hpp"

using namespace hsevo;

TEST_CASE("formatting-only differences normalize to the same text") {
  const std::string a = "import numpy as np\n\ndef f(x):\n    \"\"\"Doc.\"\"\"\n    # comment\n    y = x+1 ; return y*2\n";
  const std::string b = "import numpy as np\ndef f( x ):\n  y=x + 1\n  return y * 2   # other\n\n\n";
  CHECK(normalize_text(a) == normalize_text(b));
}

TEST_CASE("different programs stay different") {
  CHECK(normalize_text("def f(x):\n    return x + 1\n") != normalize_text("def f(x):\n    return x - 1\n"));
}

TEST_CASE("normalization is idempotent") {
  const std::string src = "def g(a,b):\n    if a: return b\n    return [a,\n            b]\n";
  const auto once = normalize_text(src);
  CHECK(normalize_text(once) == once);
}

TEST_CASE("a docstring-only body becomes pass") {
  const auto t = normalize_text("def f():\n    \"\"\"Only a docstring.\"\"\"\n");
  CHECK(t.find("pass") != std::string::npos);
}

TEST_CASE("unparsable source degrades to whitespace cleanup") {
  const std::string broken = "def f(:\n    return (1\n";
  CHECK_THROWS_AS(normalize_text(broken), ParseError);
  const auto n = normalize_or_fallback(broken, IndividualId{3});
  CHECK(n.degraded);
  CHECK(to_underlying(n.original_id) == 3);
  CHECK(n.text == fallback_normalize_text(broken));
}
