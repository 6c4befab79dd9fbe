#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsevo/matrix.hpp"
#include "json.hpp"

namespace hsevo::wire {

// Values that cross the sandbox boundary. Arrays travel row-major as nested
// JSON lists; integers stay integers so index arrays keep their dtype.
using Value = std::variant<double, std::int64_t, std::vector<double>, std::vector<std::int64_t>, Matrix>;

nlohmann::json encode(const Value& v);

// Numbers decode to double, flat lists to vector<double>, rectangular lists
// of lists to Matrix. The strings "nan", "inf" and "-inf" decode to the
// corresponding doubles. Throws HeuristicError(protocol) otherwise.
Value decode(const nlohmann::json& j);

struct Shape {
  enum class Kind { scalar, vector, matrix } kind = Kind::scalar;
  std::size_t rows = 0;
  std::size_t cols = 0;
  // When false, nan/inf entries are passed through to the caller.
  bool finite = true;

  static Shape scalar() { return {}; }
  static Shape vector(std::size_t n) { return {Kind::vector, n, 0, true}; }
  static Shape matrix(std::size_t r, std::size_t c) { return {Kind::matrix, r, c, true}; }
  Shape allowing_nonfinite() const {
    Shape s = *this;
    s.finite = false;
    return s;
  }
  nlohmann::json to_json() const;
};

// Throws HeuristicError(shape), or HeuristicError(nonfinite) when the shape
// requires finite values.
void check(const Value& v, const Shape& expected);

double as_scalar(const Value& v);
std::vector<double> as_vector(const Value& v);
Matrix as_matrix(const Value& v);

nlohmann::json load_request(const std::string& source, const std::string& fn, std::uint64_t seed);
nlohmann::json call_request(const std::vector<Value>& args, const std::optional<Shape>& expect);
nlohmann::json ping_request();
nlohmann::json shutdown_request();

}  // namespace hsevo::wire
