#include "hsevo/wire.hpp"

#include <cmath>
#include <limits>

#include "hsevo/errors.hpp"

namespace hsevo::wire {
namespace {

[[noreturn]] void protocol(const std::string& why) { throw HeuristicError("protocol", why); }

double decode_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (j.is_boolean()) return j.get<bool>() ? 1.0 : 0.0;
  protocol("expected a number, got " + j.dump().substr(0, 80));
}

nlohmann::json encode_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string shape_text(const Value& v) {
  if (std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v)) return "scalar";
  if (const auto* m = std::get_if<Matrix>(&v)) return std::to_string(m->rows) + "x" + std::to_string(m->cols);
  if (const auto* d = std::get_if<std::vector<double>>(&v)) return "(" + std::to_string(d->size()) + ",)";
  return "(" + std::to_string(std::get<std::vector<std::int64_t>>(v).size()) + ",)";
}

}  // namespace

nlohmann::json encode(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return encode_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* vd = std::get_if<std::vector<double>>(&v)) {
    auto arr = nlohmann::json::array();
    for (double x : *vd) arr.push_back(encode_number(x));
    return arr;
  }
  if (const auto* vi = std::get_if<std::vector<std::int64_t>>(&v)) return nlohmann::json(*vi);
  const auto& m = std::get<Matrix>(v);
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(encode_number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Value decode(const nlohmann::json& j) {
  if (!j.is_array()) return decode_number(j);
  if (j.empty() || !j.front().is_array()) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) {
      if (x.is_array()) protocol("ragged nested list");
      out.push_back(decode_number(x));
    }
    return out;
  }
  Matrix m;
  m.rows = j.size();
  m.cols = j.front().size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != m.cols) protocol("ragged nested list");
    for (const auto& x : row) {
      if (x.is_array()) protocol("arrays deeper than two dimensions are not supported");
      m.data.push_back(decode_number(x));
    }
  }
  return m;
}

nlohmann::json Shape::to_json() const {
  switch (kind) {
    case Kind::scalar: return nlohmann::json::array();
    case Kind::vector: return nlohmann::json::array({rows});
    case Kind::matrix: return nlohmann::json::array({rows, cols});
  }
  return nullptr;
}

void check(const Value& v, const Shape& expected) {
  const std::vector<double>* flat = nullptr;
  bool ok = false;
  switch (expected.kind) {
    case Shape::Kind::scalar:
      ok = std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
      break;
    case Shape::Kind::vector:
      if (const auto* d = std::get_if<std::vector<double>>(&v)) {
        ok = d->size() == expected.rows;
        flat = d;
      } else if (const auto* i = std::get_if<std::vector<std::int64_t>>(&v)) {
        ok = i->size() == expected.rows;
      }
      break;
    case Shape::Kind::matrix:
      if (const auto* m = std::get_if<Matrix>(&v)) {
        ok = m->rows == expected.rows && m->cols == expected.cols;
        flat = &m->data;
      }
      break;
  }
  if (!ok) throw HeuristicError("shape", "result has shape " + shape_text(v) + ", expected " + expected.to_json().dump());
  if (!expected.finite) return;
  if (const auto* d = std::get_if<double>(&v); d && !std::isfinite(*d)) {
    throw HeuristicError("nonfinite", "result is not finite");
  }
  if (flat) {
    for (double x : *flat) {
      if (!std::isfinite(x)) throw HeuristicError("nonfinite", "result contains a non-finite value");
    }
  }
}

double as_scalar(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw HeuristicError("shape", "expected a scalar, got " + shape_text(v));
}

std::vector<double> as_vector(const Value& v) {
  if (const auto* d = std::get_if<std::vector<double>>(&v)) return *d;
  if (const auto* i = std::get_if<std::vector<std::int64_t>>(&v)) return {i->begin(), i->end()};
  throw HeuristicError("shape", "expected a 1-D array, got " + shape_text(v));
}

Matrix as_matrix(const Value& v) {
  if (const auto* m = std::get_if<Matrix>(&v)) return *m;
  throw HeuristicError("shape", "expected a 2-D array, got " + shape_text(v));
}

nlohmann::json load_request(const std::string& source, const std::string& fn, std::uint64_t seed) {
  return {{"op", "load"}, {"fn", fn}, {"source", source}, {"seed", seed}};
}

nlohmann::json call_request(const std::vector<Value>& args, const std::optional<Shape>& expect) {
  auto arr = nlohmann::json::array();
  for (const auto& a : args) arr.push_back(encode(a));
  nlohmann::json j = {{"op", "call"}, {"args", std::move(arr)}};
  if (expect) {
    j["expect"] = expect->to_json();
    if (!expect->finite) j["allow_nonfinite"] = true;
  }
  return j;
}

nlohmann::json ping_request() { return {{"op", "ping"}}; }
nlohmann::json shutdown_request() { return {{"op", "shutdown"}}; }

}  // namespace hsevo::wire
