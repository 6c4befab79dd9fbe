#include "hsevo/parameterization.hpp"

#include <algorithm>
#include <cctype>

#include "hsevo/errors.hpp"
#include "hsevo/python_lexer.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {

using python::Token;
using python::TokenKind;

std::vector<FunctionSignature> top_level_functions(std::string_view source) {
  const auto tokens = python::tokenize(source);
  const auto lines = python::logical_lines(tokens);
  std::vector<FunctionSignature> out;
  for (const auto& line : lines) {
    if (line.depth != 0) continue;
    const auto& t = line.tokens;
    std::size_t i = 0;
    if (i < t.size() && t[i].is(TokenKind::name, "async")) ++i;
    if (i + 2 >= t.size() || !t[i].is(TokenKind::name, "def") || t[i + 1].kind != TokenKind::name ||
        !t[i + 2].is_op("(")) {
      continue;
    }
    FunctionSignature sig;
    sig.name = t[i + 1].text;
    i += 3;
    int depth = 0;
    bool at_param_start = true;
    FunctionParameter* current = nullptr;
    std::size_t default_first = 0;
    bool in_default = false;
    auto close_default = [&](std::size_t last) {
      if (in_default && current) {
        current->default_begin = t[default_first].begin;
        current->default_end = t[last].end;
        current->default_text = std::string(source.substr(current->default_begin,
                                                          current->default_end - current->default_begin));
      }
      in_default = false;
    };
    for (; i < t.size(); ++i) {
      const auto& tok = t[i];
      if (depth == 0 && (tok.is_op(",") || tok.is_op(")"))) {
        close_default(i - 1);
        current = nullptr;
        at_param_start = true;
        if (tok.is_op(")")) break;
        continue;
      }
      if (tok.kind == TokenKind::op && (tok.text == "(" || tok.text == "[" || tok.text == "{")) ++depth;
      if (tok.kind == TokenKind::op && (tok.text == ")" || tok.text == "]" || tok.text == "}")) --depth;
      if (at_param_start && tok.kind == TokenKind::name) {
        FunctionParameter param;
        param.name = tok.text;
        sig.params.push_back(std::move(param));
        current = &sig.params.back();
        at_param_start = false;
        continue;
      }
      if (at_param_start && tok.kind == TokenKind::op && (tok.text == "*" || tok.text == "**" || tok.text == "/")) {
        continue;
      }
      at_param_start = false;
      if (depth == 0 && tok.is_op("=") && current && !in_default) {
        current->has_default = true;
        in_default = true;
        default_first = i + 1;
      }
    }
    out.push_back(std::move(sig));
  }
  return out;
}

std::optional<std::string> detect_entry_function(std::string_view source, std::string_view base) {
  const auto fns = top_level_functions(source);
  if (fns.empty()) return std::nullopt;
  for (const auto& f : fns) {
    if (f.name == base) return f.name;
    if (f.name.size() > base.size() + 2 && f.name.compare(0, base.size(), base) == 0 &&
        f.name.compare(base.size(), 2, "_v") == 0 &&
        std::all_of(f.name.begin() + static_cast<std::ptrdiff_t>(base.size() + 2), f.name.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return f.name;
    }
  }
  return fns.back().name;
}

namespace {

const FunctionSignature& owning_function(const std::vector<FunctionSignature>& fns, const ParameterizedHeuristic& ph) {
  for (const auto& f : fns) {
    const bool all = std::all_of(ph.ranges.begin(), ph.ranges.end(), [&](const NamedRange& r) {
      return std::any_of(f.params.begin(), f.params.end(),
                         [&](const FunctionParameter& p) { return p.name == r.name && p.has_default; });
    });
    if (all) return f;
  }
  std::string names;
  for (const auto& r : ph.ranges) names += (names.empty() ? "" : ", ") + r.name;
  throw ParameterizationError("no top-level function has defaulted parameters for all of: " + names);
}

}  // namespace

std::string validate_parameterization(const ParameterizedHeuristic& ph) {
  if (ph.ranges.empty()) throw ParameterizationError("no parameter ranges");
  std::vector<FunctionSignature> fns;
  try {
    fns = top_level_functions(ph.template_source);
  } catch (const ParseError& e) {
    throw ParameterizationError(std::string("template does not parse: ") + e.what());
  }
  for (const auto& r : ph.ranges) {
    if (!(r.low <= r.high)) throw ParameterizationError("range for '" + r.name + "' is inverted");
  }
  return owning_function(fns, ph).name;
}

std::string specialize(const ParameterizedHeuristic& ph, const std::vector<double>& values) {
  if (values.size() != ph.ranges.size()) throw ParameterizationError("value count differs from range count");
  const auto fns = top_level_functions(ph.template_source);
  const auto& fn = owning_function(fns, ph);
  struct Edit {
    std::size_t begin, end;
    std::string text;
  };
  std::vector<Edit> edits;
  for (std::size_t k = 0; k < ph.ranges.size(); ++k) {
    const auto& r = ph.ranges[k];
    if (values[k] < r.low || values[k] > r.high) {
      throw ParameterizationError("value for '" + r.name + "' lies outside its range");
    }
    const auto& p = *std::find_if(fn.params.begin(), fn.params.end(),
                                  [&](const FunctionParameter& q) { return q.name == r.name; });
    edits.push_back({p.default_begin, p.default_end, python_float_literal(values[k])});
  }
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin > b.begin; });
  std::string out = ph.template_source;
  for (const auto& e : edits) out.replace(e.begin, e.end - e.begin, e.text);
  return out;
}

}  // namespace hsevo
