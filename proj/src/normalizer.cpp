#include "hsevo/normalizer.hpp"

#include <optional>

#include "hsevo/errors.hpp"
#include "hsevo/python_lexer.hpp"

namespace hsevo {
namespace {

using python::LogicalLine;
using python::Token;
using python::TokenKind;

bool is_open(const Token& t) { return t.is_op("(") || t.is_op("[") || t.is_op("{"); }
bool is_close(const Token& t) { return t.is_op(")") || t.is_op("]") || t.is_op("}"); }

// Keywords that behave like operators for spacing purposes; True/False/None
// are plain atoms.
bool operator_keyword(const Token& t) {
  return t.kind == TokenKind::name && python::is_keyword(t.text) && t.text != "True" &&
         t.text != "False" && t.text != "None";
}

bool first_is(const LogicalLine& line, std::string_view word) {
  return !line.tokens.empty() && line.tokens.front().is(TokenKind::name, word);
}

bool defines_block(const LogicalLine& line) {
  if (first_is(line, "def") || first_is(line, "class")) return true;
  return first_is(line, "async") && line.tokens.size() > 1 &&
         line.tokens[1].is(TokenKind::name, "def");
}

bool is_decorator(const LogicalLine& line) {
  return !line.tokens.empty() && line.tokens.front().is_op("@");
}

bool compound_header(const LogicalLine& line) {
  static constexpr std::string_view kHeads[] = {"if",  "elif", "else",    "for",  "while", "def",
                                                "class", "try", "except", "finally", "with", "async"};
  if (line.tokens.empty() || line.tokens.front().kind != TokenKind::name) return false;
  for (auto k : kHeads) {
    if (line.tokens.front().text == k) return true;
  }
  return false;
}

// Index of the colon closing a compound statement header, skipping colons
// inside brackets and those consumed by lambdas.
std::optional<std::size_t> header_colon(const LogicalLine& line) {
  int depth = 0;
  int pending_lambdas = 0;
  for (std::size_t i = 0; i < line.tokens.size(); ++i) {
    const auto& t = line.tokens[i];
    if (is_open(t)) ++depth;
    else if (is_close(t)) --depth;
    else if (depth == 0 && t.is(TokenKind::name, "lambda")) ++pending_lambdas;
    else if (depth == 0 && t.is_op(":")) {
      if (pending_lambdas > 0) {
        --pending_lambdas;
      } else {
        return i;
      }
    }
  }
  return std::nullopt;
}

void split_semicolons(std::vector<Token> tokens, int depth, std::vector<LogicalLine>& out) {
  int nesting = 0;
  LogicalLine current{depth, {}};
  for (auto& t : tokens) {
    if (is_open(t)) ++nesting;
    else if (is_close(t)) --nesting;
    if (nesting == 0 && t.is_op(";")) {
      if (!current.tokens.empty()) out.push_back(std::move(current));
      current = LogicalLine{depth, {}};
      continue;
    }
    current.tokens.push_back(std::move(t));
  }
  if (!current.tokens.empty()) out.push_back(std::move(current));
}

std::vector<LogicalLine> one_statement_per_line(std::vector<LogicalLine> lines) {
  std::vector<LogicalLine> out;
  for (auto& line : lines) {
    if (compound_header(line)) {
      auto colon = header_colon(line);
      if (colon && *colon + 1 < line.tokens.size()) {
        LogicalLine header{line.depth, {line.tokens.begin(), line.tokens.begin() + *colon + 1}};
        std::vector<Token> body(line.tokens.begin() + *colon + 1, line.tokens.end());
        out.push_back(std::move(header));
        split_semicolons(std::move(body), line.depth + 1, out);
        continue;
      }
    }
    split_semicolons(std::move(line.tokens), line.depth, out);
  }
  return out;
}

bool string_statement(const LogicalLine& line) {
  if (line.tokens.empty()) return false;
  for (const auto& t : line.tokens) {
    if (t.kind != TokenKind::string) return false;
  }
  return true;
}

LogicalLine pass_line(int depth) {
  return LogicalLine{depth, {Token{TokenKind::name, "pass", 0, 0, 0}}};
}

// Drops leading string-literal statements of the module and of def/class
// bodies. A body left empty receives `pass`.
std::vector<LogicalLine> strip_docstrings(std::vector<LogicalLine> lines) {
  std::vector<LogicalLine> out;
  std::optional<int> body_depth = 0;
  int pending_header_depth = -1;  // depth of a header whose body has not started
  for (auto& line : lines) {
    if (body_depth && line.depth == *body_depth && string_statement(line)) continue;
    if (pending_header_depth >= 0) {
      if (line.depth <= pending_header_depth) out.push_back(pass_line(pending_header_depth + 1));
      pending_header_depth = -1;
    }
    body_depth.reset();
    const bool opens_body = defines_block(line) && line.tokens.back().is_op(":");
    const int depth = line.depth;
    out.push_back(std::move(line));
    if (opens_body) {
      body_depth = depth + 1;
      pending_header_depth = depth;
    }
  }
  if (pending_header_depth >= 0) out.push_back(pass_line(pending_header_depth + 1));
  return out;
}

bool unary_context(const Token* prev) {
  if (prev == nullptr) return true;
  if (prev->kind == TokenKind::op) return !is_close(*prev) && prev->text != "...";
  return operator_keyword(*prev);
}

std::string render_tokens(const std::vector<Token>& toks) {
  const std::size_t n = toks.size();
  std::vector<bool> unary(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = toks[i];
    if (t.is_op("~")) {
      unary[i] = true;
    } else if (t.is_op("-") || t.is_op("+") || t.is_op("*") || t.is_op("**")) {
      unary[i] = unary_context(i == 0 ? nullptr : &toks[i - 1]);
    }
  }

  std::string out;
  std::vector<char> brackets;
  auto track = [&](const Token& t) {
    if (is_open(t)) brackets.push_back(t.text[0]);
    else if (is_close(t) && !brackets.empty()) brackets.pop_back();
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& cur = toks[i];
    if (i > 0) {
      const auto& prev = toks[i - 1];
      const char inner = brackets.empty() ? '\0' : brackets.back();
      bool space = true;
      if (is_close(cur) || cur.is_op(",") || cur.is_op(";") || cur.is_op(":")) {
        space = false;
      } else if (is_open(prev) || prev.is_op(".")) {
        space = false;
      } else if (cur.is_op(".")) {
        space = operator_keyword(prev) || prev.kind == TokenKind::number;
      } else if (prev.is_op("@") && i == 1) {
        space = false;
      } else if (prev.kind == TokenKind::op && unary[i - 1]) {
        space = false;
      } else if (cur.is_op("=") || prev.is_op("=")) {
        space = inner != '(';
      } else if (prev.is_op(":")) {
        space = inner != '[';
      } else if (prev.is_op(",")) {
        space = true;
      } else if (cur.is_op("(") || cur.is_op("[")) {
        const bool callee = (prev.kind == TokenKind::name && !operator_keyword(prev)) ||
                            prev.kind == TokenKind::string || is_close(prev);
        space = !callee;
      }
      if (space) out.push_back(' ');
    }
    out += cur.text;
    track(cur);
  }
  return out;
}

std::string render(const std::vector<LogicalLine>& lines) {
  std::string out;
  const LogicalLine* prev = nullptr;
  for (const auto& line : lines) {
    if (prev != nullptr) {
      bool blank = false;
      if ((defines_block(line) || is_decorator(line)) && !is_decorator(*prev) && prev->depth >= line.depth) {
        blank = true;
      }
      if (line.depth == 0 && prev->depth > 0) blank = true;
      if (blank) out.push_back('\n');
    }
    out.append(static_cast<std::size_t>(line.depth) * 4, ' ');
    out += render_tokens(line.tokens);
    out.push_back('\n');
    prev = &line;
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view source) {
  auto tokens = python::tokenize(source);
  auto lines = python::logical_lines(tokens);
  lines = one_statement_per_line(std::move(lines));
  lines = strip_docstrings(std::move(lines));
  return render(lines);
}

NormalizedSource normalize(std::string_view source, IndividualId id) {
  return NormalizedSource{normalize_text(source), id, false};
}

std::string fallback_normalize_text(std::string_view source) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    auto nl = source.find('\n', pos);
    if (nl == std::string_view::npos) nl = source.size();
    auto line = source.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r' ||
                             line.back() == '\f' || line.back() == '\v')) {
      line.remove_suffix(1);
    }
    if (!line.empty()) {
      out.append(line);
      out.push_back('\n');
    }
    pos = nl + 1;
  }
  return out;
}

NormalizedSource normalize_or_fallback(std::string_view source, IndividualId id) {
  try {
    return normalize(source, id);
  } catch (const ParseError&) {
    return NormalizedSource{fallback_normalize_text(source), id, true};
  }
}

}  // namespace hsevo
