#include "hsevo/python_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "hsevo/errors.hpp"

namespace hsevo::python {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",  "and",    "as",     "assert",   "async", "await",  "break",
    "class", "continue", "def", "del",    "elif",   "else",     "except", "finally", "for",
    "from",  "global", "if",    "import", "in",     "is",       "lambda", "nonlocal", "not",
    "or",    "pass",   "raise", "return", "try",    "while",    "with",  "yield"};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 20> kOps2 = {"->", ":=", "**", "//", ">>", "<<", "<=",
                                                    ">=", "==", "!=", "+=", "-=", "*=", "/=",
                                                    "%=", "&=", "|=", "^=", "@=", "<>"};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=";

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool string_prefix(std::string_view word) {
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
         lower == "rb" || lower == "fr" || lower == "rf";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && brackets_.empty()) {
        if (!start_line()) continue;
      }
      if (pos_ >= src_.size()) break;
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        end_physical_line();
      } else if (c == '#') {
        comment();
      } else if (c == '\\') {
        continuation();
      } else if (c == '"' || c == '\'') {
        string_literal(pos_);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        number();
      } else if (ident_start(static_cast<unsigned char>(c))) {
        name_or_prefixed_string();
      } else {
        op();
      }
    }
    if (!brackets_.empty()) {
      throw ParseError(line_, std::string("unclosed '") + brackets_.back() + "'");
    }
    if (line_has_tokens_) emit(TokenKind::newline, "", pos_, pos_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::dedent, "", pos_, pos_);
    }
    emit(TokenKind::end, "", pos_, pos_);
    return std::move(tokens_);
  }

 private:
  void emit(TokenKind kind, std::string text, std::size_t b, std::size_t e) {
    tokens_.push_back(Token{kind, std::move(text), line_, b, e});
    if (kind != TokenKind::comment && kind != TokenKind::newline && kind != TokenKind::indent &&
        kind != TokenKind::dedent && kind != TokenKind::end) {
      line_has_tokens_ = true;
    }
  }

  // Handles indentation at the start of a physical line. Returns false when
  // the line was blank or comment-only and has been consumed.
  bool start_line() {
    int col = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      col = src_[p] == '\t' ? (col / 8 + 1) * 8 : col + 1;
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    const char c = src_[p];
    if (c == '\n' || c == '\r') {
      pos_ = p;
      while (pos_ < src_.size() && src_[pos_] == '\r') ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '\n') {
        ++pos_;
        ++line_;
      }
      return false;
    }
    if (c == '#') {
      pos_ = p;
      comment();
      if (pos_ < src_.size() && src_[pos_] == '\n') {
        ++pos_;
        ++line_;
      }
      return false;
    }
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::indent, "", p, p);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::dedent, "", p, p);
      }
      if (col != indents_.back()) throw ParseError(line_, "unindent does not match any outer level");
    }
    pos_ = p;
    at_line_start_ = false;
    return true;
  }

  void end_physical_line() {
    ++pos_;
    if (brackets_.empty()) {
      if (line_has_tokens_) {
        emit(TokenKind::newline, "", pos_ - 1, pos_);
        line_has_tokens_ = false;
      }
      at_line_start_ = true;
    }
    ++line_;
  }

  void comment() {
    const auto b = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    auto e = pos_;
    while (e > b && src_[e - 1] == '\r') --e;
    emit(TokenKind::comment, std::string(src_.substr(b, e - b)), b, e);
  }

  void continuation() {
    std::size_t p = pos_ + 1;
    while (p < src_.size() && src_[p] == '\r') ++p;
    if (p < src_.size() && src_[p] == '\n') {
      pos_ = p + 1;
      ++line_;
      return;
    }
    throw ParseError(line_, "unexpected character after line continuation");
  }

  void string_literal(std::size_t begin) {
    const char q = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
    const int start_line = line_;
    std::size_t p = pos_ + (triple ? 3 : 1);
    for (;;) {
      if (p >= src_.size()) throw ParseError(start_line, "unterminated string literal");
      const char c = src_[p];
      if (c == '\\') {
        if (p + 1 < src_.size() && src_[p + 1] == '\n') ++line_;
        p += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple) throw ParseError(start_line, "unterminated string literal");
        ++line_;
        ++p;
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++p;
          break;
        }
        if (p + 2 < src_.size() && src_[p + 1] == q && src_[p + 2] == q) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    const int save = line_;
    line_ = start_line;
    emit(TokenKind::string, std::string(src_.substr(begin, p - begin)), begin, p);
    line_ = save;
    pos_ = p;
  }

  void number() {
    const auto b = pos_;
    auto digit_run = [&](auto pred) {
      while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    };
    auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
      pos_ += 2;
      digit_run([](unsigned char c) { return std::isxdigit(c) != 0; });
    } else {
      digit_run(is_dec);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digit_run(is_dec);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          pos_ = p;
          digit_run(is_dec);
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    if (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) {
      throw ParseError(line_, "invalid numeric literal");
    }
    emit(TokenKind::number, std::string(src_.substr(b, pos_ - b)), b, pos_);
  }

  void name_or_prefixed_string() {
    const auto b = pos_;
    while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const auto word = src_.substr(b, pos_ - b);
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && string_prefix(word)) {
      string_literal(b);
      return;
    }
    emit(TokenKind::name, std::string(word), b, pos_);
  }

  void op() {
    const auto rest = src_.substr(pos_);
    auto take = [&](std::string_view text) {
      emit(TokenKind::op, std::string(text), pos_, pos_ + text.size());
      pos_ += text.size();
    };
    for (auto o : kOps3) {
      if (rest.starts_with(o)) return take(o);
    }
    for (auto o : kOps2) {
      if (rest.starts_with(o)) return take(o);
    }
    const char c = rest.front();
    if (kOps1.find(c) == std::string_view::npos) {
      throw ParseError(line_, std::string("invalid character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') brackets_.push_back(c);
    if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (brackets_.empty() || brackets_.back() != open) {
        throw ParseError(line_, std::string("unmatched '") + c + "'");
      }
      brackets_.pop_back();
    }
    take(rest.substr(0, 1));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_{0};
  std::vector<char> brackets_;
  std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::vector<LogicalLine> logical_lines(const std::vector<Token>& tokens) {
  std::vector<LogicalLine> lines;
  int depth = 0;
  bool expect_indent = false;
  int expect_line = 0;
  LogicalLine current;
  for (const auto& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::comment:
        break;
      case TokenKind::indent:
        if (!expect_indent) throw ParseError(tok.line, "unexpected indent");
        expect_indent = false;
        ++depth;
        break;
      case TokenKind::dedent:
        --depth;
        break;
      case TokenKind::newline:
        if (!current.tokens.empty()) {
          current.depth = depth;
          expect_indent = current.tokens.back().is_op(":");
          expect_line = current.tokens.back().line;
          lines.push_back(std::move(current));
          current = {};
        }
        break;
      case TokenKind::end:
        break;
      default:
        if (expect_indent) throw ParseError(tok.line, "expected an indented block");
        current.tokens.push_back(tok);
        break;
    }
  }
  if (expect_indent) throw ParseError(expect_line, "expected an indented block at end of input");
  return lines;
}

std::vector<Token> significant_tokens(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  for (const auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::name:
      case TokenKind::number:
      case TokenKind::string:
      case TokenKind::op:
        out.push_back(t);
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace hsevo::python
