#include "hsevo/code_extraction.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {
namespace {

std::string strip_blank_edges(std::string_view body) {
  auto lines = split_lines(body);
  std::size_t b = 0, e = lines.size();
  while (b < e && trim(lines[b]).empty()) ++b;
  while (e > b && trim(lines[e - 1]).empty()) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out.push_back('\n');
    out.append(lines[i]);
  }
  return out;
}

[[noreturn]] void malformed(const std::string& why) {
  throw ExtractionError(ExtractionErrorKind::malformed_ranges, "malformed parameter_ranges: " + why);
}

class RangeParser {
 public:
  explicit RangeParser(std::string_view s) : s_(s) {}

  std::vector<NamedRange> parse() {
    const auto brace = s_.find('{');
    if (brace == std::string_view::npos) malformed("no '{' found");
    pos_ = brace + 1;
    std::vector<NamedRange> out;
    while (true) {
      skip();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      NamedRange r;
      r.name = string_literal();
      for (const auto& prev : out) {
        if (prev.name == r.name) malformed("duplicate key '" + r.name + "'");
      }
      expect(':');
      skip();
      const char open = peek();
      if (open != '(' && open != '[') malformed("value of '" + r.name + "' is not a 2-tuple");
      ++pos_;
      r.low = number();
      expect(',');
      r.high = number();
      skip();
      if (peek() == ',') ++pos_;
      expect(open == '(' ? ')' : ']');
      if (r.low > r.high) {
        throw ExtractionError(ExtractionErrorKind::range_order,
                              "range for '" + r.name + "' has low " + format_double(r.low) + " > high " +
                                  format_double(r.high));
      }
      out.push_back(std::move(r));
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      break;
    }
    if (out.empty()) malformed("no entries");
    return out;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip();
    if (peek() != c) malformed(std::string("expected '") + c + "' at offset " + std::to_string(pos_));
    ++pos_;
  }

  std::string string_literal() {
    skip();
    const char q = peek();
    if (q != '\'' && q != '"') malformed("expected a quoted key at offset " + std::to_string(pos_));
    ++pos_;
    const auto end = s_.find(q, pos_);
    if (end == std::string_view::npos) malformed("unterminated key");
    std::string name(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return name;
  }

  double number() {
    skip();
    std::string buf;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == 'e' ||
          c == 'E' || c == '_') {
        if (c != '_') buf.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (buf.empty()) malformed("expected a number at offset " + std::to_string(pos_));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) malformed("bad number '" + buf + "'");
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::string> fenced_blocks(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    auto body_start = text.find('\n', open + 3);
    if (body_start == std::string_view::npos) break;
    ++body_start;
    auto close = text.find("```", body_start);
    const bool closed = close != std::string_view::npos;
    if (!closed) close = text.size();
    out.push_back(strip_blank_edges(text.substr(body_start, close - body_start)));
    if (!closed) break;
    pos = close + 3;
  }
  return out;
}

std::string extract_code_block(std::string_view text) {
  auto blocks = fenced_blocks(text);
  if (blocks.empty()) throw ExtractionError(ExtractionErrorKind::no_fence, "reply contains no fenced code block");
  return blocks.front();
}

std::vector<NamedRange> parse_parameter_ranges(std::string_view block) { return RangeParser(block).parse(); }

CodeAndRanges extract_code_and_ranges(std::string_view text) {
  auto blocks = fenced_blocks(text);
  if (blocks.empty()) throw ExtractionError(ExtractionErrorKind::no_fence, "reply contains no fenced code block");
  if (blocks.size() < 2) {
    throw ExtractionError(ExtractionErrorKind::missing_ranges, "reply lacks the parameter_ranges block");
  }
  return CodeAndRanges{blocks[0], parse_parameter_ranges(blocks[1])};
}

}  // namespace hsevo
