#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hsevo::python {

enum class TokenKind { name, number, string, op, comment, newline, indent, dedent, end };

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;
  // Byte offsets into the original source; empty for synthetic tokens.
  std::size_t begin = 0;
  std::size_t end = 0;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::op, t); }
};

// Tokenizes Python source. Emits comment tokens, one newline token per
// logical line, indent/dedent tokens and a final end token. Blank and
// comment-only lines produce no newline token.
//
// Throws ParseError on unterminated strings, unbalanced brackets,
// inconsistent dedents and characters outside the language.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

// A logical line with its indentation depth and its tokens (no comments,
// no layout tokens).
struct LogicalLine {
  int depth = 0;
  std::vector<Token> tokens;
};

// Groups tokens into logical lines and checks block structure: a line
// ending in ':' must be followed by an indented block and an indent may
// only follow such a line.
std::vector<LogicalLine> logical_lines(const std::vector<Token>& tokens);

// Non-layout, non-comment tokens in order.
std::vector<Token> significant_tokens(const std::vector<Token>& tokens);

}  // namespace hsevo::python
