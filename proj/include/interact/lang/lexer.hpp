#pragma once

#include "interact/scene/diagnostic.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace interact::lang {

enum class TokenKind {
  kIdent,
  kNumber,
  kString,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kComma,
  kSemicolon,
  kColon,
  kEquals,
  kDot,
  kAndAnd,
  kOrOr,
  kBang,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;   // identifier text, number lexeme, or decoded string contents
  double number = 0.0;
  SourceSpan span;
};

/// Splits `.itx` source into tokens. Lexical problems become diagnostics
/// (E_LEX_CHAR, E_LEX_STRING, E_LEX_UTF8) and the offending bytes are
/// skipped; the token list always ends with kEnd.
std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags);

const char* token_kind_name(TokenKind k);

/// Maps byte offsets to 1-based line/column.
class LineIndex {
 public:
  explicit LineIndex(std::string_view src);
  SourceSpan span(std::size_t offset, std::size_t length) const;

 private:
  std::vector<std::size_t> line_starts_;
};

}  // namespace interact::lang
