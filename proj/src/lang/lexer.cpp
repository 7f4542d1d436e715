#include "interact/lang/lexer.hpp"

#include <algorithm>
#include <charconv>

namespace interact::lang {

LineIndex::LineIndex(std::string_view src) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '\n') line_starts_.push_back(i + 1);
  }
}

SourceSpan LineIndex::span(std::size_t offset, std::size_t length) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  const auto line = static_cast<std::size_t>(it - line_starts_.begin());
  return {offset, line, offset - line_starts_[line - 1] + 1, length};
}

const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::kIdent: return "identifier";
    case TokenKind::kNumber: return "number";
    case TokenKind::kString: return "string";
    case TokenKind::kLBrace: return "'{'";
    case TokenKind::kRBrace: return "'}'";
    case TokenKind::kLParen: return "'('";
    case TokenKind::kRParen: return "')'";
    case TokenKind::kComma: return "','";
    case TokenKind::kSemicolon: return "';'";
    case TokenKind::kColon: return "':'";
    case TokenKind::kEquals: return "'='";
    case TokenKind::kDot: return "'.'";
    case TokenKind::kAndAnd: return "'&&'";
    case TokenKind::kOrOr: return "'||'";
    case TokenKind::kBang: return "'!'";
    case TokenKind::kEnd: return "end of input";
  }
  return "?";
}

namespace {

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c) || c == '-'; }

// Length of the UTF-8 sequence starting at s[i], or 0 if it is malformed.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  unsigned min_cp = 0;
  unsigned cp = 0;
  if (b0 < 0x80) return 1;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, min_cp = 0x80, cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, min_cp = 0x800, cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, min_cp = 0x10000, cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), lines_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      const std::size_t start = pos_;
      const char c = src_[pos_];
      if (is_ident_start(c)) {
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        out.push_back(make(TokenKind::kIdent, start, std::string(src_.substr(start, pos_ - start))));
      } else if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        lex_number(out);
      } else if (c == '"') {
        lex_string(out);
      } else if (c == '&' || c == '|') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == c) {
          pos_ += 2;
          out.push_back(make(c == '&' ? TokenKind::kAndAnd : TokenKind::kOrOr, start, {}));
        } else {
          ++pos_;
          report("E_LEX_CHAR", start, 1, std::string("unexpected character '") + c + "' (did you mean '" + c + c + "'?)");
        }
      } else {
        const TokenKind k = single_char_kind(c);
        if (k == TokenKind::kEnd) {
          const std::size_t n = utf8_sequence_length(src_, pos_);
          if (n == 0) {
            ++pos_;
            report("E_LEX_UTF8", start, 1, "invalid UTF-8 byte");
          } else {
            pos_ += n;
            report("E_LEX_CHAR", start, n, "unexpected character");
          }
        } else {
          ++pos_;
          out.push_back(make(k, start, {}));
        }
      }
    }
    Token end;
    end.kind = TokenKind::kEnd;
    end.span = lines_.span(src_.size(), 0);
    out.push_back(std::move(end));
    return out;
  }

 private:
  static TokenKind single_char_kind(char c) {
    switch (c) {
      case '{': return TokenKind::kLBrace;
      case '}': return TokenKind::kRBrace;
      case '(': return TokenKind::kLParen;
      case ')': return TokenKind::kRParen;
      case ',': return TokenKind::kComma;
      case ';': return TokenKind::kSemicolon;
      case ':': return TokenKind::kColon;
      case '=': return TokenKind::kEquals;
      case '.': return TokenKind::kDot;
      case '!': return TokenKind::kBang;
      default: return TokenKind::kEnd;
    }
  }

  Token make(TokenKind k, std::size_t start, std::string text) const {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.span = lines_.span(start, pos_ - start);
    return t;
  }

  void report(const char* code, std::size_t start, std::size_t len, std::string msg) {
    diags_.push_back({Severity::kError, code, std::move(msg), {}, lines_.span(start, len)});
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance_checked();
      } else if (src_.substr(pos_, 2) == "/*") {
        const std::size_t start = pos_;
        pos_ += 2;
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance_checked();
        if (pos_ >= src_.size()) {
          report("E_LEX_COMMENT", start, 2, "unterminated block comment");
        } else {
          pos_ += 2;
        }
      } else {
        break;
      }
    }
  }

  // Advances one UTF-8 character, reporting malformed sequences.
  void advance_checked() {
    const std::size_t n = utf8_sequence_length(src_, pos_);
    if (n == 0) {
      report("E_LEX_UTF8", pos_, 1, "invalid UTF-8 byte");
      ++pos_;
    } else {
      pos_ += n;
    }
  }

  void lex_number(std::vector<Token>& out) {
    const std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    const std::string_view lexeme = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (res.ec != std::errc() || res.ptr != lexeme.data() + lexeme.size()) {
      report("E_LEX_NUMBER", start, lexeme.size(), "number '" + std::string(lexeme) + "' is out of range");
      return;
    }
    Token t = make(TokenKind::kNumber, start, std::string(lexeme));
    t.number = value;
    out.push_back(std::move(t));
  }

  void lex_string(std::vector<Token>& out) {
    const std::size_t start = pos_;
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        report("E_LEX_STRING", start, pos_ - start, "unterminated string literal");
        return;
      }
      const char c = src_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) {
          ++pos_;
          continue;
        }
        const char e = src_[pos_ + 1];
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default:
            report("E_LEX_STRING", pos_, 2, "unknown escape sequence");
            break;
        }
        pos_ += 2;
        continue;
      }
      const std::size_t n = utf8_sequence_length(src_, pos_);
      if (n == 0) {
        report("E_LEX_UTF8", pos_, 1, "invalid UTF-8 byte in string");
        ++pos_;
        continue;
      }
      value.append(src_.substr(pos_, n));
      pos_ += n;
    }
    out.push_back(make(TokenKind::kString, start, std::move(value)));
  }

  std::string_view src_;
  LineIndex lines_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags) { return Lexer(src, diags).run(); }

}  // namespace interact::lang
