#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

namespace pwlmbqi::smtlib {

struct ParseError : std::runtime_error {
  enum class Kind { Syntax, Unsupported, Sort };
  Kind kind;
  int line, col;

  ParseError(Kind k, const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                           std::to_string(col_)),
        kind(k),
        line(line_),
        col(col_) {}
};

struct Token {
  enum class Type { LParen, RParen, Symbol, Keyword, Numeral, String, End };
  Type type = Type::End;
  std::string text;
  int line = 1, col = 1;
};

inline bool is_simple_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '~': case '!': case '@': case '$': case '%': case '^': case '&':
    case '*': case '_': case '-': case '+': case '=': case '<': case '>':
    case '.': case '?': case '/':
      return true;
    default:
      return false;
  }
}

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_trivia();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (c == '(') {
      bump();
      tok_.type = Token::Type::LParen;
      tok_.text = "(";
      return;
    }
    if (c == ')') {
      bump();
      tok_.type = Token::Type::RParen;
      tok_.text = ")";
      return;
    }
    if (c == '"') {
      bump();
      std::string out;
      while (true) {
        if (pos_ >= src_.size())
          throw ParseError(ParseError::Kind::Syntax, "unterminated string", tok_.line, tok_.col);
        char d = src_[pos_];
        bump();
        if (d == '"') {
          if (pos_ < src_.size() && src_[pos_] == '"') {
            out.push_back('"');
            bump();
            continue;
          }
          break;
        }
        out.push_back(d);
      }
      tok_.type = Token::Type::String;
      tok_.text = std::move(out);
      return;
    }
    if (c == '|') {
      bump();
      std::string out;
      while (true) {
        if (pos_ >= src_.size())
          throw ParseError(ParseError::Kind::Syntax, "unterminated quoted symbol", tok_.line,
                           tok_.col);
        char d = src_[pos_];
        bump();
        if (d == '|') break;
        out.push_back(d);
      }
      tok_.type = Token::Type::Symbol;
      tok_.text = std::move(out);
      return;
    }
    if (c == ':') {
      bump();
      std::string out;
      while (pos_ < src_.size() && is_simple_symbol_char(src_[pos_])) {
        out.push_back(src_[pos_]);
        bump();
      }
      tok_.type = Token::Type::Keyword;
      tok_.text = std::move(out);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string out;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        out.push_back(src_[pos_]);
        bump();
      }
      if (pos_ < src_.size() && src_[pos_] == '.')
        throw ParseError(ParseError::Kind::Unsupported, "decimal literals are not supported",
                         tok_.line, tok_.col);
      tok_.type = Token::Type::Numeral;
      tok_.text = std::move(out);
      return;
    }
    if (is_simple_symbol_char(c)) {
      std::string out;
      while (pos_ < src_.size() && is_simple_symbol_char(src_[pos_])) {
        out.push_back(src_[pos_]);
        bump();
      }
      tok_.type = Token::Type::Symbol;
      tok_.text = std::move(out);
      return;
    }
    throw ParseError(ParseError::Kind::Syntax, std::string("unexpected character '") + c + "'",
                     line_, col_);
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace pwlmbqi::smtlib
