#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "source.hpp"

namespace vsched {

enum class Tok {
  Ident,      // also keywords; the parser decides
  SysIdent,   // $display, $time, ...
  Number,     // unsized decimal
  BasedLit,   // [size]'<base><digits>, text holds the whole spelling
  String,     // text holds the unescaped contents
  Punct,      // operators and delimiters, text holds the spelling
  Directive,  // `define and friends
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;

  bool is(Tok k, std::string_view t) const { return kind == k && text == t; }
  bool punct(std::string_view t) const { return is(Tok::Punct, t); }
  bool word(std::string_view t) const { return is(Tok::Ident, t); }
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  size_t pos_ = 0;
  uint32_t line_ = 1, col_ = 1;

  char peek(size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  SourceLoc here() const { return {line_, col_}; }

  void advance() {
    if (pos_ >= src_.size()) return;
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else if (c == '/' && peek(1) == '*') {
        SourceLoc start = here();
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (peek() == '\0') throw SyntaxError("unterminated block comment", start);
          advance();
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  }

  Token make(Tok k, std::string text, SourceLoc loc) { return Token{k, std::move(text), loc}; }

  std::string take_while(bool (*pred)(char)) {
    std::string s;
    while (pred(peek())) {
      s.push_back(peek());
      advance();
    }
    return s;
  }

  // Base letter and digits following a `'`; `start` is where the literal began.
  Token based_rest(std::string prefix, SourceLoc start) {
    prefix.push_back('\'');
    advance();  // '
    if (peek() == 's' || peek() == 'S') {
      prefix.push_back(peek());
      advance();
    }
    if (!std::isalpha(static_cast<unsigned char>(peek())))
      throw SyntaxError("malformed based literal", start);
    prefix.push_back(peek());
    advance();
    while (peek() == ' ' || peek() == '\t') advance();
    std::string digits = take_while([](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
    });
    if (digits.empty()) throw SyntaxError("based literal has no digits", start);
    return make(Tok::BasedLit, prefix + digits, start);
  }

  Token next() {
    SourceLoc start = here();
    char c = peek();
    if (c == '\0') return make(Tok::End, "", start);
    if (ident_start(c)) return make(Tok::Ident, take_while(ident_char), start);
    if (c == '\\') throw SyntaxError("escaped identifiers are not supported", start);
    if (c == '$') {
      advance();
      return make(Tok::SysIdent, "$" + take_while(ident_char), start);
    }
    if (c == '`') {
      advance();
      return make(Tok::Directive, "`" + take_while(ident_char), start);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits = take_while([](char d) {
        return std::isdigit(static_cast<unsigned char>(d)) || d == '_';
      });
      // Allow whitespace between a size and its base, as Verilog does.
      size_t save_pos = pos_;
      uint32_t save_line = line_, save_col = col_;
      while (peek() == ' ' || peek() == '\t') advance();
      if (peek() == '\'' && std::isalpha(static_cast<unsigned char>(peek(1))))
        return based_rest(digits, start);
      pos_ = save_pos;
      line_ = save_line;
      col_ = save_col;
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))
        throw UnsupportedError("real number", start);
      return make(Tok::Number, digits, start);
    }
    if (c == '\'') {
      if (std::isalpha(static_cast<unsigned char>(peek(1)))) return based_rest("", start);
      advance();
      if (peek() == '{') {
        advance();
        return make(Tok::Punct, "'{", start);
      }
      if (peek() == '0' || peek() == '1' || peek() == 'x' || peek() == 'z')
        throw UnsupportedError("unbased unsized literal", start);
      throw SyntaxError("stray apostrophe", start);
    }
    if (c == '"') return string_lit(start);

    static const char* const puncts[] = {
        "===", "!==", "<<<", ">>>", "->", "<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
        "~&", "~|", "~^", "^~", "**", "::", "+:", "-:",
        "(", ")", "[", "]", "{", "}", ";", ",", ":", ".", "#", "@", "=", "<", ">", "!",
        "~", "&", "|", "^", "+", "-", "*", "/", "%", "?",
    };
    for (const char* p : puncts) {
      std::string_view pv(p);
      if (src_.substr(pos_, pv.size()) == pv) {
        for (size_t i = 0; i < pv.size(); ++i) advance();
        return make(Tok::Punct, std::string(pv), start);
      }
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", start);
  }

  Token string_lit(SourceLoc start) {
    advance();  // opening quote
    std::string s;
    for (;;) {
      char c = peek();
      if (c == '\0' || c == '\n') throw SyntaxError("unterminated string literal", start);
      advance();
      if (c == '"') break;
      if (c == '\\') {
        char e = peek();
        advance();
        switch (e) {
          case 'n': s.push_back('\n'); break;
          case 't': s.push_back('\t'); break;
          case '\\': s.push_back('\\'); break;
          case '"': s.push_back('"'); break;
          default: throw SyntaxError(std::string("unknown escape '\\") + e + "'", start);
        }
        continue;
      }
      s.push_back(c);
    }
    return make(Tok::String, s, start);
  }
};

inline std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

}  // namespace vsched
