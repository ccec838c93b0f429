// Copyright 2026 The Flutes Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flutes/parser.h"

#include <cctype>
#include <charconv>
#include <set>

#include <fmt/core.h>

#include "flutes/error.h"

namespace flutes {
namespace {

enum class Tok {
  kIdent,
  kString,
  kNumber,
  kDefine,  // :=
  kSemi,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kComma,
  kColon,
  kEquals,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kString: return "string";
    case Tok::kNumber: return "number";
    case Tok::kDefine: return "':='";
    case Tok::kSemi: return "';'";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kLBracket: return "'['";
    case Tok::kRBracket: return "']'";
    case Tok::kComma: return "','";
    case Tok::kColon: return "':'";
    case Tok::kEquals: return "'='";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = Tok::kEnd;
      return tok;
    }
    char c = peek();
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      tok.kind = Tok::kIdent;
      while (pos_ < text_.size()) {
        auto d = static_cast<unsigned char>(peek());
        if (!std::isalnum(d) && d != '_' && d != '-') break;
        tok.text.push_back(advance());
      }
      return tok;
    }
    if (std::isdigit(uc) ||
        (c == '-' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return number(tok);
    }
    if (c == '"') {
      tok.kind = Tok::kString;
      tok.text = string_literal();
      return tok;
    }
    advance();
    switch (c) {
      case ':':
        if (pos_ < text_.size() && peek() == '=') {
          advance();
          tok.kind = Tok::kDefine;
        } else {
          tok.kind = Tok::kColon;
        }
        return tok;
      case ';': tok.kind = Tok::kSemi; return tok;
      case '{': tok.kind = Tok::kLBrace; return tok;
      case '}': tok.kind = Tok::kRBrace; return tok;
      case '(': tok.kind = Tok::kLParen; return tok;
      case ')': tok.kind = Tok::kRParen; return tok;
      case '[': tok.kind = Tok::kLBracket; return tok;
      case ']': tok.kind = Tok::kRBracket; return tok;
      case ',': tok.kind = Tok::kComma; return tok;
      case '=': tok.kind = Tok::kEquals; return tok;
      default:
        throw SyntaxError(fmt::format("unexpected character '{}'", c), tok.line,
                          tok.column);
    }
  }

 private:
  char peek() const { return text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token number(Token& tok) {
    std::size_t start = pos_;
    if (peek() == '-') advance();
    auto digits = [this] {
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(peek()))) {
        advance();
      }
    };
    digits();
    if (pos_ + 1 < text_.size() && peek() == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      advance();
      digits();
    }
    if (pos_ < text_.size() && (peek() == 'e' || peek() == 'E')) {
      std::size_t save = pos_;
      std::size_t save_col = column_;
      advance();
      if (pos_ < text_.size() && (peek() == '+' || peek() == '-')) advance();
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
        digits();
      } else {
        pos_ = save;
        column_ = save_col;
      }
    }
    tok.kind = Tok::kNumber;
    tok.text = std::string(text_.substr(start, pos_ - start));
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, tok.number);
    if (ec != std::errc() || ptr != last) {
      throw SyntaxError(fmt::format("malformed number '{}'", tok.text), tok.line,
                        tok.column);
    }
    return tok;
  }

  std::string string_literal() {
    std::size_t line = line_;
    std::size_t column = column_;
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) {
        throw SyntaxError("unterminated string", line, column);
      }
      char c = advance();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) throw SyntaxError("unterminated escape", line_, column_);
      char e = advance();
      switch (e) {
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default:
          throw SyntaxError(fmt::format("unknown escape \\{}", e), line_, column_);
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const Taxonomy* taxonomy, const KnownNames& known)
      : lexer_(text), taxonomy_(taxonomy), known_(known) {
    tok_ = lexer_.next();
  }

  std::vector<Declaration> program() {
    std::vector<Declaration> out;
    while (tok_.kind != Tok::kEnd) {
      Token name = expect(Tok::kIdent);
      if (declared_.contains(name.text)) {
        throw Error(ErrorCode::kDuplicateName,
                    fmt::format("{}:{}: '{}' is already declared", name.line,
                                name.column, name.text));
      }
      expect(Tok::kDefine);
      Term body = term(false);
      expect(Tok::kSemi);
      declared_.insert(name.text);
      out.push_back({name.text, std::move(body)});
    }
    return out;
  }

 private:
  [[noreturn]] void unexpected(std::string_view wanted) const {
    throw SyntaxError(fmt::format("expected {}, found {}", wanted,
                                  tok_.kind == Tok::kEnd ? std::string("end of input")
                                  : tok_.text.empty()
                                      ? std::string(describe(tok_.kind))
                                      : fmt::format("'{}'", tok_.text)),
                      tok_.line, tok_.column);
  }

  Token expect(Tok kind) {
    if (tok_.kind != kind) unexpected(describe(kind));
    Token t = std::move(tok_);
    tok_ = lexer_.next();
    return t;
  }

  bool accept(Tok kind) {
    if (tok_.kind != kind) return false;
    tok_ = lexer_.next();
    return true;
  }

  bool is_known(const std::string& name) const {
    return declared_.contains(name) || (known_ && known_(name));
  }

  Term term(bool argument_position) {
    switch (tok_.kind) {
      case Tok::kString: return str(expect(Tok::kString).text);
      case Tok::kNumber: return num_f(expect(Tok::kNumber).number);
      case Tok::kLBrace: return record_literal();
      case Tok::kLBracket: {
        expect(Tok::kLBracket);
        std::vector<Term> items;
        if (!accept(Tok::kRBracket)) {
          do {
            items.push_back(term(false));
          } while (accept(Tok::kComma));
          expect(Tok::kRBracket);
        }
        return list(std::move(items));
      }
      case Tok::kIdent: {
        Token ident = expect(Tok::kIdent);
        if (accept(Tok::kLParen)) {
          if (accept(Tok::kRParen)) return atom(ident.text);
          std::vector<Term> args;
          do {
            args.push_back(term(true));
          } while (accept(Tok::kComma));
          expect(Tok::kRParen);
          return pred_app(ident.text, std::move(args));
        }
        if (argument_position || is_known(ident.text)) {
          return term_name(ident.text);
        }
        return atom(ident.text);
      }
      default:
        unexpected("a term");
    }
  }

  Term record_literal() {
    Token open = expect(Tok::kLBrace);
    std::vector<std::pair<std::string, Term>> fields;
    if (!accept(Tok::kRBrace)) {
      do {
        Token label = expect(Tok::kString);
        if (label.text.empty()) {
          throw SyntaxError("empty field label", label.line, label.column);
        }
        if (!accept(Tok::kColon) && !accept(Tok::kEquals)) {
          unexpected("':' or '='");
        }
        fields.emplace_back(label.text, term(false));
      } while (accept(Tok::kComma));
      expect(Tok::kRBrace);
    }
    try {
      return taxonomy_ ? record(fields, *taxonomy_) : record(fields);
    } catch (const Error& e) {
      throw SyntaxError(e.what(), open.line, open.column);
    }
  }

  Lexer lexer_;
  Token tok_;
  const Taxonomy* taxonomy_;
  const KnownNames& known_;
  std::set<std::string> declared_;
};

}  // namespace

std::vector<Declaration> parse_program(std::string_view text,
                                       const Taxonomy* taxonomy,
                                       const KnownNames& known) {
  return Parser(text, taxonomy, known).program();
}

}  // namespace flutes
