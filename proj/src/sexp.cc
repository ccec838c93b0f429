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

#include "flutes/sexp.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>

#include <fmt/core.h>

#include "flutes/error.h"

namespace flutes {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Sexp read_one() {
    skip_space();
    Sexp s = read();
    skip_space();
    if (pos_ < text_.size()) fail("trailing characters after datum");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(message, line_, column_);
  }

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

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(peek()))) {
      advance();
    }
  }

  Sexp read() {
    if (pos_ >= text_.size()) fail("unexpected end of input");
    Sexp s;
    s.line = line_;
    s.column = column_;
    char c = peek();
    if (c == '(') {
      advance();
      s.kind = Sexp::Kind::kList;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) fail("unbalanced parenthesis");
        if (peek() == ')') {
          advance();
          return s;
        }
        s.items.push_back(read());
      }
    }
    if (c == ')') fail("unexpected ')'");
    if (c == '"') {
      s.kind = Sexp::Kind::kString;
      s.text = read_string();
      return s;
    }
    s.kind = Sexp::Kind::kSymbol;
    while (pos_ < text_.size()) {
      char d = peek();
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == '"') {
        break;
      }
      s.text.push_back(advance());
    }
    return s;
  }

  std::string read_string() {
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = advance();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) fail("unterminated escape");
      char e = advance();
      switch (e) {
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'x': {
          if (pos_ + 2 > text_.size()) fail("short \\x escape");
          unsigned value = 0;
          auto first = text_.data() + pos_;
          auto [ptr, ec] = std::from_chars(first, first + 2, value, 16);
          if (ec != std::errc() || ptr != first + 2) fail("bad \\x escape");
          advance();
          advance();
          out.push_back(static_cast<char>(value));
          break;
        }
        default:
          fail(fmt::format("unknown escape \\{}", e));
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

[[noreturn]] void bad(const Sexp& s, const std::string& message) {
  throw SyntaxError(message, s.line, s.column);
}

bool bare_symbol_ok(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!std::isalpha(head) && head != '_') return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) continue;
    switch (c) {
      case '_': case '-': case '.': case ':': case '/': case '+': case '*':
      case '!': case '?': case '<': case '>': case '=': case '@': case '$':
      case '%': case '&': case '~': case '^':
        continue;
      default:
        return false;
    }
  }
  return true;
}

void render_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void render_into(std::string& out, const Term& t);
void render_into(std::string& out, const Type& t);
void render_into(std::string& out, const Prop& p);

void render_concept_into(std::string& out, Concept c) {
  if (c.is_positional()) {
    out += fmt::format("#{}", c.position());
  } else if (bare_symbol_ok(c.name())) {
    out += c.name();
  } else {
    out += quote_string(c.name());
  }
}

void render_into(std::string& out, const Term& t) {
  std::visit(
      Overloaded{
          [&](const Num& n) {
            out += "(num ";
            render_number(out, n.value);
            out += ')';
          },
          [&](const Str& s) {
            out += "(str ";
            out += quote_string(s.value);
            out += ')';
          },
          [&](const Atom& a) {
            out += "(atom ";
            render_concept_into(out, a.value);
            out += ')';
          },
          [&](const Record& r) {
            out += "(record (";
            bool first = true;
            for (const auto& [label, value] : r.fields) {
              if (!first) out += ' ';
              first = false;
              out += '(';
              render_concept_into(out, label);
              out += ' ';
              render_into(out, value);
              out += ')';
            }
            out += "))";
          },
          [&](const List& l) {
            out += "(list";
            for (const auto& i : l.items) {
              out += ' ';
              render_into(out, i);
            }
            out += ')';
          },
          [&](const Bottom& b) {
            out += "(bottom ";
            render_concept_into(out, b.label);
            out += ')';
          },
          [&](const FieldSelect& f) {
            out += "(select ";
            render_into(out, f.base);
            out += ' ';
            render_concept_into(out, f.label);
            out += ')';
          },
          [&](const Var& v) {
            out += "(var ";
            out += quote_string(v.name);
            out += ')';
          },
          [&](const TermAlias& a) {
            out += "(alias ";
            out += quote_string(a.name);
            out += ')';
          },
      },
      static_cast<const TermNode::variant&>(t.node()));
}

void render_into(std::string& out, const Type& t) {
  std::visit(
      Overloaded{
          [&](const NumTy&) { out += "(numty)"; },
          [&](const StrTy&) { out += "(strty)"; },
          [&](const VoidTy&) { out += "(voidty)"; },
          [&](const ListTy& l) {
            out += "(listty ";
            render_into(out, l.element);
            out += ')';
          },
          [&](const RecordTy& r) {
            out += "(recordty (";
            bool first = true;
            for (const auto& [label, ty] : r.fields) {
              if (!first) out += ' ';
              first = false;
              out += '(';
              render_concept_into(out, label);
              out += ' ';
              render_into(out, ty);
              out += ')';
            }
            out += "))";
          },
          [&](const EnumTy& e) {
            out += "(enumty";
            for (Concept c : e.concepts) {
              out += ' ';
              render_concept_into(out, c);
            }
            out += ')';
          },
          [&](const SubsetTy& s) {
            out += "(subsetty ";
            render_into(out, s.binding_term);
            out += ' ';
            render_into(out, s.binding_type);
            out += ' ';
            render_into(out, s.prop);
            out += ')';
          },
          [&](const TyAlias& a) {
            out += "(tyalias ";
            out += quote_string(a.name);
            out += ')';
          },
      },
      static_cast<const TypeNode::variant&>(t.node()));
}

std::string_view op_symbol(BuiltinOp op) {
  switch (op) {
    case BuiltinOp::kLessThan: return "lt";
    case BuiltinOp::kLessEqual: return "le";
    case BuiltinOp::kGreaterThan: return "gt";
    case BuiltinOp::kGreaterEqual: return "ge";
    case BuiltinOp::kEqual: return "eq";
  }
  return "eq";
}

void render_into(std::string& out, const Prop& p) {
  std::visit(
      Overloaded{
          [&](const BuiltinPred& b) {
            out += "(pred ";
            out += op_symbol(b.op);
            for (const auto& a : b.args) {
              out += ' ';
              render_into(out, a);
            }
            out += ')';
          },
          [&](const PropAnd& a) {
            out += "(and ";
            render_into(out, a.lhs);
            out += ' ';
            render_into(out, a.rhs);
            out += ')';
          },
          [&](const PropOr& o) {
            out += "(or ";
            render_into(out, o.lhs);
            out += ' ';
            render_into(out, o.rhs);
            out += ')';
          },
          [&](const PropNot& n) {
            out += "(not ";
            render_into(out, n.body);
            out += ')';
          },
          [&](const Exists& e) {
            out += "(exists ";
            out += quote_string(e.var);
            out += ' ';
            render_into(out, e.bound);
            out += ' ';
            render_into(out, e.body);
            out += ')';
          },
          [&](const PropTrue&) { out += "(true)"; },
          [&](const PropFalse&) { out += "(false)"; },
          [&](const InSequence& s) {
            out += "(inseq ";
            render_into(out, s.element);
            for (const auto& t : s.sequence) {
              out += ' ';
              render_into(out, t);
            }
            out += ')';
          },
      },
      static_cast<const PropNode::variant&>(p.node()));
}

const std::string& head_of(const Sexp& s) {
  if (s.kind != Sexp::Kind::kList || s.items.empty() ||
      s.items.front().kind != Sexp::Kind::kSymbol) {
    bad(s, "expected a tagged list");
  }
  return s.items.front().text;
}

void expect_arity(const Sexp& s, std::size_t n) {
  if (s.items.size() != n + 1) {
    bad(s, fmt::format("'{}' takes {} argument(s), got {}", s.items.front().text,
                       n, s.items.size() - 1));
  }
}

double number_from_sexp(const Sexp& s) {
  if (s.kind != Sexp::Kind::kSymbol) bad(s, "expected a number");
  double value = 0;
  const char* first = s.text.data();
  const char* last = first + s.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    bad(s, fmt::format("malformed number '{}'", s.text));
  }
  return value;
}

}  // namespace

std::string quote_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          out += fmt::format("\\x{:02x}", static_cast<unsigned char>(c));
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

Sexp read_sexp(std::string_view text) { return Reader(text).read_one(); }

std::string render_sexp(const Term& t) {
  std::string out;
  render_into(out, t);
  return out;
}

std::string render_sexp(const Type& t) {
  std::string out;
  render_into(out, t);
  return out;
}

std::string render_sexp(const Prop& p) {
  std::string out;
  render_into(out, p);
  return out;
}

std::string render_concept(Concept c) {
  std::string out;
  render_concept_into(out, c);
  return out;
}

Concept concept_from_sexp(const Sexp& s) {
  if (s.kind == Sexp::Kind::kString) {
    if (s.text.empty()) bad(s, "empty concept");
    return mk_concept(s.text);
  }
  if (s.kind != Sexp::Kind::kSymbol) bad(s, "expected a concept");
  if (!s.text.empty() && s.text.front() == '#') {
    std::uint32_t position = 0;
    const char* first = s.text.data() + 1;
    const char* last = s.text.data() + s.text.size();
    auto [ptr, ec] = std::from_chars(first, last, position);
    if (ec != std::errc() || ptr != last || first == last) {
      bad(s, fmt::format("malformed positional concept '{}'", s.text));
    }
    return Concept::positional(position);
  }
  return mk_concept(s.text);
}

std::string string_from_sexp(const Sexp& s) {
  if (s.kind != Sexp::Kind::kString) bad(s, "expected a string");
  return s.text;
}

Term term_from_sexp(const Sexp& s) {
  const std::string& head = head_of(s);
  if (head == "num") {
    expect_arity(s, 1);
    return num_f(number_from_sexp(s.items[1]));
  }
  if (head == "str") {
    expect_arity(s, 1);
    return str(string_from_sexp(s.items[1]));
  }
  if (head == "atom") {
    expect_arity(s, 1);
    return Term(Atom{concept_from_sexp(s.items[1])});
  }
  if (head == "record") {
    expect_arity(s, 1);
    const Sexp& fields = s.items[1];
    if (fields.kind != Sexp::Kind::kList) bad(fields, "expected a field list");
    std::vector<Field> out;
    out.reserve(fields.items.size());
    for (const auto& f : fields.items) {
      if (f.kind != Sexp::Kind::kList || f.items.size() != 2) {
        bad(f, "expected (label term)");
      }
      out.emplace_back(concept_from_sexp(f.items[0]), term_from_sexp(f.items[1]));
    }
    try {
      return record_of(std::move(out));
    } catch (const Error& e) {
      bad(s, e.what());
    }
  }
  if (head == "list") {
    std::vector<Term> items;
    items.reserve(s.items.size() - 1);
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      items.push_back(term_from_sexp(s.items[i]));
    }
    return list(std::move(items));
  }
  if (head == "bottom") {
    expect_arity(s, 1);
    return Term(Bottom{concept_from_sexp(s.items[1])});
  }
  if (head == "select") {
    expect_arity(s, 2);
    return Term(FieldSelect{term_from_sexp(s.items[1]),
                            concept_from_sexp(s.items[2])});
  }
  if (head == "var") {
    expect_arity(s, 1);
    auto name = string_from_sexp(s.items[1]);
    if (name.empty()) bad(s, "empty variable name");
    return var(std::move(name));
  }
  if (head == "alias") {
    expect_arity(s, 1);
    auto name = string_from_sexp(s.items[1]);
    if (name.empty()) bad(s, "empty alias name");
    return term_name(std::move(name));
  }
  bad(s, fmt::format("unknown term head '{}'", head));
}

Type type_from_sexp(const Sexp& s) {
  const std::string& head = head_of(s);
  if (head == "numty") {
    expect_arity(s, 0);
    return num_ty();
  }
  if (head == "strty") {
    expect_arity(s, 0);
    return str_ty();
  }
  if (head == "voidty") {
    expect_arity(s, 0);
    return void_ty();
  }
  if (head == "listty") {
    expect_arity(s, 1);
    return list_ty(type_from_sexp(s.items[1]));
  }
  if (head == "recordty") {
    expect_arity(s, 1);
    const Sexp& fields = s.items[1];
    if (fields.kind != Sexp::Kind::kList) bad(fields, "expected a field list");
    std::vector<FieldType> out;
    out.reserve(fields.items.size());
    for (const auto& f : fields.items) {
      if (f.kind != Sexp::Kind::kList || f.items.size() != 2) {
        bad(f, "expected (label type)");
      }
      out.emplace_back(concept_from_sexp(f.items[0]), type_from_sexp(f.items[1]));
    }
    try {
      return record_ty_of(std::move(out));
    } catch (const Error& e) {
      bad(s, e.what());
    }
  }
  if (head == "enumty") {
    std::vector<Concept> concepts;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      concepts.push_back(concept_from_sexp(s.items[i]));
    }
    return enum_of(std::move(concepts));
  }
  if (head == "subsetty") {
    expect_arity(s, 3);
    try {
      return subset_ty(term_from_sexp(s.items[1]), type_from_sexp(s.items[2]),
                       prop_from_sexp(s.items[3]));
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      bad(s, e.what());
    }
  }
  if (head == "tyalias") {
    expect_arity(s, 1);
    auto name = string_from_sexp(s.items[1]);
    if (name.empty()) bad(s, "empty type name");
    return type_name(std::move(name));
  }
  bad(s, fmt::format("unknown type head '{}'", head));
}

Prop prop_from_sexp(const Sexp& s) {
  const std::string& head = head_of(s);
  if (head == "pred") {
    if (s.items.size() < 2 || s.items[1].kind != Sexp::Kind::kSymbol) {
      bad(s, "expected (pred OP term...)");
    }
    const std::string& op = s.items[1].text;
    BuiltinOp parsed;
    if (op == "lt") parsed = BuiltinOp::kLessThan;
    else if (op == "le") parsed = BuiltinOp::kLessEqual;
    else if (op == "gt") parsed = BuiltinOp::kGreaterThan;
    else if (op == "ge") parsed = BuiltinOp::kGreaterEqual;
    else if (op == "eq") parsed = BuiltinOp::kEqual;
    else bad(s.items[1], fmt::format("unknown predicate '{}'", op));
    if (s.items.size() != 4) bad(s, "builtin predicates take two terms");
    return pred(parsed, term_from_sexp(s.items[2]), term_from_sexp(s.items[3]));
  }
  if (head == "and") {
    expect_arity(s, 2);
    return conj(prop_from_sexp(s.items[1]), prop_from_sexp(s.items[2]));
  }
  if (head == "or") {
    expect_arity(s, 2);
    return disj(prop_from_sexp(s.items[1]), prop_from_sexp(s.items[2]));
  }
  if (head == "not") {
    expect_arity(s, 1);
    return negate(prop_from_sexp(s.items[1]));
  }
  if (head == "exists") {
    expect_arity(s, 3);
    auto name = string_from_sexp(s.items[1]);
    if (name.empty()) bad(s, "empty quantified variable");
    return exists(std::move(name), type_from_sexp(s.items[2]),
                  prop_from_sexp(s.items[3]));
  }
  if (head == "true") {
    expect_arity(s, 0);
    return prop_true();
  }
  if (head == "false") {
    expect_arity(s, 0);
    return prop_false();
  }
  if (head == "inseq") {
    if (s.items.size() < 2) bad(s, "inseq needs an element");
    std::vector<Term> seq;
    for (std::size_t i = 2; i < s.items.size(); ++i) {
      seq.push_back(term_from_sexp(s.items[i]));
    }
    return in_sequence(term_from_sexp(s.items[1]), std::move(seq));
  }
  bad(s, fmt::format("unknown proposition head '{}'", head));
}

Term parse_term_sexp(std::string_view text) {
  return term_from_sexp(read_sexp(text));
}

Type parse_type_sexp(std::string_view text) {
  return type_from_sexp(read_sexp(text));
}

Prop parse_prop_sexp(std::string_view text) {
  return prop_from_sexp(read_sexp(text));
}

std::variant<Term, Type, Prop> parse_sexp(std::string_view text) {
  Sexp s = read_sexp(text);
  const std::string& head = head_of(s);
  static const char* kTypeHeads[] = {"numty",  "strty",    "voidty",  "listty",
                                     "recordty", "enumty", "subsetty", "tyalias"};
  static const char* kPropHeads[] = {"pred", "and",  "or",    "not",
                                     "exists", "true", "false", "inseq"};
  for (const char* h : kTypeHeads) {
    if (head == h) return type_from_sexp(s);
  }
  for (const char* h : kPropHeads) {
    if (head == h) return prop_from_sexp(s);
  }
  return term_from_sexp(s);
}

}  // namespace flutes
