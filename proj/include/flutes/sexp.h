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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flutes/term.h"

namespace flutes {

// A raw datum of the storage syntax: a symbol, a quoted string or a
// parenthesized list. Positions are 1-based.
struct Sexp {
  enum class Kind { kSymbol, kString, kList };

  Kind kind = Kind::kList;
  std::string text;
  std::vector<Sexp> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_symbol(std::string_view s) const {
    return kind == Kind::kSymbol && text == s;
  }
};

// Reads exactly one datum; trailing whitespace is allowed, anything else is a
// SyntaxError.
Sexp read_sexp(std::string_view text);

// "..." with backslash escapes.
std::string quote_string(std::string_view s);

std::string render_sexp(const Term& t);
std::string render_sexp(const Type& t);
std::string render_sexp(const Prop& p);
std::string render_concept(Concept c);

Term term_from_sexp(const Sexp& s);
Type type_from_sexp(const Sexp& s);
Prop prop_from_sexp(const Sexp& s);
Concept concept_from_sexp(const Sexp& s);
std::string string_from_sexp(const Sexp& s);

Term parse_term_sexp(std::string_view text);
Type parse_type_sexp(std::string_view text);
Prop parse_prop_sexp(std::string_view text);

// Dispatches on the head symbol.
std::variant<Term, Type, Prop> parse_sexp(std::string_view text);

}  // namespace flutes
