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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "flutes/term.h"

namespace flutes {

// `name := term ;`
struct Declaration {
  std::string name;
  Term body;
};

// Returns true for names that already denote stored terms.
using KnownNames = std::function<bool(std::string_view)>;

// Parses a `.flt` program:
//
//   program := (decl ";")*
//   decl    := IDENT ":=" term
//   term    := STRING | NUMBER | "{" fields? "}" | "[" terms? "]"
//            | IDENT "(" ")"            atom
//            | IDENT "(" terms ")"      predicate application
//            | IDENT                    alias or atom, see below
//   field   := STRING (":" | "=") term
//
// A bare identifier used as a predicate argument is always a term alias
// (possibly a forward reference). Anywhere else it is an alias when the name
// was declared earlier in the program or is reported by `known`, and an atom
// otherwise.
//
// Throws SyntaxError, or Error(kDuplicateName) when a name is declared twice.
std::vector<Declaration> parse_program(std::string_view text,
                                       const Taxonomy* taxonomy = nullptr,
                                       const KnownNames& known = {});

}  // namespace flutes
