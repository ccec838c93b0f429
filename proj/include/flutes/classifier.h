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

#include <chrono>
#include <cstddef>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flutes/store.h"
#include "flutes/term.h"

namespace flutes {

// ---- unification ------------------------------------------------------------

// Most general unifier of a and b extending `bindings`, fully applied.
// Aliases are constants; records unify fieldwise on identical label lists.
std::optional<Substitution> unify(const Term& a, const Term& b,
                                  const Substitution& bindings = {});

// ---- skolemization ----------------------------------------------------------

// kEquality is an equation between patterns: a quantified variable standing
// alone on one side denotes its member's term, one nested inside a pattern
// the member's name, and the sides unify. Builtins, equations over
// selections and InSequence compare evaluated values, with quantified
// variables denoting their members' terms; they wait until ground and fail
// if they never become ground or do not evaluate. A negated equation holds
// when both sides are ground and differ.
struct Literal {
  enum class Kind { kEquality, kBuiltin, kInSequence };
  Kind kind;
  bool negated = false;
  // The atomic proposition: a BuiltinPred or an InSequence.
  Prop atom;
};

struct Disjunct {
  std::vector<Literal> literals;
  // Indices into SkolemClause::skolems whose quantifier encloses one of the
  // literals, in quantifier order.
  std::vector<std::size_t> skolems;
};

struct SkolemClause {
  // (variable, class) in quantifier order, renamed apart.
  std::vector<std::pair<std::string, std::string>> skolems;
  std::vector<Disjunct> disjuncts;
};

// Strips the quantifiers, pushes negation to the atoms and distributes
// disjunction. Throws Error(kUnsupportedForm) for a quantifier under
// negation or one not bounded by a class name.
SkolemClause skolemize(const SubsetTy& s);

std::string render_clause(const SkolemClause& c);

// ---- dependency graph -------------------------------------------------------

// Class -> classes named anywhere in its definition.
std::map<std::string, std::set<std::string>> dependency_graph(const Store& store);

// Dependencies before dependents, ties in definition order. Throws
// Error(kCyclicClasses).
std::vector<std::string> class_order(const Store& store);

// ---- classification ---------------------------------------------------------

// Moves every untyped term whose type can be inferred to the typed
// collection, repeating until no more terms can be typed.
std::size_t promote_untyped(Store& store);

// Candidate members for every other literal-bound quantified variable of a
// disjunct once `skolem` is fixed to the member named `member`. Variables
// whose literal shares no ground name get the full member list.
std::map<std::string, std::vector<std::string>> prune_candidates(
    const Store& store, const SkolemClause& clause, std::size_t disjunct,
    const std::string& skolem, const std::string& member);

struct FindOptions {
  std::size_t workers = 1;
  // Restrict candidates through the containment adjacency.
  bool prune = true;
  // Only consider work above the stored watermarks.
  bool incremental = true;
};

struct ClassReport {
  std::string name;
  // Typed terms (static classes) or candidate members (subset classes)
  // examined.
  std::size_t scanned = 0;
  // Members added.
  std::size_t matched = 0;
  std::chrono::duration<double, std::milli> elapsed{};
};

struct FindReport {
  std::size_t promoted = 0;
  std::vector<ClassReport> classes;
  std::chrono::duration<double, std::milli> elapsed{};

  const ClassReport* find(std::string_view name) const;
  // key<TAB>value lines; elapsed lines are omitted unless `timings`.
  std::string render(bool timings = true) const;
};

// Promotes untyped terms, then populates every class in dependency order.
// Throws Error(kCyclicClasses) before doing any work.
FindReport find_members(Store& store, const FindOptions& options = {});

}  // namespace flutes
