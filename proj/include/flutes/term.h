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
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "flutes/taxonomy.h"

namespace flutes {

struct TermNode;
struct TypeNode;
struct PropNode;

// Immutable graph value. Copies share structure; all three languages below
// are persistent values and safe to share across threads.
class Term {
 public:
  Term() = delete;
  explicit Term(TermNode node);

  const TermNode& node() const { return *node_; }

  template <class Alt>
  const Alt* as() const;
  template <class Alt>
  bool is() const {
    return as<Alt>() != nullptr;
  }

  friend bool operator==(const Term& a, const Term& b);

 private:
  std::shared_ptr<const TermNode> node_;
};

class Type {
 public:
  Type() = delete;
  explicit Type(TypeNode node);

  const TypeNode& node() const { return *node_; }

  template <class Alt>
  const Alt* as() const;
  template <class Alt>
  bool is() const {
    return as<Alt>() != nullptr;
  }

  friend bool operator==(const Type& a, const Type& b);

 private:
  std::shared_ptr<const TypeNode> node_;
};

class Prop {
 public:
  Prop() = delete;
  explicit Prop(PropNode node);

  const PropNode& node() const { return *node_; }

  template <class Alt>
  const Alt* as() const;
  template <class Alt>
  bool is() const {
    return as<Alt>() != nullptr;
  }

  friend bool operator==(const Prop& a, const Prop& b);

 private:
  std::shared_ptr<const PropNode> node_;
};

using Field = std::pair<Concept, Term>;
using FieldType = std::pair<Concept, Type>;

// ---- terms ----------------------------------------------------------------

struct Num {
  double value;
};
struct Str {
  std::string value;
};
struct Atom {
  Concept value;
};
// Fields are sorted by compare() and pairwise non-equivalent.
struct Record {
  std::vector<Field> fields;
};
struct List {
  std::vector<Term> items;
};
// An essential property whose value is unknown.
struct Bottom {
  Concept label;
};
struct FieldSelect {
  Term base;
  Concept label;
};
struct Var {
  std::string name;
};
struct TermAlias {
  std::string name;
};

struct TermNode : std::variant<Num, Str, Atom, Record, List, Bottom,
                               FieldSelect, Var, TermAlias> {
  using variant::variant;
};

// ---- propositions ---------------------------------------------------------

enum class BuiltinOp { kLessThan, kLessEqual, kGreaterThan, kGreaterEqual, kEqual };

struct BuiltinPred {
  BuiltinOp op;
  std::vector<Term> args;
};
struct PropAnd {
  Prop lhs;
  Prop rhs;
};
struct PropOr {
  Prop lhs;
  Prop rhs;
};
struct PropNot {
  Prop body;
};
struct Exists {
  std::string var;
  Type bound;
  Prop body;
};
struct PropTrue {};
struct PropFalse {};
struct InSequence {
  Term element;
  std::vector<Term> sequence;
};

struct PropNode : std::variant<BuiltinPred, PropAnd, PropOr, PropNot, Exists,
                               PropTrue, PropFalse, InSequence> {
  using variant::variant;
};

// ---- types ----------------------------------------------------------------

struct NumTy {};
struct StrTy {};
struct ListTy {
  Type element;
};
struct RecordTy {
  std::vector<FieldType> fields;
};
// Sorted by compare(), duplicates removed.
struct EnumTy {
  std::vector<Concept> concepts;
};
struct VoidTy {};
struct SubsetTy {
  Term binding_term;
  Type binding_type;
  Prop prop;
};
struct TyAlias {
  std::string name;
};

struct TypeNode
    : std::variant<NumTy, StrTy, ListTy, RecordTy, EnumTy, VoidTy, SubsetTy,
                   TyAlias> {
  using variant::variant;
};

template <class Alt>
const Alt* Term::as() const {
  return std::get_if<Alt>(static_cast<const TermNode::variant*>(node_.get()));
}
template <class Alt>
const Alt* Type::as() const {
  return std::get_if<Alt>(static_cast<const TypeNode::variant*>(node_.get()));
}
template <class Alt>
const Alt* Prop::as() const {
  return std::get_if<Alt>(static_cast<const PropNode::variant*>(node_.get()));
}

std::size_t hash_value(const Term& t);
struct TermHash {
  std::size_t operator()(const Term& t) const { return hash_value(t); }
};

// ---- constructors ---------------------------------------------------------
//
// These keep terms and types well formed. Record constructors intern labels,
// sort fields and reject two labels the taxonomy considers equivalent.

Term str(std::string value);
Term num(std::int64_t value);
Term num_f(double value);
Term list(std::vector<Term> items);
Term atom(std::string_view name);
Term bottom(std::string_view label);
Term var(std::string name);
Term term_name(std::string name);

Term record(const std::vector<std::pair<std::string, Term>>& fields,
            const Taxonomy& taxonomy);
Term record(const std::vector<std::pair<std::string, Term>>& fields);
Term record_of(std::vector<Field> fields, const Taxonomy* taxonomy = nullptr);

// Predicate application in the positional-record encoding:
//   {name: {#0: args[0], #1: args[1], ...}}
Term pred_app(std::string_view name, std::vector<Term> args);
Term triple(std::string_view name, Term first, Term second);

Term record_select(Term base, std::string_view label);
Term pred_arg_select(Term base, std::uint32_t position);

Type num_ty();
Type str_ty();
Type void_ty();
Type list_ty(Type element);
Type enum_ty(const std::vector<std::string>& concepts);
Type enum_of(std::vector<Concept> concepts);
Type type_name(std::string name);
Type record_ty(const std::vector<std::pair<std::string, Type>>& fields,
               const Taxonomy& taxonomy);
Type record_ty(const std::vector<std::pair<std::string, Type>>& fields);
Type record_ty_of(std::vector<FieldType> fields,
                  const Taxonomy* taxonomy = nullptr);
Type pred_ty(std::string_view name, std::vector<Type> args);
Type triple_ty(std::string_view name, Type first, Type second);

// Throws Error(kConstruction) when a quantifier in prop captures a free
// variable of the binding term.
Type subset_ty(Term binding_term, Type binding_type, Prop prop);

Prop pred(BuiltinOp op, Term lhs, Term rhs);
Prop eq(Term lhs, Term rhs);
Prop conj(Prop lhs, Prop rhs);
Prop disj(Prop lhs, Prop rhs);
Prop negate(Prop body);
Prop exists(std::string var, Type bound, Prop body);
Prop prop_true();
Prop prop_false();
Prop in_sequence(Term element, std::vector<Term> sequence);

// ---- variables ------------------------------------------------------------

using Substitution = std::map<std::string, Term, std::less<>>;

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Prop& p);
bool is_ground(const Term& t);
// Whether t contains a field or argument selection anywhere.
bool has_selection(const Term& t);

// Capture-avoiding: bound variables are untouched and binders that would
// capture a substituted term's free variable are renamed.
Term substitute(const Substitution& s, const Term& t);
Prop substitute(const Substitution& s, const Prop& p);

// substitute(compose(a, b), t) == substitute(b, substitute(a, t)).
Substitution compose(const Substitution& first, const Substitution& second);

// Names of all aliases referenced anywhere inside t, sorted.
std::set<std::string> alias_names(const Term& t);

}  // namespace flutes
