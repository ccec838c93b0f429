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

#include "flutes/term.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

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

const TermNode::variant& base(const Term& t) { return t.node(); }
const TypeNode::variant& base(const Type& t) { return t.node(); }
const PropNode::variant& base(const Prop& p) { return p.node(); }

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

bool same_num(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

Term::Term(TermNode node)
    : node_(std::make_shared<const TermNode>(std::move(node))) {}
Type::Type(TypeNode node)
    : node_(std::make_shared<const TypeNode>(std::move(node))) {}
Prop::Prop(PropNode node)
    : node_(std::make_shared<const PropNode>(std::move(node))) {}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = base(a);
  const auto& y = base(b);
  if (x.index() != y.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Num& n) { return same_num(n.value, std::get<Num>(y).value); },
          [&](const Str& s) { return s.value == std::get<Str>(y).value; },
          [&](const Atom& c) { return c.value == std::get<Atom>(y).value; },
          [&](const Record& r) {
            const auto& o = std::get<Record>(y).fields;
            if (r.fields.size() != o.size()) return false;
            for (std::size_t i = 0; i < o.size(); ++i) {
              if (!(r.fields[i].first == o[i].first) ||
                  !(r.fields[i].second == o[i].second)) {
                return false;
              }
            }
            return true;
          },
          [&](const List& l) { return l.items == std::get<List>(y).items; },
          [&](const Bottom& c) {
            return c.label == std::get<Bottom>(y).label;
          },
          [&](const FieldSelect& f) {
            const auto& o = std::get<FieldSelect>(y);
            return f.label == o.label && f.base == o.base;
          },
          [&](const Var& v) { return v.name == std::get<Var>(y).name; },
          [&](const TermAlias& n) {
            return n.name == std::get<TermAlias>(y).name;
          },
      },
      x);
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = base(a);
  const auto& y = base(b);
  if (x.index() != y.index()) return false;
  return std::visit(
      Overloaded{
          [&](const NumTy&) { return true; },
          [&](const StrTy&) { return true; },
          [&](const VoidTy&) { return true; },
          [&](const ListTy& l) {
            return l.element == std::get<ListTy>(y).element;
          },
          [&](const RecordTy& r) {
            const auto& o = std::get<RecordTy>(y).fields;
            if (r.fields.size() != o.size()) return false;
            for (std::size_t i = 0; i < o.size(); ++i) {
              if (!(r.fields[i].first == o[i].first) ||
                  !(r.fields[i].second == o[i].second)) {
                return false;
              }
            }
            return true;
          },
          [&](const EnumTy& e) {
            return e.concepts == std::get<EnumTy>(y).concepts;
          },
          [&](const SubsetTy& s) {
            const auto& o = std::get<SubsetTy>(y);
            return s.binding_term == o.binding_term &&
                   s.binding_type == o.binding_type && s.prop == o.prop;
          },
          [&](const TyAlias& n) { return n.name == std::get<TyAlias>(y).name; },
      },
      x);
}

bool operator==(const Prop& a, const Prop& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = base(a);
  const auto& y = base(b);
  if (x.index() != y.index()) return false;
  return std::visit(
      Overloaded{
          [&](const BuiltinPred& p) {
            const auto& o = std::get<BuiltinPred>(y);
            return p.op == o.op && p.args == o.args;
          },
          [&](const PropAnd& p) {
            const auto& o = std::get<PropAnd>(y);
            return p.lhs == o.lhs && p.rhs == o.rhs;
          },
          [&](const PropOr& p) {
            const auto& o = std::get<PropOr>(y);
            return p.lhs == o.lhs && p.rhs == o.rhs;
          },
          [&](const PropNot& p) { return p.body == std::get<PropNot>(y).body; },
          [&](const Exists& p) {
            const auto& o = std::get<Exists>(y);
            return p.var == o.var && p.bound == o.bound && p.body == o.body;
          },
          [&](const PropTrue&) { return true; },
          [&](const PropFalse&) { return true; },
          [&](const InSequence& p) {
            const auto& o = std::get<InSequence>(y);
            return p.element == o.element && p.sequence == o.sequence;
          },
      },
      x);
}

std::size_t hash_value(const Term& t) {
  std::size_t seed = base(t).index();
  std::visit(
      Overloaded{
          [&](const Num& n) {
            double v = n.value == 0.0 ? 0.0 : n.value;
            hash_combine(seed, std::isnan(v) ? 0x7ff8 : std::hash<double>{}(v));
          },
          [&](const Str& s) { hash_combine(seed, std::hash<std::string>{}(s.value)); },
          [&](const Atom& c) { hash_combine(seed, c.value.raw()); },
          [&](const Record& r) {
            for (const auto& [label, value] : r.fields) {
              hash_combine(seed, label.raw());
              hash_combine(seed, hash_value(value));
            }
          },
          [&](const List& l) {
            for (const auto& item : l.items) hash_combine(seed, hash_value(item));
          },
          [&](const Bottom& c) { hash_combine(seed, c.label.raw()); },
          [&](const FieldSelect& f) {
            hash_combine(seed, hash_value(f.base));
            hash_combine(seed, f.label.raw());
          },
          [&](const Var& v) { hash_combine(seed, std::hash<std::string>{}(v.name)); },
          [&](const TermAlias& n) {
            hash_combine(seed, std::hash<std::string>{}(n.name));
          },
      },
      base(t));
  return seed;
}

// ---- constructors ---------------------------------------------------------

Term str(std::string value) { return Term(Str{std::move(value)}); }
Term num(std::int64_t value) { return Term(Num{static_cast<double>(value)}); }
Term num_f(double value) { return Term(Num{value}); }
Term list(std::vector<Term> items) { return Term(List{std::move(items)}); }
Term atom(std::string_view name) { return Term(Atom{mk_concept(name)}); }
Term bottom(std::string_view label) {
  return Term(Bottom{mk_concept(label)});
}
Term var(std::string name) {
  if (name.empty()) {
    throw Error(ErrorCode::kConstruction, "variable name must be nonempty");
  }
  return Term(Var{std::move(name)});
}
Term term_name(std::string name) {
  if (name.empty()) {
    throw Error(ErrorCode::kConstruction, "term alias must be nonempty");
  }
  return Term(TermAlias{std::move(name)});
}

namespace {

template <class Value>
void sort_and_check(std::vector<std::pair<Concept, Value>>& fields,
                    const Taxonomy* taxonomy, std::string_view what) {
  std::stable_sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) {
    return compare(a.first, b.first) < 0;
  });
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i - 1].first == fields[i].first) {
      throw Error(ErrorCode::kMalformedRecord,
                  fmt::format("{} has duplicate label {}", what,
                              fields[i].first.to_string()));
    }
  }
  if (taxonomy == nullptr) return;
  std::unordered_map<Concept, Concept, ConceptHash> seen;
  for (const auto& [label, value] : fields) {
    auto [it, inserted] = seen.emplace(taxonomy->canonical(label), label);
    if (!inserted) {
      throw Error(ErrorCode::kMalformedRecord,
                  fmt::format("{} labels {} and {} are equivalent", what,
                              it->second.to_string(), label.to_string()));
    }
  }
}

}  // namespace

Term record_of(std::vector<Field> fields, const Taxonomy* taxonomy) {
  sort_and_check(fields, taxonomy, "record");
  return Term(Record{std::move(fields)});
}

Term record(const std::vector<std::pair<std::string, Term>>& fields,
            const Taxonomy& taxonomy) {
  std::vector<Field> out;
  out.reserve(fields.size());
  for (const auto& [label, value] : fields) out.emplace_back(mk_concept(label), value);
  return record_of(std::move(out), &taxonomy);
}

Term record(const std::vector<std::pair<std::string, Term>>& fields) {
  std::vector<Field> out;
  out.reserve(fields.size());
  for (const auto& [label, value] : fields) out.emplace_back(mk_concept(label), value);
  return record_of(std::move(out));
}

Term pred_app(std::string_view name, std::vector<Term> args) {
  if (args.empty()) {
    throw Error(ErrorCode::kArity,
                fmt::format("predicate {} applied to no arguments", name));
  }
  std::vector<Field> positional;
  positional.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    positional.emplace_back(Concept::positional(static_cast<std::uint32_t>(i)),
                            std::move(args[i]));
  }
  std::vector<Field> outer;
  outer.emplace_back(mk_concept(name), Term(Record{std::move(positional)}));
  return Term(Record{std::move(outer)});
}

Term triple(std::string_view name, Term first, Term second) {
  return pred_app(name, {std::move(first), std::move(second)});
}

Term record_select(Term base, std::string_view label) {
  return Term(FieldSelect{std::move(base), mk_concept(label)});
}

Term pred_arg_select(Term base, std::uint32_t position) {
  return Term(FieldSelect{std::move(base), Concept::positional(position)});
}

Type num_ty() { return Type(NumTy{}); }
Type str_ty() { return Type(StrTy{}); }
Type void_ty() { return Type(VoidTy{}); }
Type list_ty(Type element) { return Type(ListTy{std::move(element)}); }

Type enum_of(std::vector<Concept> concepts) {
  std::sort(concepts.begin(), concepts.end(), ConceptLess{});
  concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
  return Type(EnumTy{std::move(concepts)});
}

Type enum_ty(const std::vector<std::string>& concepts) {
  std::vector<Concept> out;
  out.reserve(concepts.size());
  for (const auto& c : concepts) out.push_back(mk_concept(c));
  return enum_of(std::move(out));
}

Type type_name(std::string name) {
  if (name.empty()) {
    throw Error(ErrorCode::kConstruction, "type name must be nonempty");
  }
  return Type(TyAlias{std::move(name)});
}

Type record_ty_of(std::vector<FieldType> fields, const Taxonomy* taxonomy) {
  sort_and_check(fields, taxonomy, "record type");
  return Type(RecordTy{std::move(fields)});
}

Type record_ty(const std::vector<std::pair<std::string, Type>>& fields,
               const Taxonomy& taxonomy) {
  std::vector<FieldType> out;
  out.reserve(fields.size());
  for (const auto& [label, ty] : fields) out.emplace_back(mk_concept(label), ty);
  return record_ty_of(std::move(out), &taxonomy);
}

Type record_ty(const std::vector<std::pair<std::string, Type>>& fields) {
  std::vector<FieldType> out;
  out.reserve(fields.size());
  for (const auto& [label, ty] : fields) out.emplace_back(mk_concept(label), ty);
  return record_ty_of(std::move(out));
}

Type pred_ty(std::string_view name, std::vector<Type> args) {
  if (args.empty()) {
    throw Error(ErrorCode::kArity,
                fmt::format("predicate type {} has no arguments", name));
  }
  std::vector<FieldType> positional;
  positional.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    positional.emplace_back(Concept::positional(static_cast<std::uint32_t>(i)),
                            std::move(args[i]));
  }
  std::vector<FieldType> outer;
  outer.emplace_back(mk_concept(name), Type(RecordTy{std::move(positional)}));
  return Type(RecordTy{std::move(outer)});
}

Type triple_ty(std::string_view name, Type first, Type second) {
  return pred_ty(name, {std::move(first), std::move(second)});
}

namespace {

void collect_binders(const Prop& p, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const PropAnd& a) {
                   collect_binders(a.lhs, out);
                   collect_binders(a.rhs, out);
                 },
                 [&](const PropOr& o) {
                   collect_binders(o.lhs, out);
                   collect_binders(o.rhs, out);
                 },
                 [&](const PropNot& n) { collect_binders(n.body, out); },
                 [&](const Exists& e) {
                   out.insert(e.var);
                   collect_binders(e.body, out);
                 },
                 [](const auto&) {},
             },
             base(p));
}

}  // namespace

Type subset_ty(Term binding_term, Type binding_type, Prop prop) {
  std::set<std::string> binders;
  collect_binders(prop, binders);
  for (const auto& v : free_vars(binding_term)) {
    if (binders.contains(v)) {
      throw Error(ErrorCode::kConstruction,
                  fmt::format("binding variable {} is captured by a quantifier",
                              v));
    }
  }
  if (binding_type.is<SubsetTy>()) {
    throw Error(ErrorCode::kConstruction,
                "binding type of a subset type cannot itself be a subset type");
  }
  return Type(SubsetTy{std::move(binding_term), std::move(binding_type),
                       std::move(prop)});
}

Prop pred(BuiltinOp op, Term lhs, Term rhs) {
  return Prop(BuiltinPred{op, {std::move(lhs), std::move(rhs)}});
}
Prop eq(Term lhs, Term rhs) {
  return pred(BuiltinOp::kEqual, std::move(lhs), std::move(rhs));
}
Prop conj(Prop lhs, Prop rhs) {
  return Prop(PropAnd{std::move(lhs), std::move(rhs)});
}
Prop disj(Prop lhs, Prop rhs) {
  return Prop(PropOr{std::move(lhs), std::move(rhs)});
}
Prop negate(Prop body) { return Prop(PropNot{std::move(body)}); }
Prop exists(std::string var, Type bound, Prop body) {
  if (var.empty()) {
    throw Error(ErrorCode::kConstruction, "quantified variable must be nonempty");
  }
  return Prop(Exists{std::move(var), std::move(bound), std::move(body)});
}
Prop prop_true() { return Prop(PropTrue{}); }
Prop prop_false() { return Prop(PropFalse{}); }
Prop in_sequence(Term element, std::vector<Term> sequence) {
  return Prop(InSequence{std::move(element), std::move(sequence)});
}

// ---- variables ------------------------------------------------------------

namespace {

void term_vars(const Term& t, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Record& r) {
                   for (const auto& f : r.fields) term_vars(f.second, out);
                 },
                 [&](const List& l) {
                   for (const auto& i : l.items) term_vars(i, out);
                 },
                 [&](const FieldSelect& f) { term_vars(f.base, out); },
                 [&](const Var& v) { out.insert(v.name); },
                 [](const auto&) {},
             },
             base(t));
}

void prop_vars(const Prop& p, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const BuiltinPred& b) {
                   for (const auto& a : b.args) term_vars(a, out);
                 },
                 [&](const PropAnd& a) {
                   prop_vars(a.lhs, out);
                   prop_vars(a.rhs, out);
                 },
                 [&](const PropOr& o) {
                   prop_vars(o.lhs, out);
                   prop_vars(o.rhs, out);
                 },
                 [&](const PropNot& n) { prop_vars(n.body, out); },
                 [&](const Exists& e) {
                   std::set<std::string> inner;
                   prop_vars(e.body, inner);
                   inner.erase(e.var);
                   out.insert(inner.begin(), inner.end());
                 },
                 [&](const InSequence& s) {
                   term_vars(s.element, out);
                   for (const auto& t : s.sequence) term_vars(t, out);
                 },
                 [](const auto&) {},
             },
             base(p));
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  term_vars(t, out);
  return out;
}

std::set<std::string> free_vars(const Prop& p) {
  std::set<std::string> out;
  prop_vars(p, out);
  return out;
}

bool is_ground(const Term& t) {
  return std::visit(Overloaded{
                        [](const Record& r) {
                          return std::all_of(
                              r.fields.begin(), r.fields.end(),
                              [](const Field& f) { return is_ground(f.second); });
                        },
                        [](const List& l) {
                          return std::all_of(l.items.begin(), l.items.end(),
                                             [](const Term& i) { return is_ground(i); });
                        },
                        [](const FieldSelect& f) { return is_ground(f.base); },
                        [](const Var&) { return false; },
                        [](const auto&) { return true; },
                    },
                    base(t));
}

bool has_selection(const Term& t) {
  return std::visit(Overloaded{
                        [](const Record& r) {
                          return std::any_of(
                              r.fields.begin(), r.fields.end(),
                              [](const Field& f) { return has_selection(f.second); });
                        },
                        [](const List& l) {
                          return std::any_of(l.items.begin(), l.items.end(),
                                             [](const Term& i) { return has_selection(i); });
                        },
                        [](const FieldSelect&) { return true; },
                        [](const auto&) { return false; },
                    },
                    base(t));
}

Term substitute(const Substitution& s, const Term& t) {
  if (s.empty()) return t;
  return std::visit(
      Overloaded{
          [&](const Record& r) {
            std::vector<Field> fields;
            fields.reserve(r.fields.size());
            for (const auto& [label, value] : r.fields) {
              fields.emplace_back(label, substitute(s, value));
            }
            return Term(Record{std::move(fields)});
          },
          [&](const List& l) {
            std::vector<Term> items;
            items.reserve(l.items.size());
            for (const auto& i : l.items) items.push_back(substitute(s, i));
            return Term(List{std::move(items)});
          },
          [&](const FieldSelect& f) {
            return Term(FieldSelect{substitute(s, f.base), f.label});
          },
          [&](const Var& v) {
            auto it = s.find(v.name);
            return it == s.end() ? t : it->second;
          },
          [&](const auto&) { return t; },
      },
      base(t));
}

namespace {

std::string fresh_name(const std::string& stem,
                       const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = fmt::format("{}'{}", stem, i);
    if (!avoid.contains(candidate)) return candidate;
  }
}

std::vector<Term> substitute_all(const Substitution& s,
                                 const std::vector<Term>& ts) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(substitute(s, t));
  return out;
}

}  // namespace

Prop substitute(const Substitution& s, const Prop& p) {
  if (s.empty()) return p;
  return std::visit(
      Overloaded{
          [&](const BuiltinPred& b) {
            return Prop(BuiltinPred{b.op, substitute_all(s, b.args)});
          },
          [&](const PropAnd& a) {
            return conj(substitute(s, a.lhs), substitute(s, a.rhs));
          },
          [&](const PropOr& o) {
            return disj(substitute(s, o.lhs), substitute(s, o.rhs));
          },
          [&](const PropNot& n) { return negate(substitute(s, n.body)); },
          [&](const Exists& e) {
            Substitution inner = s;
            inner.erase(e.var);
            auto body_free = free_vars(e.body);
            bool captures = false;
            std::set<std::string> avoid = body_free;
            for (const auto& [name, value] : inner) {
              auto fv = free_vars(value);
              avoid.insert(fv.begin(), fv.end());
              avoid.insert(name);
              if (body_free.contains(name) && fv.contains(e.var)) captures = true;
            }
            if (!captures) {
              return Prop(Exists{e.var, e.bound, substitute(inner, e.body)});
            }
            std::string renamed = fresh_name(e.var, avoid);
            Prop body = substitute(Substitution{{e.var, var(renamed)}}, e.body);
            return Prop(Exists{renamed, e.bound, substitute(inner, body)});
          },
          [&](const InSequence& q) {
            return Prop(InSequence{substitute(s, q.element),
                                   substitute_all(s, q.sequence)});
          },
          [&](const auto&) { return p; },
      },
      base(p));
}

Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [name, value] : first) out.emplace(name, substitute(second, value));
  for (const auto& [name, value] : second) out.emplace(name, value);
  return out;
}

namespace {

void collect_aliases(const Term& t, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Record& r) {
                   for (const auto& f : r.fields) collect_aliases(f.second, out);
                 },
                 [&](const List& l) {
                   for (const auto& i : l.items) collect_aliases(i, out);
                 },
                 [&](const FieldSelect& f) { collect_aliases(f.base, out); },
                 [&](const TermAlias& a) { out.insert(a.name); },
                 [](const auto&) {},
             },
             base(t));
}

}  // namespace

std::set<std::string> alias_names(const Term& t) {
  std::set<std::string> out;
  collect_aliases(t, out);
  return out;
}

}  // namespace flutes
