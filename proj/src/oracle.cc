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

#include "flutes/oracle.h"

#include <algorithm>

#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/rules.h"
#include "flutes/sexp.h"
#include "flutes/typing.h"

namespace flutes {

namespace {

using Bindings = std::map<std::string, Term, std::less<>>;

Term deref(Term t, const Bindings& b) {
  while (const auto* v = t.as<Var>()) {
    auto it = b.find(v->name);
    if (it == b.end()) break;
    t = it->second;
  }
  return t;
}

Term resolve_all(const Term& t, const Bindings& b) {
  Term d = deref(t, b);
  if (const auto* r = d.as<Record>()) {
    std::vector<Field> fields;
    for (const auto& [label, value] : r->fields) fields.emplace_back(label, resolve_all(value, b));
    return Term(Record{std::move(fields)});
  }
  if (const auto* l = d.as<List>()) {
    std::vector<Term> items;
    for (const auto& i : l->items) items.push_back(resolve_all(i, b));
    return list(std::move(items));
  }
  if (const auto* f = d.as<FieldSelect>()) return Term(FieldSelect{resolve_all(f->base, b), f->label});
  return d;
}

bool occurs(const std::string& name, const Term& t, const Bindings& b) {
  Term d = deref(t, b);
  if (const auto* v = d.as<Var>()) return v->name == name;
  if (const auto* r = d.as<Record>()) {
    for (const auto& f : r->fields) {
      if (occurs(name, f.second, b)) return true;
    }
  }
  if (const auto* l = d.as<List>()) {
    for (const auto& i : l->items) {
      if (occurs(name, i, b)) return true;
    }
  }
  if (const auto* f = d.as<FieldSelect>()) return occurs(name, f->base, b);
  return false;
}

// Plain Robinson unification over a triangular substitution. Aliases are
// constants.
bool unify(const Term& x, const Term& y, Bindings& b) {
  Term a = deref(x, b);
  Term c = deref(y, b);
  if (const auto* v = a.as<Var>()) {
    if (const auto* w = c.as<Var>(); w && w->name == v->name) return true;
    if (occurs(v->name, c, b)) return false;
    b.insert_or_assign(v->name, c);
    return true;
  }
  if (c.is<Var>()) return unify(c, a, b);
  if (a.node().index() != c.node().index()) return false;
  if (const auto* r = a.as<Record>()) {
    const auto& g = c.as<Record>()->fields;
    if (r->fields.size() != g.size()) return false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(r->fields[i].first == g[i].first)) return false;
      if (!unify(r->fields[i].second, g[i].second, b)) return false;
    }
    return true;
  }
  if (const auto* l = a.as<List>()) {
    const auto& g = c.as<List>()->items;
    if (l->items.size() != g.size()) return false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!unify(l->items[i], g[i], b)) return false;
    }
    return true;
  }
  if (const auto* f = a.as<FieldSelect>()) {
    const auto* g = c.as<FieldSelect>();
    return f->label == g->label && unify(f->base, g->base, b);
  }
  return a == c;
}

enum class Use { kName, kValue };

// Replaces quantified variables by their member's name or term.
Term instantiate(const Term& t, const std::map<std::string, const Member*, std::less<>>& q,
                 Use use) {
  if (const auto* v = t.as<Var>()) {
    auto it = q.find(v->name);
    if (it == q.end()) return t;
    return use == Use::kName ? term_name(it->second->name) : it->second->term;
  }
  if (const auto* r = t.as<Record>()) {
    std::vector<Field> fields;
    for (const auto& [label, value] : r->fields) fields.emplace_back(label, instantiate(value, q, use));
    return Term(Record{std::move(fields)});
  }
  if (const auto* l = t.as<List>()) {
    std::vector<Term> items;
    for (const auto& i : l->items) items.push_back(instantiate(i, q, use));
    return list(std::move(items));
  }
  if (const auto* f = t.as<FieldSelect>()) {
    return Term(FieldSelect{instantiate(f->base, q, use), f->label});
  }
  return t;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Ill-typed comparisons (anything but numbers under an order) are nullopt.
std::optional<bool> compare(BuiltinOp op, const Term& x, const Term& y) {
  const auto* a = x.as<Num>();
  const auto* b = y.as<Num>();
  if (a == nullptr || b == nullptr) {
    if (op == BuiltinOp::kEqual) return x == y;
    return std::nullopt;
  }
  switch (op) {
    case BuiltinOp::kLessThan: return a->value < b->value;
    case BuiltinOp::kLessEqual: return a->value <= b->value;
    case BuiltinOp::kGreaterThan: return a->value > b->value;
    case BuiltinOp::kGreaterEqual: return a->value >= b->value;
    case BuiltinOp::kEqual: return a->value == b->value;
  }
  return std::nullopt;
}

// A comparison waiting for its variables.
struct Check {
  enum class Kind { kDiffer, kBuiltin, kMember };
  Kind kind;
  BuiltinOp op = BuiltinOp::kEqual;
  bool negated = false;
  std::vector<Term> terms;
};

}  // namespace

struct Oracle::State {
  Bindings sigma;
  std::vector<Check> waiting;
};

Oracle::Oracle(const Store& store) : store_(store), env_(store_env(store)) {
  for (const auto& c : store.classes()) {
    members_[c.name()];
    if (c.is_subset()) {
      compute_subset(c);
    } else {
      compute_static(c);
    }
  }
}

const std::vector<Member>& Oracle::members(std::string_view class_name) const {
  auto it = members_.find(class_name);
  if (it == members_.end()) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown class '{}'", class_name));
  }
  return it->second;
}

std::set<std::string> Oracle::rendered(std::string_view class_name) const {
  std::set<std::string> out;
  for (const auto& m : members(class_name)) out.insert(render_sexp(m.term));
  return out;
}

std::set<std::string> rendered_members(const KbClass& c) {
  std::set<std::string> out;
  for (const auto& m : c.members()) out.insert(render_sexp(m.term));
  return out;
}

void Oracle::compute_static(const KbClass& c) {
  auto& out = members_[c.name()];
  std::set<std::string> names;
  for (const auto& t : store_.typed()) {
    auto proof = prove_subtype(t.type, c.schema(), store_.taxonomy());
    if (!proof || !names.insert(t.name).second) continue;
    out.push_back({t.name, apply_coercion(*proof, t.term), std::nullopt});
  }
}

void Oracle::compute_subset(const KbClass& c) {
  const auto& subset = *c.definition().as<SubsetTy>();
  std::vector<State> states;
  eval(subset.prop, {}, State{}, states);
  auto& out = members_[c.name()];
  std::set<std::string> seen;
  for (const auto& s : states) {
    // Comparisons that never became ground fail.
    if (!s.waiting.empty()) continue;
    Term t = resolve_all(subset.binding_term, s.sigma);
    if (!is_ground(t)) continue;
    auto proof = check_term(t, c.schema(), store_.taxonomy(), store_.alias_types());
    if (!proof) continue;
    Term coerced = apply_coercion(*proof, t);
    std::string rendered = render_sexp(coerced);
    if (!seen.insert(rendered).second) continue;
    std::string name = coerced.is<TermAlias>()
                           ? coerced.as<TermAlias>()->name
                           : fmt::format("{}#{:016x}", c.name(), fnv1a(rendered));
    out.push_back({std::move(name), std::move(coerced), std::nullopt});
  }
}

void Oracle::eval(const Prop& p, const Quantified& q, const State& s,
                  std::vector<State>& out) {
  if (const auto* a = p.as<PropAnd>()) {
    std::vector<State> left;
    eval(a->lhs, q, s, left);
    for (const auto& l : left) eval(a->rhs, q, l, out);
    return;
  }
  if (const auto* o = p.as<PropOr>()) {
    eval(o->lhs, q, s, out);
    eval(o->rhs, q, s, out);
    return;
  }
  if (const auto* e = p.as<Exists>()) {
    for (const auto& m : members(e->bound.as<TyAlias>()->name)) {
      Quantified inner = q;
      inner.insert_or_assign(e->var, &m);
      eval(e->body, inner, s, out);
    }
    return;
  }
  if (p.is<PropTrue>()) {
    out.push_back(s);
    return;
  }
  if (p.is<PropFalse>()) return;
  if (const auto* n = p.as<PropNot>()) {
    const Prop& body = n->body;
    if (const auto* a = body.as<PropAnd>()) return eval(disj(negate(a->lhs), negate(a->rhs)), q, s, out);
    if (const auto* o = body.as<PropOr>()) return eval(conj(negate(o->lhs), negate(o->rhs)), q, s, out);
    if (const auto* inner = body.as<PropNot>()) return eval(inner->body, q, s, out);
    if (body.is<PropTrue>()) return;
    if (body.is<PropFalse>()) {
      out.push_back(s);
      return;
    }
    if (body.is<Exists>()) throw Error(ErrorCode::kUnsupportedForm, "quantifier under negation");
    return eval_atom(body, true, q, s, out);
  }
  eval_atom(p, false, q, s, out);
}

void Oracle::eval_atom(const Prop& p, bool negated, const Quantified& q, State s,
                       std::vector<State>& out) {
  ++evaluations_;
  auto value = [&](const Term& t) { return instantiate(t, q, Use::kValue); };
  Check check;
  check.negated = negated;
  if (const auto* b = p.as<BuiltinPred>()) {
    bool pattern = b->op == BuiltinOp::kEqual && b->args.size() == 2 &&
                   !has_selection(b->args[0]) && !has_selection(b->args[1]);
    if (pattern) {
      // A quantified variable alone on a side is its member's term; inside a
      // pattern it is the member's name.
      auto side = [&](const Term& t) {
        if (const auto* v = t.as<Var>()) {
          if (auto it = q.find(v->name); it != q.end()) return it->second->term;
        }
        return instantiate(t, q, Use::kName);
      };
      Term lhs = side(b->args[0]);
      Term rhs = side(b->args[1]);
      if (!negated) {
        if (unify(lhs, rhs, s.sigma) && settle(s)) out.push_back(std::move(s));
        return;
      }
      check.kind = Check::Kind::kDiffer;
      check.terms = {std::move(lhs), std::move(rhs)};
    } else {
      check.kind = Check::Kind::kBuiltin;
      check.op = b->op;
      for (const auto& a : b->args) check.terms.push_back(value(a));
    }
  } else if (const auto* in = p.as<InSequence>()) {
    check.kind = Check::Kind::kMember;
    check.terms.push_back(value(in->element));
    for (const auto& i : in->sequence) check.terms.push_back(value(i));
  } else {
    return;
  }
  s.waiting.push_back(std::move(check));
  if (settle(s)) out.push_back(std::move(s));
}

bool Oracle::settle(State& s) const {
  std::vector<Check> still;
  for (auto& c : s.waiting) {
    std::vector<Term> terms;
    bool ground = true;
    for (const auto& t : c.terms) {
      terms.push_back(resolve_all(t, s.sigma));
      ground = ground && is_ground(terms.back());
    }
    if (!ground) {
      still.push_back(std::move(c));
      continue;
    }
    bool holds = false;
    if (c.kind == Check::Kind::kDiffer) {
      holds = !(terms[0] == terms[1]);
    } else {
      try {
        for (auto& t : terms) t = eval_term(t, env_, store_.taxonomy());
      } catch (const Error&) {
        // Evaluation errors fail the literal whatever its polarity.
        return false;
      }
      if (c.kind == Check::Kind::kMember) {
        bool found = std::find(terms.begin() + 1, terms.end(), terms[0]) != terms.end();
        holds = found != c.negated;
      } else {
        bool all = true;
        for (std::size_t i = 1; i < terms.size(); ++i) {
          auto r = compare(c.op, terms[i - 1], terms[i]);
          if (!r) return false;
          all = all && *r;
        }
        holds = all != c.negated;
      }
    }
    if (!holds) return false;
  }
  s.waiting = std::move(still);
  return true;
}

}  // namespace flutes
