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

#include "flutes/classifier.h"

#include <algorithm>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <variant>

#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/rules.h"
#include "flutes/sexp.h"
#include "flutes/typing.h"

namespace flutes {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

using Clock = std::chrono::steady_clock;

const TermNode::variant& base(const Term& t) { return t.node(); }
const TypeNode::variant& base(const Type& t) { return t.node(); }
const PropNode::variant& base(const Prop& p) { return p.node(); }

// ---- triangular substitutions -------------------------------------------

Term walk(Term t, const Substitution& s) {
  while (const auto* v = t.as<Var>()) {
    auto it = s.find(v->name);
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs(const std::string& name, const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  return std::visit(
      Overloaded{
          [&](const Var& v) { return v.name == name; },
          [&](const Record& r) {
            return std::any_of(r.fields.begin(), r.fields.end(), [&](const Field& f) {
              return occurs(name, f.second, s);
            });
          },
          [&](const List& l) {
            return std::any_of(l.items.begin(), l.items.end(),
                               [&](const Term& i) { return occurs(name, i, s); });
          },
          [&](const FieldSelect& f) { return occurs(name, f.base, s); },
          [](const auto&) { return false; },
      },
      base(w));
}

Term resolve(const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  return std::visit(
      Overloaded{
          [&](const Record& r) {
            std::vector<Field> fields;
            fields.reserve(r.fields.size());
            for (const auto& [label, value] : r.fields) {
              fields.emplace_back(label, resolve(value, s));
            }
            return Term(Record{std::move(fields)});
          },
          [&](const List& l) {
            std::vector<Term> items;
            items.reserve(l.items.size());
            for (const auto& i : l.items) items.push_back(resolve(i, s));
            return list(std::move(items));
          },
          [&](const FieldSelect& f) {
            return Term(FieldSelect{resolve(f.base, s), f.label});
          },
          [&](const auto&) { return w; },
      },
      base(w));
}

bool unify_into(const Term& a, const Term& b, Substitution& s) {
  Term x = walk(a, s);
  Term y = walk(b, s);
  const auto* vx = x.as<Var>();
  const auto* vy = y.as<Var>();
  if (vx != nullptr && vy != nullptr && vx->name == vy->name) return true;
  if (vx != nullptr) {
    if (occurs(vx->name, y, s)) return false;
    s.insert_or_assign(vx->name, y);
    return true;
  }
  if (vy != nullptr) {
    if (occurs(vy->name, x, s)) return false;
    s.insert_or_assign(vy->name, x);
    return true;
  }
  if (x.node().index() != y.node().index()) return false;
  if (const auto* rx = x.as<Record>()) {
    const auto& fy = y.as<Record>()->fields;
    if (rx->fields.size() != fy.size()) return false;
    for (std::size_t i = 0; i < fy.size(); ++i) {
      if (!(rx->fields[i].first == fy[i].first)) return false;
    }
    for (std::size_t i = 0; i < fy.size(); ++i) {
      if (!unify_into(rx->fields[i].second, fy[i].second, s)) return false;
    }
    return true;
  }
  if (const auto* lx = x.as<List>()) {
    const auto& iy = y.as<List>()->items;
    if (lx->items.size() != iy.size()) return false;
    for (std::size_t i = 0; i < iy.size(); ++i) {
      if (!unify_into(lx->items[i], iy[i], s)) return false;
    }
    return true;
  }
  if (const auto* sx = x.as<FieldSelect>()) {
    const auto* sy = y.as<FieldSelect>();
    return sx->label == sy->label && unify_into(sx->base, sy->base, s);
  }
  return x == y;
}

// ---- skolemization --------------------------------------------------------

struct PartialDisjunct {
  std::vector<Literal> literals;
  std::set<std::size_t> skolems;
};

class Skolemizer {
 public:
  explicit Skolemizer(const SubsetTy& s) {
    reserved_ = free_vars(s.binding_term);
    for (const auto& v : free_vars(s.prop)) reserved_.insert(v);
  }

  std::vector<PartialDisjunct> dnf(const Prop& p, bool negated) {
    return std::visit(
        Overloaded{
            [&](const PropAnd& a) {
              return negated ? disjoin(a.lhs, a.rhs, true) : conjoin(a.lhs, a.rhs, false);
            },
            [&](const PropOr& o) {
              return negated ? conjoin(o.lhs, o.rhs, true) : disjoin(o.lhs, o.rhs, false);
            },
            [&](const PropNot& n) { return dnf(n.body, !negated); },
            [&](const PropTrue&) {
              return negated ? std::vector<PartialDisjunct>{}
                             : std::vector<PartialDisjunct>(1);
            },
            [&](const PropFalse&) {
              return negated ? std::vector<PartialDisjunct>(1)
                             : std::vector<PartialDisjunct>{};
            },
            [&](const Exists& e) { return quantifier(e, negated); },
            [&](const BuiltinPred& b) {
              // An equation over selections compares values, like the
              // other builtins; every other equation is a pattern.
              bool pattern = b.op == BuiltinOp::kEqual && b.args.size() == 2 &&
                             !has_selection(b.args[0]) && !has_selection(b.args[1]);
              auto kind = pattern ? Literal::Kind::kEquality : Literal::Kind::kBuiltin;
              return atom(Literal{kind, negated, p});
            },
            [&](const InSequence&) {
              return atom(Literal{Literal::Kind::kInSequence, negated, p});
            },
        },
        base(p));
  }

  SkolemClause clause;

 private:
  static std::vector<PartialDisjunct> atom(Literal l) {
    std::vector<PartialDisjunct> out(1);
    out.front().literals.push_back(std::move(l));
    return out;
  }

  std::vector<PartialDisjunct> disjoin(const Prop& a, const Prop& b, bool negated) {
    auto out = dnf(a, negated);
    for (auto& d : dnf(b, negated)) out.push_back(std::move(d));
    return out;
  }

  std::vector<PartialDisjunct> conjoin(const Prop& a, const Prop& b, bool negated) {
    auto left = dnf(a, negated);
    auto right = dnf(b, negated);
    std::vector<PartialDisjunct> out;
    out.reserve(left.size() * right.size());
    for (const auto& l : left) {
      for (const auto& r : right) {
        PartialDisjunct d = l;
        d.literals.insert(d.literals.end(), r.literals.begin(), r.literals.end());
        d.skolems.insert(r.skolems.begin(), r.skolems.end());
        out.push_back(std::move(d));
      }
    }
    return out;
  }

  std::vector<PartialDisjunct> quantifier(const Exists& e, bool negated) {
    if (negated) {
      throw Error(ErrorCode::kUnsupportedForm,
                  fmt::format("quantifier over '{}' under negation", e.var));
    }
    const auto* bound = e.bound.as<TyAlias>();
    if (bound == nullptr) {
      throw Error(ErrorCode::kUnsupportedForm,
                  fmt::format("quantifier over '{}' must range over a class", e.var));
    }
    std::string name = e.var;
    for (int i = 1; reserved_.contains(name); ++i) {
      name = fmt::format("{}'{}", e.var, i);
    }
    reserved_.insert(name);
    Prop body = name == e.var ? e.body : substitute(Substitution{{e.var, var(name)}}, e.body);
    std::size_t index = clause.skolems.size();
    clause.skolems.emplace_back(name, bound->name);
    auto out = dnf(body, false);
    for (auto& d : out) d.skolems.insert(index);
    return out;
  }

  std::set<std::string> reserved_;
};

// ---- disjunct solving -----------------------------------------------------

struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool contains(std::size_t i) const { return lo <= i && i < hi; }
  bool empty() const { return lo >= hi; }
};

struct Frame {
  Substitution sigma;
  std::vector<std::optional<std::size_t>> bound;
  int phase = 0;
  std::size_t next = 0;
  std::vector<std::size_t> deferred;
};

// Enumerates the solutions of one disjunct over fixed member ranges.
class DisjunctSolver {
 public:
  DisjunctSolver(const Store& store, const SkolemClause& clause, const Disjunct& d,
                 std::vector<const KbClass*> classes, std::vector<Range> ranges,
                 std::optional<std::size_t> delta, bool prune)
      : store_(store),
        clause_(clause),
        disjunct_(d),
        classes_(std::move(classes)),
        ranges_(std::move(ranges)),
        delta_(delta),
        prune_(prune),
        in_scope_(clause.skolems.size(), false),
        mentioned_(clause.skolems.size(), false),
        literal_bound_(clause.skolems.size(), false),
        env_(store_env(store)) {
    for (std::size_t k : d.skolems) {
      in_scope_[k] = true;
      by_name_.emplace(clause.skolems[k].first, k);
    }
    for (const auto& l : d.literals) {
      for (const auto& v : free_vars(l.atom)) {
        if (auto k = skolem_of_name(v)) mentioned_[*k] = true;
      }
      if (l.kind == Literal::Kind::kEquality && !l.negated) {
        const auto& args = l.atom.as<BuiltinPred>()->args;
        for (const auto& a : args) {
          if (auto k = skolem_of(a)) literal_bound_[*k] = true;
        }
      }
    }
    order_.resize(d.literals.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (delta_ && literal_bound_[*delta_]) {
      auto it = std::find_if(order_.begin(), order_.end(), [&](std::size_t i) {
        const auto& l = d.literals[i];
        if (l.kind != Literal::Kind::kEquality || l.negated) return false;
        const auto& args = l.atom.as<BuiltinPred>()->args;
        return skolem_of(args[0]) == delta_ || skolem_of(args[1]) == delta_;
      });
      std::rotate(order_.begin(), it, it + 1);
    }
  }

  // Whether every in-scope quantifier has a nonempty range.
  bool viable() const {
    for (std::size_t k : disjunct_.skolems) {
      if (ranges_[k].empty()) return false;
    }
    return true;
  }

  Frame root() const {
    Frame f;
    f.bound.assign(clause_.skolems.size(), std::nullopt);
    return f;
  }

  // Advances one frame, returning its successors. A frame that completes
  // yields its substitution in `solutions`.
  std::vector<Frame> step(Frame f, std::vector<Substitution>& solutions,
                          std::size_t& scanned) const {
    std::vector<Frame> out;
    if (f.phase == 0) {
      f.phase = 1;
      if (prune_ && delta_ && !literal_bound_[*delta_] && mentioned_[*delta_]) {
        bind_each(f, *delta_, candidates_in_range(*delta_), out, scanned);
      } else {
        out.push_back(std::move(f));
      }
      return out;
    }
    if (f.phase == 1) {
      if (f.next == order_.size()) {
        f.phase = 2;
        out.push_back(std::move(f));
        return out;
      }
      process(std::move(f), out, scanned);
      return out;
    }
    if (f.phase == 2) {
      for (std::size_t k : disjunct_.skolems) {
        if (mentioned_[k] && !f.bound[k]) {
          bind_each(f, k, candidates_in_range(k), out, scanned);
          return out;
        }
      }
      for (std::size_t i : f.deferred) {
        if (check(disjunct_.literals[i], f) != Verdict::kTrue) return out;
      }
      solutions.push_back(std::move(f.sigma));
    }
    return out;
  }

  void run(Frame f, std::vector<Substitution>& solutions, std::size_t& scanned) const {
    std::vector<Frame> stack;
    stack.push_back(std::move(f));
    while (!stack.empty()) {
      Frame current = std::move(stack.back());
      stack.pop_back();
      auto children = step(std::move(current), solutions, scanned);
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        stack.push_back(std::move(*it));
      }
    }
  }

  std::vector<std::string> prune_for(const Frame& f, std::size_t k) const {
    std::vector<std::string> names;
    for (const auto& l : disjunct_.literals) {
      if (l.kind != Literal::Kind::kEquality || l.negated) continue;
      const auto& args = l.atom.as<BuiltinPred>()->args;
      for (int side = 0; side < 2; ++side) {
        if (skolem_of(args[side]) != k) continue;
        for (std::size_t i : candidates(k, resolve(args[1 - side], f.sigma))) {
          names.push_back(classes_[k]->members()[i].name);
        }
        return names;
      }
    }
    for (std::size_t i : candidates_in_range(k)) {
      names.push_back(classes_[k]->members()[i].name);
    }
    return names;
  }

  // Binds skolem k to `member` and processes the first literal that binds it.
  std::optional<Frame> fix(std::size_t k, std::size_t member) const {
    Frame f = root();
    if (!bind(f, k, member)) return std::nullopt;
    for (std::size_t i = 0; i < disjunct_.literals.size(); ++i) {
      const auto& l = disjunct_.literals[i];
      if (l.kind != Literal::Kind::kEquality || l.negated) continue;
      const auto& args = l.atom.as<BuiltinPred>()->args;
      if (skolem_of(args[0]) != k && skolem_of(args[1]) != k) continue;
      Term lhs = side_term(args[0], f).value_or(args[0]);
      Term rhs = side_term(args[1], f).value_or(args[1]);
      if (!unify_into(lhs, rhs, f.sigma) || !validate(f)) return std::nullopt;
      break;
    }
    return f;
  }

  std::optional<std::size_t> skolem_of(const Term& t) const {
    const auto* v = t.as<Var>();
    if (v == nullptr) return std::nullopt;
    return skolem_of_name(v->name);
  }

 private:
  enum class Verdict { kTrue, kFalse, kPending };

  std::optional<std::size_t> skolem_of_name(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  const Member& member(std::size_t k, std::size_t i) const {
    return classes_[k]->members()[i];
  }

  // A bare quantified variable as the side of an equation denotes its
  // member's term; nullopt while it is unbound.
  std::optional<Term> side_term(const Term& side, const Frame& f) const {
    if (auto k = skolem_of(side)) {
      if (!f.bound[*k]) return std::nullopt;
      return member(*k, *f.bound[*k]).term;
    }
    return side;
  }

  // Quantified variables bound by unification must name a member within
  // their range.
  bool validate(Frame& f) const {
    for (std::size_t k : disjunct_.skolems) {
      if (f.bound[k]) continue;
      Term value = walk(var(clause_.skolems[k].first), f.sigma);
      if (value.is<Var>()) continue;
      const auto* alias = value.as<TermAlias>();
      if (alias == nullptr) return false;
      auto index = classes_[k]->member_index(alias->name);
      if (!index || !ranges_[k].contains(*index)) return false;
      f.bound[k] = *index;
    }
    return true;
  }

  bool bind(Frame& f, std::size_t k, std::size_t i) const {
    return unify_into(var(clause_.skolems[k].first), term_name(member(k, i).name),
                      f.sigma) &&
           validate(f);
  }

  void bind_each(const Frame& f, std::size_t k, const std::vector<std::size_t>& candidates,
                 std::vector<Frame>& out, std::size_t& scanned) const {
    for (std::size_t i : candidates) {
      ++scanned;
      Frame child = f;
      if (bind(child, k, i)) out.push_back(std::move(child));
    }
  }

  std::vector<std::size_t> candidates_in_range(std::size_t k) const {
    std::vector<std::size_t> out(ranges_[k].hi - ranges_[k].lo);
    std::iota(out.begin(), out.end(), ranges_[k].lo);
    return out;
  }

  std::set<std::string> referencing(const std::string& alias) const {
    std::set<std::string> out;
    try {
      out = store_.contained_by(alias);
    } catch (const Error&) {
    }
    out.insert(alias);
    return out;
  }

  // Members of k's class that can match `pattern`: those referencing every
  // ground name in it.
  std::vector<std::size_t> candidates(std::size_t k, const Term& pattern) const {
    if (!prune_) return candidates_in_range(k);
    auto aliases = alias_names(pattern);
    if (aliases.empty()) return candidates_in_range(k);
    std::optional<std::set<std::string>> names;
    for (const auto& a : aliases) {
      auto refs = referencing(a);
      if (!names) {
        names = std::move(refs);
      } else {
        std::set<std::string> both;
        std::set_intersection(names->begin(), names->end(), refs.begin(), refs.end(),
                              std::inserter(both, both.end()));
        names = std::move(both);
      }
      if (names->empty()) break;
    }
    std::vector<std::size_t> out;
    for (const auto& name : *names) {
      auto i = classes_[k]->member_index(name);
      if (i && ranges_[k].contains(*i)) out.push_back(*i);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void choose(const Frame& f, std::size_t k, const Term& pattern, bool advance,
              std::vector<Frame>& out, std::size_t& scanned) const {
    Term p = resolve(pattern, f.sigma);
    for (std::size_t i : candidates(k, p)) {
      ++scanned;
      Frame child = f;
      if (!bind(child, k, i)) continue;
      if (!unify_into(p, member(k, i).term, child.sigma) || !validate(child)) continue;
      if (advance) ++child.next;
      out.push_back(std::move(child));
    }
  }

  void process(Frame f, std::vector<Frame>& out, std::size_t& scanned) const {
    std::size_t index = order_[f.next];
    const Literal& l = disjunct_.literals[index];
    if (l.kind == Literal::Kind::kEquality && !l.negated) {
      const auto& args = l.atom.as<BuiltinPred>()->args;
      auto lhs = side_term(args[0], f);
      auto rhs = side_term(args[1], f);
      if (lhs && rhs) {
        if (unify_into(*lhs, *rhs, f.sigma) && validate(f)) {
          ++f.next;
          out.push_back(std::move(f));
        }
      } else if (rhs) {
        choose(f, *skolem_of(args[0]), *rhs, true, out, scanned);
      } else if (lhs) {
        choose(f, *skolem_of(args[1]), *lhs, true, out, scanned);
      } else {
        // Both sides are unbound quantified variables: fix the left one and
        // revisit the literal.
        choose(f, *skolem_of(args[0]), var("\x01"), false, out, scanned);
      }
      return;
    }
    switch (check(l, f)) {
      case Verdict::kTrue:
        break;
      case Verdict::kFalse:
        return;
      case Verdict::kPending:
        f.deferred.push_back(index);
        break;
    }
    ++f.next;
    out.push_back(std::move(f));
  }

  // Value of a term in a comparison: quantified variables denote their
  // member's term. nullopt while not ground.
  std::optional<Term> value(const Term& t, const Frame& f) const {
    Substitution members;
    for (std::size_t k : disjunct_.skolems) {
      if (f.bound[k]) members.emplace(clause_.skolems[k].first, member(k, *f.bound[k]).term);
    }
    Term v = resolve(members.empty() ? t : substitute(members, t), f.sigma);
    if (!is_ground(v)) return std::nullopt;
    return v;
  }

  Verdict check(const Literal& l, const Frame& f) const {
    auto verdict = [&](bool holds) {
      return holds != l.negated ? Verdict::kTrue : Verdict::kFalse;
    };
    if (l.kind == Literal::Kind::kEquality) {
      // A negated pattern equation: the sides read as in the positive case
      // and must be ground to compare.
      const auto& args = l.atom.as<BuiltinPred>()->args;
      auto lhs = side_term(args[0], f);
      auto rhs = side_term(args[1], f);
      if (!lhs || !rhs) return Verdict::kPending;
      Term a = resolve(*lhs, f.sigma);
      Term b = resolve(*rhs, f.sigma);
      if (!is_ground(a) || !is_ground(b)) return Verdict::kPending;
      return verdict(a == b);
    }
    try {
      if (const auto* b = l.atom.as<BuiltinPred>()) {
        std::vector<Term> args;
        for (const auto& a : b->args) {
          auto v = value(a, f);
          if (!v) return Verdict::kPending;
          args.push_back(eval_term(*v, env_, store_.taxonomy()));
        }
        auto holds = compare_builtin(b->op, args);
        if (!holds) return Verdict::kFalse;
        return verdict(*holds);
      }
      const auto& seq = *l.atom.as<InSequence>();
      auto element = value(seq.element, f);
      if (!element) return Verdict::kPending;
      Term e = eval_term(*element, env_, store_.taxonomy());
      bool found = false;
      for (const auto& item : seq.sequence) {
        auto v = value(item, f);
        if (!v) return Verdict::kPending;
        if (eval_term(*v, env_, store_.taxonomy()) == e) found = true;
      }
      return verdict(found);
    } catch (const Error&) {
      return Verdict::kFalse;
    }
  }

 public:
  // nullopt when the comparison is ill-typed.
  static std::optional<bool> compare_builtin(BuiltinOp op, const std::vector<Term>& args) {
    if (op == BuiltinOp::kEqual) {
      for (std::size_t i = 1; i < args.size(); ++i) {
        const auto* a = args[i - 1].as<Num>();
        const auto* b = args[i].as<Num>();
        if (a != nullptr && b != nullptr ? !(a->value == b->value)
                                         : !(args[i - 1] == args[i])) {
          return false;
        }
      }
      return true;
    }
    for (std::size_t i = 1; i < args.size(); ++i) {
      const auto* a = args[i - 1].as<Num>();
      const auto* b = args[i].as<Num>();
      if (a == nullptr || b == nullptr) return std::nullopt;
      bool holds = false;
      switch (op) {
        case BuiltinOp::kLessThan: holds = a->value < b->value; break;
        case BuiltinOp::kLessEqual: holds = a->value <= b->value; break;
        case BuiltinOp::kGreaterThan: holds = a->value > b->value; break;
        case BuiltinOp::kGreaterEqual: holds = a->value >= b->value; break;
        case BuiltinOp::kEqual: break;
      }
      if (!holds) return false;
    }
    return true;
  }

 private:
  const Store& store_;
  const SkolemClause& clause_;
  const Disjunct& disjunct_;
  std::vector<const KbClass*> classes_;
  std::vector<Range> ranges_;
  std::optional<std::size_t> delta_;
  bool prune_;
  std::vector<bool> in_scope_;
  std::vector<bool> mentioned_;
  std::vector<bool> literal_bound_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<std::size_t> order_;
  TermEnv env_;
};

// Runs a solver, splitting the first branching point across workers.
// Solutions come back in sequential order whatever the worker count.
std::vector<Substitution> solve(const DisjunctSolver& solver, std::size_t workers,
                                std::size_t& scanned) {
  std::vector<Substitution> solutions;
  std::vector<Frame> frontier{solver.root()};
  while (frontier.size() == 1) {
    frontier = solver.step(std::move(frontier.front()), solutions, scanned);
  }
  if (frontier.empty()) return solutions;
  std::size_t threads = std::min(std::max<std::size_t>(workers, 1), frontier.size());
  if (threads == 1) {
    for (auto& f : frontier) solver.run(std::move(f), solutions, scanned);
    return solutions;
  }
  std::size_t chunk = (frontier.size() + threads - 1) / threads;
  std::vector<std::vector<Substitution>> parts(threads);
  std::vector<std::size_t> counts(threads, 0);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(frontier.size(), lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        solver.run(std::move(frontier[i]), parts[w], counts[w]);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t w = 0; w < threads; ++w) {
    scanned += counts[w];
    for (auto& s : parts[w]) solutions.push_back(std::move(s));
  }
  return solutions;
}

void collect_type_names(const Type& t, std::set<std::string>& out);

void collect_prop_names(const Prop& p, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const PropAnd& a) {
                   collect_prop_names(a.lhs, out);
                   collect_prop_names(a.rhs, out);
                 },
                 [&](const PropOr& o) {
                   collect_prop_names(o.lhs, out);
                   collect_prop_names(o.rhs, out);
                 },
                 [&](const PropNot& n) { collect_prop_names(n.body, out); },
                 [&](const Exists& e) {
                   collect_type_names(e.bound, out);
                   collect_prop_names(e.body, out);
                 },
                 [](const auto&) {},
             },
             base(p));
}

void collect_type_names(const Type& t, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const ListTy& l) { collect_type_names(l.element, out); },
                 [&](const RecordTy& r) {
                   for (const auto& f : r.fields) collect_type_names(f.second, out);
                 },
                 [&](const SubsetTy& s) {
                   collect_type_names(s.binding_type, out);
                   collect_prop_names(s.prop, out);
                 },
                 [&](const TyAlias& a) { out.insert(a.name); },
                 [](const auto&) {},
             },
             base(t));
}

ClassReport classify_static(Store& store, const KbClass& cls, const FindOptions& options) {
  ClassReport report;
  report.name = cls.name();
  const auto& typed = store.typed();
  std::size_t start = options.incremental ? cls.watermark() : 0;
  std::string name = cls.name();
  for (std::size_t i = start; i < typed.size(); ++i) {
    ++report.scanned;
    const TypedTerm& t = typed[i];
    auto proof = prove_subtype(t.type, cls.schema(), store.taxonomy());
    if (!proof) continue;
    try {
      if (store.add_member(name, apply_coercion(*proof, t.term), t.name)) {
        ++report.matched;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDuplicateName) throw;
    }
  }
  store.set_watermark(name, typed.size());
  return report;
}

ClassReport classify_subset(Store& store, const KbClass& cls, const FindOptions& options) {
  ClassReport report;
  report.name = cls.name();
  std::string name = cls.name();
  const auto& subset = *cls.definition().as<SubsetTy>();
  SkolemClause clause = skolemize(subset);

  std::vector<const KbClass*> classes;
  std::vector<std::size_t> old_count;
  std::vector<std::size_t> new_count;
  for (const auto& [_, class_name] : clause.skolems) {
    const KbClass& dep = store.get_class(class_name);
    classes.push_back(&dep);
    std::size_t seen = 0;
    if (options.incremental) {
      const auto& marks = cls.dependency_watermarks();
      if (auto it = marks.find(class_name); it != marks.end()) seen = it->second;
    }
    new_count.push_back(dep.members().size());
    old_count.push_back(std::min(seen, new_count.back()));
  }

  std::vector<Substitution> solutions;
  for (const auto& d : clause.disjuncts) {
    if (d.skolems.empty()) {
      DisjunctSolver solver(store, clause, d, classes,
                            std::vector<Range>(clause.skolems.size()), std::nullopt,
                            options.prune);
      for (auto& s : solve(solver, options.workers, report.scanned)) {
        solutions.push_back(std::move(s));
      }
      continue;
    }
    // Semi-naive passes: pass k takes new members for its own variable, old
    // members for the variables before it and all members after it.
    for (std::size_t pos = 0; pos < d.skolems.size(); ++pos) {
      std::vector<Range> ranges(clause.skolems.size());
      for (std::size_t j = 0; j < d.skolems.size(); ++j) {
        std::size_t k = d.skolems[j];
        if (j < pos) {
          ranges[k] = {0, old_count[k]};
        } else if (j == pos) {
          ranges[k] = {old_count[k], new_count[k]};
        } else {
          ranges[k] = {0, new_count[k]};
        }
      }
      DisjunctSolver solver(store, clause, d, classes, std::move(ranges), d.skolems[pos],
                            options.prune);
      if (!solver.viable()) continue;
      for (auto& s : solve(solver, options.workers, report.scanned)) {
        solutions.push_back(std::move(s));
      }
    }
  }

  const Type& schema = cls.schema();
  auto resolve_alias = store.alias_types();
  for (const auto& sigma : solutions) {
    Term t = resolve(subset.binding_term, sigma);
    if (!is_ground(t)) continue;
    auto proof = check_term(t, schema, store.taxonomy(), resolve_alias);
    if (!proof) continue;
    Term coerced = apply_coercion(*proof, t);
    try {
      if (store.add_member(name, coerced)) ++report.matched;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDuplicateName) throw;
    }
  }
  for (std::size_t k = 0; k < clause.skolems.size(); ++k) {
    store.set_dependency_watermark(name, clause.skolems[k].second, new_count[k]);
  }
  return report;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b,
                                  const Substitution& bindings) {
  Substitution s = bindings;
  if (!unify_into(a, b, s)) return std::nullopt;
  Substitution out;
  for (const auto& [name, _] : s) out.emplace(name, resolve(var(name), s));
  return out;
}

SkolemClause skolemize(const SubsetTy& s) {
  Skolemizer sk(s);
  auto partial = sk.dnf(s.prop, false);
  SkolemClause clause = std::move(sk.clause);
  for (auto& p : partial) {
    clause.disjuncts.push_back(
        Disjunct{std::move(p.literals), {p.skolems.begin(), p.skolems.end()}});
  }
  return clause;
}

std::string render_clause(const SkolemClause& c) {
  std::string out = "(clause (";
  for (std::size_t i = 0; i < c.skolems.size(); ++i) {
    if (i > 0) out += ' ';
    out += fmt::format("({} {})", quote_string(c.skolems[i].first),
                       quote_string(c.skolems[i].second));
  }
  out += ")";
  for (const auto& d : c.disjuncts) {
    out += " (or (";
    for (std::size_t i = 0; i < d.skolems.size(); ++i) {
      if (i > 0) out += ' ';
      out += quote_string(c.skolems[d.skolems[i]].first);
    }
    out += ")";
    for (const auto& l : d.literals) {
      out += l.negated ? fmt::format(" (not {})", render_sexp(l.atom))
                       : " " + render_sexp(l.atom);
    }
    out += ")";
  }
  return out + ")";
}

std::map<std::string, std::set<std::string>> dependency_graph(const Store& store) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& c : store.classes()) {
    std::set<std::string> names;
    collect_type_names(c.definition(), names);
    out.emplace(c.name(), std::move(names));
  }
  return out;
}

std::vector<std::string> class_order(const Store& store) {
  auto graph = dependency_graph(store);
  const auto& classes = store.classes();
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < classes.size()) {
    bool progress = false;
    for (const auto& c : classes) {
      if (done.contains(c.name())) continue;
      const auto& deps = graph.at(c.name());
      bool ready = std::all_of(deps.begin(), deps.end(), [&](const std::string& d) {
        return done.contains(d) || store.find_class(d) == nullptr;
      });
      if (!ready) continue;
      order.push_back(c.name());
      done.insert(c.name());
      progress = true;
      break;
    }
    if (!progress) {
      std::string stuck;
      for (const auto& c : classes) {
        if (done.contains(c.name())) continue;
        stuck += stuck.empty() ? c.name() : ", " + c.name();
      }
      throw Error(ErrorCode::kCyclicClasses,
                  fmt::format("cyclic class definitions among {}", stuck));
    }
  }
  return order;
}

std::size_t promote_untyped(Store& store) {
  std::size_t total = 0;
  for (;;) {
    std::unordered_map<std::string, Type> fresh;
    std::vector<std::pair<std::string, Type>> batch;
    AliasTypes resolve_alias = [&](std::string_view name) -> std::optional<Type> {
      if (auto t = store.alias_type(name)) return t;
      if (auto it = fresh.find(std::string(name)); it != fresh.end()) return it->second;
      return std::nullopt;
    };
    for (const auto& u : store.untyped()) {
      if (auto ty = infer_static_type(u.term, resolve_alias, &store.taxonomy())) {
        fresh.emplace(u.name, *ty);
        batch.emplace_back(u.name, std::move(*ty));
      }
    }
    if (batch.empty()) break;
    total += batch.size();
    store.promote(batch);
  }
  return total;
}

std::map<std::string, std::vector<std::string>> prune_candidates(
    const Store& store, const SkolemClause& clause, std::size_t disjunct,
    const std::string& skolem, const std::string& member) {
  if (disjunct >= clause.disjuncts.size()) {
    throw Error(ErrorCode::kUnknownName, fmt::format("no disjunct {}", disjunct));
  }
  const Disjunct& d = clause.disjuncts[disjunct];
  std::vector<const KbClass*> classes;
  std::vector<Range> ranges;
  for (const auto& [_, class_name] : clause.skolems) {
    const KbClass& c = store.get_class(class_name);
    classes.push_back(&c);
    ranges.push_back({0, c.members().size()});
  }
  DisjunctSolver solver(store, clause, d, classes, ranges, std::nullopt, true);
  std::optional<std::size_t> fixed;
  for (std::size_t k : d.skolems) {
    if (clause.skolems[k].first == skolem) fixed = k;
  }
  if (!fixed) {
    throw Error(ErrorCode::kUnknownName, fmt::format("'{}' is not quantified here", skolem));
  }
  auto index = classes[*fixed]->member_index(member);
  if (!index) {
    throw Error(ErrorCode::kUnknownName,
                fmt::format("'{}' is not a member of {}", member, classes[*fixed]->name()));
  }
  std::map<std::string, std::vector<std::string>> out;
  auto frame = solver.fix(*fixed, *index);
  for (std::size_t k : d.skolems) {
    if (k == *fixed) continue;
    out.emplace(clause.skolems[k].first,
                frame ? solver.prune_for(*frame, k) : std::vector<std::string>{});
  }
  return out;
}

const ClassReport* FindReport::find(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string FindReport::render(bool timings) const {
  std::string out = fmt::format("promoted\t{}\n", promoted);
  for (const auto& c : classes) {
    out += fmt::format("class.{}.scanned\t{}\n", c.name, c.scanned);
    out += fmt::format("class.{}.matched\t{}\n", c.name, c.matched);
    if (timings) {
      out += fmt::format("class.{}.elapsed_ms\t{:.3f}\n", c.name, c.elapsed.count());
    }
  }
  if (timings) out += fmt::format("elapsed_ms\t{:.3f}\n", elapsed.count());
  return out;
}

FindReport find_members(Store& store, const FindOptions& options) {
  auto start = Clock::now();
  auto order = class_order(store);
  FindReport report;
  report.promoted = promote_untyped(store);
  for (const auto& name : order) {
    auto class_start = Clock::now();
    const KbClass& cls = store.get_class(name);
    ClassReport r = cls.is_subset() ? classify_subset(store, cls, options)
                                    : classify_static(store, cls, options);
    r.elapsed = Clock::now() - class_start;
    report.classes.push_back(std::move(r));
  }
  report.elapsed = Clock::now() - start;
  return report;
}

}  // namespace flutes
