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

#include "flutes/typing.h"

#include <algorithm>

#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/sexp.h"

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
const ProofNode::variant& base(const SubtypeProof& p) { return p.node(); }

bool labels_match(const Taxonomy* taxonomy, Concept field, Concept wanted) {
  if (field == wanted) return true;
  return taxonomy != nullptr && taxonomy->label_match(field, wanted);
}

// Field lookup shared by inference; predicate records are descended into when
// a positional label is requested.
template <class Fields>
const typename Fields::value_type* select_field(const Fields& fields, Concept label,
                                                const Taxonomy* taxonomy) {
  for (const auto& f : fields) {
    if (labels_match(taxonomy, f.first, label)) return &f;
  }
  return nullptr;
}

constexpr int kMaxAliasDepth = 64;

Type expand(const Type& t, const TypeNames& names, int depth) {
  if (depth > kMaxAliasDepth) {
    throw Error(ErrorCode::kCyclicClasses, "type alias expansion does not terminate");
  }
  return std::visit(
      Overloaded{
          [&](const ListTy& l) { return list_ty(expand(l.element, names, depth)); },
          [&](const RecordTy& r) {
            std::vector<FieldType> fields;
            fields.reserve(r.fields.size());
            for (const auto& [label, ty] : r.fields) {
              fields.emplace_back(label, expand(ty, names, depth));
            }
            return Type(RecordTy{std::move(fields)});
          },
          [&](const SubsetTy& s) { return expand(s.binding_type, names, depth); },
          [&](const TyAlias& a) {
            std::optional<Type> def = names ? names(a.name) : std::nullopt;
            if (!def) {
              throw Error(ErrorCode::kDanglingAlias,
                          fmt::format("unknown type name '{}'", a.name));
            }
            return expand(*def, names, depth + 1);
          },
          [&](const auto&) { return t; },
      },
      base(t));
}

}  // namespace

bool is_static(const Type& t) {
  return std::visit(Overloaded{
                        [](const ListTy& l) { return is_static(l.element); },
                        [](const RecordTy& r) {
                          return std::all_of(r.fields.begin(), r.fields.end(),
                                             [](const FieldType& f) {
                                               return is_static(f.second);
                                             });
                        },
                        [](const SubsetTy&) { return false; },
                        [](const TyAlias&) { return false; },
                        [](const auto&) { return true; },
                    },
                    base(t));
}

Type expand_type_names(const Type& t, const TypeNames& names) {
  return expand(t, names, 0);
}

std::optional<Type> infer_static_type(const Term& t, const AliasTypes& resolve,
                                      const Taxonomy* taxonomy) {
  return std::visit(
      Overloaded{
          [](const Num&) -> std::optional<Type> { return num_ty(); },
          [](const Str&) -> std::optional<Type> { return str_ty(); },
          [](const Atom& a) -> std::optional<Type> {
            return Type(EnumTy{{a.value}});
          },
          [&](const Record& r) -> std::optional<Type> {
            std::vector<FieldType> fields;
            fields.reserve(r.fields.size());
            for (const auto& [label, value] : r.fields) {
              auto ty = infer_static_type(value, resolve, taxonomy);
              if (!ty) return std::nullopt;
              fields.emplace_back(label, std::move(*ty));
            }
            return Type(RecordTy{std::move(fields)});
          },
          [&](const List& l) -> std::optional<Type> {
            if (l.items.empty()) return list_ty(void_ty());
            auto first = infer_static_type(l.items.front(), resolve, taxonomy);
            if (!first) return std::nullopt;
            for (std::size_t i = 1; i < l.items.size(); ++i) {
              auto ty = infer_static_type(l.items[i], resolve, taxonomy);
              if (!ty || !(*ty == *first)) return std::nullopt;
            }
            return list_ty(std::move(*first));
          },
          [](const Bottom&) -> std::optional<Type> { return std::nullopt; },
          [&](const FieldSelect& f) -> std::optional<Type> {
            auto base_ty = infer_static_type(f.base, resolve, taxonomy);
            if (!base_ty) return std::nullopt;
            const auto* rec = base_ty->as<RecordTy>();
            if (rec == nullptr) return std::nullopt;
            if (const auto* hit = select_field(rec->fields, f.label, taxonomy)) {
              return hit->second;
            }
            if (f.label.is_positional() && rec->fields.size() == 1) {
              if (const auto* args = rec->fields.front().second.as<RecordTy>()) {
                if (const auto* hit = select_field(args->fields, f.label, taxonomy)) {
                  return hit->second;
                }
              }
            }
            return std::nullopt;
          },
          [](const Var&) -> std::optional<Type> { return std::nullopt; },
          [&](const TermAlias& a) -> std::optional<Type> {
            if (!resolve) return std::nullopt;
            return resolve(a.name);
          },
      },
      base(t));
}

SubtypeProof::SubtypeProof(ProofNode node)
    : node_(std::make_shared<const ProofNode>(std::move(node))) {}

bool operator==(const SubtypeProof& a, const SubtypeProof& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = base(a);
  const auto& y = base(b);
  if (x.index() != y.index()) return false;
  return std::visit(
      Overloaded{
          [](const LeafProof&) { return true; },
          [&](const ListProof& l) {
            return l.element == std::get<ListProof>(y).element;
          },
          [&](const EnumProof& e) {
            return e.renames == std::get<EnumProof>(y).renames;
          },
          [&](const RecordProof& r) {
            const auto& o = std::get<RecordProof>(y);
            if (r.pairs.size() != o.pairs.size() || r.dropped != o.dropped) {
              return false;
            }
            for (std::size_t i = 0; i < r.pairs.size(); ++i) {
              const auto& p = r.pairs[i];
              const auto& q = o.pairs[i];
              if (!(p.sup_label == q.sup_label) || !(p.sub_label == q.sub_label) ||
                  !(p.proof == q.proof)) {
                return false;
              }
            }
            return true;
          },
      },
      x);
}

std::optional<SubtypeProof> prove_subtype(const Type& sub, const Type& sup,
                                          const Taxonomy& taxonomy) {
  if (sub.is<VoidTy>()) {
    return is_static(sup) ? std::optional(SubtypeProof(LeafProof{})) : std::nullopt;
  }
  if (sub.is<NumTy>() && sup.is<NumTy>()) return SubtypeProof(LeafProof{});
  if (sub.is<StrTy>() && sup.is<StrTy>()) return SubtypeProof(LeafProof{});
  if (const auto* l = sub.as<ListTy>()) {
    const auto* r = sup.as<ListTy>();
    if (r == nullptr) return std::nullopt;
    auto element = prove_subtype(l->element, r->element, taxonomy);
    if (!element) return std::nullopt;
    return SubtypeProof(ListProof{std::move(*element)});
  }
  if (const auto* e = sub.as<EnumTy>()) {
    const auto* s = sup.as<EnumTy>();
    if (s == nullptr) return std::nullopt;
    EnumProof proof;
    for (Concept c : e->concepts) {
      auto hit = std::find(s->concepts.begin(), s->concepts.end(), c);
      if (hit == s->concepts.end()) {
        hit = std::find_if(s->concepts.begin(), s->concepts.end(),
                           [&](Concept d) { return taxonomy.equiv(c, d); });
      }
      if (hit == s->concepts.end()) return std::nullopt;
      proof.renames.emplace_back(c, *hit);
    }
    return SubtypeProof(std::move(proof));
  }
  if (const auto* r = sub.as<RecordTy>()) {
    const auto* s = sup.as<RecordTy>();
    if (s == nullptr) return std::nullopt;
    std::vector<bool> consumed(r->fields.size(), false);
    RecordProof proof;
    proof.pairs.reserve(s->fields.size());
    for (const auto& [sup_label, sup_ty] : s->fields) {
      bool paired = false;
      for (std::size_t i = 0; i < r->fields.size(); ++i) {
        if (consumed[i]) continue;
        const auto& [sub_label, sub_ty] = r->fields[i];
        if (!taxonomy.label_match(sub_label, sup_label)) continue;
        auto child = prove_subtype(sub_ty, sup_ty, taxonomy);
        if (!child) continue;
        consumed[i] = true;
        proof.pairs.push_back({sup_label, sub_label, std::move(*child)});
        paired = true;
        break;
      }
      if (!paired) return std::nullopt;
    }
    for (std::size_t i = 0; i < r->fields.size(); ++i) {
      if (!consumed[i]) proof.dropped.push_back(r->fields[i].first);
    }
    return SubtypeProof(std::move(proof));
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void domain_error(const Term& t, std::string_view expected) {
  throw Error(ErrorCode::kCoercionDomain,
              fmt::format("expected {}, got {}", expected, render_sexp(t)));
}

}  // namespace

Term apply_coercion(const Coercion& c, const Term& t) {
  if (t.is<TermAlias>() || t.is<Bottom>()) return t;
  return std::visit(
      Overloaded{
          [&](const LeafProof&) { return t; },
          [&](const ListProof& l) {
            const auto* items = t.as<List>();
            if (items == nullptr) domain_error(t, "a list");
            std::vector<Term> out;
            out.reserve(items->items.size());
            for (const auto& i : items->items) {
              out.push_back(apply_coercion(l.element, i));
            }
            return list(std::move(out));
          },
          [&](const EnumProof& e) {
            const auto* a = t.as<Atom>();
            if (a == nullptr) domain_error(t, "an atom");
            for (const auto& [from, to] : e.renames) {
              if (from == a->value) return from == to ? t : Term(Atom{to});
            }
            domain_error(t, "an atom of the enumeration");
          },
          [&](const RecordProof& r) {
            const auto* rec = t.as<Record>();
            if (rec == nullptr) domain_error(t, "a record");
            if (rec->fields.size() != r.pairs.size() + r.dropped.size()) {
              domain_error(t, "a record of the proof's subtype");
            }
            auto lookup = [&](Concept label) -> const Term* {
              for (const auto& f : rec->fields) {
                if (f.first == label) return &f.second;
              }
              return nullptr;
            };
            for (Concept d : r.dropped) {
              if (lookup(d) == nullptr) domain_error(t, "a record of the proof's subtype");
            }
            std::vector<Field> fields;
            fields.reserve(r.pairs.size());
            for (const auto& p : r.pairs) {
              const Term* value = lookup(p.sub_label);
              if (value == nullptr) domain_error(t, "a record of the proof's subtype");
              if (value->is<Bottom>()) {
                fields.emplace_back(p.sup_label, Term(Bottom{p.sup_label}));
              } else {
                fields.emplace_back(p.sup_label, apply_coercion(p.proof, *value));
              }
            }
            return record_of(std::move(fields));
          },
      },
      base(c));
}

bool is_identity_shaped(const SubtypeProof& p) {
  return std::visit(
      Overloaded{
          [](const LeafProof&) { return true; },
          [](const ListProof& l) { return is_identity_shaped(l.element); },
          [](const EnumProof& e) {
            return std::all_of(e.renames.begin(), e.renames.end(),
                               [](const auto& r) { return r.first == r.second; });
          },
          [](const RecordProof& r) {
            return r.dropped.empty() &&
                   std::all_of(r.pairs.begin(), r.pairs.end(), [](const FieldPairing& f) {
                     return f.sup_label == f.sub_label && is_identity_shaped(f.proof);
                   });
          },
      },
      base(p));
}

std::string render_proof(const SubtypeProof& p) {
  return std::visit(
      Overloaded{
          [](const LeafProof&) { return std::string("(leaf)"); },
          [](const ListProof& l) {
            return fmt::format("(list {})", render_proof(l.element));
          },
          [](const EnumProof& e) {
            std::string out = "(enum";
            for (const auto& [from, to] : e.renames) {
              out += fmt::format(" ({} {})", render_concept(from), render_concept(to));
            }
            return out + ")";
          },
          [](const RecordProof& r) {
            std::string out = "(record (";
            bool first = true;
            for (const auto& f : r.pairs) {
              if (!first) out += ' ';
              first = false;
              out += fmt::format("({} {} {})", render_concept(f.sup_label),
                                 render_concept(f.sub_label), render_proof(f.proof));
            }
            out += ") (";
            first = true;
            for (Concept d : r.dropped) {
              if (!first) out += ' ';
              first = false;
              out += render_concept(d);
            }
            return out + "))";
          },
      },
      base(p));
}

std::optional<SubtypeProof> check_term(const Term& t, const Type& sup,
                                       const Taxonomy& taxonomy,
                                       const AliasTypes& resolve) {
  if (auto ty = infer_static_type(t, resolve, &taxonomy)) {
    return prove_subtype(*ty, sup, taxonomy);
  }
  if (const auto* rec = t.as<Record>()) {
    const auto* s = sup.as<RecordTy>();
    if (s == nullptr) return std::nullopt;
    std::vector<bool> consumed(rec->fields.size(), false);
    RecordProof proof;
    for (const auto& [sup_label, sup_ty] : s->fields) {
      bool paired = false;
      for (std::size_t i = 0; i < rec->fields.size() && !paired; ++i) {
        if (consumed[i]) continue;
        const auto& [label, value] = rec->fields[i];
        if (!taxonomy.label_match(label, sup_label)) continue;
        std::optional<SubtypeProof> child;
        if (value.is<Bottom>()) {
          if (is_static(sup_ty)) child = SubtypeProof(LeafProof{});
        } else {
          child = check_term(value, sup_ty, taxonomy, resolve);
        }
        if (!child) continue;
        consumed[i] = true;
        proof.pairs.push_back({sup_label, label, std::move(*child)});
        paired = true;
      }
      if (!paired) return std::nullopt;
    }
    for (std::size_t i = 0; i < rec->fields.size(); ++i) {
      if (!consumed[i]) proof.dropped.push_back(rec->fields[i].first);
    }
    return SubtypeProof(std::move(proof));
  }
  if (const auto* items = t.as<List>()) {
    const auto* s = sup.as<ListTy>();
    if (s == nullptr || items->items.empty()) return std::nullopt;
    // Aliases pass through coercion untouched, so their proofs only need to
    // exist. Every other item must share one element proof.
    std::optional<SubtypeProof> element;
    std::optional<SubtypeProof> alias_element;
    for (const auto& i : items->items) {
      auto p = check_term(i, s->element, taxonomy, resolve);
      if (!p) return std::nullopt;
      if (i.is<TermAlias>()) {
        if (!alias_element) alias_element = std::move(p);
        continue;
      }
      if (element && !(*p == *element)) return std::nullopt;
      element = std::move(p);
    }
    return SubtypeProof(ListProof{element ? std::move(*element) : std::move(*alias_element)});
  }
  return std::nullopt;
}

bool conforms_exactly(const Term& t, const Type& type, const Taxonomy& taxonomy,
                      const AliasTypes& resolve) {
  if (t.is<Bottom>()) return is_static(type);
  return std::visit(
      Overloaded{
          [&](const Num&) { return type.is<NumTy>(); },
          [&](const Str&) { return type.is<StrTy>(); },
          [&](const Atom& a) {
            const auto* e = type.as<EnumTy>();
            return e != nullptr && std::find(e->concepts.begin(), e->concepts.end(),
                                             a.value) != e->concepts.end();
          },
          [&](const Record& r) {
            const auto* rt = type.as<RecordTy>();
            if (rt == nullptr || rt->fields.size() != r.fields.size()) return false;
            for (std::size_t i = 0; i < r.fields.size(); ++i) {
              if (!(r.fields[i].first == rt->fields[i].first)) return false;
              if (!conforms_exactly(r.fields[i].second, rt->fields[i].second, taxonomy,
                                    resolve)) {
                return false;
              }
            }
            return true;
          },
          [&](const List& l) {
            const auto* lt = type.as<ListTy>();
            if (lt == nullptr) return false;
            return std::all_of(l.items.begin(), l.items.end(), [&](const Term& i) {
              return conforms_exactly(i, lt->element, taxonomy, resolve);
            });
          },
          [&](const TermAlias& a) {
            if (!resolve) return false;
            auto ty = resolve(a.name);
            return ty && prove_subtype(*ty, type, taxonomy).has_value();
          },
          [](const auto&) { return false; },
      },
      base(t));
}

}  // namespace flutes
