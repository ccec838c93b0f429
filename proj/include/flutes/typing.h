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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "flutes/taxonomy.h"
#include "flutes/term.h"

namespace flutes {

// Maps a term alias to the type of the term it names, if that term is typed.
using AliasTypes = std::function<std::optional<Type>(std::string_view)>;
// Maps a type alias (class name) to its definition.
using TypeNames = std::function<std::optional<Type>(std::string_view)>;

// Static types contain no SubsetTy and no TyAlias.
bool is_static(const Type& t);

// Infers the static type of t, or nullopt when t is not typeable: it contains
// a variable, a Bottom, a heterogeneous list, or an alias `resolve` does not
// know. The empty list has type ListTy(VoidTy).
std::optional<Type> infer_static_type(const Term& t, const AliasTypes& resolve = {},
                                      const Taxonomy* taxonomy = nullptr);

// Replaces every TyAlias by its definition, recursively. A name that resolves
// to a subset type contributes that subset type's binding type. Throws
// Error(kDanglingAlias) for unknown names and Error(kCyclicClasses) for
// self-referential definitions.
Type expand_type_names(const Type& t, const TypeNames& names);

struct ProofNode;

// Witness of sub <= sup. It doubles as the coercion that rewrites terms of
// the subtype into terms of the supertype.
class SubtypeProof {
 public:
  explicit SubtypeProof(ProofNode node);

  const ProofNode& node() const { return *node_; }

  template <class Alt>
  const Alt* as() const;

  friend bool operator==(const SubtypeProof& a, const SubtypeProof& b);

 private:
  std::shared_ptr<const ProofNode> node_;
};

using Coercion = SubtypeProof;

// Num <= Num, Str <= Str, Void <= anything.
struct LeafProof {};
struct ListProof {
  SubtypeProof element;
};
// One entry per concept of the subtype: (sub concept, sup concept).
struct EnumProof {
  std::vector<std::pair<Concept, Concept>> renames;
};
struct FieldPairing {
  Concept sup_label;
  Concept sub_label;
  SubtypeProof proof;
};
// Pairings in supertype field order; `dropped` lists the subtype fields the
// coercion discards.
struct RecordProof {
  std::vector<FieldPairing> pairs;
  std::vector<Concept> dropped;
};

struct ProofNode : std::variant<LeafProof, ListProof, EnumProof, RecordProof> {
  using variant::variant;
};

template <class Alt>
const Alt* SubtypeProof::as() const {
  return std::get_if<Alt>(static_cast<const ProofNode::variant*>(node_.get()));
}

// Deterministic structural subtyping. Supertype fields are taken in sorted
// order; each is paired with the first unconsumed subtype field (in sorted
// order) whose label matches and whose type is provably a subtype. Extra
// subtype fields are allowed. Both types must be static.
std::optional<SubtypeProof> prove_subtype(const Type& sub, const Type& sup,
                                          const Taxonomy& taxonomy);

// Renames matched fields to the supertype's labels, drops unmatched ones and
// recurses. Aliases are references and pass through unchanged. Throws
// Error(kCoercionDomain) when t does not have the proof's subtype shape.
Term apply_coercion(const Coercion& c, const Term& t);

// No renamed labels, no renamed enum concepts and no dropped fields.
bool is_identity_shaped(const SubtypeProof& p);

std::string render_proof(const SubtypeProof& p);

// Checks a term against a known static type. Unlike inference this accepts
// Bottom field values, which check against any declared field type.
std::optional<SubtypeProof> check_term(const Term& t, const Type& sup,
                                       const Taxonomy& taxonomy,
                                       const AliasTypes& resolve = {});

// Schema-exactness: records carry exactly the type's labels, atoms belong to
// the enum, aliases name terms provably within the expected type and Bottom
// is accepted anywhere.
bool conforms_exactly(const Term& t, const Type& type, const Taxonomy& taxonomy,
                      const AliasTypes& resolve = {});

}  // namespace flutes
