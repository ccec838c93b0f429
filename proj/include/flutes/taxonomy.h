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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flutes {

// An interned taxonomy label. Named concepts are interned in a process-wide
// pool, so two handles made from the same string compare equal. Positional
// concepts label predicate arguments and never equal a named concept.
class Concept {
 public:
  // Throws Error(kInvalidConcept) on an empty name.
  static Concept named(std::string_view name);
  static Concept positional(std::uint32_t position);

  bool is_positional() const noexcept { return (bits_ & kPositionalBit) != 0; }
  std::uint32_t position() const noexcept { return bits_ & ~kPositionalBit; }
  // Only meaningful for named concepts.
  std::string_view name() const;
  std::uint32_t raw() const noexcept { return bits_; }

  // Human-readable form: the name, or "#<position>".
  std::string to_string() const;

  friend bool operator==(Concept a, Concept b) noexcept {
    return a.bits_ == b.bits_;
  }

 private:
  static constexpr std::uint32_t kPositionalBit = 0x80000000u;
  explicit Concept(std::uint32_t bits) : bits_(bits) {}

  std::uint32_t bits_;
};

inline Concept mk_concept(std::string_view name) {
  return Concept::named(name);
}

// The total order on labels: positional concepts by index first, then named
// concepts by byte-wise lexicographic order of their names.
std::strong_ordering compare(Concept a, Concept b);

struct ConceptLess {
  bool operator()(Concept a, Concept b) const { return compare(a, b) < 0; }
};

struct ConceptHash {
  std::size_t operator()(Concept c) const noexcept {
    return std::hash<std::uint32_t>{}(c.raw());
  }
};

// Semantic relations between concepts: synonyms (an equivalence relation with
// union-find semantics) and an acyclic is-a lattice (hypernyms/hyponyms).
//
// Mutations must be serialized by the caller; const members never mutate and
// may be called concurrently between mutations.
class Taxonomy {
 public:
  void same_as(Concept a, Concept b);
  bool equiv(Concept a, Concept b) const;
  // Least member (under compare) of the equivalence class of c.
  Concept canonical(Concept c) const;

  // Throws Error(kLatticeCycle) if parent is already below child.
  void add_is_a(Concept child, Concept parent);
  // Reflexive-transitive closure of is-a, taken modulo equivalence.
  bool label_leq(Concept a, Concept b) const;
  // Least common upper bound; nullopt when a and b share no ancestor. Ties
  // between incomparable minimal bounds go to the least under compare.
  std::optional<Concept> join(Concept a, Concept b) const;

  // True iff a field labelled sub can serve where sup is required.
  bool label_match(Concept sub, Concept sup) const;

  // The relations in assertion order, for persistence.
  const std::vector<std::pair<Concept, Concept>>& same_as_log() const {
    return same_as_log_;
  }
  const std::vector<std::pair<Concept, Concept>>& is_a_edges() const {
    return is_a_log_;
  }

 private:
  Concept find(Concept c) const;
  const std::vector<Concept>& class_members(Concept root) const;
  std::vector<Concept> upper_bounds(Concept c) const;

  std::unordered_map<Concept, Concept, ConceptHash> parent_;
  std::unordered_map<Concept, std::vector<Concept>, ConceptHash> members_;
  std::unordered_map<Concept, Concept, ConceptHash> least_;
  std::unordered_map<Concept, std::vector<Concept>, ConceptHash> is_a_;
  std::vector<std::pair<Concept, Concept>> same_as_log_;
  std::vector<std::pair<Concept, Concept>> is_a_log_;
};

}  // namespace flutes
