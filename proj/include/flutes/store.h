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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "flutes/taxonomy.h"
#include "flutes/term.h"
#include "flutes/typing.h"

namespace flutes {

struct UntypedTerm {
  std::string name;
  Term term;
};

struct TypedTerm {
  std::uint64_t id;  // 1-based position in the typed log
  std::string name;
  Term term;
  Type type;
};

struct Member {
  std::string name;
  Term term;
  std::optional<Type> type;
};

// A named, persisted type together with the index of terms known to conform
// to it. Members are stored already coerced into the class schema.
class KbClass {
 public:
  const std::string& name() const { return name_; }
  const Type& definition() const { return definition_; }
  bool is_subset() const { return definition_.is<SubsetTy>(); }
  // The definition with type names expanded; for subset classes, the
  // expanded binding type.
  const Type& schema() const { return schema_; }

  const std::vector<Member>& members() const { return members_; }
  std::optional<std::size_t> member_index(std::string_view name) const;
  bool has_member(std::string_view name) const {
    return member_index(name).has_value();
  }
  bool has_term(const Term& t) const { return terms_.contains(t); }

  // Static classes: number of typed terms already scanned.
  std::uint64_t watermark() const { return watermark_; }
  // Subset classes: member count of each referenced class at the last run.
  const std::map<std::string, std::size_t>& dependency_watermarks() const {
    return dependency_watermarks_;
  }

 private:
  friend class Store;

  KbClass(std::string name, Type definition, Type schema)
      : name_(std::move(name)),
        definition_(std::move(definition)),
        schema_(std::move(schema)) {}

  std::string name_;
  Type definition_;
  Type schema_;
  std::vector<Member> members_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::unordered_set<Term, TermHash> terms_;
  std::uint64_t watermark_ = 0;
  std::map<std::string, std::size_t> dependency_watermarks_;
  std::size_t persisted_ = 0;
};

struct StoreStats {
  std::size_t untyped = 0;
  std::size_t typed = 0;
  std::size_t classes = 0;
  std::size_t members = 0;
  std::size_t edges = 0;
};

// Embedded knowledge base: untyped and typed term collections, one member
// collection per class, the class catalog, the taxonomy and the containment
// adjacency list.
//
// A store opened on a directory persists to:
//   catalog.fsx      taxonomy assertions, class definitions, watermarks
//   untyped.fsx      (term "name" TERM)             rewritten on flush
//   typed.fsx        (typed ID "name" TERM TYPE)    append-only
//   class_<c>.fsx    (member "name" TERM)           append-only
//   adjacency.fsx    (edge "from" "to")             append-only
// one S-expression per line.
//
// Single writer. Const members may run concurrently with each other.
class Store {
 public:
  Store() = default;
  // Creates the directory if needed and loads whatever it holds. Throws
  // Error(kCorruption) on unreadable contents and Error(kIo) on I/O failure.
  static Store open(const std::filesystem::path& directory);

  Store(Store&&) = default;
  Store& operator=(Store&&) = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::optional<std::filesystem::path>& directory() const { return directory_; }

  Taxonomy& taxonomy() { return taxonomy_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  void same_as(std::string_view a, std::string_view b);
  void add_is_a(std::string_view child, std::string_view parent);

  // Appends to the untyped collection. Throws Error(kDuplicateName) for a
  // bound name and Error(kAliasCycle) if the term would close an alias cycle.
  void abox_insert(const std::string& name, const Term& t);

  // Registers a class with an empty member collection. Throws
  // Error(kDuplicateClass), Error(kDanglingAlias) for unknown type names and
  // Error(kUnsupportedForm) for subset propositions the classifier cannot
  // compile (a quantifier under negation, a quantifier not bounded by a
  // class name, or a free variable missing from the binding term).
  void mk_kb_class(const std::string& name, const Type& type);

  bool has_term(std::string_view name) const;
  const std::vector<UntypedTerm>& untyped() const { return untyped_; }
  const std::vector<TypedTerm>& typed() const { return typed_; }
  const TypedTerm* find_typed(std::string_view name) const;

  // Classes in definition order.
  const std::vector<KbClass>& classes() const { return classes_; }
  const KbClass* find_class(std::string_view name) const;
  // Throws Error(kUnknownName).
  const KbClass& get_class(std::string_view name) const;

  // Names referenced directly through aliases, and the inverse.
  std::set<std::string> contains(std::string_view name) const;
  std::set<std::string> contained_by(std::string_view name) const;
  // Members of class c within k steps of t in the undirected containment
  // graph, t itself included.
  std::set<std::string> nearest(std::size_t k, std::string_view t,
                                std::string_view c) const;

  // Alias types: typed terms first, then members derived by subset classes
  // and analytics.
  AliasTypes alias_types() const;
  TypeNames type_names() const;
  std::optional<Type> alias_type(std::string_view name) const;
  // The term an alias names, in the same lookup order.
  std::optional<Term> alias_term(std::string_view name) const;

  // Moves untyped terms to the typed collection, in the given order.
  void promote(const std::vector<std::pair<std::string, Type>>& inferred);

  // Name a member would get if inserted: the alias name for an alias term,
  // otherwise <class>#<16 hex digits of a structural hash>.
  std::string member_name_for(const KbClass& c, const Term& t) const;

  // Without a name, inserts unless a structurally equal member exists and
  // member_name_for() picks the name. With a name, inserts unless a member
  // of that name exists; Error(kDuplicateName) if it holds a different term. Derived members get adjacency edges to the
  // aliases they reference. Returns whether the member was added.
  bool add_member(std::string_view class_name, const Term& t,
                  std::string name = {});

  void set_watermark(std::string_view class_name, std::uint64_t watermark);
  void set_dependency_watermark(std::string_view class_name,
                                const std::string& dependency, std::size_t count);

  // Schema-exactness of a member against its class.
  bool member_conforms(const KbClass& c, const Member& m) const;

  StoreStats stats() const;

  // Persists everything added since the last flush. No-op for in-memory
  // stores.
  void flush();

 private:
  KbClass& mutable_class(std::string_view name);
  void add_edges(const std::string& from, const std::set<std::string>& to);
  void load();

  std::optional<std::filesystem::path> directory_;
  Taxonomy taxonomy_;

  std::vector<UntypedTerm> untyped_;
  std::unordered_map<std::string, std::size_t> untyped_index_;
  std::vector<TypedTerm> typed_;
  std::unordered_map<std::string, std::size_t> typed_index_;

  std::vector<KbClass> classes_;
  std::unordered_map<std::string, std::size_t> class_index_;
  // Members not named after a typed term: name -> (class, member).
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> derived_;

  std::unordered_map<std::string, std::set<std::string>> forward_;
  std::unordered_map<std::string, std::set<std::string>> reverse_;
  std::vector<std::pair<std::string, std::string>> edge_log_;

  std::size_t typed_persisted_ = 0;
  std::size_t edges_persisted_ = 0;
};

// Validates a class name for use in file names and reports.
bool valid_class_name(std::string_view name);

// Parses a concrete-syntax program and inserts its declarations in order.
// Names already in the store resolve as aliases. A syntax error leaves the
// store unchanged. Returns the number of terms inserted.
std::size_t insert_program(Store& store, std::string_view text);

}  // namespace flutes
