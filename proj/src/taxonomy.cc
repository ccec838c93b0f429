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

#include "flutes/taxonomy.h"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_set>

#include <fmt/core.h>

#include "flutes/error.h"

namespace flutes {
namespace {

// Process-wide interning table for named concepts. Names live in a deque so
// views handed out stay valid as the pool grows.
class ConceptPool {
 public:
  static ConceptPool& instance() {
    static ConceptPool pool;
    return pool;
  }

  std::uint32_t intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(name); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::string_view name(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    return names_.at(id);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

}  // namespace

Concept Concept::named(std::string_view name) {
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidConcept, "concept name must be nonempty");
  }
  return Concept(ConceptPool::instance().intern(name));
}

Concept Concept::positional(std::uint32_t position) {
  if (position & kPositionalBit) {
    throw Error(ErrorCode::kInvalidConcept,
                fmt::format("position {} out of range", position));
  }
  return Concept(position | kPositionalBit);
}

std::string_view Concept::name() const {
  return ConceptPool::instance().name(bits_);
}

std::string Concept::to_string() const {
  if (is_positional()) return fmt::format("#{}", position());
  return std::string(name());
}

std::strong_ordering compare(Concept a, Concept b) {
  if (a == b) return std::strong_ordering::equal;
  if (a.is_positional() != b.is_positional()) {
    return a.is_positional() ? std::strong_ordering::less
                             : std::strong_ordering::greater;
  }
  if (a.is_positional()) return a.position() <=> b.position();
  return a.name().compare(b.name()) <=> 0;
}

Concept Taxonomy::find(Concept c) const {
  auto it = parent_.find(c);
  while (it != parent_.end() && !(it->second == c)) {
    c = it->second;
    it = parent_.find(c);
  }
  return c;
}

const std::vector<Concept>& Taxonomy::class_members(Concept root) const {
  static const std::vector<Concept> kEmpty;
  auto it = members_.find(root);
  return it == members_.end() ? kEmpty : it->second;
}

void Taxonomy::same_as(Concept a, Concept b) {
  Concept ra = find(a);
  Concept rb = find(b);
  if (ra == rb) return;
  auto singleton = [this](Concept r) {
    if (!members_.contains(r)) {
      members_.emplace(r, std::vector<Concept>{r});
      least_.insert_or_assign(r, r);
      parent_.insert_or_assign(r, r);
    }
  };
  singleton(ra);
  singleton(rb);
  if (members_.at(ra).size() < members_.at(rb).size()) std::swap(ra, rb);
  parent_.insert_or_assign(rb, ra);
  auto& into = members_.at(ra);
  auto& from = members_.at(rb);
  into.insert(into.end(), from.begin(), from.end());
  members_.erase(rb);
  Concept least = least_.at(rb);
  if (compare(least, least_.at(ra)) < 0) least_.insert_or_assign(ra, least);
  least_.erase(rb);
  same_as_log_.emplace_back(a, b);
}

bool Taxonomy::equiv(Concept a, Concept b) const {
  return a == b || find(a) == find(b);
}

Concept Taxonomy::canonical(Concept c) const {
  auto it = least_.find(find(c));
  return it == least_.end() ? c : it->second;
}

std::vector<Concept> Taxonomy::upper_bounds(Concept c) const {
  std::vector<Concept> roots;
  std::unordered_set<Concept, ConceptHash> seen;
  std::deque<Concept> queue;
  auto visit = [&](Concept x) {
    Concept r = find(x);
    if (seen.insert(r).second) {
      roots.push_back(r);
      queue.push_back(r);
    }
  };
  visit(c);
  while (!queue.empty()) {
    Concept r = queue.front();
    queue.pop_front();
    const auto& members = class_members(r);
    auto expand = [&](Concept m) {
      if (auto it = is_a_.find(m); it != is_a_.end()) {
        for (Concept p : it->second) visit(p);
      }
    };
    if (members.empty()) {
      expand(r);
    } else {
      for (Concept m : members) expand(m);
    }
  }
  return roots;
}

bool Taxonomy::label_leq(Concept a, Concept b) const {
  if (equiv(a, b)) return true;
  if (is_a_.empty()) return false;
  Concept target = find(b);
  for (Concept r : upper_bounds(a)) {
    if (r == target) return true;
  }
  return false;
}

void Taxonomy::add_is_a(Concept child, Concept parent) {
  if (label_leq(parent, child)) {
    throw Error(ErrorCode::kLatticeCycle,
                fmt::format("{} is-a {} would close a cycle", child.to_string(),
                            parent.to_string()));
  }
  auto& parents = is_a_[child];
  if (std::find(parents.begin(), parents.end(), parent) != parents.end()) {
    return;
  }
  parents.push_back(parent);
  is_a_log_.emplace_back(child, parent);
}

std::optional<Concept> Taxonomy::join(Concept a, Concept b) const {
  auto ua = upper_bounds(a);
  auto ub = upper_bounds(b);
  std::unordered_set<Concept, ConceptHash> in_b(ub.begin(), ub.end());
  std::vector<Concept> common;
  for (Concept r : ua) {
    if (in_b.contains(r)) common.push_back(r);
  }
  std::optional<Concept> best;
  for (Concept x : common) {
    bool minimal = std::none_of(common.begin(), common.end(), [&](Concept y) {
      return !(y == x) && label_leq(y, x);
    });
    if (!minimal) continue;
    Concept c = canonical(x);
    if (!best || compare(c, *best) < 0) best = c;
  }
  return best;
}

bool Taxonomy::label_match(Concept sub, Concept sup) const {
  if (sub == sup) return true;
  if (sub.is_positional() || sup.is_positional()) return false;
  return label_leq(sub, sup);
}

}  // namespace flutes
