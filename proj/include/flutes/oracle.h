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
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flutes/rules.h"
#include "flutes/store.h"

namespace flutes {

// Reference classifier. Recomputes every class from the typed collection by
// direct interpretation: quantifiers iterate all members of their class,
// each branch of the proposition keeps the unifier of its equations, and
// comparisons are decided once their arguments are ground. No
// skolemization, pruning or watermarks. Meant for cross-checking on small
// corpora.
class Oracle {
 public:
  explicit Oracle(const Store& store);

  // Throws Error(kUnknownName).
  const std::vector<Member>& members(std::string_view class_name) const;
  // Rendered member terms.
  std::set<std::string> rendered(std::string_view class_name) const;
  // Atoms visited across all quantifier assignments.
  std::size_t evaluations() const { return evaluations_; }

 private:
  struct State;
  using Quantified = std::map<std::string, const Member*, std::less<>>;

  void compute_static(const KbClass& c);
  void compute_subset(const KbClass& c);
  void eval(const Prop& p, const Quantified& q, const State& s, std::vector<State>& out);
  void eval_atom(const Prop& p, bool negated, const Quantified& q, State s,
                 std::vector<State>& out);
  // Decides the waiting comparisons that are ground; false if one fails.
  bool settle(State& s) const;

  const Store& store_;
  TermEnv env_;
  std::map<std::string, std::vector<Member>, std::less<>> members_;
  std::size_t evaluations_ = 0;
};

// Rendered member terms of a class as the store holds them.
std::set<std::string> rendered_members(const KbClass& c);

}  // namespace flutes
