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

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flutes/store.h"
#include "flutes/term.h"

namespace flutes {

// Resolves a term alias to the term it names.
using TermEnv = std::function<std::optional<Term>(std::string_view)>;

// Typed terms first, then class members that are not typed terms.
TermEnv store_env(const Store& store);

// Reduces field selections. A selection whose label matches no field of a
// record, or a positional selection on a predicate application, descends
// into the argument record. Aliases are only dereferenced when selected
// from. Throws Error(kEvaluation) on a missing field, an unbound alias, a
// free variable or a selection from a non-record.
Term eval_term(const Term& t, const TermEnv& env, const Taxonomy& taxonomy);

// Single-binder lambda abstraction  \param : input_class . body  with the
// declared output type.
struct LambdaRule {
  std::string name;
  std::string param;
  std::string input_class;
  Term body;
  Type output_type;
};

// Checks free_vars(body) is within {param}. Throws Error(kConstruction).
LambdaRule make_lambda_rule(std::string name, std::string param,
                            std::string input_class, Term body, Type output_type);

// Evaluates the body with param bound to member and coerces the result into
// the output type. Throws Error(kRuleFailure) when evaluation fails or the
// result is not subsumed by the output type.
Term apply_lambda(const LambdaRule& rule, const Term& member, const Store& store);

// Checks a rule's result against a type and coerces it. Throws
// Error(kRuleFailure).
Term subsume(const Term& result, const Type& type, const Store& store);

// The analytic receives the member (already coerced into the input class)
// and its name.
using AnalyticFn = std::function<Term(const Member& member)>;

struct Analytic {
  std::string name;
  std::string input_class;
  std::string output_class;
  AnalyticFn fn;
  // Pure analytics may run on several threads at once.
  bool pure = false;
};

struct AnalyticFailure {
  std::string member;
  std::string message;
};

struct AnalyticReport {
  std::string name;
  std::size_t processed = 0;
  std::size_t inserted = 0;
  std::size_t duplicates = 0;
  std::vector<AnalyticFailure> failures;
  std::chrono::duration<double, std::milli> elapsed{};

  // key<TAB>value lines; the elapsed line is omitted unless `timings`.
  std::string render(bool timings = true) const;
};

class Analytics {
 public:
  // Throws Error(kDuplicateName) and Error(kUnknownName) for classes the
  // store does not define.
  void mk_analytic(const Store& store, Analytic analytic);

  const Analytic* find(std::string_view name) const;
  std::vector<std::string> names() const;

  // Applies the analytic to every input member. Failures are recorded per
  // member; results are inserted in member order. Throws
  // Error(kUnknownName).
  AnalyticReport run_analytic(std::string_view name, Store& store,
                              std::size_t workers = 1) const;

 private:
  std::map<std::string, Analytic, std::less<>> analytics_;
};

// The host function behind a `nearest` analytic: the aliases of the members
// of `target_class` within k steps of the input member, as a list.
AnalyticFn nearest_fn(const Store& store, std::size_t k, std::string target_class);

}  // namespace flutes
