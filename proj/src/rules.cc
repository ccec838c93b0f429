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

#include "flutes/rules.h"

#include <algorithm>
#include <thread>
#include <variant>

#include <fmt/core.h>

#include "flutes/error.h"
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

[[noreturn]] void eval_error(std::string message) {
  throw Error(ErrorCode::kEvaluation, std::move(message));
}

const Term* find_field(const Record& r, Concept label, const Taxonomy& taxonomy) {
  for (const auto& [l, v] : r.fields) {
    if (l == label) return &v;
  }
  for (const auto& [l, v] : r.fields) {
    if (taxonomy.label_match(l, label)) return &v;
  }
  return nullptr;
}

Term select(const Term& base, Concept label, const TermEnv& env,
            const Taxonomy& taxonomy) {
  Term current = base;
  for (int hops = 0; const auto* a = current.as<TermAlias>(); ++hops) {
    std::optional<Term> next;
    if (env) next = env(a->name);
    if (!next) eval_error(fmt::format("unbound alias '{}'", a->name));
    if (hops > 1024) eval_error(fmt::format("alias chain through '{}'", a->name));
    current = *next;
  }
  const auto* rec = current.as<Record>();
  if (rec == nullptr) {
    eval_error(fmt::format("cannot select {} from {}", label.to_string(),
                           render_sexp(current)));
  }
  if (const auto* hit = find_field(*rec, label, taxonomy)) {
    return eval_term(*hit, env, taxonomy);
  }
  if (label.is_positional() && rec->fields.size() == 1) {
    if (const auto* args = rec->fields.front().second.as<Record>()) {
      if (const auto* hit = find_field(*args, label, taxonomy)) {
        return eval_term(*hit, env, taxonomy);
      }
    }
  }
  eval_error(fmt::format("no field {} in {}", label.to_string(), render_sexp(current)));
}

}  // namespace

TermEnv store_env(const Store& store) {
  return [&store](std::string_view name) { return store.alias_term(name); };
}

Term eval_term(const Term& t, const TermEnv& env, const Taxonomy& taxonomy) {
  return std::visit(
      Overloaded{
          [&](const Record& r) {
            std::vector<Field> fields;
            fields.reserve(r.fields.size());
            for (const auto& [label, value] : r.fields) {
              fields.emplace_back(label, eval_term(value, env, taxonomy));
            }
            return Term(Record{std::move(fields)});
          },
          [&](const List& l) {
            std::vector<Term> items;
            items.reserve(l.items.size());
            for (const auto& i : l.items) items.push_back(eval_term(i, env, taxonomy));
            return list(std::move(items));
          },
          [&](const FieldSelect& f) {
            return select(eval_term(f.base, env, taxonomy), f.label, env, taxonomy);
          },
          [&](const Var& v) -> Term { eval_error(fmt::format("free variable '{}'", v.name)); },
          [&](const auto&) { return t; },
      },
      static_cast<const TermNode::variant&>(t.node()));
}

LambdaRule make_lambda_rule(std::string name, std::string param,
                            std::string input_class, Term body, Type output_type) {
  for (const auto& v : free_vars(body)) {
    if (v != param) {
      throw Error(ErrorCode::kConstruction,
                  fmt::format("rule '{}' has free variable '{}'", name, v));
    }
  }
  return LambdaRule{std::move(name), std::move(param), std::move(input_class),
                    std::move(body), std::move(output_type)};
}

Term subsume(const Term& result, const Type& type, const Store& store) {
  try {
    Type expected = expand_type_names(type, store.type_names());
    auto proof = check_term(result, expected, store.taxonomy(), store.alias_types());
    if (!proof) {
      throw Error(ErrorCode::kRuleFailure,
                  fmt::format("{} is not subsumed by {}", render_sexp(result),
                              render_sexp(expected)));
    }
    return apply_coercion(*proof, result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRuleFailure) throw;
    throw Error(ErrorCode::kRuleFailure, e.what());
  }
}

Term apply_lambda(const LambdaRule& rule, const Term& member, const Store& store) {
  Term result = [&] {
    try {
      Term body = substitute(Substitution{{rule.param, member}}, rule.body);
      return eval_term(body, store_env(store), store.taxonomy());
    } catch (const Error& e) {
      throw Error(ErrorCode::kRuleFailure,
                  fmt::format("rule '{}': {}", rule.name, e.what()));
    }
  }();
  return subsume(result, rule.output_type, store);
}

std::string AnalyticReport::render(bool timings) const {
  std::string out;
  out += fmt::format("analytic.{}.processed\t{}\n", name, processed);
  out += fmt::format("analytic.{}.inserted\t{}\n", name, inserted);
  out += fmt::format("analytic.{}.duplicates\t{}\n", name, duplicates);
  out += fmt::format("analytic.{}.failed\t{}\n", name, failures.size());
  for (const auto& f : failures) {
    out += fmt::format("analytic.{}.failure\t{}\t{}\n", name, f.member, f.message);
  }
  if (timings) {
    out += fmt::format("analytic.{}.elapsed_ms\t{:.3f}\n", name, elapsed.count());
  }
  return out;
}

void Analytics::mk_analytic(const Store& store, Analytic analytic) {
  if (analytics_.contains(analytic.name)) {
    throw Error(ErrorCode::kDuplicateName,
                fmt::format("analytic '{}' is already defined", analytic.name));
  }
  store.get_class(analytic.input_class);
  store.get_class(analytic.output_class);
  if (!analytic.fn) {
    throw Error(ErrorCode::kConstruction,
                fmt::format("analytic '{}' has no function", analytic.name));
  }
  std::string name = analytic.name;
  analytics_.emplace(std::move(name), std::move(analytic));
}

const Analytic* Analytics::find(std::string_view name) const {
  auto it = analytics_.find(name);
  return it == analytics_.end() ? nullptr : &it->second;
}

std::vector<std::string> Analytics::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : analytics_) out.push_back(name);
  return out;
}

AnalyticReport Analytics::run_analytic(std::string_view name, Store& store,
                                       std::size_t workers) const {
  const Analytic* analytic = find(name);
  if (analytic == nullptr) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown analytic '{}'", name));
  }
  auto start = std::chrono::steady_clock::now();
  AnalyticReport report;
  report.name = analytic->name;
  store.get_class(analytic->output_class);
  // Snapshot: members added by this run are not fed back into it.
  const std::vector<Member> inputs = store.get_class(analytic->input_class).members();
  report.processed = inputs.size();

  using Outcome = std::variant<Term, std::string>;
  std::vector<std::optional<Outcome>> outcomes(inputs.size());
  const Type& expected = store.get_class(analytic->output_class).schema();
  auto compute = [&](std::size_t i) {
    try {
      Term out = analytic->fn(inputs[i]);
      outcomes[i] = subsume(out, expected, store);
    } catch (const std::exception& e) {
      outcomes[i] = std::string(e.what());
    }
  };
  std::size_t threads = analytic->pure ? std::max<std::size_t>(workers, 1) : 1;
  threads = std::min(threads, std::max<std::size_t>(inputs.size(), 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) compute(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (inputs.size() + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(inputs.size(), lo + chunk);
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) compute(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (const auto* message = std::get_if<std::string>(&*outcomes[i])) {
      report.failures.push_back({inputs[i].name, *message});
      continue;
    }
    try {
      if (store.add_member(analytic->output_class, std::get<Term>(*outcomes[i]))) {
        ++report.inserted;
      } else {
        ++report.duplicates;
      }
    } catch (const Error& e) {
      report.failures.push_back({inputs[i].name, e.what()});
    }
  }
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

AnalyticFn nearest_fn(const Store& store, std::size_t k, std::string target_class) {
  return [&store, k, target_class = std::move(target_class)](const Member& m) {
    std::vector<Term> items;
    for (const auto& name : store.nearest(k, m.name, target_class)) {
      items.push_back(term_name(name));
    }
    return list(std::move(items));
  };
}

}  // namespace flutes
