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

#include "flutes/benchgen.h"

#include <random>

#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/oracle.h"

namespace flutes {
namespace {

constexpr const char* kAlphabet = "abcdefghijklmnopqrstuvwxyz";

std::string filler(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> length(3, 8);
  std::uniform_int_distribution<int> letter(0, 25);
  std::string out(static_cast<std::size_t>(length(rng)), 'a');
  for (auto& c : out) c = kAlphabet[letter(rng)];
  return out;
}

std::string date(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> year(1920, 2005);
  std::uniform_int_distribution<int> month(1, 12);
  std::uniform_int_distribution<int> day(1, 28);
  return fmt::format("{:04}-{:02}-{:02}", year(rng), month(rng), day(rng));
}

std::string person(std::mt19937_64& rng, const std::string& id, std::size_t extra) {
  std::bernoulli_distribution which(0.5);
  std::string fields = fmt::format("\"name\" = \"Person {}\", \"{}\" = \"{}\"", id,
                                   which(rng) ? "dob" : "birth_date", date(rng));
  for (std::size_t k = 0; k < extra; ++k) {
    fields += fmt::format(", \"attr{}\" = \"{}\"", k, filler(rng));
  }
  return fmt::format("{} := {{{}}};\n", id, fields);
}

std::string transaction(std::mt19937_64& rng, const std::string& id) {
  std::uniform_int_distribution<int> amount(1, 10000);
  std::bernoulli_distribution check(0.5);
  return fmt::format("{} := {{\"amount\" = {}, \"type\" = {}()}};\n", id, amount(rng),
                     check(rng) ? "check" : "cc");
}

Term p() { return var("p"); }
Term q() { return var("q"); }

}  // namespace

void validate(const GenConfig& cfg) {
  auto ok = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!ok(cfg.p_drop_orig) || !ok(cfg.p_drop_recv)) {
    throw Error(ErrorCode::kConstruction, "drop probabilities must lie in [0, 1]");
  }
}

std::string generate(const GenConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::string out;
  for (std::size_t i = 0; i < cfg.persons; ++i) {
    out += person(rng, fmt::format("p{}", i), cfg.extra_attrs);
  }
  if (cfg.persons == 0) return out;
  std::uniform_int_distribution<std::size_t> pick(0, cfg.persons - 1);
  std::bernoulli_distribution drop_orig(cfg.p_drop_orig);
  std::bernoulli_distribution drop_recv(cfg.p_drop_recv);
  for (std::size_t i = 0; i < cfg.transactions; ++i) {
    std::string t = fmt::format("t{}", i);
    out += transaction(rng, t);
    std::size_t from = pick(rng);
    std::size_t to = pick(rng);
    bool skip_orig = drop_orig(rng);
    bool skip_recv = drop_recv(rng);
    if (!skip_orig) out += fmt::format("o{} := orig-of(p{}, {});\n", i, from, t);
    if (!skip_recv) out += fmt::format("r{} := recv-of(p{}, {});\n", i, to, t);
  }
  return out;
}

std::string generate_increment(const GenConfig& cfg, std::size_t count,
                               std::size_t batch) {
  std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (batch + 1)));
  std::string out;
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t n = batch * count + j;
    std::string person_id = fmt::format("p{}", cfg.persons + n);
    std::string t = fmt::format("t{}", cfg.transactions + n);
    out += person(rng, person_id, cfg.extra_attrs);
    out += transaction(rng, t);
    std::string from = j % 2 == 0 ? "p0" : person_id;
    std::string to = j % 2 == 0 ? person_id : "p0";
    out += fmt::format("o{} := orig-of({}, {});\n", cfg.transactions + n, from, t);
    out += fmt::format("r{} := recv-of({}, {});\n", cfg.transactions + n, to, t);
  }
  return out;
}

Type mission_set_type() {
  Term t = var("t");
  Prop body = conj(eq(triple("orig-of", p(), t), var("s")),
                   eq(triple("recv-of", q(), t), var("r")));
  return subset_ty(
      triple("fi-related", p(), q()),
      triple_ty("fi-related", type_name("person"), type_name("person")),
      exists("t", type_name("trans"),
             exists("s", type_name("orig_of"), exists("r", type_name("recv_of"), body))));
}

Type mission_target_type(const std::string& target) {
  Term who = term_name(target);
  return subset_ty(p(), type_name("person"),
                   exists("f", type_name("fi_related"),
                          disj(eq(triple("fi-related", p(), who), var("f")),
                               eq(triple("fi-related", who, p()), var("f")))));
}

void define_experiment_classes(Store& store, const std::string& target) {
  store.mk_kb_class("person", record_ty({{"name", str_ty()}, {"dob", str_ty()}}));
  store.mk_kb_class("trans", record_ty({{"amount", num_ty()},
                                        {"type", enum_ty({"check", "cc"})}}));
  store.mk_kb_class("orig_of",
                    triple_ty("orig-of", type_name("person"), type_name("trans")));
  store.mk_kb_class("recv_of",
                    triple_ty("recv-of", type_name("person"), type_name("trans")));
  store.same_as("dob", "birth_date");
  store.mk_kb_class("fi_related", mission_set_type());
  store.mk_kb_class("m_target", mission_target_type(target));
}

bool ExperimentMetrics::oracle_ok() const {
  for (const auto* phase : {&full, &incremental}) {
    for (const auto& [_, ok] : phase->oracle_agrees) {
      if (!ok) return false;
    }
  }
  return true;
}

std::string ExperimentMetrics::render(bool timings) const {
  std::string out;
  out += fmt::format("persons\t{}\n", config.persons);
  out += fmt::format("transactions\t{}\n", config.transactions);
  out += fmt::format("drop_orig\t{}\n", config.p_drop_orig);
  out += fmt::format("drop_recv\t{}\n", config.p_drop_recv);
  out += fmt::format("extra_attrs\t{}\n", config.extra_attrs);
  out += fmt::format("seed\t{}\n", config.seed);
  out += fmt::format("corpus_terms\t{}\n", corpus_terms);
  out += fmt::format("increment_terms\t{}\n", increment_terms);
  for (const auto& [label, phase] : {std::pair{"full", &full}, {"incremental", &incremental}}) {
    out += fmt::format("{}.promoted\t{}\n", label, phase->report.promoted);
    for (const auto& c : phase->report.classes) {
      out += fmt::format("{}.{}.scanned\t{}\n", label, c.name, c.scanned);
      out += fmt::format("{}.{}.added\t{}\n", label, c.name, c.matched);
      out += fmt::format("{}.{}.members\t{}\n", label, c.name, phase->members.at(c.name));
      if (auto it = phase->oracle_agrees.find(c.name); it != phase->oracle_agrees.end()) {
        out += fmt::format("{}.{}.oracle\t{}\n", label, c.name, it->second ? "agree" : "DISAGREE");
      }
      if (timings) {
        out += fmt::format("{}.{}.elapsed_ms\t{:.3f}\n", label, c.name, c.elapsed.count());
      }
    }
    if (timings) {
      out += fmt::format("{}.elapsed_ms\t{:.3f}\n", label, phase->report.elapsed.count());
    }
  }
  out += fmt::format("fi_related.pair_product\t{}\n", pair_product);
  out += fmt::format("fi_related.unpruned_scanned\t{}\n", unpruned_scanned);
  out += fmt::format("oracle\t{}\n", oracle_ok() ? "agree" : "DISAGREE");
  return out;
}

ExperimentMetrics run_experiment(const GenConfig& cfg, const ExperimentOptions& options) {
  ExperimentMetrics metrics;
  metrics.config = cfg;
  std::string corpus = generate(cfg);
  std::string increment = generate_increment(cfg, options.increment);

  auto record = [&](const Store& store, PhaseMetrics& phase) {
    for (const auto& c : store.classes()) phase.members[c.name()] = c.members().size();
    if (!options.check_oracle) return;
    Oracle oracle(store);
    for (const auto& c : store.classes()) {
      phase.oracle_agrees[c.name()] = oracle.rendered(c.name()) == rendered_members(c);
    }
  };

  Store store;
  define_experiment_classes(store);
  metrics.corpus_terms = insert_program(store, corpus);
  FindOptions find;
  find.workers = options.workers;
  metrics.full.report = find_members(store, find);
  record(store, metrics.full);
  metrics.pair_product =
      store.get_class("orig_of").members().size() * store.get_class("recv_of").members().size();

  if (options.measure_unpruned) {
    Store plain;
    define_experiment_classes(plain);
    insert_program(plain, corpus);
    FindOptions unpruned = find;
    unpruned.prune = false;
    auto report = find_members(plain, unpruned);
    metrics.unpruned_scanned = report.find("fi_related")->scanned;
  }

  if (options.increment > 0) {
    metrics.increment_terms = insert_program(store, increment);
    metrics.incremental.report = find_members(store, find);
    record(store, metrics.incremental);
  }
  return metrics;
}

}  // namespace flutes
