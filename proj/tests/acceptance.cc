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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "flutes/benchgen.h"
#include "flutes/classifier.h"
#include "flutes/error.h"
#include "flutes/oracle.h"
#include "flutes/parser.h"
#include "flutes/rules.h"
#include "flutes/sexp.h"
#include "flutes/store.h"
#include "flutes/typing.h"
#include "generators.h"

namespace flutes {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr const char* kPeople =
    "joe := {\"name\"=\"Joe\", \"birth_date\"=\"1984-06-27\"};\n"
    "sue := {\"name\"=\"Sue\", \"dob\"=\"1941-12-07\"};\n"
    "t1 := {\"amount\" = 500.0, \"type\"=check()};\n"
    "o1 := orig-of(joe, t1);\n"
    "r1 := recv-of(sue, t1);\n";

std::vector<std::string> names_of(const KbClass& c) {
  std::vector<std::string> out;
  for (const auto& m : c.members()) out.push_back(m.name);
  return out;
}

Outcome worked_example() {
  Outcome o;
  auto start = Clock::now();
  Store s;
  s.mk_kb_class("person", record_ty({{"name", str_ty()}, {"dob", str_ty()}}));
  s.mk_kb_class("trans", record_ty({{"amount", num_ty()}, {"type", enum_ty({"check", "cc"})}}));
  s.mk_kb_class("orig_of", triple_ty("orig-of", type_name("person"), type_name("trans")));
  s.mk_kb_class("recv_of", triple_ty("recv-of", type_name("person"), type_name("trans")));
  s.mk_kb_class("fi_related", mission_set_type());
  insert_program(s, kPeople);
  s.same_as("dob", "birth_date");
  find_members(s);
  double ms = ms_since(start);

  const auto& person = s.get_class("person");
  o.require(names_of(person) == std::vector<std::string>{"joe", "sue"}, "person members");
  o.require(person.members().size() == 2 &&
                person.members()[0].term ==
                    record({{"dob", str("1984-06-27")}, {"name", str("Joe")}}),
            "joe not coerced to dob/name");
  o.require(names_of(s.get_class("trans")) == std::vector<std::string>{"t1"}, "trans");
  o.require(names_of(s.get_class("orig_of")) == std::vector<std::string>{"o1"}, "orig_of");
  o.require(names_of(s.get_class("recv_of")) == std::vector<std::string>{"r1"}, "recv_of");
  const auto& fi = s.get_class("fi_related").members();
  o.require(fi.size() == 1 && fi[0].term == triple("fi-related", term_name("joe"), term_name("sue")),
            "fi_related");
  o.require(ms < 1000.0, fmt::format("took {:.1f} ms", ms));
  if (o.pass) o.detail = fmt::format("{:.2f} ms", ms);
  return o;
}

Outcome inference() {
  Outcome o;
  Term joe = record({{"name", str("Joe")}, {"birth_date", str("1984-06-27")}});
  Type expected = record_ty({{"name", str_ty()}, {"birth_date", str_ty()}});
  auto start = Clock::now();
  auto inferred = infer_static_type(joe);
  double ms = ms_since(start);
  o.require(inferred.has_value() && *inferred == expected, "inferred type differs");
  o.require(ms < 1.0, fmt::format("took {:.3f} ms", ms));
  if (o.pass) o.detail = fmt::format("{}, {:.4f} ms", render_sexp(*inferred), ms);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const double drops[] = {0.0, 0.2, 0.5};
  std::size_t fi_total = 0;
  std::size_t target_total = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    GenConfig cfg;
    cfg.persons = 2 + rng() % 199;
    cfg.transactions = rng() % 101;
    cfg.p_drop_orig = drops[rng() % 3];
    cfg.p_drop_recv = drops[rng() % 3];
    cfg.seed = 1000 + i;
    Store s;
    define_experiment_classes(s);
    insert_program(s, generate(cfg));
    find_members(s);
    Oracle oracle(s);
    for (const char* c : {"fi_related", "m_target"}) {
      auto got = rendered_members(s.get_class(c));
      o.require(got == oracle.rendered(c), fmt::format("corpus {} class {}", i, c));
    }
    fi_total += s.get_class("fi_related").members().size();
    target_total += s.get_class("m_target").members().size();
  }
  double ms = ms_since(start);
  o.require(ms < 5 * 60 * 1000.0, fmt::format("took {:.0f} ms", ms));
  o.require(fi_total > 0 && target_total > 0, "corpora produced empty mission sets");
  if (o.pass) {
    o.detail = fmt::format("50 corpora, {} fi_related and {} m_target members, {:.0f} ms",
                           fi_total, target_total, ms);
  }
  return o;
}

Outcome subtyping_soundness() {
  Outcome o;
  auto start = Clock::now();
  gen::Rng rng(4);
  std::size_t proved = 0;
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    Taxonomy tax = gen::taxonomy(rng, 20);
    Type sup = gen::record_type(rng, tax, 3);
    // Half the pairs are related by construction, half independent.
    Type sub = i % 2 == 0 ? gen::weaken(rng, tax, sup) : gen::record_type(rng, tax, 3);
    auto proof = prove_subtype(sub, sup, tax);
    if (!proof) continue;
    ++proved;
    Term coerced = apply_coercion(*proof, gen::inhabitant(rng, sub));
    auto again = infer_static_type(coerced, {}, &tax);
    auto back = again ? prove_subtype(*again, sup, tax) : std::nullopt;
    if (!back || !is_identity_shaped(*back)) ++failures;
  }
  double ms = ms_since(start);
  o.require(failures == 0, fmt::format("{} failures", failures));
  o.require(proved >= 400, fmt::format("only {} pairs proved", proved));
  o.require(ms < 60 * 1000.0, fmt::format("took {:.0f} ms", ms));
  if (o.pass) o.detail = fmt::format("{} of 1000 pairs proved, 0 failures, {:.0f} ms", proved, ms);
  return o;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Concatenated member files of a flushed store, in file name order.
std::string member_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("class_", 0) == 0 || name == "typed.fsx") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += f.filename().string() + "\n" + read_file(f);
  return out;
}

Outcome determinism() {
  Outcome o;
  // Proofs.
  gen::Rng rng(5);
  std::vector<std::tuple<Taxonomy, Type, Type>> pairs;
  for (int i = 0; i < 100; ++i) {
    Taxonomy tax = gen::taxonomy(rng, 20);
    Type sup = gen::record_type(rng, tax, 3);
    Type sub = gen::weaken(rng, tax, sup);
    pairs.emplace_back(std::move(tax), std::move(sub), std::move(sup));
  }
  std::string first_proofs;
  for (int run = 0; run < 10; ++run) {
    std::string proofs;
    for (const auto& [tax, sub, sup] : pairs) {
      auto p = prove_subtype(sub, sup, tax);
      proofs += p ? render_proof(*p) : "none";
      proofs += '\n';
    }
    if (run == 0) first_proofs = proofs;
    o.require(proofs == first_proofs, fmt::format("proofs differ in run {}", run));
  }

  // Classification, flushed to disk.
  GenConfig cfg{.persons = 200, .transactions = 100, .p_drop_orig = 0.2, .p_drop_recv = 0.2,
                .seed = 17};
  std::string corpus = generate(cfg);
  std::string increment = generate_increment(cfg);
  fs::path root = fs::temp_directory_path() / fmt::format("flutes_det_{}", std::random_device{}());
  std::string reference;
  std::size_t runs = 0;
  for (std::size_t workers : {1u, 4u}) {
    for (int run = 0; run < 10; ++run) {
      fs::path dir = root / fmt::format("w{}_{}", workers, run);
      {
        Store s = Store::open(dir);
        define_experiment_classes(s);
        insert_program(s, corpus);
        find_members(s, FindOptions{.workers = workers});
        s.flush();
        insert_program(s, increment);
        find_members(s, FindOptions{.workers = workers});
        s.flush();
      }
      std::string files = member_files(dir);
      if (reference.empty()) reference = files;
      o.require(files == reference, fmt::format("member files differ (workers {}, run {})",
                                                workers, run));
      ++runs;
    }
  }
  fs::remove_all(root);
  if (o.pass) {
    o.detail = fmt::format("100 proofs x 10 runs, {} classification runs, {} bytes identical",
                           runs, reference.size());
  }
  return o;
}

Outcome incrementality() {
  Outcome o;
  GenConfig cfg{.persons = 10000, .transactions = 5000, .p_drop_orig = 0.2,
                .p_drop_recv = 0.2, .seed = 11};
  Store s;
  define_experiment_classes(s);
  insert_program(s, generate(cfg));
  find_members(s);
  std::map<std::string, std::size_t> before;
  for (const auto& c : s.classes()) before[c.name()] = c.members().size();

  auto start = Clock::now();
  std::size_t inserted = insert_program(s, generate_increment(cfg, 5));
  FindReport r = find_members(s);
  double ms = ms_since(start);

  o.require(inserted == 20, "increment is not 20 terms");
  o.require(r.promoted == 20, fmt::format("promoted {}", r.promoted));
  for (const char* c : {"person", "trans", "orig_of", "recv_of"}) {
    // Only the terms above the watermark are examined.
    o.require(r.find(c)->scanned == 20, fmt::format("{} scanned {}", c, r.find(c)->scanned));
    o.require(r.find(c)->matched == 5, fmt::format("{} matched {}", c, r.find(c)->matched));
  }
  for (const char* c : {"fi_related", "m_target"}) {
    std::size_t scanned = r.find(c)->scanned;
    // Bounded by the increment, not by the 10k-person corpus.
    o.require(scanned <= 5 * inserted, fmt::format("{} scanned {}", c, scanned));
    o.require(s.get_class(c).members().size() == before[c] + 5,
              fmt::format("{} grew by {}", c, s.get_class(c).members().size() - before[c]));
  }
  o.require(ms < 5000.0, fmt::format("took {:.0f} ms", ms));
  if (o.pass) {
    o.detail = fmt::format("20 terms, static scanned 20 each, fi_related scanned {}, "
                           "m_target scanned {}, {:.1f} ms",
                           r.find("fi_related")->scanned, r.find("m_target")->scanned, ms);
  }
  return o;
}

Outcome pruning() {
  Outcome o;
  GenConfig cfg{.persons = 1000, .transactions = 500, .p_drop_orig = 0.2, .p_drop_recv = 0.2,
                .seed = 13};
  std::string corpus = generate(cfg);
  auto run = [&](bool prune) {
    Store s;
    define_experiment_classes(s);
    insert_program(s, corpus);
    FindReport r = find_members(s, FindOptions{.prune = prune});
    std::size_t product = s.get_class("orig_of").members().size() *
                          s.get_class("recv_of").members().size();
    return std::pair{r.find("fi_related")->scanned, product};
  };
  auto [pruned, product] = run(true);
  auto [unpruned, product2] = run(false);
  double ratio = static_cast<double>(pruned) / static_cast<double>(product);
  o.require(product == product2 && product > 0, "no pairs");
  o.require(ratio < 0.10, fmt::format("pruned {} of n*m {} ({:.2f}%)", pruned, product, 100 * ratio));
  if (o.pass) {
    o.detail = fmt::format("pruned {} vs unpruned {} of n*m {} ({:.3f}%)", pruned, unpruned,
                           product, 100 * ratio);
  }
  return o;
}

std::string with_colons(std::string text) {
  // Field separators only: '=' not part of ":=".
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == '=' && text[i - 1] != ':') text[i] = ':';
  }
  return text;
}

std::string with_equals(std::string text) {
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] == ':' && text[i + 1] != '=') text[i] = '=';
  }
  return text;
}

Outcome round_trips() {
  Outcome o;
  gen::Rng rng(8);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    if (i % 2 == 0) {
      Term t = gen::term(rng, 4);
      if (!(parse_term_sexp(render_sexp(t)) == t)) ++bad;
    } else {
      Type t = gen::type(rng, 3);
      if (!(parse_type_sexp(render_sexp(t)) == t)) ++bad;
    }
  }
  o.require(bad == 0, fmt::format("{} round-trip failures", bad));

  const std::string sue =
      "sue_grafton := {\"name\" : \"Sue Grafton\", \"dob\" : \"1941-12-07\", "
      "\"birth-place\" = Kentucky};";
  for (const auto& text : {std::string(sue), std::string(kPeople)}) {
    auto a = parse_program(with_colons(text));
    auto b = parse_program(with_equals(text));
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].body == b[i].body;
    o.require(same && !a.empty(), "separators disagree");
  }
  auto grafton = parse_program(sue);
  o.require(grafton.size() == 1 &&
                grafton[0].body == record({{"name", str("Sue Grafton")},
                                           {"dob", str("1941-12-07")},
                                           {"birth-place", atom("Kentucky")}}),
            "sue_grafton parsed wrongly");
  if (o.pass) o.detail = "1000 terms/types, sue_grafton and the people corpus with ':' and '='";
  return o;
}

Outcome rule_safety() {
  Outcome o;
  gen::Rng rng(9);
  std::size_t inserted = 0;
  std::size_t failed = 0;
  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i) {
    Store s;
    s.mk_kb_class("person", record_ty({{"name", str_ty()}, {"dob", str_ty()}}));
    insert_program(s, generate(GenConfig{.persons = 10, .transactions = 0,
                                         .seed = static_cast<std::uint64_t>(i)}));
    s.same_as("dob", "birth_date");
    // Random equivalences and is-a edges over c0..c19.
    for (int e = 0; e < 4; ++e) {
      auto a = gen::concept_name(gen::below(rng, 20));
      auto b = gen::concept_name(gen::below(rng, 20));
      try {
        if (gen::chance(rng, 0.5)) {
          s.same_as(a, b);
        } else {
          s.add_is_a(a, b);
        }
      } catch (const Error&) {
      }
    }
    Type out = gen::record_type(rng, s.taxonomy(), 3);
    s.mk_kb_class("out", out);
    find_members(s);
    std::uint64_t seed = rng();
    const Taxonomy& tax = s.taxonomy();
    Analytics analytics;
    analytics.mk_analytic(s, Analytic{"fuzz", "person", "out", [seed, out, &tax](const Member& m) {
      gen::Rng local(seed ^ std::hash<std::string>{}(m.name));
      switch (gen::below(local, 4)) {
        case 0: return gen::inhabitant(local, gen::weaken(local, tax, out));
        case 1: return gen::inhabitant(local, out);
        case 2: return gen::term(local, 3);
        default: throw std::runtime_error("analytic raised");
      }
    }});
    AnalyticReport r = analytics.run_analytic("fuzz", s);
    // The run went through every member despite failures.
    o.require(s.get_class("person").members().size() == 10 && r.processed == 10 &&
                  r.inserted + r.duplicates + r.failures.size() == 10,
              fmt::format("analytic {} did not process every member", i));
    inserted += r.inserted;
    failed += r.failures.size();
    const KbClass& c = s.get_class("out");
    for (const auto& m : c.members()) {
      auto t = infer_static_type(m.term, s.alias_types(), &tax);
      bool ok = s.member_conforms(c, m) && (!t || prove_subtype(*t, c.schema(), tax));
      if (!ok) ++violations;
    }
  }
  o.require(violations == 0, fmt::format("{} integrity violations", violations));
  o.require(inserted > 0 && failed > 0, "fuzz did not exercise both outcomes");
  if (o.pass) {
    o.detail = fmt::format("100 analytics, {} inserted, {} failures reported, 0 violations",
                           inserted, failed);
  }
  return o;
}

}  // namespace
}  // namespace flutes

int main() {
  using flutes::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"worked example", flutes::worked_example},
      {"inference", flutes::inference},
      {"oracle equivalence", flutes::oracle_equivalence},
      {"subtyping soundness", flutes::subtyping_soundness},
      {"determinism", flutes::determinism},
      {"incrementality", flutes::incrementality},
      {"pruning", flutes::pruning},
      {"round trips", flutes::round_trips},
      {"rule type safety", flutes::rule_safety},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
