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

#include <gtest/gtest.h>

#include "flutes/classifier.h"
#include "flutes/error.h"
#include "flutes/sexp.h"
#include "flutes/typing.h"
#include "generators.h"

namespace flutes {
namespace {

constexpr const char* kCorpus =
    "joe := {\"name\"=\"Joe\", \"birth_date\"=\"1984-06-27\"};\n"
    "sue := {\"name\"=\"Sue\", \"dob\"=\"1941-12-07\"};\n"
    "t1 := {\"amount\" = 500.0, \"type\"=check()};\n"
    "o1 := orig-of(joe, t1);\n"
    "r1 := recv-of(sue, t1);\n";

Store people() {
  Store s;
  s.mk_kb_class("person", record_ty({{"name", str_ty()}, {"dob", str_ty()}}));
  s.mk_kb_class("named", record_ty({{"name", str_ty()}}));
  insert_program(s, kCorpus);
  s.same_as("dob", "birth_date");
  find_members(s);
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

TEST(Eval, Selections) {
  Store s = people();
  TermEnv env = store_env(s);
  const Taxonomy& tax = s.taxonomy();
  Term joe = s.find_typed("joe")->term;
  EXPECT_EQ(eval_term(record_select(joe, "name"), env, tax), str("Joe"));
  // Labels match up to equivalence.
  EXPECT_EQ(eval_term(record_select(joe, "dob"), env, tax), str("1984-06-27"));
  Term o1 = s.find_typed("o1")->term;
  EXPECT_EQ(eval_term(pred_arg_select(o1, 0), env, tax), term_name("joe"));
  EXPECT_EQ(eval_term(str("x"), env, tax), str("x"));
  // Selecting from an alias dereferences it.
  EXPECT_EQ(eval_term(record_select(pred_arg_select(o1, 1), "amount"), env, tax), num(500));
}

TEST(Eval, Errors) {
  Store s = people();
  TermEnv env = store_env(s);
  const Taxonomy& tax = s.taxonomy();
  Term joe = s.find_typed("joe")->term;
  EXPECT_EQ(code_of([&] { eval_term(record_select(joe, "age"), env, tax); }),
            ErrorCode::kEvaluation);
  EXPECT_EQ(code_of([&] { eval_term(record_select(num(1), "age"), env, tax); }),
            ErrorCode::kEvaluation);
  EXPECT_EQ(code_of([&] { eval_term(record_select(term_name("ghost"), "a"), env, tax); }),
            ErrorCode::kEvaluation);
  EXPECT_EQ(code_of([&] { eval_term(record_select(var("x"), "a"), env, tax); }),
            ErrorCode::kEvaluation);
  EXPECT_EQ(code_of([&] { eval_term(pred_arg_select(s.find_typed("o1")->term, 5), env, tax); }),
            ErrorCode::kEvaluation);
}

TEST(Lambda, ProjectsName) {
  Store s = people();
  LambdaRule rule = make_lambda_rule("project", "p", "person",
                                     record({{"name", record_select(var("p"), "name")}}),
                                     record_ty({{"name", str_ty()}}));
  const auto& joe = s.get_class("person").members()[0];
  EXPECT_EQ(apply_lambda(rule, joe.term, s), record({{"name", str("Joe")}}));
}

TEST(Lambda, IdentityAndFailures) {
  Store s = people();
  Type person = record_ty({{"name", str_ty()}, {"dob", str_ty()}});
  const auto& joe = s.get_class("person").members()[0];
  LambdaRule id = make_lambda_rule("id", "p", "person", var("p"), person);
  EXPECT_EQ(apply_lambda(id, joe.term, s), joe.term);
  LambdaRule missing = make_lambda_rule("m", "p", "person", record_select(var("p"), "age"),
                                        num_ty());
  EXPECT_EQ(code_of([&] { apply_lambda(missing, joe.term, s); }), ErrorCode::kRuleFailure);
  LambdaRule wrong = make_lambda_rule("w", "p", "person", record_select(var("p"), "name"),
                                      num_ty());
  EXPECT_EQ(code_of([&] { apply_lambda(wrong, joe.term, s); }), ErrorCode::kRuleFailure);
  EXPECT_EQ(code_of([&] { make_lambda_rule("f", "p", "person", var("q"), num_ty()); }),
            ErrorCode::kConstruction);
}

TEST(Lambda, SubsumeCoercesIntoTheOutputType) {
  Store s = people();
  Term r = subsume(record({{"name", str("A")}, {"birth_date", str("x")}, {"extra", num(1)}}),
                   type_name("person"), s);
  EXPECT_EQ(r, record({{"dob", str("x")}, {"name", str("A")}}));
}

TEST(Analytic, NearestPersons) {
  Store s = people();
  s.mk_kb_class("neighbours", list_ty(type_name("person")));
  Analytics a;
  a.mk_analytic(s, Analytic{"near", "person", "neighbours", nearest_fn(s, 4, "person")});
  AnalyticReport r = a.run_analytic("near", s);
  EXPECT_EQ(r.processed, 2u);
  EXPECT_TRUE(r.failures.empty());
  // joe and sue both see {joe, sue}: one member after dedup.
  EXPECT_EQ(r.inserted, 1u);
  EXPECT_EQ(r.duplicates, 1u);
  const auto& m = s.get_class("neighbours").members();
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].term, list({term_name("joe"), term_name("sue")}));
}

TEST(Analytic, IdentityDeduplicates) {
  Store s = people();
  Analytics a;
  a.mk_analytic(s, Analytic{"id", "person", "person", [](const Member& m) { return m.term; }});
  AnalyticReport r = a.run_analytic("id", s);
  EXPECT_EQ(r.inserted, 0u);
  EXPECT_EQ(r.duplicates, 2u);
  EXPECT_EQ(s.get_class("person").members().size(), 2u);
}

TEST(Analytic, FailuresAreIsolated) {
  Store s = people();
  Analytics a;
  a.mk_analytic(s, Analytic{"mixed", "person", "named", [](const Member& m) -> Term {
                              if (m.name == "joe") return str("oops");
                              if (m.name == "sue") throw std::runtime_error("boom");
                              return m.term;
                            }});
  insert_program(s, "ann := {\"name\" = \"Ann\", \"dob\" = \"2000\"};");
  find_members(s);
  AnalyticReport r = a.run_analytic("mixed", s);
  EXPECT_EQ(r.processed, 3u);
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].member, "joe");
  EXPECT_EQ(r.failures[1].member, "sue");
  EXPECT_NE(r.failures[1].message.find("boom"), std::string::npos);
  // The named class already holds ann; its coerced result is a duplicate.
  EXPECT_EQ(r.inserted + r.duplicates, 1u);
  std::string text = r.render(false);
  EXPECT_NE(text.find("analytic.mixed.failed\t2\n"), std::string::npos);
}

TEST(Analytic, RegistrationErrors) {
  Store s = people();
  Analytics a;
  auto id = [](const Member& m) { return m.term; };
  a.mk_analytic(s, Analytic{"x", "person", "person", id});
  EXPECT_EQ(code_of([&] { a.mk_analytic(s, Analytic{"x", "person", "person", id}); }),
            ErrorCode::kDuplicateName);
  EXPECT_EQ(code_of([&] { a.mk_analytic(s, Analytic{"y", "nope", "person", id}); }),
            ErrorCode::kUnknownName);
  EXPECT_EQ(code_of([&] { a.run_analytic("z", s); }), ErrorCode::kUnknownName);
  EXPECT_EQ(a.names(), std::vector<std::string>{"x"});
}

// Analytics returning random terms never insert a member outside the output
// class.
TEST(AnalyticProperty, OutputsStayInTheirClass) {
  gen::Rng rng(71);
  for (int round = 0; round < 30; ++round) {
    Store s = people();
    Taxonomy scratch = gen::taxonomy(rng);
    Type out = gen::record_type(rng, scratch, 2);
    s.mk_kb_class("out", out);
    auto seed = rng();
    Analytics a;
    a.mk_analytic(s, Analytic{"fuzz", "person", "out", [seed, out, &scratch](const Member& m) {
                                gen::Rng local(seed + std::hash<std::string>{}(m.name));
                                if (gen::chance(local, 0.5)) {
                                  return gen::inhabitant(local, gen::weaken(local, scratch, out));
                                }
                                return gen::term(local, 3);
                              }});
    AnalyticReport r = a.run_analytic("fuzz", s);
    EXPECT_EQ(r.processed, 2u);
    EXPECT_EQ(r.inserted + r.duplicates + r.failures.size(), 2u);
    const KbClass& c = s.get_class("out");
    for (const auto& m : c.members()) {
      EXPECT_TRUE(s.member_conforms(c, m)) << render_sexp(m.term);
      auto t = infer_static_type(m.term, s.alias_types(), &s.taxonomy());
      if (t) {
        EXPECT_TRUE(prove_subtype(*t, c.schema(), s.taxonomy()).has_value());
      }
    }
  }
}

}  // namespace
}  // namespace flutes
