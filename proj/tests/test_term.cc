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

#include "flutes/term.h"

#include <cmath>

#include <gtest/gtest.h>

#include "flutes/error.h"
#include "flutes/sexp.h"
#include "generators.h"

namespace flutes {
namespace {

TEST(Term, RecordsAreSortedByLabel) {
  Term a = record({{"name", str("Joe")}, {"dob", str("1984-06-27")}});
  Term b = record({{"dob", str("1984-06-27")}, {"name", str("Joe")}});
  EXPECT_EQ(a, b);
  const auto& fields = a.as<Record>()->fields;
  ASSERT_EQ(fields.size(), 2u);
  EXPECT_EQ(fields[0].first, mk_concept("dob"));
  EXPECT_EQ(fields[1].first, mk_concept("name"));
}

TEST(Term, RecordRejectsEquivalentLabels) {
  Taxonomy t;
  t.same_as(mk_concept("dob"), mk_concept("birth_date"));
  EXPECT_THROW(record({{"dob", str("a")}, {"birth_date", str("b")}}, t), Error);
  EXPECT_THROW(record({{"dob", str("a")}, {"dob", str("b")}}), Error);
  EXPECT_NO_THROW(record({{"dob", str("a")}, {"birth_date", str("b")}}));
}

TEST(Term, PredicateApplicationEncoding) {
  Term o1 = triple("orig-of", term_name("joe"), term_name("t1"));
  const auto& outer = o1.as<Record>()->fields;
  ASSERT_EQ(outer.size(), 1u);
  EXPECT_EQ(outer[0].first, mk_concept("orig-of"));
  const auto& args = outer[0].second.as<Record>()->fields;
  ASSERT_EQ(args.size(), 2u);
  EXPECT_EQ(args[0].first, Concept::positional(0));
  EXPECT_EQ(args[0].second, term_name("joe"));
  EXPECT_EQ(args[1].second, term_name("t1"));
  EXPECT_THROW(pred_app("p", {}), Error);
}

TEST(Term, StructuralEquality) {
  EXPECT_EQ(num(3), num_f(3.0));
  EXPECT_FALSE(num(3) == str("3"));
  EXPECT_EQ(num_f(std::nan("")), num_f(std::nan("")));
  EXPECT_EQ(list({num(1), str("a")}), list({num(1), str("a")}));
  EXPECT_FALSE(list({num(1)}) == list({num(1), num(1)}));
  EXPECT_FALSE(term_name("joe") == atom("joe"));
}

TEST(Term, FreeVariablesAndGroundness) {
  Term t = record({{"a", var("x")}, {"b", list({var("y"), term_name("z")})}});
  EXPECT_EQ(free_vars(t), (std::set<std::string>{"x", "y"}));
  EXPECT_FALSE(is_ground(t));
  EXPECT_TRUE(is_ground(triple("r", term_name("a"), num(1))));
  Prop p = exists("x", type_name("c"), eq(var("x"), var("y")));
  EXPECT_EQ(free_vars(p), (std::set<std::string>{"y"}));
}

TEST(Term, SubstitutionAvoidsCapture) {
  Prop p = exists("x", type_name("c"), eq(var("x"), var("y")));
  Prop q = substitute(Substitution{{"y", var("x")}}, p);
  const auto* e = q.as<Exists>();
  ASSERT_NE(e, nullptr);
  EXPECT_NE(e->var, "x");
  EXPECT_EQ(free_vars(q), (std::set<std::string>{"x"}));
  // Bound occurrences are untouched.
  Prop r = substitute(Substitution{{"x", num(1)}}, p);
  EXPECT_EQ(r, p);
}

TEST(Term, AliasNames) {
  Term o1 = triple("orig-of", term_name("joe"), term_name("t1"));
  EXPECT_EQ(alias_names(o1), (std::set<std::string>{"joe", "t1"}));
  EXPECT_TRUE(alias_names(num(1)).empty());
}

TEST(Type, SubsetTypeRejectsCapture) {
  EXPECT_THROW(subset_ty(var("p"), type_name("person"),
                         exists("p", type_name("person"), prop_true())),
               Error);
  EXPECT_THROW(subset_ty(var("p"), subset_ty(var("q"), num_ty(), prop_true()), prop_true()),
               Error);
  EXPECT_NO_THROW(subset_ty(var("p"), type_name("person"),
                            exists("f", type_name("x"), eq(var("p"), var("f")))));
}

TEST(Type, EnumsAreSortedSets) {
  EXPECT_EQ(enum_ty({"cc", "check", "cc"}), enum_ty({"check", "cc"}));
  EXPECT_EQ(enum_ty({"cc", "check"}).as<EnumTy>()->concepts.size(), 2u);
}

TEST(TermProperty, ComposeAgreesWithSequentialSubstitution) {
  gen::Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    Substitution a{{"x", gen::term(rng, 1)}, {"y", gen::term(rng, 1)}};
    Substitution b{{"y", gen::term(rng, 1)}, {"zed", gen::term(rng, 1)}};
    Term t = gen::term(rng, 3);
    EXPECT_EQ(substitute(compose(a, b), t), substitute(b, substitute(a, t)))
        << render_sexp(t);
  }
}

TEST(TermProperty, HashAgreesWithEquality) {
  gen::Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    Term t = gen::term(rng, 3);
    Term u = parse_term_sexp(render_sexp(t));
    ASSERT_EQ(t, u);
    EXPECT_EQ(hash_value(t), hash_value(u));
  }
}

}  // namespace
}  // namespace flutes
