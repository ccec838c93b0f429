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

#include "flutes/sexp.h"

#include <gtest/gtest.h>

#include "flutes/error.h"
#include "generators.h"

namespace flutes {
namespace {

TEST(Sexp, RendersTerms) {
  Term joe = record({{"name", str("Joe")}, {"dob", str("1984-06-27")}});
  EXPECT_EQ(render_sexp(joe), R"((record ((dob (str "1984-06-27")) (name (str "Joe")))))");
  EXPECT_EQ(render_sexp(num_f(500.0)), "(num 500)");
  EXPECT_EQ(render_sexp(num_f(0.1)), "(num 0.1)");
  EXPECT_EQ(render_sexp(atom("check")), "(atom check)");
  EXPECT_EQ(render_sexp(triple("orig-of", term_name("joe"), term_name("t1"))),
            R"((record ((orig-of (record ((#0 (alias "joe")) (#1 (alias "t1"))))))))");
  EXPECT_EQ(render_sexp(record_select(var("p"), "name")), R"((select (var "p") name))");
  EXPECT_EQ(render_sexp(str("a\"b\\c\n")), R"((str "a\"b\\c\n"))");
  EXPECT_EQ(render_sexp(Term(Atom{mk_concept("has space")})), R"((atom "has space"))");
  EXPECT_EQ(render_sexp(list({})), "(list)");
  EXPECT_EQ(render_sexp(bottom("dob")), "(bottom dob)");
}

TEST(Sexp, RendersTypesAndProps) {
  EXPECT_EQ(render_sexp(record_ty({{"name", str_ty()}, {"dob", str_ty()}})),
            "(recordty ((dob (strty)) (name (strty))))");
  EXPECT_EQ(render_sexp(enum_ty({"check", "cc"})), "(enumty cc check)");
  EXPECT_EQ(render_sexp(list_ty(void_ty())), "(listty (voidty))");
  EXPECT_EQ(render_sexp(type_name("person")), R"((tyalias "person"))");
  EXPECT_EQ(render_sexp(pred(BuiltinOp::kLessThan, num(1), num(2))),
            "(pred lt (num 1) (num 2))");
  EXPECT_EQ(render_sexp(exists("f", type_name("c"), prop_true())),
            R"((exists "f" (tyalias "c") (true)))");
  EXPECT_EQ(render_sexp(negate(prop_false())), "(not (false))");
  EXPECT_EQ(render_sexp(in_sequence(num(1), {num(1), num(2)})),
            "(inseq (num 1) (num 1) (num 2))");
}

TEST(Sexp, ParseErrorsCarryPositions) {
  try {
    parse_term_sexp("(record ((a (num 1))\n  (b (nmu 2))))");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_term_sexp("(num"), SyntaxError);
  EXPECT_THROW(parse_term_sexp("(num 1) extra"), SyntaxError);
  EXPECT_THROW(parse_term_sexp("(str \"unterminated)"), SyntaxError);
  EXPECT_THROW(parse_term_sexp("(frobnicate 1)"), Error);
  EXPECT_THROW(parse_type_sexp("(recordty ((a (strty)) (a (numty))))"), Error);
}

TEST(Sexp, DispatchOnHead) {
  EXPECT_TRUE(std::holds_alternative<Term>(parse_sexp("(num 1)")));
  EXPECT_TRUE(std::holds_alternative<Type>(parse_sexp("(numty)")));
  EXPECT_TRUE(std::holds_alternative<Prop>(parse_sexp("(true)")));
}

TEST(SexpProperty, TermsRoundTrip) {
  gen::Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    Term t = gen::term(rng, 4);
    std::string text = render_sexp(t);
    Term back = parse_term_sexp(text);
    ASSERT_EQ(back, t) << text;
    EXPECT_EQ(render_sexp(back), text);
  }
}

TEST(SexpProperty, TypesAndPropsRoundTrip) {
  gen::Rng rng(32);
  for (int i = 0; i < 1000; ++i) {
    Type t = gen::type(rng, 3);
    std::string text = render_sexp(t);
    ASSERT_EQ(parse_type_sexp(text), t) << text;
    Prop p = gen::prop(rng, 3);
    std::string ptext = render_sexp(p);
    ASSERT_EQ(parse_prop_sexp(ptext), p) << ptext;
  }
}

}  // namespace
}  // namespace flutes
