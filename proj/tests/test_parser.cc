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

#include "flutes/parser.h"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "flutes/error.h"
#include "flutes/sexp.h"

namespace flutes {
namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(FLUTES_TEST_DATA) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Parser, SueGraftonWithBothSeparators) {
  auto decls = parse_program(
      "sue_grafton := {\"name\" : \"Sue Grafton\",\n"
      "                \"dob\" : \"1941-12-07\",\n"
      "                \"birth-place\" = Kentucky};");
  ASSERT_EQ(decls.size(), 1u);
  EXPECT_EQ(decls[0].name, "sue_grafton");
  EXPECT_EQ(decls[0].body, record({{"name", str("Sue Grafton")},
                                   {"dob", str("1941-12-07")},
                                   {"birth-place", atom("Kentucky")}}));
}

TEST(Parser, WorkedCorpus) {
  auto decls = parse_program(read("people.flt"));
  ASSERT_EQ(decls.size(), 5u);
  EXPECT_EQ(decls[0].name, "joe");
  EXPECT_EQ(decls[0].body,
            record({{"name", str("Joe")}, {"birth_date", str("1984-06-27")}}));
  EXPECT_EQ(decls[2].body, record({{"amount", num_f(500.0)}, {"type", atom("check")}}));
  EXPECT_EQ(decls[3].body, triple("orig-of", term_name("joe"), term_name("t1")));
  EXPECT_EQ(decls[4].body, triple("recv-of", term_name("sue"), term_name("t1")));
}

TEST(Parser, ColonAndEqualsAgree) {
  std::string text = read("people.flt");
  std::string colons = text;
  for (std::size_t i = 0; i + 1 < colons.size(); ++i) {
    if (colons[i] == '=' && colons[i - 1] != ':') colons[i] = ':';
  }
  auto a = parse_program(text);
  auto b = parse_program(colons);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].body, b[i].body);
}

TEST(Parser, IdentifiersResolveToAliasesOrAtoms) {
  auto decls = parse_program(
      "a := 1;\n"
      "b := {\"x\" = a, \"y\" = later, \"z\" = red()};\n"
      "c := link(later, a);\n"
      "d := [1, 2.5, \"s\"];\n"
      "// comment\n"
      "e := {\"w\" = known};",
      nullptr, [](std::string_view n) { return n == "known"; });
  ASSERT_EQ(decls.size(), 5u);
  EXPECT_EQ(decls[1].body,
            record({{"x", term_name("a")}, {"y", atom("later")}, {"z", atom("red")}}));
  EXPECT_EQ(decls[2].body, triple("link", term_name("later"), term_name("a")));
  EXPECT_EQ(decls[3].body, list({num(1), num_f(2.5), str("s")}));
  EXPECT_EQ(decls[4].body, record({{"w", term_name("known")}}));
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_program("a := 1; a := 2;"), Error);
  try {
    parse_program("a := 1; a := 2;");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateName);
  }
  EXPECT_THROW(parse_program("a := {\"x\" 1};"), SyntaxError);
  EXPECT_THROW(parse_program("a := 1"), SyntaxError);
  EXPECT_THROW(parse_program(":= 1;"), SyntaxError);
  try {
    parse_program("a := 1;\nb := {\"x\" = };");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  Taxonomy t;
  t.same_as(mk_concept("dob"), mk_concept("birth_date"));
  EXPECT_THROW(parse_program("a := {\"dob\" = 1, \"birth_date\" = 2};", &t), Error);
}

TEST(Parser, EmptyProgram) {
  EXPECT_TRUE(parse_program("").empty());
  EXPECT_TRUE(parse_program("  // nothing\n").empty());
}

}  // namespace
}  // namespace flutes
