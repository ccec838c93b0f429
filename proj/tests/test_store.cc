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

#include "flutes/store.h"

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "flutes/classifier.h"
#include "flutes/error.h"
#include "flutes/sexp.h"
#include "generators.h"

namespace flutes {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("flutes_store_" + std::to_string(rd()));
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

constexpr const char* kCorpus =
    "joe := {\"name\"=\"Joe\", \"birth_date\"=\"1984-06-27\"};\n"
    "sue := {\"name\"=\"Sue\", \"dob\"=\"1941-12-07\"};\n"
    "t1 := {\"amount\" = 500.0, \"type\"=check()};\n"
    "o1 := orig-of(joe, t1);\n"
    "r1 := recv-of(sue, t1);\n";

void define_person(Store& s) {
  s.mk_kb_class("person", record_ty({{"name", str_ty()}, {"dob", str_ty()}}));
}

TEST(Store, AdjacencyFollowsAliases) {
  Store s;
  insert_program(s, kCorpus);
  EXPECT_EQ(s.contains("o1"), (std::set<std::string>{"joe", "t1"}));
  EXPECT_EQ(s.contained_by("t1"), (std::set<std::string>{"o1", "r1"}));
  EXPECT_TRUE(s.contains("joe").empty());
  EXPECT_EQ(s.untyped().size(), 5u);
}

TEST(Store, InsertErrors) {
  Store s;
  s.abox_insert("joe", num(1));
  EXPECT_EQ(code_of([&] { s.abox_insert("joe", num(2)); }), ErrorCode::kDuplicateName);
  s.abox_insert("a", record({{"x", term_name("b")}}));
  EXPECT_EQ(code_of([&] { s.abox_insert("b", record({{"y", term_name("a")}})); }),
            ErrorCode::kAliasCycle);
  EXPECT_EQ(code_of([&] { s.abox_insert("self", list({term_name("self")})); }),
            ErrorCode::kAliasCycle);
  EXPECT_EQ(code_of([&] { s.abox_insert("", num(1)); }), ErrorCode::kConstruction);
  EXPECT_FALSE(s.has_term("b"));
  EXPECT_FALSE(s.has_term("self"));
}

TEST(Store, ClassDefinitionErrors) {
  Store s;
  define_person(s);
  EXPECT_EQ(code_of([&] { define_person(s); }), ErrorCode::kDuplicateClass);
  EXPECT_EQ(code_of([&] { s.mk_kb_class("x", type_name("nonexistent")); }),
            ErrorCode::kDanglingAlias);
  Type under_not = subset_ty(
      var("p"), type_name("person"),
      negate(exists("q", type_name("person"), eq(var("p"), var("q")))));
  EXPECT_EQ(code_of([&] { s.mk_kb_class("y", under_not); }), ErrorCode::kUnsupportedForm);
  Type unbounded = subset_ty(var("p"), type_name("person"),
                             exists("q", num_ty(), eq(var("p"), var("q"))));
  EXPECT_EQ(code_of([&] { s.mk_kb_class("z", unbounded); }), ErrorCode::kUnsupportedForm);
  Type stray = subset_ty(var("p"), type_name("person"), eq(var("p"), var("other")));
  EXPECT_EQ(code_of([&] { s.mk_kb_class("w", stray); }), ErrorCode::kUnsupportedForm);
  EXPECT_EQ(s.classes().size(), 1u);
  EXPECT_EQ(code_of([&] { s.get_class("nope"); }), ErrorCode::kUnknownName);
}

TEST(Store, NearestWalksContainmentBothWays) {
  Store s;
  define_person(s);
  insert_program(s, kCorpus);
  s.same_as("dob", "birth_date");
  find_members(s);
  EXPECT_EQ(s.nearest(0, "joe", "person"), (std::set<std::string>{"joe"}));
  EXPECT_EQ(s.nearest(0, "t1", "person"), (std::set<std::string>{}));
  EXPECT_EQ(s.nearest(2, "joe", "person"), (std::set<std::string>{"joe"}));
  EXPECT_EQ(s.nearest(3, "joe", "person"), (std::set<std::string>{"joe"}));
  EXPECT_EQ(s.nearest(4, "joe", "person"), (std::set<std::string>{"joe", "sue"}));
  EXPECT_EQ(s.nearest(2, "t1", "person"), (std::set<std::string>{"joe", "sue"}));
}

// Brute force: shortest path lengths by repeated relaxation over all terms.
TEST(StoreProperty, NearestMatchesBruteForce) {
  gen::Rng rng(51);
  for (int round = 0; round < 20; ++round) {
    Store s;
    s.mk_kb_class("leaf", record_ty({{"v", num_ty()}}));
    std::vector<std::string> names;
    std::size_t n = 6 + gen::below(rng, 10);
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = "n" + std::to_string(i);
      if (names.empty() || gen::chance(rng, 0.4)) {
        s.abox_insert(name, record({{"v", num(static_cast<std::int64_t>(i))}}));
      } else {
        std::vector<Term> refs;
        for (std::size_t j = 0, m = 1 + gen::below(rng, 3); j < m; ++j) {
          refs.push_back(term_name(names[gen::below(rng, names.size())]));
        }
        s.abox_insert(name, list(refs));
      }
      names.push_back(name);
    }
    find_members(s);
    const std::size_t inf = 1000;
    std::map<std::string, std::map<std::string, std::size_t>> d;
    for (const auto& a : names) {
      for (const auto& b : names) d[a][b] = a == b ? 0 : inf;
      for (const auto& b : s.contains(a)) d[a][b] = d[b][a] = 1;
    }
    for (const auto& k : names) {
      for (const auto& a : names) {
        for (const auto& b : names) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
      }
    }
    const KbClass& leaf = s.get_class("leaf");
    for (const auto& t : names) {
      for (std::size_t k = 0; k < 5; ++k) {
        std::set<std::string> expect;
        for (const auto& m : leaf.members()) {
          if (d[t][m.name] <= k) expect.insert(m.name);
        }
        EXPECT_EQ(s.nearest(k, t, "leaf"), expect) << t << " k=" << k;
      }
    }
  }
}

TEST(StoreProperty, ReverseAdjacencyIsTheInverse) {
  gen::Rng rng(52);
  Store s;
  std::vector<std::string> names;
  for (int i = 0; i < 200; ++i) {
    std::string name = "x" + std::to_string(i);
    std::vector<Term> refs;
    for (std::size_t j = 0, m = names.empty() ? 0 : gen::below(rng, 4); j < m; ++j) {
      refs.push_back(term_name(names[gen::below(rng, names.size())]));
    }
    // Forward references to names not yet inserted are allowed.
    if (gen::chance(rng, 0.1)) refs.push_back(term_name("later" + std::to_string(i)));
    s.abox_insert(name, list(refs));
    names.push_back(name);
  }
  EXPECT_EQ(code_of([&] { s.contained_by("later0"); }), ErrorCode::kUnknownName);
  for (const auto& a : names) {
    for (const auto& b : s.contains(a)) {
      if (s.has_term(b)) {
        EXPECT_TRUE(s.contained_by(b).contains(a));
      }
    }
    for (const auto& b : s.contained_by(a)) EXPECT_TRUE(s.contains(b).contains(a));
  }
}

TEST(Store, MemberNaming) {
  Store s;
  s.mk_kb_class("n", num_ty());
  EXPECT_TRUE(s.add_member("n", num(1)));
  EXPECT_FALSE(s.add_member("n", num(1)));
  const KbClass& c = s.get_class("n");
  ASSERT_EQ(c.members().size(), 1u);
  EXPECT_EQ(c.members()[0].name.rfind("n#", 0), 0u);
  EXPECT_EQ(c.members()[0].name.size(), 2u + 16u);
  EXPECT_TRUE(s.add_member("n", num(1), "one"));
  EXPECT_FALSE(s.add_member("n", num(1), "one"));
  EXPECT_EQ(code_of([&] { s.add_member("n", num(2), "one"); }), ErrorCode::kDuplicateName);
}

TEST(Store, PersistsAndReloads) {
  TempDir dir;
  std::vector<std::string> before;
  {
    Store s = Store::open(dir.path());
    define_person(s);
    insert_program(s, kCorpus);
    s.same_as("dob", "birth_date");
    find_members(s);
    s.abox_insert("ghost", record({{"x", term_name("nobody")}}));
    s.flush();
    for (const auto& m : s.get_class("person").members()) before.push_back(m.name + render_sexp(m.term));
  }
  Store s = Store::open(dir.path());
  EXPECT_TRUE(s.taxonomy().equiv(mk_concept("dob"), mk_concept("birth_date")));
  EXPECT_EQ(s.typed().size(), 5u);
  ASSERT_EQ(s.untyped().size(), 1u);
  EXPECT_EQ(s.untyped()[0].name, "ghost");
  std::vector<std::string> after;
  const KbClass& person = s.get_class("person");
  for (const auto& m : person.members()) after.push_back(m.name + render_sexp(m.term));
  EXPECT_EQ(before, after);
  EXPECT_EQ(person.watermark(), 5u);
  EXPECT_EQ(s.contained_by("t1"), (std::set<std::string>{"o1", "r1"}));
  // A second run over the reloaded store finds nothing new.
  FindReport again = find_members(s);
  EXPECT_EQ(again.find("person")->scanned, 0u);
  EXPECT_EQ(person.members().size(), 2u);
}

TEST(Store, FlushIsIncremental) {
  TempDir dir;
  {
    Store s = Store::open(dir.path());
    define_person(s);
    insert_program(s, kCorpus);
    s.same_as("dob", "birth_date");
    find_members(s);
    s.flush();
    s.flush();
  }
  std::ifstream in(dir.path() / "class_person.fsx");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 2u);
  {
    Store s = Store::open(dir.path());
    s.abox_insert("ann", record({{"name", str("Ann")}, {"dob", str("2000-01-01")}}));
    find_members(s);
    s.flush();
  }
  Store s = Store::open(dir.path());
  EXPECT_EQ(s.get_class("person").members().size(), 3u);
  EXPECT_EQ(s.typed().size(), 6u);
}

TEST(Store, CorruptFilesAreReported) {
  TempDir dir;
  {
    Store s = Store::open(dir.path());
    insert_program(s, kCorpus);
    find_members(s);
    s.flush();
  }
  {
    std::ofstream out(dir.path() / "typed.fsx", std::ios::app);
    out << "(typed 99 \"bad\" (num\n";
  }
  try {
    Store::open(dir.path());
    FAIL() << "expected corruption";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruption);
    EXPECT_NE(std::string(e.what()).find("typed.fsx"), std::string::npos);
  }
}

TEST(Store, InsertProgramIsAllOrNothingOnSyntaxErrors) {
  Store s;
  EXPECT_THROW(insert_program(s, "a := 1; b := {;"), SyntaxError);
  EXPECT_TRUE(s.untyped().empty());
  EXPECT_EQ(insert_program(s, "a := 1;"), 1u);
  // Later programs see earlier names as aliases.
  insert_program(s, "b := {\"x\" = a};");
  EXPECT_EQ(s.contains("b"), (std::set<std::string>{"a"}));
}

TEST(Store, StatsOnFreshStore) {
  Store s;
  StoreStats st = s.stats();
  EXPECT_EQ(st.untyped + st.typed + st.classes + st.members + st.edges, 0u);
}

}  // namespace
}  // namespace flutes
