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

#include <gtest/gtest.h>

#include "flutes/error.h"
#include "flutes/parser.h"

namespace flutes {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Benchgen, MinimalCorpusHasTheWorkedShape) {
  std::string text = generate(GenConfig{});
  auto decls = parse_program(text);
  ASSERT_EQ(decls.size(), 5u);
  EXPECT_EQ(decls[0].name, "p0");
  EXPECT_EQ(decls[1].name, "p1");
  EXPECT_EQ(decls[2].name, "t0");
  EXPECT_EQ(decls[3].name, "o0");
  EXPECT_EQ(decls[4].name, "r0");
  EXPECT_EQ(count(text, "orig-of("), 1u);
  EXPECT_EQ(count(text, "recv-of("), 1u);
}

TEST(Benchgen, DeterministicAndSeeded) {
  GenConfig a{.persons = 50, .transactions = 30, .p_drop_orig = 0.3, .seed = 7};
  EXPECT_EQ(generate(a), generate(a));
  GenConfig b = a;
  b.seed = 8;
  EXPECT_NE(generate(a), generate(b));
  EXPECT_EQ(generate_increment(a, 5, 1), generate_increment(a, 5, 1));
}

TEST(Benchgen, DropProbabilities) {
  GenConfig cfg{.persons = 20, .transactions = 40, .p_drop_orig = 1.0, .p_drop_recv = 0.0};
  std::string text = generate(cfg);
  EXPECT_EQ(count(text, "orig-of("), 0u);
  EXPECT_EQ(count(text, "recv-of("), 40u);
  cfg.extra_attrs = 3;
  EXPECT_NE(generate(cfg).find("\"attr2\""), std::string::npos);
}

TEST(Benchgen, Validation) {
  EXPECT_THROW(validate(GenConfig{.p_drop_orig = 1.5}), Error);
  EXPECT_THROW(validate(GenConfig{.p_drop_recv = -0.1}), Error);
  EXPECT_NO_THROW(validate(GenConfig{}));
}

TEST(Benchgen, IncrementContinuesNames) {
  GenConfig cfg{.persons = 3, .transactions = 2};
  auto decls = parse_program(generate(cfg) + generate_increment(cfg, 2, 0) +
                             generate_increment(cfg, 2, 1));
  EXPECT_EQ(decls.size(), 3u + 2u * 3u + 2u * 2u * 4u);
}

TEST(Benchgen, SmallExperimentAgreesWithTheOracle) {
  GenConfig cfg{.persons = 40, .transactions = 20, .p_drop_orig = 0.2, .p_drop_recv = 0.2, .seed = 5};
  ExperimentMetrics m = run_experiment(cfg);
  EXPECT_TRUE(m.oracle_ok());
  EXPECT_EQ(m.increment_terms, 20u);
  EXPECT_EQ(m.incremental.report.find("person")->scanned, 20u);
  EXPECT_GT(m.full.members.at("fi_related"), 0u);
  EXPECT_GT(m.incremental.members.at("m_target"), m.full.members.at("m_target"));
  EXPECT_LE(m.full.report.find("fi_related")->scanned, m.unpruned_scanned);
  std::string text = m.render(false);
  EXPECT_NE(text.find("oracle\tagree\n"), std::string::npos);
}

TEST(Benchgen, NoTransactionsMeansNoMissionSet) {
  ExperimentMetrics m = run_experiment(GenConfig{.persons = 10, .transactions = 0},
                                       ExperimentOptions{.increment = 0});
  EXPECT_TRUE(m.oracle_ok());
  EXPECT_EQ(m.full.members.at("fi_related"), 0u);
  EXPECT_EQ(m.full.members.at("m_target"), 0u);
  EXPECT_EQ(m.full.members.at("person"), 10u);
}

}  // namespace
}  // namespace flutes
