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
#include <cstdint>
#include <map>
#include <string>

#include "flutes/classifier.h"
#include "flutes/store.h"

namespace flutes {

struct GenConfig {
  std::size_t persons = 2;
  std::size_t transactions = 1;
  double p_drop_orig = 0.0;
  double p_drop_recv = 0.0;
  // Filler attributes per person.
  std::size_t extra_attrs = 0;
  std::uint64_t seed = 1;
};

// Throws Error(kConstruction) for probabilities outside [0, 1].
void validate(const GenConfig& cfg);

// Concrete-syntax corpus: persons p<i>, transactions t<i>, and for each
// transaction o<i> := orig-of(..) and r<i> := recv-of(..), each dropped
// with its probability. Persons use "dob" or "birth_date" at random.
// Identical configurations give identical text.
std::string generate(const GenConfig& cfg);

// `count` new transactions, each with a new person, the transaction and
// both endpoints, one of which is the target person p0. Names continue
// after the corpus from generate(cfg); `batch` separates repeated
// increments.
std::string generate_increment(const GenConfig& cfg, std::size_t count = 5,
                               std::size_t batch = 0);

// person, trans, orig_of, recv_of, the fi_related mission set and the
// m_target mission target around `target`, plus dob ~ birth_date.
void define_experiment_classes(Store& store, const std::string& target = "p0");

// Type of fi_related.
Type mission_set_type();
// Type of m_target.
Type mission_target_type(const std::string& target);

struct ExperimentOptions {
  std::size_t workers = 1;
  std::size_t increment = 5;
  bool check_oracle = true;
  // Also classify a copy without adjacency pruning to compare counters.
  bool measure_unpruned = true;
};

struct PhaseMetrics {
  FindReport report;
  std::map<std::string, std::size_t> members;
  // Oracle agreement per class; empty when the oracle was not run.
  std::map<std::string, bool> oracle_agrees;
};

struct ExperimentMetrics {
  GenConfig config;
  std::size_t corpus_terms = 0;
  std::size_t increment_terms = 0;
  PhaseMetrics full;
  PhaseMetrics incremental;
  // fi_related candidates without pruning and |orig_of| * |recv_of|.
  std::size_t unpruned_scanned = 0;
  std::size_t pair_product = 0;

  bool oracle_ok() const;
  // key<TAB>value lines; elapsed times are omitted unless `timings`.
  std::string render(bool timings = true) const;
};

ExperimentMetrics run_experiment(const GenConfig& cfg, const ExperimentOptions& options = {});

}  // namespace flutes
