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

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flutes/benchgen.h"
#include "flutes/error.h"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic mission-set experiment"};
  flutes::GenConfig cfg;
  flutes::ExperimentOptions options;
  std::string out;
  std::string corpus;
  bool no_timings = false;
  bool no_oracle = false;
  app.add_option("--persons", cfg.persons, "Number of persons");
  app.add_option("--txns", cfg.transactions, "Number of transactions");
  app.add_option("--drop-orig", cfg.p_drop_orig, "Probability of dropping an orig-of")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--drop-recv", cfg.p_drop_recv, "Probability of dropping a recv-of")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--extra", cfg.extra_attrs, "Filler attributes per person");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--workers", options.workers, "Classifier worker threads");
  app.add_option("--increment", options.increment, "Transactions added after the first run");
  app.add_option("--out", out, "Report file (stdout when omitted)");
  app.add_option("--emit-corpus", corpus, "Also write the generated corpus to this file");
  app.add_flag("--no-oracle", no_oracle, "Skip the brute-force cross-check");
  app.add_flag("--no-timings", no_timings, "Omit elapsed times");
  CLI11_PARSE(app, argc, argv);
  options.check_oracle = !no_oracle;

  try {
    if (!corpus.empty()) {
      std::ofstream(corpus) << flutes::generate(cfg);
    }
    auto metrics = flutes::run_experiment(cfg, options);
    std::string report = metrics.render(!no_timings);
    if (out.empty()) {
      std::cout << report;
    } else {
      std::ofstream file(out);
      file << report;
      if (!file) {
        std::cerr << "error\tcannot write " << out << '\n';
        return 1;
      }
    }
    return metrics.oracle_ok() ? 0 : 1;
  } catch (const flutes::Error& e) {
    std::cerr << "error\t" << e.what() << '\n';
    return 1;
  }
}
