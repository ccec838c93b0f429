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

#include <string>
#include <string_view>

#include "flutes/rules.h"
#include "flutes/store.h"

namespace flutes {

// Command interpreter behind the `flutes` tool. One command per line:
//
//   load <path>                      insert the declarations of a .flt file
//   insert <name> := <term>;         insert one declaration
//   defclass <name> <type-sexp>      define a class
//   same_as <a> <b>                  declare two concepts equivalent
//   is_a <child> <parent>            add a lattice edge
//   find-members                     classify
//   defanalytic-nearest <name> <in> <out> <k> <class>
//   run-analytic <name>
//   members <class>
//   stats | help | quit
//
// Blank lines and lines starting with '#' are ignored.
class Session {
 public:
  Session(Store& store, bool timings) : store_(store), timings_(timings) {}

  // Runs one command and returns its report. Throws Error on failure.
  std::string execute(std::string_view line);

  bool finished() const { return finished_; }

  static std::string help();

 private:
  Store& store_;
  bool timings_;
  bool finished_ = false;
  Analytics analytics_;
};

}  // namespace flutes
