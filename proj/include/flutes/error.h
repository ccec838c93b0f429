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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flutes {

enum class ErrorCode {
  kInvalidConcept,
  kLatticeCycle,
  kMalformedRecord,
  kArity,
  kConstruction,
  kSyntax,
  kDuplicateName,
  kAliasCycle,
  kDuplicateClass,
  kDanglingAlias,
  kUnknownName,
  kCoercionDomain,
  kUnsupportedForm,
  kCyclicClasses,
  kEvaluation,
  kRuleFailure,
  kIo,
  kCorruption,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. The code is stable and is what callers
// (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace flutes
