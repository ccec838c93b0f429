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

#include "flutes/error.h"

#include <fmt/core.h>

namespace flutes {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConcept: return "invalid-concept";
    case ErrorCode::kLatticeCycle: return "lattice-cycle";
    case ErrorCode::kMalformedRecord: return "malformed-record";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kConstruction: return "construction";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kDuplicateName: return "duplicate-name";
    case ErrorCode::kAliasCycle: return "alias-cycle";
    case ErrorCode::kDuplicateClass: return "duplicate-class";
    case ErrorCode::kDanglingAlias: return "dangling-alias";
    case ErrorCode::kUnknownName: return "unknown-name";
    case ErrorCode::kCoercionDomain: return "coercion-domain";
    case ErrorCode::kUnsupportedForm: return "unsupported-form";
    case ErrorCode::kCyclicClasses: return "cyclic-classes";
    case ErrorCode::kEvaluation: return "evaluation";
    case ErrorCode::kRuleFailure: return "rule-failure";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCorruption: return "corruption";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)),
      code_(code) {}

SyntaxError::SyntaxError(const std::string& message, std::size_t line,
                         std::size_t column)
    : Error(ErrorCode::kSyntax,
            fmt::format("{}:{}: {}", line, column, message)),
      line_(line),
      column_(column) {}

}  // namespace flutes
