// Copyright 2026 The qnd-becs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qnd {

enum class ErrorKind {
  Domain,             // argument outside the mathematical domain
  OutcomeImpossible,  // photon outcome with vanishing probability
  Configuration,      // invalid user configuration or unusable output target
  Integrity,          // input violates a structural invariant (e.g. Hermiticity)
  Numerical,          // solver failure or loss of accuracy
  EmptyConditional,   // projection onto a Fock state with zero weight
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::OutcomeImpossible: return "outcome-impossible";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::EmptyConditional: return "empty-conditional";
  }
  return "unknown";
}

}  // namespace qnd
