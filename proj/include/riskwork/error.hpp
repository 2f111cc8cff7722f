// Copyright 2026 The riskwork Authors
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
#include <string_view>

namespace riskwork {

// Every failure the library reports carries one of these codes. The CLI
// prints the code name verbatim so callers can match on it.
enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NotOrthonormal,
  NotUnitary,
  DimensionMismatch,
  DegenerateLevels,
  UnsortedLevels,
  TraceNotOne,
  NotPositiveSemidefinite,
  InvalidProbabilities,
  NotIncoherent,
  QOutOfRange,
  LogOfZero,
  OutOfTabulatedRange,
  OutOfRange,
  NonDifferentiable,
  InvalidUtility,
  InvalidPermutation,
  DimensionTooLarge,
  DegenerateState,
  LengthMismatch,
  NoCrossing,
  SingularSq,
  NotDecomposable,
  MatchingFailure,
  CoherenceBoundViolated,
  CrossCheckFailed,
  InvalidRange,
  HamiltonianMismatch,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateLevels: return "DegenerateLevels";
    case ErrorCode::UnsortedLevels: return "UnsortedLevels";
    case ErrorCode::TraceNotOne: return "TraceNotOne";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::InvalidProbabilities: return "InvalidProbabilities";
    case ErrorCode::NotIncoherent: return "NotIncoherent";
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::LogOfZero: return "LogOfZero";
    case ErrorCode::OutOfTabulatedRange: return "OutOfTabulatedRange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonDifferentiable: return "NonDifferentiable";
    case ErrorCode::InvalidUtility: return "InvalidUtility";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::SingularSq: return "SingularSq";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::MatchingFailure: return "MatchingFailure";
    case ErrorCode::CoherenceBoundViolated: return "CoherenceBoundViolated";
    case ErrorCode::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::HamiltonianMismatch: return "HamiltonianMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riskwork
