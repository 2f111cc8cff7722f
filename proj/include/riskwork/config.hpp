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

#include <cstdlib>
#include <string>
#include <string_view>

#include "riskwork/error.hpp"

namespace riskwork {

/// Numerical tolerances shared by every module. Defaults are the strict
/// profile; `scaled` loosens all of them by a common factor.
struct Tolerances {
  double hermitian = 1e-10;       // max |M - M^dagger| entrywise
  double unitary = 1e-10;         // max |U^dagger U - I| entrywise
  double reconstruction = 1e-9;   // eigen reconstruction, entrywise
  double trace = 1e-10;           // |tr rho - 1|
  double psd = 1e-10;             // smallest admissible eigenvalue is -psd
  double incoherent = 1e-12;      // off-diagonal magnitude below which rho is diagonal
  double merge = 1e-9;            // work atoms closer than this are merged
  double normalization = 1e-10;   // distribution weights must sum to 1
  double negative_weight = 1e-12; // probability weights may dip this far below 0
  double indifference = 1e-12;    // expected-utility band treated as a tie
  double doubly_stochastic = 1e-9;

  constexpr Tolerances scaled(double factor) const noexcept {
    Tolerances t = *this;
    t.hermitian *= factor;
    t.unitary *= factor;
    t.reconstruction *= factor;
    t.trace *= factor;
    t.psd *= factor;
    t.incoherent *= factor;
    t.merge *= factor;
    t.normalization *= factor;
    t.negative_weight *= factor;
    t.indifference *= factor;
    t.doubly_stochastic *= factor;
    return t;
  }

  /// "strict" keeps the defaults, "default" scales them by 10.
  static Tolerances for_profile(std::string_view profile) {
    if (profile == "strict") return Tolerances{};
    if (profile == "default") return Tolerances{}.scaled(10.0);
    throw Error(ErrorCode::InvalidInput,
                "unknown tolerance profile '" + std::string(profile) + "'");
  }

  /// Reads RISKWORK_TOLERANCE_PROFILE, falling back to `fallback` when unset.
  static Tolerances from_environment(std::string_view fallback = "default") {
    const char* value = std::getenv("RISKWORK_TOLERANCE_PROFILE");
    if (value == nullptr || *value == '\0') return for_profile(fallback);
    return for_profile(value);
  }
};

}  // namespace riskwork
