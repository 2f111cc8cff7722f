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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "riskwork/coherent.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/oracle.hpp"
#include "support/random.hpp"

using namespace riskwork;
using Catch::Matchers::WithinAbs;

TEST_CASE("random unitaries", "[oracle]") {
  const auto one = random_unitary(1, 7);
  CHECK_THAT(std::abs(one(0, 0)), WithinAbs(1.0, 1e-14));
  const auto a = random_unitary(4, 99), b = random_unitary(4, 99);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, random_unitary(4, 100)) > 0.0);
  CHECK(is_unitary(a));

  // Haar moment: E|U_11|^2 = 1/d, variance (d-1)/(d^2 (d+1)).
  const std::size_t d = 3, n = 1000;
  std::mt19937_64 rng(rwtest::kMasterSeed);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::norm(random_unitary(d, rng)(0, 0));
  const double sigma = std::sqrt((d - 1.0) / (d * d * (d + 1.0)) / n);
  CHECK(std::abs(sum / n - 1.0 / d) < 3.0 * sigma);
}

TEST_CASE("oracle reproduces the permutation optimum", "[oracle]") {
  const Hamiltonian h({0.0, 1.0});
  const std::vector<double> p{0.25, 0.75};
  const auto rho = DensityState::from_populations(p);
  const auto rep = maximize_over_unitaries(rho, h, UtilitySpec::exponential(0.5), std::nullopt, 200, 1);
  const double closed = optimal_exponential(std::span<const double>(p), h, 0.5).optimal_utility;
  CHECK_THAT(rep.best_value, WithinAbs(closed, 1e-8));
  CHECK(is_unitary(rep.best_unitary, Tolerances{}.scaled(10.0)));
  CHECK(rep.seed == 1);
  CHECK(rep.iterations > 0);
}

TEST_CASE("oracle never beats the closed form", "[oracle]") {
  rwtest::Gen g;
  for (int n = 0; n < 20; ++n) {
    const std::size_t d = 3;
    const Hamiltonian h(g.energies(d));
    const auto p = g.probabilities(d);
    const auto rep = maximize_over_unitaries(DensityState::from_populations(p), h, UtilitySpec::exponential(-1.0),
                                             std::nullopt, 4, g.engine()());
    const double closed = optimal_exponential(std::span<const double>(p), h, -1.0).optimal_utility;
    CHECK(rep.best_value <= closed + 1e-8);
    CHECK(rep.best_value >= closed - 1e-6);
    // The optimizer lands on a phased permutation.
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double m = std::abs(rep.best_unitary(i, j));
        CHECK((m < 1e-4 || std::abs(m - 1.0) < 1e-4));
      }
  }
}

TEST_CASE("oracle on a coherent qubit at q = 1/2", "[oracle]") {
  const Hamiltonian h({0.0, 1.0});
  const DensityState rho(ComplexMatrix(2, {0.3, Complex(0.35, 0.1), Complex(0.35, -0.1), 0.7}));
  const double r = 0.8;
  const auto rep = maximize_over_unitaries(rho, h, UtilitySpec::exponential(r), 0.5, 20, 3);
  CHECK_THAT(rep.best_value, WithinAbs(optimal_coherent(rho, h, r).optimal_utility, 1e-8));
  try {
    (void)maximize_over_unitaries(rho, h, UtilitySpec::exponential(r), std::nullopt, 2, 3);
    FAIL("expected NotIncoherent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIncoherent);
  }
}

TEST_CASE("oracle is deterministic per seed", "[oracle]") {
  const Hamiltonian h({0.0, 0.7, 1.9});
  const auto rho = DensityState::from_populations(std::vector<double>{0.2, 0.3, 0.5});
  const auto a = maximize_over_unitaries(rho, h, UtilitySpec::exponential(0.3), std::nullopt, 3, 42);
  const auto b = maximize_over_unitaries(rho, h, UtilitySpec::exponential(0.3), std::nullopt, 3, 42);
  CHECK(a.best_value == b.best_value);
  CHECK(max_abs_diff(a.best_unitary, b.best_unitary) == 0.0);
}
