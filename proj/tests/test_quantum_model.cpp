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

#include "riskwork/quantum_model.hpp"
#include "support/random.hpp"

using namespace riskwork;
using Catch::Matchers::WithinAbs;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no riskwork::Error thrown");
  return ErrorCode::InvalidInput;
}

DensityState diag(std::vector<double> p) { return DensityState::from_populations(p); }

}  // namespace

TEST_CASE("Hamiltonian validation", "[model]") {
  CHECK(code_of([] { Hamiltonian({1.0, 0.0}); }) == ErrorCode::UnsortedLevels);
  CHECK(code_of([] { Hamiltonian({0.0, 1.0, 1.0}); }) == ErrorCode::DegenerateLevels);
  CHECK_NOTHROW(Hamiltonian({0.0, 1.0, 1.0}, LevelOrder::weak));
  CHECK(code_of([] { Hamiltonian({0.0, NAN}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("DensityState validation", "[model]") {
  CHECK(code_of([] { DensityState(ComplexMatrix(2, {0.5, 0.1, 0.2, 0.5})); }) == ErrorCode::NotHermitian);
  CHECK(code_of([] { DensityState(ComplexMatrix(2, {0.6, 0.0, 0.0, 0.5})); }) == ErrorCode::TraceNotOne);
  CHECK(code_of([] { DensityState(ComplexMatrix(2, {0.5, 0.9, 0.9, 0.5})); }) == ErrorCode::NotPositiveSemidefinite);
  CHECK(code_of([] { diag({1.2, -0.2}); }) == ErrorCode::InvalidProbabilities);
  CHECK(diag({0.3, 0.7}).is_incoherent());
  CHECK_FALSE(DensityState(ComplexMatrix(2, {0.5, 0.5, 0.5, 0.5})).is_incoherent());
}

TEST_CASE("dephase", "[model]") {
  const auto d = diag({0.2, 0.8});
  CHECK(max_abs_diff(dephase(d).matrix(), d.matrix()) == 0.0);

  const DensityState plus(ComplexMatrix(2, {0.5, 0.5, 0.5, 0.5}));
  CHECK(max_abs_diff(dephase(plus).matrix(), ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5})) == 0.0);

  rwtest::Gen g;
  const auto rho = g.density(3);
  const auto out = dephase(rho);
  CHECK(out.is_incoherent());
  for (std::size_t k = 0; k < 3; ++k) CHECK(out.matrix()(k, k) == Complex(rho.matrix()(k, k).real()));
  CHECK_THAT(out.matrix().trace().real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("average_energy", "[model]") {
  CHECK(average_energy(diag({1.0, 0.0}), Hamiltonian({-0.5, 2.0})) == -0.5);
  CHECK_THAT(average_energy(diag({0.5, 0.5}), Hamiltonian({0.0, 1.0})), WithinAbs(0.5, 1e-15));
  CHECK_THAT(average_energy(diag({0.1, 0.3, 0.6}), Hamiltonian({1.0, 2.0, 3.0})), WithinAbs(2.5, 1e-12));
  CHECK(code_of([] { (void)average_energy(diag({0.5, 0.5}), Hamiltonian({0.0, 1.0, 2.0})); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("tensor products", "[model]") {
  const Hamiltonian q({0.0, 1.0});
  const Hamiltonian h = tensor(q, q);
  CHECK(std::vector<double>(h.energies().begin(), h.energies().end()) == std::vector<double>{0.0, 1.0, 1.0, 2.0});
  CHECK(h.order() == LevelOrder::weak);
  REQUIRE(h.bipartition().has_value());
  CHECK(h.bipartition()->kron_index == std::vector<std::size_t>{0, 1, 2, 3});

  const double p = 0.3;
  const auto rho = tensor(diag({p, 1 - p}), diag({p, 1 - p}));
  const auto pops = rho.populations();
  CHECK_THAT(pops[0], WithinAbs(p * p, 1e-15));
  CHECK_THAT(pops[1], WithinAbs(p * (1 - p), 1e-15));
  CHECK_THAT(pops[2], WithinAbs(p * (1 - p), 1e-15));
  CHECK_THAT(pops[3], WithinAbs((1 - p) * (1 - p), 1e-15));

  const auto ground = tensor(diag({1.0, 0.0}), diag({1.0, 0.0, 0.0}));
  CHECK(ground.matrix()(0, 0) == 1.0);
  CHECK(ground.matrix().trace() == 1.0);

  // Unequal gaps: the sorted level order differs from the Kronecker order.
  const Hamiltonian mixed = tensor(Hamiltonian({0.0, 1.0}), Hamiltonian({0.0, 0.4}));
  CHECK(mixed.bipartition()->kron_index == std::vector<std::size_t>{0, 1, 2, 3});
  const Hamiltonian swapped = tensor(Hamiltonian({0.0, 0.4}), Hamiltonian({0.0, 1.0}));
  CHECK(swapped.bipartition()->kron_index == std::vector<std::size_t>{0, 2, 1, 3});
  CHECK(swapped.order() == LevelOrder::strict);
}

TEST_CASE("level basis round trip", "[model]") {
  rwtest::Gen g;
  const Hamiltonian h = tensor(Hamiltonian({0.0, 0.4}), Hamiltonian({0.0, 1.0}));
  const auto rho = g.density(4);
  const auto there = to_level_basis(rho, h);
  CHECK(max_abs_diff(from_level_basis(there, h).matrix(), rho.matrix()) == 0.0);
  CHECK(there.matrix()(1, 1) == rho.matrix()(2, 2));
}

TEST_CASE("partial trace", "[model]") {
  rwtest::Gen g;
  const auto a = g.density(2);
  const auto b = g.density(3);
  const auto ab = tensor(a, b);
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, Subsystem::A).matrix(), a.matrix()) < 1e-12);
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, Subsystem::B).matrix(), b.matrix()) < 1e-12);

  const auto corr = diag({0.5, 0.0, 0.0, 0.5});
  const auto ra = partial_trace(corr, {2, 2}, Subsystem::A);
  CHECK(ra.populations() == std::vector<double>{0.5, 0.5});

  const auto ex = partial_trace(diag({0.33, 0.34, 0.22, 0.11}), {2, 2}, Subsystem::A);
  CHECK_THAT(ex.populations()[0], WithinAbs(0.67, 1e-15));
  CHECK_THAT(ex.populations()[1], WithinAbs(0.33, 1e-15));

  CHECK(code_of([&] { (void)partial_trace(corr, {2, 3}, Subsystem::A); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("mutual information", "[model]") {
  rwtest::Gen g;
  CHECK_THAT(mutual_information(tensor(g.density(2), g.density(2)), {2, 2}), WithinAbs(0.0, 1e-10));
  CHECK_THAT(mutual_information(diag({0.5, 0.0, 0.0, 0.5}), {2, 2}), WithinAbs(std::log(2.0), 1e-14));
  const double i = mutual_information(diag({0.33, 0.34, 0.22, 0.11}), {2, 2});
  CHECK(i > 0.0);
  CHECK(i < std::log(2.0));
  const auto h = [](std::vector<double> p) {
    double s = 0.0;
    for (double x : p) s -= x * std::log(x);
    return s;
  };
  CHECK_THAT(i, WithinAbs(h({0.67, 0.33}) + h({0.55, 0.45}) - h({0.33, 0.34, 0.22, 0.11}), 1e-14));
}

TEST_CASE("generalized passivity", "[model]") {
  const Hamiltonian q({0.0, 1.0});
  CHECK(is_generalized_passive(std::vector<double>{0.6, 0.3, 0.1}, Hamiltonian({0.0, 1.0, 2.0}), 0.0));
  CHECK_FALSE(is_generalized_passive(std::vector<double>{0.25, 0.75}, q, 0.0));
  CHECK(is_generalized_passive(std::vector<double>{0.25, 0.75}, q, 2.0));
  CHECK_FALSE(is_generalized_passive(std::vector<double>{0.25, 0.75}, q, std::log(3.0) - 1e-6));
  // Degenerate levels never constrain each other.
  const Hamiltonian two = tensor(q, q);
  CHECK(is_generalized_passive(std::vector<double>{0.4, 0.2, 0.3, 0.1}, two, 0.0));
}
