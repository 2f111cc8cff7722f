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
#include <map>

#include "riskwork/coherent.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/work_stats.hpp"
#include "support/oracles.hpp"
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

DensityState qubit(double p, Complex c) { return DensityState(ComplexMatrix(2, {p, c, std::conj(c), 1.0 - p})); }

std::vector<double> energies_of(const Hamiltonian& h) { return {h.energies().begin(), h.energies().end()}; }

double max_dev(const RealMatrix& a, const RealMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

const Hamiltonian kQubit({0.0, 1.0});

}  // namespace

TEST_CASE("sorted u spectrum", "[coherent]") {
  const Hamiltonian h({0.0, 0.5, 1.4});
  const std::vector<double> p{0.2, 0.5, 0.3};
  const auto s = sorted_u_spectrum(DensityState::from_populations(p), h, 0.9);
  const auto inc = optimal_exponential(std::span<const double>(p), h, 0.9);
  for (std::size_t k = 0; k < 3; ++k) CHECK_THAT(s.values[k], WithinAbs(inc.sorted_u[k], 1e-15));

  rwtest::Gen g;
  const auto rho = g.density(3);
  const auto at0 = sorted_u_spectrum(rho, h, 0.0);
  const auto ev = eig_hermitian(rho.matrix()).values;
  for (std::size_t k = 0; k < 3; ++k) CHECK_THAT(at0.values[k], WithinAbs(ev[k], 1e-12));

  const auto pure = sorted_u_spectrum(qubit(0.5, 0.5), kQubit, 0.8);
  CHECK_THAT(pure.values[0], WithinAbs(0.5 * (1.0 + std::exp(-0.8)), 1e-14));
  CHECK_THAT(pure.values[1], WithinAbs(0.0, 1e-14));
}

TEST_CASE("A_q spectrum does not depend on q", "[coherent]") {
  rwtest::Gen g;
  for (int n = 0; n < 20; ++n) {
    const std::size_t d = g.index(2, 4);
    const Hamiltonian h(g.energies(d));
    const auto rho = g.density(d);
    const double r = g.uniform(-2.0, 2.0);
    const auto ref = rwtest::eigen_spectrum(rwtest::to_eigen(aq_matrix(rho, h, r, 0.5)));
    for (double q : {0.0, 0.25, 0.75, 1.0}) {
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(rwtest::to_eigen(aq_matrix(rho, h, r, q)));
      std::vector<double> v;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) v.push_back(es.eigenvalues()(i).real());
      std::sort(v.begin(), v.end(), std::greater<>());
      for (std::size_t k = 0; k < d; ++k) CHECK_THAT(v[k], WithinAbs(ref[k], 1e-9));
    }
    // The diagonal of A_q is rho_kk e^{-r e_k} for every q.
    const auto a = aq_matrix(rho, h, r, 0.3);
    for (std::size_t k = 0; k < d; ++k)
      CHECK(std::abs(a(k, k) - rho.matrix()(k, k) * std::exp(-r * h[k])) < 1e-12);
  }
}

TEST_CASE("optimal coherent cycle", "[coherent]") {
  const std::vector<double> p{0.2, 0.5, 0.3};
  const Hamiltonian h({0.0, 0.5, 1.4});
  const auto inc = optimal_exponential(std::span<const double>(p), h, -0.4);
  const auto coh = optimal_coherent(DensityState::from_populations(p), h, -0.4);
  CHECK(coh.optimal_utility == inc.optimal_utility);
  REQUIRE(coh.permutation.has_value());
  CHECK(*coh.permutation == inc.permutation);

  rwtest::Gen g;
  for (int n = 0; n < 40; ++n) {
    const std::size_t d = g.index(2, 5);
    const Hamiltonian hd(g.energies(d));
    const auto rho = g.density(d);
    const double r = g.uniform(-2.0, 2.0);
    const auto out = optimal_coherent(rho, hd, r);
    CHECK_THAT(out.optimal_utility,
               WithinAbs(rwtest::eigen_coherent_optimum(rho.matrix(), energies_of(hd), r), 1e-10));
    CHECK(out.optimal_utility >= -1e-12);
    CHECK(is_unitary(out.unitary));
    const auto dist = quasiprob_distribution(rho, hd, out.unitary, 0.5);
    CHECK_THAT(expected_utility(dist, UtilitySpec::exponential(r)), WithinAbs(out.optimal_utility, 1e-10));
  }

  // Risk-neutral limit: the ergotropy of the coherent state.
  const auto plus = qubit(0.5, 0.5);
  CHECK_THAT(optimal_coherent(plus, kQubit, 0.0).optimal_utility, WithinAbs(0.5, 1e-12));
  CHECK_THAT(optimal_coherent(plus, kQubit, 1e-6).optimal_utility, WithinAbs(0.5, 1e-6));
}

TEST_CASE("x matrix", "[coherent]") {
  rwtest::Gen g;
  const auto rho = g.density(3);
  const Hamiltonian h({0.0, 0.8, 1.7});
  const double r = 1.1;
  const auto best = optimal_coherent(rho, h, r);
  CHECK(max_dev(xjk_matrix(rho, h, r, 0.5, best.unitary), RealMatrix::identity(3)) < 1e-10);

  for (double q : {0.0, 0.2, 0.9}) {
    const auto x = xjk_matrix(rho, h, r, q, best.unitary);
    for (std::size_t i = 0; i < 3; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        row += x(i, j);
        col += x(j, i);
      }
      CHECK_THAT(row, WithinAbs(1.0, 1e-9));
      CHECK_THAT(col, WithinAbs(1.0, 1e-9));
    }
  }

  const auto q2 = qubit(0.3, Complex(0.2, 0.15));
  const auto u2 = optimal_coherent(q2, kQubit, 0.7).unitary;
  const auto x2 = xjk_matrix(q2, kQubit, 0.7, 0.2, u2);
  CHECK_THAT(x2(0, 0), WithinAbs(x2(1, 1), 1e-12));
  CHECK_THAT(x2(0, 1), WithinAbs(x2(1, 0), 1e-12));
  CHECK(x2(0, 0) >= 1.0);
  CHECK(x2(0, 1) < 0.0);

  const std::vector<double> p{0.2, 0.5, 0.3};
  const auto perm = Permutation::from_one_based(std::vector<int>{2, 3, 1});
  const auto xp = xjk_matrix(DensityState::from_populations(p), h, r, 0.3, perm.unitary());
  for (std::size_t i = 0; i < 3; ++i) {
    int ones = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const bool one = std::abs(xp(i, j) - 1.0) < 1e-12;
      CHECK((one || std::abs(xp(i, j)) < 1e-12));
      ones += one;
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("q = 1/2 is stationary for the diagonal of x", "[coherent]") {
  rwtest::Gen g;
  const auto rho = g.density(3);
  const Hamiltonian h({0.0, 0.6, 1.5});
  const double r = -0.9, step = 1e-4;
  const auto u = optimal_coherent(rho, h, r).unitary;
  const auto lo = xjk_matrix(rho, h, r, 0.5 - step, u), mid = xjk_matrix(rho, h, r, 0.5, u),
             hi = xjk_matrix(rho, h, r, 0.5 + step, u);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      const double first = (hi(j, k) - lo(j, k)) / (2 * step);
      const double second = (hi(j, k) - 2 * mid(j, k) + lo(j, k)) / (step * step);
      CHECK_THAT(first, WithinAbs(0.0, 1e-6));
      if (j == k)
        CHECK(second > 0.0);
      else
        CHECK(second < 0.0);
    }
}

TEST_CASE("affine decomposition examples", "[coherent]") {
  const auto id = affine_decompose(RealMatrix::identity(3));
  REQUIRE(id.terms.size() == 1);
  CHECK(id.terms[0].permutation.is_identity());
  CHECK(id.theta_identity() == 1.0);

  const auto two = affine_decompose(RealMatrix(2, {1.3, -0.3, -0.3, 1.3}));
  REQUIRE(two.terms.size() == 2);
  CHECK_THAT(two.theta_identity(), WithinAbs(1.3, 1e-14));
  CHECK(two.terms[1].permutation.label() == "(2,1)");
  CHECK_THAT(two.terms[1].theta, WithinAbs(-0.3, 1e-14));

  CHECK(code_of([] { (void)affine_decompose(RealMatrix(2, {0.7, 0.3, 0.3, 0.7})); }) == ErrorCode::NotDecomposable);
  CHECK(code_of([] { (void)affine_decompose(RealMatrix(2, {1.2, -0.3, -0.3, 1.3})); }) == ErrorCode::NotDecomposable);
}

TEST_CASE("d = 3 coefficients follow the closed formulas", "[coherent]") {
  rwtest::Gen g(rwtest::kMasterSeed + 33);
  int verified = 0;
  for (int attempt = 0; attempt < 200 && verified < 5; ++attempt) {
    const auto rho = g.density(3);
    const Hamiltonian h(g.energies(3));
    const double r = g.uniform(-2.0, 2.0);
    const auto u = optimal_coherent(rho, h, r).unitary;
    const auto x = xjk_matrix(rho, h, r, g.uniform(0.0, 0.4), u);
    if (!(x(0, 0) >= x(1, 1) && x(1, 1) >= x(2, 2))) continue;
    AffineDecomposition dec;
    try {
      dec = affine_decompose(x);
    } catch (const Error&) {
      continue;
    }
    std::map<std::string, double> theta;
    for (const auto& t : dec.terms) theta[t.permutation.label()] += t.theta;
    const double ti = x(0, 0);
    const std::map<std::string, double> expected{
        {"(1,2,3)", ti},
        {"(1,3,2)", x(0, 0) - ti},
        {"(2,1,3)", x(2, 2) - ti},
        {"(2,3,1)", x(0, 1) - x(2, 2) + ti},
        {"(3,1,2)", x(0, 2) - x(1, 1) + ti},
        {"(3,2,1)", x(1, 1) - ti},
    };
    for (const auto& [label, value] : expected) CHECK_THAT(theta[label], WithinAbs(value, 1e-9));
    for (const auto& [label, value] : expected)
      if (label != "(1,2,3)") CHECK(value <= 1e-10);
    ++verified;
  }
  CHECK(verified == 5);
}

TEST_CASE("affine decompositions of x reconstruct it", "[coherent]") {
  rwtest::Gen g(rwtest::kMasterSeed + 34);
  for (int n = 0; n < 30; ++n) {
    const std::size_t d = g.index(2, 4);
    const auto rho = g.density(d);
    const Hamiltonian h(g.energies(d));
    const double r = g.uniform(-1.5, 1.5);
    const auto u = optimal_coherent(rho, h, r).unitary;
    const auto x = xjk_matrix(rho, h, r, g.uniform(0.0, 1.0), u);
    try {
      const auto dec = affine_decompose(x);
      double total = 0.0;
      for (const auto& t : dec.terms) total += t.theta;
      CHECK_THAT(total, WithinAbs(1.0, 1e-10));
      CHECK(max_dev(dec.reconstruct(), x) <= 1e-10);
      CHECK(dec.terms.size() <= (d - 1) * (d - 1) + 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotDecomposable);
    }
  }
}

TEST_CASE("q profile", "[coherent]") {
  const std::vector<double> qs{0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  const auto rho = qubit(0.35, Complex(0.3, -0.2));
  const auto prof = utility_q_profile(rho, kQubit, 0.8, qs);
  CHECK_THAT(prof[2].utility, WithinAbs(prof[4].utility, 1e-12));
  CHECK(prof[2].utility >= prof[3].utility);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK_THAT(prof[i].utility, WithinAbs(prof[qs.size() - 1 - i].utility, 1e-9));
    CHECK(prof[i].utility >= prof[3].utility - 1e-12);
    CHECK(prof[i].decomposable);
  }
  CHECK_THAT(prof[3].utility, WithinAbs(optimal_coherent(rho, kQubit, 0.8).optimal_utility, 1e-12));
  CHECK_THAT(prof[3].theta_identity, WithinAbs(1.0, 1e-10));
  CHECK(prof[0].theta_identity > 1.0);

  // The quasi expectation agrees with a direct triple sum.
  const auto u = optimal_coherent(rho, kQubit, 0.8).unitary;
  for (double q : qs) {
    const double naive = rwtest::naive_quasi_expectation(rho.matrix(), u, {0.0, 1.0}, q,
                                                         [](double w) { return rwtest::naive_u(0.8, w); });
    CHECK_THAT(quasi_expected_utility(rho, kQubit, 0.8, q, u), WithinAbs(naive, 1e-12));
  }

  const std::vector<double> p{0.2, 0.5, 0.3};
  const Hamiltonian h({0.0, 0.5, 1.4});
  const auto flat = utility_q_profile(DensityState::from_populations(p), h, 0.4, qs);
  const double ref = optimal_exponential(std::span<const double>(p), h, 0.4).optimal_utility;
  for (const auto& pt : flat) CHECK_THAT(pt.utility, WithinAbs(ref, 1e-12));

  const std::vector<double> bad{0.5, 1.2};
  CHECK(code_of([&] { (void)utility_q_profile(rho, kQubit, 0.8, bad); }) == ErrorCode::QOutOfRange);
}

TEST_CASE("coherent contribution", "[coherent]") {
  const std::vector<double> p{0.2, 0.5, 0.3};
  CHECK(coherent_contribution(DensityState::from_populations(p), Hamiltonian({0.0, 0.5, 1.4}), 0.9) == 0.0);

  rwtest::Gen g;
  for (int n = 0; n < 30; ++n) {
    const std::size_t d = g.index(2, 4);
    const Hamiltonian h(g.energies(d));
    const auto rho = g.density(d);
    CHECK(coherent_contribution(rho, h, g.uniform(-2.0, 2.0)) >= -1e-10);
    const auto pd = dephase(rho).populations();
    const double erg_c = optimal_coherent(rho, h, 0.0).optimal_utility - ergotropy(pd, h).value;
    CHECK_THAT(coherent_contribution(rho, h, 0.0), WithinAbs(erg_c, 1e-12));
  }
  CHECK_THAT(coherent_contribution(qubit(0.5, 0.5), kQubit, 1e-7), WithinAbs(0.5, 1e-6));
}

TEST_CASE("coherence and the optimal incoherent cycle do not add up", "[coherent]") {
  // Extracting from Delta(rho) first and then from the rotated coherent
  // state gives a different value than the coherent contribution.
  const auto rho = qubit(0.3, Complex(0.25, 0.1));
  const double r = 0.5;
  const auto inc = optimal_exponential(dephase(rho), kQubit, r);
  const ComplexMatrix ui = inc.permutation.unitary();
  ComplexMatrix moved = ui * rho.matrix() * ui.adjoint();
  const double after = optimal_coherent(DensityState(moved), kQubit, r).optimal_utility;
  REQUIRE_FALSE(inc.permutation.is_identity());
  CHECK(std::abs(coherent_contribution(rho, kQubit, r) - after) > 1e-3);
  CHECK(std::abs(optimal_coherent(rho, kQubit, r).optimal_utility - (inc.optimal_utility + after)) > 1e-3);
}

TEST_CASE("qubit closed form", "[coherent]") {
  CHECK(qubit_coherent_closed_form(0.3, 0.0, 1.0, 0.7) == 0.0);
  CHECK_THAT(qubit_coherent_closed_form(0.5, 0.5, 1.0, 0.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(qubit_coherent_closed_form(0.5, 0.5, 1.0, 1e-6), WithinAbs(0.5, 1e-6));
  CHECK(qubit_coherent_closed_form(0.5, 0.5, 1.0, 1.0) > qubit_coherent_closed_form(0.5, 0.25, 1.0, 1.0));
  for (double r : {-1.3, 0.4, 2.0})
    for (double p : {0.2, 0.5, 0.8}) {
      const Complex c = std::polar(0.9 * std::sqrt(p * (1 - p)), 1.1);
      CHECK_THAT(qubit_coherent_closed_form(p, c, 1.0, r), WithinAbs(coherent_contribution(qubit(p, c), kQubit, r), 1e-10));
    }
  CHECK(code_of([] { (void)qubit_coherent_closed_form(0.5, 0.6, 1.0, 1.0); }) == ErrorCode::CoherenceBoundViolated);
}
