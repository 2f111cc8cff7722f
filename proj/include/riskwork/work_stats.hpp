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

// Work statistics of a unitary cycle: the two-projective-measurement
// distribution for incoherent states and the q-family of quasiprobability
// distributions for coherent ones.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"
#include "riskwork/quantum_model.hpp"

namespace riskwork {

enum class DistributionKind { probability, quasiprobability };

constexpr std::string_view to_string(DistributionKind kind) noexcept {
  return kind == DistributionKind::probability ? "probability" : "quasiprobability";
}

struct WorkAtom {
  double work = 0.0;
  double weight = 0.0;
};

/// Finite set of work atoms, sorted by work, merged within the merge
/// tolerance and normalized to unit total weight.
class WorkDistribution {
 public:
  WorkDistribution() = default;

  /// Sorts, merges near-coincident atoms (the cluster keeps its smallest
  /// work value) and drops atoms whose merged weight vanishes.
  static WorkDistribution from_atoms(std::vector<WorkAtom> atoms, DistributionKind kind,
                                     const Tolerances& tol = {}) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const WorkAtom& a, const WorkAtom& b) { return a.work < b.work; });
    WorkDistribution dist;
    dist.kind_ = kind;
    double total = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < atoms.size();) {
      WorkAtom merged{atoms[i].work, 0.0};
      double prev = atoms[i].work;
      std::size_t j = i;
      for (; j < atoms.size() && atoms[j].work - prev < tol.merge; ++j) {
        merged.weight += atoms[j].weight;
        scale = std::max(scale, std::abs(atoms[j].weight));
        prev = atoms[j].work;
      }
      total += merged.weight;
      dist.atoms_.push_back(merged);
      i = j;
    }
    std::erase_if(dist.atoms_, [&](const WorkAtom& a) {
      return std::abs(a.weight) <= 1e-15 * std::max(1.0, scale);
    });
    if (std::abs(total - 1.0) > tol.normalization) {
      throw Error(ErrorCode::InvalidProbabilities,
                  "work weights sum to " + std::to_string(total));
    }
    if (kind == DistributionKind::probability) {
      for (const auto& a : dist.atoms_) {
        if (a.weight < -tol.negative_weight) {
          throw Error(ErrorCode::InvalidProbabilities,
                      "negative probability " + std::to_string(a.weight));
        }
      }
    }
    return dist;
  }

  std::span<const WorkAtom> atoms() const noexcept { return atoms_; }
  DistributionKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

  /// Raw moment <w^n>.
  double moment(int n) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * std::pow(a.work, n);
    return s;
  }

  double mean() const { return moment(1); }

 private:
  std::vector<WorkAtom> atoms_;
  DistributionKind kind_ = DistributionKind::probability;
};

/// Two-projective-measurement statistics: atoms at w = e_k - e_n with
/// weight p_k |<e_n|U|e_k>|^2.
inline WorkDistribution tpm_distribution(const DensityState& rho, const Hamiltonian& h,
                                         const ComplexMatrix& u, const Tolerances& tol = {}) {
  require_same_dim(rho.dim(), h.dim(), "tpm_distribution");
  require_same_dim(u.dim(), h.dim(), "tpm_distribution");
  if (!rho.is_incoherent()) {
    throw Error(ErrorCode::NotIncoherent, "TPM statistics need a state diagonal in the energy basis");
  }
  require_unitary(u, tol);
  const std::size_t d = h.dim();
  std::vector<WorkAtom> atoms;
  atoms.reserve(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    const double pk = rho.matrix()(k, k).real();
    if (pk == 0.0) continue;
    for (std::size_t n = 0; n < d; ++n) {
      const double w = pk * std::norm(u(n, k));
      if (w == 0.0) continue;
      atoms.push_back({h[k] - h[n], w});
    }
  }
  return WorkDistribution::from_atoms(std::move(atoms), DistributionKind::probability, tol);
}

/// Quasiprobability of work for the q-representation: atoms at
/// w = q e_i + (1-q) e_j - e_k with weight
/// Re <e_i|rho|e_j><e_j|U^dagger|e_k><e_k|U|e_i>.
/// q is restricted to [0, 1] unless `allow_any_q` is set.
inline WorkDistribution quasiprob_distribution(const DensityState& rho, const Hamiltonian& h,
                                               const ComplexMatrix& u, double q,
                                               bool allow_any_q = false,
                                               const Tolerances& tol = {}) {
  require_same_dim(rho.dim(), h.dim(), "quasiprob_distribution");
  require_same_dim(u.dim(), h.dim(), "quasiprob_distribution");
  if (!std::isfinite(q) || (!allow_any_q && (q < 0.0 || q > 1.0))) {
    throw Error(ErrorCode::QOutOfRange, "q = " + std::to_string(q));
  }
  require_unitary(u, tol);
  const std::size_t d = h.dim();
  const auto& m = rho.matrix();
  std::vector<WorkAtom> atoms;
  atoms.reserve(d * d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (m(i, j) == Complex(0.0)) continue;
      for (std::size_t k = 0; k < d; ++k) {
        const double w = (m(i, j) * std::conj(u(k, j)) * u(k, i)).real();
        if (w == 0.0) continue;
        atoms.push_back({q * h[i] + (1.0 - q) * h[j] - h[k], w});
      }
    }
  return WorkDistribution::from_atoms(std::move(atoms), DistributionKind::quasiprobability, tol);
}

/// chi(x) = sum_w weight * e^{i x w}; complex x gives moment-generating
/// evaluations such as chi(i r) = <e^{-r w}>.
inline Complex characteristic_function(const WorkDistribution& dist, Complex x) {
  Complex s = 0.0;
  const Complex i(0.0, 1.0);
  for (const auto& a : dist.atoms()) s += a.weight * std::exp(i * x * a.work);
  return s;
}

/// g(x) = ln chi(x), principal branch.
inline Complex cumulant_generating(const WorkDistribution& dist, Complex x) {
  const Complex chi = characteristic_function(dist, x);
  double scale = 0.0;
  for (const auto& a : dist.atoms())
    scale += std::abs(a.weight) * std::abs(std::exp(Complex(0.0, 1.0) * x * a.work));
  if (std::abs(chi) <= 1e-14 * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::LogOfZero, "characteristic function vanishes");
  }
  return std::log(chi);
}

/// W(rho, U) = E(rho) - E(U rho U^dagger).
inline double average_work(const DensityState& rho, const Hamiltonian& h, const ComplexMatrix& u,
                           const Tolerances& tol = {}) {
  require_same_dim(rho.dim(), h.dim(), "average_work");
  require_same_dim(u.dim(), h.dim(), "average_work");
  require_unitary(u, tol);
  const ComplexMatrix final_state = u * rho.matrix() * u.adjoint();
  double before = 0.0, after = 0.0;
  for (std::size_t k = 0; k < h.dim(); ++k) {
    before += h[k] * rho.matrix()(k, k).real();
    after += h[k] * final_state(k, k).real();
  }
  return before - after;
}

}  // namespace riskwork
