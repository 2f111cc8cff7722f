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

// Hamiltonians diagonal in a fixed energy basis, density states, dephasing,
// bipartite composition/reduction and (generalized) passivity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"

namespace riskwork {

enum class LevelOrder {
  strict,  // e_k < e_{k+1}
  weak,    // e_k <= e_{k+1}; needed for composite systems such as two qubits
};

/// Bookkeeping for a Hamiltonian built as H_A (x) 1 + 1 (x) H_B.
/// `kron_index[k]` is the Kronecker-basis index (i_A * d_B + i_B) of the
/// k-th energy level after sorting.
struct Bipartition {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::vector<std::size_t> kron_index;
};

class Hamiltonian {
 public:
  explicit Hamiltonian(std::vector<double> energies, LevelOrder order = LevelOrder::strict)
      : energies_(std::move(energies)), order_(order) {
    if (energies_.empty()) throw Error(ErrorCode::DimensionMismatch, "Hamiltonian needs >= 1 level");
    for (double e : energies_) {
      if (!std::isfinite(e)) throw Error(ErrorCode::InvalidInput, "non-finite energy level");
    }
    for (std::size_t k = 0; k + 1 < energies_.size(); ++k) {
      const double a = energies_[k], b = energies_[k + 1];
      if (b < a) {
        throw Error(ErrorCode::UnsortedLevels,
                    "energies must ascend: e_" + std::to_string(k + 1) + " > e_" +
                        std::to_string(k + 2));
      }
      if (b == a && order_ == LevelOrder::strict) {
        throw Error(ErrorCode::DegenerateLevels,
                    "e_" + std::to_string(k + 1) + " == e_" + std::to_string(k + 2) +
                        " (use LevelOrder::weak for degenerate spectra)");
      }
    }
  }

  std::size_t dim() const noexcept { return energies_.size(); }
  std::span<const double> energies() const noexcept { return energies_; }
  double operator[](std::size_t k) const { return energies_[k]; }
  LevelOrder order() const noexcept { return order_; }

  const std::optional<Bipartition>& bipartition() const noexcept { return bipartition_; }
  void set_bipartition(Bipartition b) {
    if (b.dim_a * b.dim_b != dim() || b.kron_index.size() != dim())
      throw Error(ErrorCode::DimensionMismatch, "bipartition does not match Hamiltonian");
    bipartition_ = std::move(b);
  }

  friend bool operator==(const Hamiltonian& a, const Hamiltonian& b) {
    return a.energies_ == b.energies_;
  }

 private:
  std::vector<double> energies_;
  LevelOrder order_;
  std::optional<Bipartition> bipartition_;
};

/// Hermitian, positive semidefinite, unit-trace matrix in the energy basis.
class DensityState {
 public:
  explicit DensityState(ComplexMatrix matrix, const Tolerances& tol = {})
      : matrix_(std::move(matrix)) {
    validate(tol);
  }

  static DensityState from_populations(std::span<const double> populations,
                                       const Tolerances& tol = {}) {
    validate_probabilities(populations, tol);
    return DensityState(ComplexMatrix::diagonal(populations), tol);
  }

  /// |psi><psi| for a normalized pure state.
  static DensityState pure(std::span<const Complex> psi, const Tolerances& tol = {}) {
    ComplexMatrix m(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
      for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return DensityState(std::move(m), tol);
  }

  std::size_t dim() const noexcept { return matrix_.dim(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  bool is_incoherent() const noexcept { return incoherent_; }

  std::vector<double> populations() const {
    std::vector<double> p(dim());
    for (std::size_t k = 0; k < dim(); ++k) p[k] = matrix_(k, k).real();
    return p;
  }

  static void validate_probabilities(std::span<const double> p, const Tolerances& tol = {}) {
    if (p.empty()) throw Error(ErrorCode::InvalidProbabilities, "empty population vector");
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!std::isfinite(p[k]) || p[k] < -tol.psd) {
        throw Error(ErrorCode::InvalidProbabilities,
                    "population p_" + std::to_string(k + 1) + " = " + std::to_string(p[k]));
      }
      total += p[k];
    }
    if (std::abs(total - 1.0) > tol.trace) {
      throw Error(ErrorCode::InvalidProbabilities, "populations sum to " + std::to_string(total));
    }
  }

 private:
  void validate(const Tolerances& tol) {
    const double herm = hermiticity_defect(matrix_);
    if (!(herm <= tol.hermitian)) {
      throw Error(ErrorCode::NotHermitian, "state: max |rho - rho^dagger| = " + std::to_string(herm));
    }
    const double tr = matrix_.trace().real();
    if (!(std::abs(tr - 1.0) <= tol.trace)) {
      throw Error(ErrorCode::TraceNotOne, "state: trace = " + std::to_string(tr));
    }
    double off = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j)
        if (i != j) off = std::max(off, std::abs(matrix_(i, j)));
    incoherent_ = off < tol.incoherent;
    double min_eig = 0.0;
    if (incoherent_) {
      min_eig = matrix_(0, 0).real();
      for (std::size_t k = 0; k < dim(); ++k) min_eig = std::min(min_eig, matrix_(k, k).real());
    } else {
      min_eig = eig_hermitian(matrix_, tol).values.back();
    }
    if (min_eig < -tol.psd) {
      throw Error(ErrorCode::NotPositiveSemidefinite,
                  "state: smallest eigenvalue " + std::to_string(min_eig));
    }
  }

  ComplexMatrix matrix_;
  bool incoherent_ = false;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

/// Delta(rho): keeps the diagonal, drops all coherences.
inline DensityState dephase(const DensityState& rho) {
  ComplexMatrix m(rho.dim());
  for (std::size_t k = 0; k < rho.dim(); ++k) m(k, k) = rho.matrix()(k, k).real();
  return DensityState(std::move(m), Tolerances{}.scaled(1e3));
}

/// E(rho) = tr(H rho).
inline double average_energy(const DensityState& rho, const Hamiltonian& h) {
  require_same_dim(rho.dim(), h.dim(), "average_energy");
  double e = 0.0;
  for (std::size_t k = 0; k < h.dim(); ++k) e += h[k] * rho.matrix()(k, k).real();
  return e;
}

inline double average_energy(std::span<const double> populations, const Hamiltonian& h) {
  require_same_dim(populations.size(), h.dim(), "average_energy");
  double e = 0.0;
  for (std::size_t k = 0; k < h.dim(); ++k) e += h[k] * populations[k];
  return e;
}

/// Kronecker product state, in the Kronecker basis |i_A i_B>.
inline DensityState tensor(const DensityState& a, const DensityState& b) {
  return DensityState(kron(a.matrix(), b.matrix()), Tolerances{}.scaled(1e2));
}

/// H_A (x) 1 + 1 (x) H_B with levels sorted ascending. Ties keep Kronecker
/// order; the resulting Hamiltonian is weakly ordered when ties occur and
/// records the level -> Kronecker index map.
inline Hamiltonian tensor(const Hamiltonian& a, const Hamiltonian& b) {
  const std::size_t da = a.dim(), db = b.dim();
  std::vector<double> raw(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) raw[i * db + j] = a[i] + b[j];
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return raw[x] < raw[y]; });
  std::vector<double> sorted(raw.size());
  bool ties = false;
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted[k] = raw[order[k]];
    if (k > 0 && sorted[k] == sorted[k - 1]) ties = true;
  }
  Hamiltonian h(std::move(sorted), ties ? LevelOrder::weak : LevelOrder::strict);
  h.set_bipartition(Bipartition{da, db, std::move(order)});
  return h;
}

/// Re-expresses a Kronecker-basis state in the sorted level basis of a
/// composite Hamiltonian (and `from_level_basis` goes back).
inline DensityState to_level_basis(const DensityState& kron_state, const Hamiltonian& composite) {
  if (!composite.bipartition()) return kron_state;
  const auto& idx = composite.bipartition()->kron_index;
  require_same_dim(kron_state.dim(), idx.size(), "to_level_basis");
  ComplexMatrix m(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t l = 0; l < idx.size(); ++l) m(k, l) = kron_state.matrix()(idx[k], idx[l]);
  return DensityState(std::move(m), Tolerances{}.scaled(1e2));
}

inline DensityState from_level_basis(const DensityState& level_state, const Hamiltonian& composite) {
  if (!composite.bipartition()) return level_state;
  const auto& idx = composite.bipartition()->kron_index;
  require_same_dim(level_state.dim(), idx.size(), "from_level_basis");
  ComplexMatrix m(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t l = 0; l < idx.size(); ++l) m(idx[k], idx[l]) = level_state.matrix()(k, l);
  return DensityState(std::move(m), Tolerances{}.scaled(1e2));
}

enum class Subsystem { A, B };

struct BipartiteDims {
  std::size_t a = 0;
  std::size_t b = 0;
};

/// Reduced state of a Kronecker-basis bipartite state.
inline DensityState partial_trace(const DensityState& rho, BipartiteDims dims, Subsystem keep) {
  if (dims.a == 0 || dims.b == 0 || dims.a * dims.b != rho.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "partial_trace: d_A * d_B = " +
                                                  std::to_string(dims.a * dims.b) + " but d = " +
                                                  std::to_string(rho.dim()));
  }
  const auto& m = rho.matrix();
  if (keep == Subsystem::A) {
    ComplexMatrix out(dims.a);
    for (std::size_t i = 0; i < dims.a; ++i)
      for (std::size_t j = 0; j < dims.a; ++j)
        for (std::size_t k = 0; k < dims.b; ++k) out(i, j) += m(i * dims.b + k, j * dims.b + k);
    return DensityState(std::move(out), Tolerances{}.scaled(1e2));
  }
  ComplexMatrix out(dims.b);
  for (std::size_t k = 0; k < dims.b; ++k)
    for (std::size_t l = 0; l < dims.b; ++l)
      for (std::size_t i = 0; i < dims.a; ++i) out(k, l) += m(i * dims.b + k, i * dims.b + l);
  return DensityState(std::move(out), Tolerances{}.scaled(1e2));
}

/// Von Neumann entropy in nats, with 0 ln 0 = 0.
inline double von_neumann_entropy(const DensityState& rho) {
  std::vector<double> lambda =
      rho.is_incoherent() ? rho.populations() : eig_hermitian(rho.matrix()).values;
  double s = 0.0;
  for (double l : lambda)
    if (l > 0.0) s -= l * std::log(l);
  return s;
}

/// I(A:B) = S(rho_A) + S(rho_B) - S(rho), nats.
inline double mutual_information(const DensityState& rho, BipartiteDims dims) {
  return von_neumann_entropy(partial_trace(rho, dims, Subsystem::A)) +
         von_neumann_entropy(partial_trace(rho, dims, Subsystem::B)) - von_neumann_entropy(rho);
}

/// True iff p_n e^{-r e_n} >= p_k e^{-r e_k} for every pair of levels with
/// e_n < e_k. For strictly ordered spectra this is the adjacent-pair test;
/// r = 0 is ordinary passivity. Pairs of degenerate levels never matter.
inline bool is_generalized_passive(std::span<const double> p, const Hamiltonian& h, double r) {
  require_same_dim(p.size(), h.dim(), "is_generalized_passive");
  DensityState::validate_probabilities(p);
  const std::size_t d = p.size();
  // Within a block of degenerate levels only the extreme weights matter.
  double prev_min = 0.0;
  bool have_prev = false;
  for (std::size_t start = 0; start < d;) {
    std::size_t end = start + 1;
    while (end < d && h[end] == h[start]) ++end;
    double block_min = p[start] * std::exp(-r * h[start]);
    double block_max = block_min;
    for (std::size_t k = start; k < end; ++k) {
      const double w = p[k] * std::exp(-r * h[k]);
      block_min = std::min(block_min, w);
      block_max = std::max(block_max, w);
    }
    if (have_prev && block_max > prev_min) return false;
    prev_min = have_prev ? std::min(prev_min, block_min) : block_min;
    have_prev = true;
    start = end;
  }
  return true;
}

}  // namespace riskwork
