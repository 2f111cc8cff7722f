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

// Optimal work extraction from states carrying coherence in the energy
// basis. The q = 1/2 quasiprobability representation reduces the problem to
// the spectrum of A = e^{-rH/2} rho e^{-rH/2}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/permutation.hpp"
#include "riskwork/quantum_model.hpp"
#include "riskwork/utility.hpp"

namespace riskwork {

/// Dense real square matrix, row-major.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}
  RealMatrix(std::size_t dim, std::vector<double> entries) : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim * dim) {
      throw Error(ErrorCode::DimensionMismatch, "RealMatrix needs dim*dim entries");
    }
  }
  static RealMatrix identity(std::size_t dim) {
    RealMatrix m(dim);
    for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const double> entries() const noexcept { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct SortedSpectrum {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column k belongs to values[k]
};

struct CoherentOutcome {
  double optimal_utility = 0.0;
  double certainty_equivalent = 0.0;
  std::vector<double> sorted_u;
  /// Eigenvectors of A_{1/2}, column k for the k-th largest eigenvalue.
  ComplexMatrix eigenvectors;
  /// Certifying cycle: maps the k-th eigenvector onto |e_k>.
  ComplexMatrix unitary;
  /// Set when rho is incoherent and the cycle is a level permutation.
  std::optional<Permutation> permutation;
};

struct AffineTerm {
  Permutation permutation;
  double theta = 0.0;
};

struct AffineDecomposition {
  std::vector<AffineTerm> terms;  // identity first

  double theta_identity() const { return terms.front().theta; }
  RealMatrix reconstruct() const {
    const std::size_t d = terms.front().permutation.size();
    RealMatrix m(d);
    for (const auto& t : terms)
      for (std::size_t k = 0; k < d; ++k) m(k, t.permutation[k]) += t.theta;
    return m;
  }
};

struct QProfilePoint {
  double q = 0.0;
  double utility = 0.0;
  bool decomposable = false;
  double theta_identity = std::numeric_limits<double>::quiet_NaN();
  /// Extremes of the coefficients of the non-identity permutations; 0 when
  /// only the identity appears.
  double min_theta_offdiag = std::numeric_limits<double>::quiet_NaN();
  double max_theta_offdiag = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::vector<double> exp_levels(const Hamiltonian& h, double factor) {
  std::vector<double> out(h.dim());
  for (std::size_t k = 0; k < h.dim(); ++k) out[k] = std::exp(factor * h[k]);
  return out;
}

inline void check_inputs(const DensityState& rho, const Hamiltonian& h, double r) {
  require_same_dim(rho.dim(), h.dim(), "state vs Hamiltonian");
  if (!std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "r must be finite");
}

}  // namespace detail

/// A_q = e^{-q r H} rho e^{-(1-q) r H}.
inline ComplexMatrix aq_matrix(const DensityState& rho, const Hamiltonian& h, double r, double q) {
  detail::check_inputs(rho, h, r);
  return scale_rows_cols(detail::exp_levels(h, -q * r), rho.matrix(),
                         detail::exp_levels(h, -(1.0 - q) * r));
}

/// Descending eigenvalues u_k of the Hermitian A_{1/2} and its eigenvectors.
inline SortedSpectrum sorted_u_spectrum(const DensityState& rho, const Hamiltonian& h, double r,
                                        const Tolerances& tol = {}) {
  EigenDecomposition e = eig_hermitian(aq_matrix(rho, h, r, 0.5), tol);
  return {std::move(e.values), std::move(e.vectors)};
}

/// Maximal expected exponential utility over all unitary cycles in the
/// q = 1/2 representation.
inline CoherentOutcome optimal_coherent(const DensityState& rho, const Hamiltonian& h, double r,
                                        const Tolerances& tol = {}) {
  detail::check_inputs(rho, h, r);
  const std::size_t d = h.dim();
  CoherentOutcome out;
  if (rho.is_incoherent()) {
    const auto p = rho.populations();
    OptimizationOutcome inc = optimal_exponential(std::span<const double>(p), h, r);
    out.optimal_utility = inc.optimal_utility;
    out.certainty_equivalent = inc.certainty_equivalent;
    out.sorted_u = inc.sorted_u;
    out.unitary = inc.permutation.unitary();
    out.eigenvectors = out.unitary.adjoint();
    out.permutation = std::move(inc.permutation);
    return out;
  }
  SortedSpectrum s = sorted_u_spectrum(rho, h, r, tol);
  const bool neutral = std::abs(r) < kRiskNeutralBand;
  double value = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double pk = rho.matrix()(k, k).real();
    if (neutral) {
      value += (pk - s.values[k]) * h[k];
    } else {
      // (1 - sum_k u_k e^{r e_k})/r with 1 = sum_k rho_kk split off exactly.
      value += (-pk * std::expm1(-r * h[k]) - s.values[k] * std::expm1(r * h[k])) / r;
    }
  }
  out.optimal_utility = value;
  out.certainty_equivalent = neutral ? value : -std::log1p(-r * value) / r;
  out.sorted_u = std::move(s.values);
  out.unitary = s.vectors.adjoint();
  out.eigenvectors = std::move(s.vectors);
  return out;
}

/// x_jk = Re <e_k|S_q|u_j><u_j|S_q^{-1}|e_k> with S_q = U e^{-q r H} e^{r H/2}
/// and |u_j> the eigenvectors of A_{1/2}. Doubly stochastic in the sense of
/// unit row and column sums; entries may leave [0, 1] for q != 1/2.
inline RealMatrix xjk_matrix(const DensityState& rho, const Hamiltonian& h, double r, double q,
                             const ComplexMatrix& u, const Tolerances& tol = {}) {
  detail::check_inputs(rho, h, r);
  require_same_dim(u.dim(), h.dim(), "unitary vs Hamiltonian");
  require_unitary(u, tol);
  const std::size_t d = h.dim();
  const auto dq = detail::exp_levels(h, r * (0.5 - q));
  const auto dq_inv = detail::exp_levels(h, -r * (0.5 - q));
  for (std::size_t k = 0; k < d; ++k) {
    if (!std::isfinite(dq[k]) || !std::isfinite(dq_inv[k]) || dq[k] == 0.0 || dq_inv[k] == 0.0) {
      throw Error(ErrorCode::SingularSq, "e^{r(1/2-q)H} over/underflows");
    }
  }
  const ComplexMatrix v = optimal_coherent(rho, h, r, tol).eigenvectors;
  const std::vector<double> unit(d, 1.0);
  const ComplexMatrix s_v = u * scale_rows_cols(dq, v, unit);               // S_q V
  const ComplexMatrix v_s_inv = scale_rows_cols(unit, v.adjoint(), dq_inv) * u.adjoint();
  RealMatrix x(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) x(j, k) = (s_v(k, j) * v_s_inv(j, k)).real();
  return x;
}

namespace detail {

// Kuhn's augmenting paths on the support {(i, j) : m(i, j) >= floor}.
inline bool perfect_matching(const RealMatrix& m, double floor, std::vector<std::size_t>& col_of_row) {
  const std::size_t d = m.dim();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> row_of_col(d, kNone);
  std::vector<char> seen(d);
  auto augment = [&](auto&& self, std::size_t row) -> bool {
    for (std::size_t c = 0; c < d; ++c) {
      if (seen[c] || !(m(row, c) >= floor)) continue;
      seen[c] = 1;
      if (row_of_col[c] == kNone || self(self, row_of_col[c])) {
        row_of_col[c] = row;
        return true;
      }
    }
    return false;
  };
  for (std::size_t row = 0; row < d; ++row) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, row)) return false;
  }
  col_of_row.assign(d, 0);
  for (std::size_t c = 0; c < d; ++c) col_of_row[row_of_col[c]] = c;
  return true;
}

// Perfect matching maximizing its smallest entry among entries > threshold.
inline std::optional<std::vector<std::size_t>> bottleneck_matching(const RealMatrix& m,
                                                                   double threshold) {
  std::vector<double> levels;
  for (double v : m.entries())
    if (v > threshold) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> best;
  if (levels.empty() || !perfect_matching(m, levels.front(), best)) return std::nullopt;
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    std::vector<std::size_t> trial;
    if (perfect_matching(m, levels[mid], trial)) {
      lo = mid;
      best = std::move(trial);
    } else {
      hi = mid - 1;
    }
  }
  return best;
}

// Convex decomposition of a non-negative matrix with unit row/column sums.
inline std::optional<std::vector<AffineTerm>> birkhoff(RealMatrix residual, double threshold) {
  const std::size_t d = residual.dim();
  std::vector<AffineTerm> terms;
  double remaining = 1.0;
  const std::size_t max_terms = d * d;
  while (remaining > threshold && terms.size() < max_terms) {
    auto match = bottleneck_matching(residual, threshold);
    if (!match) break;  // leftover is judged by the caller's reconstruction check
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d; ++k) theta = std::min(theta, residual(k, (*match)[k]));
    for (std::size_t k = 0; k < d; ++k) residual(k, (*match)[k]) -= theta;
    remaining -= theta;
    terms.push_back({Permutation(*match), theta});
  }
  if (terms.empty()) return std::nullopt;
  return terms;
}

}  // namespace detail

/// x = sum_alpha theta_alpha P^(alpha) with the identity weight theta_I =
/// max_k x_kk >= 1 and all other weights <= 0, for matrices with unit row
/// and column sums, diagonal >= 1 and off-diagonal <= 0.
inline AffineDecomposition affine_decompose(const RealMatrix& x, const Tolerances& tol = {}) {
  const std::size_t d = x.dim();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "empty matrix");
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      row += x(i, j);
      col += x(j, i);
    }
    if (std::abs(row - 1.0) > tol.doubly_stochastic || std::abs(col - 1.0) > tol.doubly_stochastic) {
      throw Error(ErrorCode::NotDecomposable, "row or column " + std::to_string(i + 1) +
                                                  " does not sum to 1");
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const bool bad = i == j ? x(i, j) < 1.0 - 1e-10 : x(i, j) > 1e-10;
      if (bad) {
        throw Error(ErrorCode::NotDecomposable,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                        std::to_string(x(i, j)) + " breaks diagonal >= 1, off-diagonal <= 0");
      }
    }

  double theta_id = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d; ++k) theta_id = std::max(theta_id, x(k, k));
  AffineDecomposition out;
  out.terms.push_back({Permutation::identity(d), 1.0});
  if (theta_id - 1.0 <= 1e-12) return out;
  out.terms.front().theta = theta_id;

  const double scale = 1.0 - theta_id;  // negative
  RealMatrix tilde(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      tilde(i, j) = std::max(0.0, (x(i, j) - (i == j ? theta_id : 0.0)) / scale);

  double max_entry = 1.0;
  for (double v : x.entries()) max_entry = std::max(max_entry, std::abs(v));
  for (double threshold : {1e-12, 1e-9}) {
    auto terms = detail::birkhoff(tilde, threshold);
    if (!terms) continue;
    AffineDecomposition candidate;
    candidate.terms.push_back({Permutation::identity(d), theta_id});
    for (auto& t : *terms) {
      auto same = std::find_if(candidate.terms.begin(), candidate.terms.end(),
                               [&](const AffineTerm& c) { return c.permutation == t.permutation; });
      if (same != candidate.terms.end()) {
        same->theta += scale * t.theta;
      } else {
        candidate.terms.push_back({std::move(t.permutation), scale * t.theta});
      }
    }
    const RealMatrix rebuilt = candidate.reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < d * d; ++i)
      err = std::max(err, std::abs(rebuilt.entries()[i] - x.entries()[i]));
    if (err <= 1e-10 * max_entry) return candidate;
  }
  throw Error(ErrorCode::MatchingFailure,
              "no consistent permutation support found for the residual matrix");
}

/// Expected utility of the q-quasiprobability work distribution under the
/// fixed cycle `u`, via (1 - Re sum_k e^{r e_k} (U A_q U^dagger)_kk)/r.
inline double quasi_expected_utility(const DensityState& rho, const Hamiltonian& h, double r,
                                     double q, const ComplexMatrix& u) {
  detail::check_inputs(rho, h, r);
  const std::size_t d = h.dim();
  if (std::abs(r) < kRiskNeutralBand) {
    const ComplexMatrix after = u * rho.matrix() * u.adjoint();
    double w = 0.0;
    for (std::size_t k = 0; k < d; ++k) w += (rho.matrix()(k, k).real() - after(k, k).real()) * h[k];
    return w;
  }
  const ComplexMatrix m = u * aq_matrix(rho, h, r, q) * u.adjoint();
  double value = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    value += (-rho.matrix()(k, k).real() * std::expm1(-r * h[k]) -
              m(k, k).real() * std::expm1(r * h[k])) / r;
  }
  return value;
}

/// Utility of the q = 1/2 certifying cycle evaluated in the q
/// representation, together with the affine decomposition of x_jk(q). The
/// q = 1/2 point is the minimum of this profile.
inline std::vector<QProfilePoint> utility_q_profile(const DensityState& rho, const Hamiltonian& h,
                                                    double r, std::span<const double> q_grid,
                                                    const Tolerances& tol = {}) {
  for (double q : q_grid) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw Error(ErrorCode::QOutOfRange, "q = " + std::to_string(q) + " outside [0, 1]");
    }
  }
  const CoherentOutcome best = optimal_coherent(rho, h, r, tol);
  std::vector<QProfilePoint> out;
  out.reserve(q_grid.size());
  for (double q : q_grid) {
    QProfilePoint pt;
    pt.q = q;
    pt.utility = quasi_expected_utility(rho, h, r, q, best.unitary);
    try {
      const AffineDecomposition dec = affine_decompose(xjk_matrix(rho, h, r, q, best.unitary, tol), tol);
      pt.decomposable = true;
      pt.theta_identity = dec.theta_identity();
      pt.min_theta_offdiag = 0.0;
      pt.max_theta_offdiag = 0.0;
      if (dec.terms.size() > 1) {
        pt.min_theta_offdiag = std::numeric_limits<double>::infinity();
        pt.max_theta_offdiag = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 1; a < dec.terms.size(); ++a) {
          pt.min_theta_offdiag = std::min(pt.min_theta_offdiag, dec.terms[a].theta);
          pt.max_theta_offdiag = std::max(pt.max_theta_offdiag, dec.terms[a].theta);
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotDecomposable && e.code() != ErrorCode::MatchingFailure) throw;
    }
    out.push_back(pt);
  }
  return out;
}

/// U_c = U(rho) - U(Delta(rho)) >= 0.
inline double coherent_contribution(const DensityState& rho, const Hamiltonian& h, double r,
                                    const Tolerances& tol = {}) {
  const CoherentOutcome with = optimal_coherent(rho, h, r, tol);
  const CoherentOutcome without = optimal_coherent(dephase(rho), h, r, tol);
  if (!majorizes(with.sorted_u, without.sorted_u, 1e-10)) {
    throw Error(ErrorCode::CrossCheckFailed,
                "spectrum of A_{1/2} does not majorize its diagonal");
  }
  return with.optimal_utility - without.optimal_utility;
}

/// Closed form of U_c for the qubit [[p, c], [c*, 1-p]] with levels (0, e):
/// (|eta| - sqrt(4|c|^2 e^{r e} + eta^2)) (e^{-r e} - 1) / (2r),
/// eta = p (1 + e^{r e}) - 1.
inline double qubit_coherent_closed_form(double p, Complex c, double epsilon, double r) {
  if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(epsilon) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidInput, "need p in [0, 1] and finite epsilon, r");
  }
  const double c2 = std::norm(c);
  if (c2 > p * (1.0 - p) + 1e-12) {
    throw Error(ErrorCode::CoherenceBoundViolated,
                "|c|^2 = " + std::to_string(c2) + " exceeds p(1-p) = " + std::to_string(p * (1 - p)));
  }
  if (std::abs(r) < kRiskNeutralBand) {
    const double m = std::abs(2.0 * p - 1.0);
    return 0.5 * epsilon * (std::sqrt(4.0 * c2 + m * m) - m);
  }
  const double growth = std::exp(r * epsilon);
  const double eta = p * (1.0 + growth) - 1.0;
  return (std::abs(eta) - std::sqrt(4.0 * c2 * growth + eta * eta)) * std::expm1(-r * epsilon) /
         (2.0 * r);
}

}  // namespace riskwork
