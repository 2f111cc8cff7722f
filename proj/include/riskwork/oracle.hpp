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

// Independent numerical search over unitary cycles. Used to cross-check the
// closed-form optima; it makes no use of their structure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"
#include "riskwork/quantum_model.hpp"
#include "riskwork/utility.hpp"

namespace riskwork {

struct OracleReport {
  double best_value = 0.0;
  ComplexMatrix best_unitary;
  std::size_t iterations = 0;  // coordinate sweeps over all restarts
  std::uint64_t seed = 0;
};

/// Haar-like random unitary: complex Gaussian matrix orthonormalized column
/// by column (modified Gram-Schmidt, two passes).
inline ComplexMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<ComplexVector> cols(d, ComplexVector(d));
  for (auto& c : cols)
    for (auto& z : c) z = Complex(normal(rng), normal(rng));
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const Complex proj = inner(cols[i], cols[j]);
        for (std::size_t k = 0; k < d; ++k) cols[j][k] -= proj * cols[i][k];
      }
    }
    double norm = 0.0;
    for (const auto& z : cols[j]) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (auto& z : cols[j]) z /= norm;
  }
  ComplexMatrix u(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) u(i, j) = cols[j][i];
  return u;
}

inline ComplexMatrix random_unitary(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(d, rng);
}

namespace detail {

// f(U) = sum_k row_value(k, U) where each row term only reads row k of U.
class OracleObjective {
 public:
  OracleObjective(const DensityState& rho, const Hamiltonian& h, const UtilitySpec& u,
                  std::optional<double> q)
      : d_(h.dim()), quasi_(q.has_value()) {
    if (!quasi_) {
      if (!rho.is_incoherent()) {
        throw Error(ErrorCode::NotIncoherent,
                    "two-point statistics need an incoherent state; pass q for coherent ones");
      }
      // Row n of U sends level k to n with probability |U_nk|^2.
      tpm_.assign(d_ * d_, 0.0);
      for (std::size_t n = 0; n < d_; ++n)
        for (std::size_t k = 0; k < d_; ++k) {
          const double p = rho.matrix()(k, k).real();
          if (p != 0.0) tpm_[n * d_ + k] = p * utility_value(u, h[k] - h[n]);
        }
    } else {
      quasi_table_.assign(d_ * d_ * d_, Complex(0.0));
      for (std::size_t k = 0; k < d_; ++k)
        for (std::size_t i = 0; i < d_; ++i)
          for (std::size_t j = 0; j < d_; ++j) {
            const Complex rij = rho.matrix()(i, j);
            if (rij == Complex(0.0)) continue;
            const double w = *q * h[i] + (1.0 - *q) * h[j] - h[k];
            quasi_table_[(k * d_ + i) * d_ + j] = rij * utility_value(u, w);
          }
    }
  }

  bool quasi() const noexcept { return quasi_; }

  double row(std::span<const Complex> urow, std::size_t k) const {
    double s = 0.0;
    if (!quasi_) {
      for (std::size_t j = 0; j < d_; ++j) s += std::norm(urow[j]) * tpm_[k * d_ + j];
      return s;
    }
    // Re sum_ij T_kij conj(U_kj) U_ki
    for (std::size_t i = 0; i < d_; ++i) {
      if (urow[i] == Complex(0.0)) continue;
      Complex acc = 0.0;
      for (std::size_t j = 0; j < d_; ++j) acc += quasi_table_[(k * d_ + i) * d_ + j] * std::conj(urow[j]);
      s += (acc * urow[i]).real();
    }
    return s;
  }

  double total(const ComplexMatrix& u) const {
    double s = 0.0;
    for (std::size_t k = 0; k < d_; ++k) s += row(u.entries().subspan(k * d_, d_), k);
    return s;
  }

 private:
  std::size_t d_;
  bool quasi_;
  std::vector<double> tpm_;
  std::vector<Complex> quasi_table_;
};

// Maximizes g on [lo, hi] starting from a coarse scan then golden-section.
template <typename Fn>
std::pair<double, double> maximize_1d(Fn&& g, double lo, double hi, int coarse = 24) {
  double best_x = 0.0, best_v = g(0.0);
  const double step = (hi - lo) / coarse;
  for (int i = 0; i <= coarse; ++i) {
    const double x = lo + step * i;
    const double v = g(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_x - step, b = best_x + step;
  double c = b - phi * (b - a), e = a + phi * (b - a);
  double gc = g(c), ge = g(e);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (gc > ge) {
      b = e;
      e = c;
      ge = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = e;
      gc = ge;
      e = a + phi * (b - a);
      ge = g(e);
    }
  }
  const double x = gc > ge ? c : e;
  const double v = std::max(gc, ge);
  if (v > best_v) return {x, v};
  return {best_x, best_v};
}

}  // namespace detail

/// Best expected utility found over unitary cycles by `budget` random
/// restarts of a coordinate ascent on two-level rotations (and column phases
/// when q is given). Deterministic for a given seed. Without q the
/// two-point statistics are used and rho must be incoherent.
inline OracleReport maximize_over_unitaries(const DensityState& rho, const Hamiltonian& h,
                                            const UtilitySpec& u, std::optional<double> q,
                                            std::size_t budget, std::uint64_t seed) {
  require_same_dim(rho.dim(), h.dim(), "state vs Hamiltonian");
  if (budget == 0) throw Error(ErrorCode::InvalidInput, "budget must be positive");
  if (q && !(*q >= 0.0 && *q <= 1.0)) throw Error(ErrorCode::QOutOfRange, "q outside [0, 1]");
  const std::size_t d = h.dim();
  const detail::OracleObjective f(rho, h, u, q);
  std::mt19937_64 rng(seed);
  OracleReport report;
  report.seed = seed;
  bool have_best = false;
  constexpr double kPi = std::numbers::pi;
  constexpr std::size_t kMaxSweeps = 500;

  for (std::size_t restart = 0; restart < budget; ++restart) {
    ComplexMatrix m = random_unitary(d, rng);
    std::vector<double> rows(d);
    for (std::size_t k = 0; k < d; ++k) rows[k] = f.row(m.entries().subspan(k * d, d), k);
    double current = 0.0;
    for (double v : rows) current += v;

    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
      ++report.iterations;
      const double before = current;
      for (std::size_t a = 0; a + 1 < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
          for (int kind = 0; kind < 2; ++kind) {
            // kind 0: [[c, -s], [s, c]]; kind 1: [[c, i s], [i s, c]] on rows a, b.
            ComplexVector ra(d), rb(d);
            auto rotated = [&](double t) {
              const double c = std::cos(t), s = std::sin(t);
              for (std::size_t j = 0; j < d; ++j) {
                const Complex xa = m(a, j), xb = m(b, j);
                if (kind == 0) {
                  ra[j] = c * xa - s * xb;
                  rb[j] = s * xa + c * xb;
                } else {
                  ra[j] = c * xa + Complex(0.0, s) * xb;
                  rb[j] = Complex(0.0, s) * xa + c * xb;
                }
              }
              return current - rows[a] - rows[b] + f.row(ra, a) + f.row(rb, b);
            };
            auto [t, v] = detail::maximize_1d(rotated, -kPi / 2.0, kPi / 2.0);
            if (v > current) {
              rotated(t);
              for (std::size_t j = 0; j < d; ++j) {
                m(a, j) = ra[j];
                m(b, j) = rb[j];
              }
              rows[a] = f.row(ra, a);
              rows[b] = f.row(rb, b);
              current = 0.0;
              for (double x : rows) current += x;
            }
          }
        }
      }
      if (f.quasi()) {
        for (std::size_t col = 0; col < d; ++col) {
          auto phased = [&](double t) {
            ComplexMatrix trial = m;
            const Complex ph = std::polar(1.0, t);
            for (std::size_t i = 0; i < d; ++i) trial(i, col) *= ph;
            return f.total(trial);
          };
          auto [t, v] = detail::maximize_1d(phased, -kPi, kPi);
          if (v > current) {
            const Complex ph = std::polar(1.0, t);
            for (std::size_t i = 0; i < d; ++i) m(i, col) *= ph;
            for (std::size_t k = 0; k < d; ++k) rows[k] = f.row(m.entries().subspan(k * d, d), k);
            current = 0.0;
            for (double x : rows) current += x;
          }
        }
      }
      if (current - before < 1e-12) break;
    }
    if (!have_best || current > report.best_value) {
      report.best_value = current;
      report.best_unitary = m;
      have_best = true;
    }
  }
  return report;
}

}  // namespace riskwork
