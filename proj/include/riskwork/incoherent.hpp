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

// Optimal work extraction from states diagonal in the energy basis.
//
// For the exponential utility u(w) = (1 - e^{-r w})/r the optimum over all
// unitary cycles is attained by a permutation of energy levels: sort
// p_k e^{-r e_k} in decreasing order (u_1 >= u_2 >= ...) and place the k-th
// largest on level k, giving U = (1 - sum_k u_k e^{r e_k}) / r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/permutation.hpp"
#include "riskwork/quantum_model.hpp"
#include "riskwork/utility.hpp"
#include "riskwork/work_stats.hpp"

namespace riskwork {

/// Largest dimension accepted by the exhaustive d! search.
inline constexpr std::size_t kMaxExhaustiveDim = 8;

struct OptimizationOutcome {
  double optimal_utility = 0.0;
  Permutation permutation;
  double certainty_equivalent = 0.0;
  /// Decreasingly sorted p_k e^{-r e_k}; empty for non-exponential utilities.
  std::vector<double> sorted_u;
  /// Activation threshold r_max when defined for the populations.
  std::optional<double> threshold;
  /// Set when the utility is not strictly increasing on the work support;
  /// the result is then only the best permutation, not a proven optimum.
  bool non_monotone_utility = false;
};

struct ErgotropyResult {
  double value = 0.0;
  Permutation permutation;
};

namespace detail {

inline void validate(std::span<const double> p, const Hamiltonian& h) {
  require_same_dim(p.size(), h.dim(), "populations vs Hamiltonian");
  DensityState::validate_probabilities(p);
}

// Permutation in the level basis is a product sigma_A (x) sigma_B in the
// Kronecker basis of the Hamiltonian's bipartition.
inline bool is_local(const Permutation& perm, const Bipartition& bp) {
  const std::size_t d = perm.size();
  std::vector<std::size_t> level_of(d);
  for (std::size_t k = 0; k < d; ++k) level_of[bp.kron_index[k]] = k;
  auto kron_source = [&](std::size_t kron_target) {
    return bp.kron_index[perm[level_of[kron_target]]];
  };
  for (std::size_t a = 0; a < bp.dim_a; ++a)
    for (std::size_t b = 0; b < bp.dim_b; ++b) {
      const std::size_t sa = kron_source(a * bp.dim_b) / bp.dim_b;
      const std::size_t sb = kron_source(b) % bp.dim_b;
      if (kron_source(a * bp.dim_b + b) != sa * bp.dim_b + sb) return false;
    }
  return true;
}

// Orders levels by decreasing weight. Equal weights keep index order, except
// that on a bipartite Hamiltonian the first (lexicographic) ordering of the
// tied blocks that acts locally on both subsystems is preferred.
inline Permutation sort_by_weight(std::span<const double> weight, const Hamiltonian& h) {
  const std::size_t d = weight.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
  // Weights equal up to round-off count as tied and keep level order.
  const auto tied = [&](std::size_t a, std::size_t b) {
    return std::abs(weight[a] - weight[b]) <= 1e-13 * std::max(std::abs(weight[a]), std::abs(weight[b]));
  };
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t s = 0; s < d;) {
    std::size_t e = s + 1;
    while (e < d && tied(order[e - 1], order[e])) ++e;
    if (e - s > 1) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(s), order.begin() + static_cast<std::ptrdiff_t>(e));
      blocks.emplace_back(s, e);
    }
    s = e;
  }
  Permutation stable(order);
  if (!h.bipartition() || is_local(stable, *h.bipartition())) return stable;

  if (blocks.empty()) return stable;
  constexpr std::size_t kMaxCandidates = 100000;
  std::vector<std::size_t> candidate = order;
  for (std::size_t visited = 0; visited < kMaxCandidates; ++visited) {
    // Odometer over the block orderings, last block fastest.
    std::size_t b = blocks.size();
    bool advanced = false;
    while (b-- > 0) {
      auto first = candidate.begin() + static_cast<std::ptrdiff_t>(blocks[b].first);
      auto last = candidate.begin() + static_cast<std::ptrdiff_t>(blocks[b].second);
      if (std::next_permutation(first, last)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
    Permutation p(candidate);
    if (is_local(p, *h.bipartition())) return p;
  }
  return stable;
}

// Sum_k p_{src(k)} u(e_{src(k)} - e_k) for the exponential utility.
inline double permutation_utility(std::span<const double> p, const Hamiltonian& h,
                                  const Permutation& perm, double r) {
  double s = 0.0;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const std::size_t src = perm[k];
    if (p[src] == 0.0) continue;
    s += p[src] * exponential_utility(r, h[src] - h[k]);
  }
  return s;
}

// True when the permutation only shuffles degenerate levels, i.e. moves no
// energy at all.
inline bool is_energy_trivial(const Permutation& perm, const Hamiltonian& h) {
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (h[perm[k]] != h[k]) return false;
  return true;
}

}  // namespace detail

/// Risk-neutral optimum E(rho) = sum_k p_k e_k - sum_k r_k e_k with r the
/// populations sorted decreasingly.
inline ErgotropyResult ergotropy(std::span<const double> p, const Hamiltonian& h) {
  detail::validate(p, h);
  Permutation perm = detail::sort_by_weight(p, h);
  double value = 0.0;
  if (!detail::is_energy_trivial(perm, h)) {
    for (std::size_t k = 0; k < perm.size(); ++k) value += p[perm[k]] * (h[perm[k]] - h[k]);
  }
  return {value, std::move(perm)};
}

/// max over r of ln(p_k/p_n)/(e_k - e_n) for k > n with e_k > e_n. Extraction
/// beats doing nothing exactly when r is below this value; +inf when a
/// populated level sits above an empty one.
inline double activation_threshold(std::span<const double> p, const Hamiltonian& h) {
  detail::validate(p, h);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    for (std::size_t n = 0; n < k; ++n) {
      if (!(h[k] > h[n])) continue;
      any = true;
      if (p[n] <= 0.0) return std::numeric_limits<double>::infinity();
      best = std::max(best, std::log(p[k] / p[n]) / (h[k] - h[n]));
    }
  }
  if (!any) {
    throw Error(ErrorCode::DegenerateState,
                "no populated level above another level: U = 0 for every r");
  }
  return best;
}

/// Optimal expected exponential utility over all unitary cycles.
inline OptimizationOutcome optimal_exponential(std::span<const double> p, const Hamiltonian& h,
                                               double r) {
  detail::validate(p, h);
  if (!std::isfinite(r)) throw Error(ErrorCode::InvalidInput, "r must be finite");
  OptimizationOutcome out;
  const std::size_t d = p.size();
  std::vector<double> weight(d);
  const bool neutral = std::abs(r) < kRiskNeutralBand;
  for (std::size_t k = 0; k < d; ++k) weight[k] = neutral ? p[k] : p[k] * std::exp(-r * h[k]);
  out.permutation = detail::sort_by_weight(weight, h);
  out.sorted_u.resize(d);
  for (std::size_t k = 0; k < d; ++k) out.sorted_u[k] = weight[out.permutation[k]];

  if (!detail::is_energy_trivial(out.permutation, h)) {
    out.optimal_utility = detail::permutation_utility(p, h, out.permutation, neutral ? 0.0 : r);
  }
  if (neutral) {
    out.certainty_equivalent = out.optimal_utility;
  } else if (std::abs(r * out.optimal_utility) < 0.5) {
    out.certainty_equivalent = -std::log1p(-r * out.optimal_utility) / r;
  } else {
    // 1 - r U = sum_k p_{src(k)} e^{-r w_k}; summing it directly keeps the
    // logarithm finite when r U is within rounding of 1.
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t src = out.permutation[k];
      if (p[src] > 0.0) s += p[src] * std::exp(-r * (h[src] - h[k]));
    }
    out.certainty_equivalent = -std::log(s) / r;
  }
  try {
    out.threshold = activation_threshold(p, h);
  } catch (const Error&) {
    out.threshold.reset();
  }
  return out;
}

inline OptimizationOutcome optimal_exponential(const DensityState& rho, const Hamiltonian& h,
                                               double r) {
  if (!rho.is_incoherent()) throw Error(ErrorCode::NotIncoherent, "optimal_exponential");
  const auto p = rho.populations();
  return optimal_exponential(std::span<const double>(p), h, r);
}

/// Exhaustive maximum of sum_k p_{src(k)} u(e_{src(k)} - e_k) over all d!
/// permutations for an arbitrary callable utility. Ties go to the
/// lexicographically smallest permutation. The certainty equivalent is left
/// NaN since a callable cannot be inverted in general.
template <typename UtilityFn>
OptimizationOutcome optimal_general_with(std::span<const double> p, const Hamiltonian& h,
                                         UtilityFn&& u) {
  detail::validate(p, h);
  const std::size_t d = p.size();
  if (d > kMaxExhaustiveDim) {
    throw Error(ErrorCode::DimensionTooLarge,
                "d = " + std::to_string(d) + " exceeds " + std::to_string(kMaxExhaustiveDim));
  }
  OptimizationOutcome out;
  out.certainty_equivalent = std::numeric_limits<double>::quiet_NaN();

  // Monotonicity on the support of the work: all gaps e_i - e_j.
  std::vector<double> works;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (p[i] > 0.0) works.push_back(h[i] - h[j]);
  std::sort(works.begin(), works.end());
  works.erase(std::unique(works.begin(), works.end()), works.end());
  for (std::size_t i = 1; i < works.size(); ++i) {
    if (!(u(works[i]) > u(works[i - 1]))) {
      out.non_monotone_utility = true;
      break;
    }
  }

  std::vector<std::vector<double>> table(d, std::vector<double>(d, 0.0));
  for (std::size_t src = 0; src < d; ++src)
    if (p[src] > 0.0)
      for (std::size_t k = 0; k < d; ++k) table[src][k] = p[src] * u(h[src] - h[k]);

  bool first = true;
  for_each_permutation(d, [&](const Permutation& perm) {
    double value = 0.0;
    for (std::size_t k = 0; k < d; ++k) value += table[perm[k]][k];
    const double band = 1e-13 * (1.0 + std::abs(out.optimal_utility));
    if (first || value > out.optimal_utility + band) {
      out.optimal_utility = value;
      out.permutation = perm;
      first = false;
    }
  });
  return out;
}

inline OptimizationOutcome optimal_general(std::span<const double> p, const Hamiltonian& h,
                                           const UtilitySpec& u) {
  OptimizationOutcome out =
      optimal_general_with(p, h, [&u](double w) { return utility_value(u, w); });
  out.certainty_equivalent = certainty_equivalent(out.optimal_utility, u);
  if (auto r = u.risk_parameter()) {
    out.sorted_u.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      out.sorted_u[k] = p[out.permutation[k]] * std::exp(-*r * h[out.permutation[k]]);
  }
  return out;
}

/// First two moments of the work under the ergotropic permutation, and the
/// resulting near-risk-neutral approximations
///   U(r)    ~ E - (r/2) <w^2>_E
///   E_CE(r) ~ E - (r/2) (<w^2>_E - E^2).
struct SmallRExpansion {
  double ergotropy = 0.0;
  double second_moment = 0.0;
  Permutation permutation;

  double utility(double r) const { return ergotropy - 0.5 * r * second_moment; }
  double certainty_equivalent(double r) const {
    return ergotropy - 0.5 * r * (second_moment - ergotropy * ergotropy);
  }
};

inline SmallRExpansion small_r_expansion(std::span<const double> p, const Hamiltonian& h) {
  ErgotropyResult erg = ergotropy(p, h);
  SmallRExpansion out;
  out.ergotropy = erg.value;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double w = h[erg.permutation[k]] - h[k];
    out.second_moment += p[erg.permutation[k]] * w * w;
  }
  out.permutation = std::move(erg.permutation);
  return out;
}

namespace detail {

inline std::vector<double> sorted_desc(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

inline bool prefix_dominates(std::span<const double> a, std::span<const double> b,
                             std::size_t count, double rel_tol) {
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    sa += a[k];
    sb += b[k];
    if (sa < sb - rel_tol * std::max({1.0, std::abs(sa), std::abs(sb)})) return false;
  }
  return true;
}

}  // namespace detail

/// a weakly majorizes b: every prefix sum of the decreasing rearrangement of
/// a is >= the corresponding one of b.
inline bool weak_majorizes(std::span<const double> a, std::span<const double> b,
                           double rel_tol = 1e-13) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const auto sa = detail::sorted_desc(a), sb = detail::sorted_desc(b);
  return detail::prefix_dominates(sa, sb, sa.size(), rel_tol);
}

/// a majorizes b: prefix dominance up to d-1 and equal totals (1e-10).
inline bool majorizes(std::span<const double> a, std::span<const double> b,
                      double rel_tol = 1e-13) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const auto sa = detail::sorted_desc(a), sb = detail::sorted_desc(b);
  const double ta = std::accumulate(sa.begin(), sa.end(), 0.0);
  const double tb = std::accumulate(sb.begin(), sb.end(), 0.0);
  if (std::abs(ta - tb) > 1e-10) return false;
  return detail::prefix_dominates(sa, sb, sa.empty() ? 0 : sa.size() - 1, rel_tol);
}

struct StateComparison {
  Preference preference = Preference::Indifferent;
  double utility_first = 0.0;
  double utility_second = 0.0;
  /// u weakly majorizes u' together with (r < 0 or equal transformed totals).
  bool weak_majorization_applies = false;
  /// u majorizes u' (for r = 0 additionally the average energies agree).
  bool majorization_applies = false;
  /// sum_j (u_j - u'_j)/r = 0; at r = 0 this is E(rho) = E(rho').
  bool equal_energy = false;
};

/// sum_k (p_k - p'_k) e^{-r e_k} / r, evaluated stably; tends to
/// -(E(p) - E(p')) as r -> 0.
inline double transformed_total_gap(std::span<const double> p, std::span<const double> q,
                                    const Hamiltonian& h, double r) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double factor = std::abs(r) < kRiskNeutralBand ? -h[k] : std::expm1(-r * h[k]) / r;
    s += (p[k] - q[k]) * factor;
  }
  return s;
}

inline StateComparison compare_states(std::span<const double> p, std::span<const double> q,
                                      const Hamiltonian& h, double r, const Tolerances& tol = {}) {
  const OptimizationOutcome a = optimal_exponential(p, h, r);
  const OptimizationOutcome b = optimal_exponential(q, h, r);
  StateComparison out;
  out.utility_first = a.optimal_utility;
  out.utility_second = b.optimal_utility;
  out.preference = compare_values(a.optimal_utility, b.optimal_utility, tol.indifference);
  out.equal_energy = std::abs(transformed_total_gap(p, q, h, r)) <= 1e-10;
  out.weak_majorization_applies =
      weak_majorizes(a.sorted_u, b.sorted_u) && (r < 0.0 || out.equal_energy);
  out.majorization_applies = majorizes(a.sorted_u, b.sorted_u) &&
                             (std::abs(r) >= kRiskNeutralBand || out.equal_energy);
  return out;
}

/// Locates the first sign change of f on [lo, hi] scanning `steps` uniform
/// intervals; values with |f| <= floor carry no sign. Bisects to ~1e-13.
template <typename Fn>
double find_crossing(Fn&& f, double lo, double hi, std::size_t steps = 400,
                     double floor = 1e-12) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi) || steps < 1) {
    throw Error(ErrorCode::InvalidRange, "crossing search needs a finite lo < hi");
  }
  std::optional<std::pair<double, double>> last;  // (x, f(x)) with a definite sign
  for (std::size_t i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    const double fx = f(x);
    if (!(std::abs(fx) > floor)) continue;
    if (last && (last->second > 0.0) != (fx > 0.0)) {
      double a = last->first, b = x;
      const bool a_positive = last->second > 0.0;
      for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (std::abs(fm) <= floor) return mid;
        ((fm > 0.0) == a_positive ? a : b) = mid;
      }
      return 0.5 * (a + b);
    }
    last = {x, fx};
  }
  throw Error(ErrorCode::NoCrossing, "no sign change on [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]");
}

/// Product of the marginals of a bipartite population vector given in the
/// level order of `h`.
inline std::vector<double> product_of_marginals(std::span<const double> p, BipartiteDims dims,
                                                const Hamiltonian& h) {
  detail::validate(p, h);
  if (dims.a * dims.b != p.size() || dims.a == 0) {
    throw Error(ErrorCode::DimensionMismatch, "bipartite dims do not match the state");
  }
  std::vector<std::size_t> kron(p.size());
  std::iota(kron.begin(), kron.end(), 0);
  if (h.bipartition() && h.bipartition()->dim_a == dims.a && h.bipartition()->dim_b == dims.b) {
    kron = h.bipartition()->kron_index;
  }
  std::vector<double> pa(dims.a, 0.0), pb(dims.b, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    pa[kron[k] / dims.b] += p[k];
    pb[kron[k] % dims.b] += p[k];
  }
  std::vector<double> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = pa[kron[k] / dims.b] * pb[kron[k] % dims.b];
  return out;
}

/// Risk parameter at which a correlated incoherent state and the product of
/// its marginals are equally valuable: the first sign change of
/// U(rho, r) - U(rho_A (x) rho_B, r) for r in [-10, 10].
inline double find_r_I(std::span<const double> p, BipartiteDims dims, const Hamiltonian& h) {
  const std::vector<double> product = product_of_marginals(p, dims, h);
  return find_crossing(
      [&](double r) {
        return optimal_exponential(p, h, r).optimal_utility -
               optimal_exponential(product, h, r).optimal_utility;
      },
      -10.0, 10.0);
}

}  // namespace riskwork
