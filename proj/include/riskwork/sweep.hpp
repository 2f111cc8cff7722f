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

// Parameter sweeps behind the command-line tool: qubit and qutrit phase
// diagrams, q profiles and pairwise state comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "riskwork/coherent.hpp"
#include "riskwork/error.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/io.hpp"
#include "riskwork/permutation.hpp"
#include "riskwork/quantum_model.hpp"

namespace riskwork {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
/// must be written by index; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// n points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2 || !std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi)) {
    throw Error(ErrorCode::InvalidRange, "need finite lo <= hi and at least 2 points");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

// ---------------------------------------------------------------------------
// Qubit phase diagram

struct PhaseD2Options {
  double p_min = 0.02;
  double p_max = 0.98;
  double r_min = -3.0;
  double r_max = 3.0;
  std::size_t p_steps = 200;
  std::size_t r_steps = 200;
  double epsilon = 1.0;
};

struct PhaseD2Row {
  double p = 0.0;  // ground-state population
  double r = 0.0;
  std::string label;
  double utility = 0.0;
};

inline std::vector<PhaseD2Row> run_phase_d2(const PhaseD2Options& o) {
  if (!(o.p_min > 0.0 && o.p_max < 1.0)) {
    throw Error(ErrorCode::InvalidRange, "p range must lie inside (0, 1)");
  }
  if (!(o.epsilon > 0.0) || !std::isfinite(o.epsilon)) {
    throw Error(ErrorCode::InvalidRange, "epsilon must be positive");
  }
  const auto ps = linspace(o.p_min, o.p_max, o.p_steps);
  const auto rs = linspace(o.r_min, o.r_max, o.r_steps);
  const Hamiltonian h({0.0, o.epsilon});
  std::vector<PhaseD2Row> rows(ps.size() * rs.size());
  parallel_for(ps.size(), [&](std::size_t i) {
    const double p[2] = {ps[i], 1.0 - ps[i]};
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const auto out = optimal_exponential(p, h, rs[j]);
      rows[i * rs.size() + j] = {ps[i], rs[j], out.permutation.label(), out.optimal_utility};
    }
  });
  return rows;
}

inline std::string phase_d2_csv(const std::vector<PhaseD2Row>& rows) {
  std::ostringstream out;
  out << "p,r,permutation,utility\n";
  for (const auto& r : rows)
    out << format_number(r.p) << ',' << format_number(r.r) << ",\"" << r.label << "\","
        << format_number(r.utility) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Qutrit phase diagram

struct PhaseD3Options {
  std::size_t resolution = 100;
  std::vector<double> r_values{0.0};
  std::vector<double> energies{1.0, 2.0, 3.0};
};

struct PhaseD3Row {
  double r = 0.0;
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  std::string label;
  double utility = 0.0;
};

struct RegionFrequency {
  double r = 0.0;
  std::string label;
  double frequency = 0.0;
};

struct PhaseD3Result {
  std::vector<PhaseD3Row> rows;
  std::vector<RegionFrequency> frequencies;  // all 6 labels per r, lexicographic
};

/// Simplex lattice p1 = (i + 1/3)/N, p2 = (j + 2/3)/N, i + j <= N - 2. The
/// offsets keep every point interior and off the lines p_a = p_b.
inline std::vector<std::array<double, 3>> simplex_grid(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidRange, "simplex resolution must be >= 2");
  std::vector<std::array<double, 3>> pts;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i + 2 <= n; ++i)
    for (std::size_t j = 0; i + j + 2 <= n; ++j) {
      const double p1 = (static_cast<double>(i) + 1.0 / 3.0) * inv;
      const double p2 = (static_cast<double>(j) + 2.0 / 3.0) * inv;
      pts.push_back({p1, p2, static_cast<double>(n - i - j - 1) * inv});
    }
  return pts;
}

inline PhaseD3Result run_phase_d3(const PhaseD3Options& o) {
  if (o.energies.size() != 3) throw Error(ErrorCode::InvalidRange, "qutrit needs 3 energies");
  if (o.r_values.empty()) throw Error(ErrorCode::InvalidRange, "no r values");
  for (double r : o.r_values)
    if (!std::isfinite(r)) throw Error(ErrorCode::InvalidRange, "r must be finite");
  const Hamiltonian h(o.energies);
  const auto grid = simplex_grid(o.resolution);
  PhaseD3Result result;
  result.rows.resize(o.r_values.size() * grid.size());
  parallel_for(result.rows.size(), [&](std::size_t idx) {
    const double r = o.r_values[idx / grid.size()];
    const auto& p = grid[idx % grid.size()];
    const auto out = optimal_exponential(std::span<const double>(p.data(), 3), h, r);
    result.rows[idx] = {r, p[0], p[1], p[2], out.permutation.label(), out.optimal_utility};
  });
  for (std::size_t ri = 0; ri < o.r_values.size(); ++ri) {
    std::map<std::string, std::size_t> counts;
    for_each_permutation(3, [&](const Permutation& perm) { counts[perm.label()] = 0; });
    for (std::size_t g = 0; g < grid.size(); ++g) ++counts[result.rows[ri * grid.size() + g].label];
    for (const auto& [label, count] : counts) {
      result.frequencies.push_back(
          {o.r_values[ri], label, static_cast<double>(count) / static_cast<double>(grid.size())});
    }
  }
  return result;
}

inline std::string phase_d3_csv(const PhaseD3Result& res) {
  std::ostringstream out;
  out << "r,p1,p2,p3,permutation,utility\n";
  for (const auto& r : res.rows)
    out << format_number(r.r) << ',' << format_number(r.p1) << ',' << format_number(r.p2) << ','
        << format_number(r.p3) << ",\"" << r.label << "\"," << format_number(r.utility) << '\n';
  return out.str();
}

inline std::string frequency_csv(const PhaseD3Result& res) {
  std::ostringstream out;
  out << "r,permutation,frequency\n";
  for (const auto& f : res.frequencies)
    out << format_number(f.r) << ",\"" << f.label << "\"," << format_number(f.frequency) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// q profile

/// q_steps points on [0, 1]; odd so that q = 1/2 is on the grid.
inline std::vector<QProfilePoint> run_qsweep(const StateInput& in, double r, std::size_t q_steps,
                                             const Tolerances& tol = {}) {
  if (q_steps < 3 || q_steps % 2 == 0) {
    throw Error(ErrorCode::InvalidRange, "q-steps must be odd and >= 3 so that q = 1/2 is sampled");
  }
  auto qs = linspace(0.0, 1.0, q_steps);
  qs[q_steps / 2] = 0.5;
  std::vector<QProfilePoint> out(q_steps);
  parallel_for(q_steps, [&](std::size_t i) {
    out[i] = utility_q_profile(in.state, in.hamiltonian, r, std::span<const double>(&qs[i], 1), tol)[0];
  });
  return out;
}

inline std::string qsweep_csv(const std::vector<QProfilePoint>& rows) {
  std::ostringstream out;
  out << "q,utility,theta_I,min_theta_offdiag,max_theta_offdiag,decomposable\n";
  for (const auto& p : rows)
    out << format_number(p.q) << ',' << format_number(p.utility) << ',' << format_number(p.theta_identity)
        << ',' << format_number(p.min_theta_offdiag) << ',' << format_number(p.max_theta_offdiag) << ','
        << (p.decomposable ? "true" : "false") << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// State comparison

struct CompareOptions {
  std::vector<double> r_values;
  /// When set, also locate the first preference flip inside this range.
  std::optional<std::pair<double, double>> crossing_range;
};

struct CompareVerdict {
  double r = 0.0;
  double utility_a = 0.0;
  double utility_b = 0.0;
  Preference preference = Preference::Indifferent;
  bool majorization = false;
  bool weak_majorization = false;
  bool equal_transformed_totals = false;
};

struct CompareReport {
  std::vector<CompareVerdict> verdicts;
  std::optional<double> crossing;
};

inline CompareVerdict compare_at(const StateInput& a, const StateInput& b, double r,
                                 const Tolerances& tol = {}) {
  const CoherentOutcome oa = optimal_coherent(a.state, a.hamiltonian, r, tol);
  const CoherentOutcome ob = optimal_coherent(b.state, b.hamiltonian, r, tol);
  const auto pa = a.state.populations(), pb = b.state.populations();
  CompareVerdict v;
  v.r = r;
  v.utility_a = oa.optimal_utility;
  v.utility_b = ob.optimal_utility;
  v.preference = compare_values(v.utility_a, v.utility_b, tol.indifference);
  v.equal_transformed_totals = std::abs(transformed_total_gap(pa, pb, a.hamiltonian, r)) <= 1e-10;
  v.weak_majorization =
      weak_majorizes(oa.sorted_u, ob.sorted_u) && (r < 0.0 || v.equal_transformed_totals);
  v.majorization = majorizes(oa.sorted_u, ob.sorted_u) &&
                   (std::abs(r) >= kRiskNeutralBand || v.equal_transformed_totals);
  return v;
}

inline CompareReport run_compare(const StateInput& a, const StateInput& b, const CompareOptions& o,
                                 const Tolerances& tol = {}) {
  if (!(a.hamiltonian == b.hamiltonian)) {
    throw Error(ErrorCode::HamiltonianMismatch, "the two states use different energy levels");
  }
  CompareReport report;
  report.verdicts.resize(o.r_values.size());
  parallel_for(o.r_values.size(),
               [&](std::size_t i) { report.verdicts[i] = compare_at(a, b, o.r_values[i], tol); });
  if (o.crossing_range) {
    try {
      report.crossing = find_crossing(
          [&](double r) {
            return optimal_coherent(a.state, a.hamiltonian, r, tol).optimal_utility -
                   optimal_coherent(b.state, b.hamiltonian, r, tol).optimal_utility;
          },
          o.crossing_range->first, o.crossing_range->second);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
    }
  }
  return report;
}

inline json to_json(const CompareReport& report) {
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"r", v.r},
                        {"utility_a", v.utility_a},
                        {"utility_b", v.utility_b},
                        {"preference", std::string(to_string(v.preference))},
                        {"majorization", v.majorization},
                        {"weak_majorization", v.weak_majorization},
                        {"equal_transformed_totals", v.equal_transformed_totals}});
  }
  return {{"verdicts", verdicts},
          {"crossing", report.crossing ? json(*report.crossing) : json(nullptr)}};
}

/// rho_A (x) rho_B from the marginals of a bipartite input, in its level basis.
inline StateInput product_of_marginals(const StateInput& in) {
  if (!in.dims) throw Error(ErrorCode::InvalidInput, "state has no bipartite dims");
  const DensityState kron_state = from_level_basis(in.state, in.hamiltonian);
  const DensityState prod = tensor(partial_trace(kron_state, *in.dims, Subsystem::A),
                                   partial_trace(kron_state, *in.dims, Subsystem::B));
  return {in.hamiltonian, to_level_basis(prod, in.hamiltonian), in.dims};
}

inline StateInput dephased(const StateInput& in) {
  return {in.hamiltonian, dephase(in.state), in.dims};
}

}  // namespace riskwork
