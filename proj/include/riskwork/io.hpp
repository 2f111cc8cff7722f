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

// JSON input/output and CSV formatting. Requires nlohmann/json.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskwork/coherent.hpp"
#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/oracle.hpp"
#include "riskwork/quantum_model.hpp"
#include "riskwork/utility.hpp"
#include "riskwork/work_stats.hpp"

namespace riskwork {

using json = nlohmann::json;

/// A state together with its Hamiltonian, both in the level basis.
struct StateInput {
  Hamiltonian hamiltonian;
  DensityState state;
  std::optional<BipartiteDims> dims;
};

namespace detail {

inline const json& require_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<std::vector<double>> number_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(number_array(row, what));
  return out;
}

inline ComplexMatrix matrix_from_json(const json& j, std::size_t dim) {
  const auto re = number_matrix(require_field(j, "matrix_re"), "matrix_re");
  std::vector<std::vector<double>> im;
  if (j.contains("matrix_im")) im = number_matrix(j.at("matrix_im"), "matrix_im");
  if (re.size() != dim || (!im.empty() && im.size() != dim)) {
    throw Error(ErrorCode::DimensionMismatch, "matrix rows do not match the number of levels");
  }
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (re[i].size() != dim || (!im.empty() && im[i].size() != dim)) {
      throw Error(ErrorCode::DimensionMismatch, "matrix row " + std::to_string(i + 1) + " has wrong length");
    }
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = Complex(re[i][k], im.empty() ? 0.0 : im[i][k]);
  }
  return m;
}

inline DensityState state_from_json(const json& j, std::size_t dim, const Tolerances& tol) {
  if (j.contains("populations")) {
    const auto p = number_array(j.at("populations"), "populations");
    require_same_dim(p.size(), dim, "populations vs energies");
    return DensityState::from_populations(p, tol);
  }
  return DensityState(matrix_from_json(j, dim), tol);
}

}  // namespace detail

/// Accepted layouts:
///   {"energies": [...], "populations": [...]}
///   {"energies": [...], "matrix_re": [[...]], "matrix_im": [[...]]}
/// with optional "dims": [d_A, d_B] declaring that the level order equals the
/// Kronecker order, or
///   {"subsystem_energies": [[...], [...]], "populations" | "matrix_re" ...}
/// where the state is given in the Kronecker basis and levels are sorted.
inline StateInput parse_state(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "state must be a JSON object");
  if (j.contains("subsystem_energies")) {
    const auto parts = detail::number_matrix(j.at("subsystem_energies"), "subsystem_energies");
    if (parts.size() != 2) throw Error(ErrorCode::InvalidInput, "subsystem_energies needs two lists");
    Hamiltonian ha(parts[0]), hb(parts[1]);
    Hamiltonian h = tensor(ha, hb);
    DensityState kron_state = detail::state_from_json(j, h.dim(), tol);
    DensityState level_state = to_level_basis(kron_state, h);
    return {std::move(h), std::move(level_state), BipartiteDims{ha.dim(), hb.dim()}};
  }
  const auto energies = detail::number_array(detail::require_field(j, "energies"), "energies");
  std::optional<BipartiteDims> dims;
  if (j.contains("dims")) {
    const auto d = detail::number_array(j.at("dims"), "dims");
    if (d.size() != 2 || d[0] < 1 || d[1] < 1 || d[0] != std::floor(d[0]) || d[1] != std::floor(d[1])) {
      throw Error(ErrorCode::InvalidInput, "dims must be two positive integers");
    }
    dims = BipartiteDims{static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1])};
  }
  LevelOrder order = dims ? LevelOrder::weak : LevelOrder::strict;
  if (j.contains("level_order")) {
    const std::string s = j.at("level_order").get<std::string>();
    if (s == "strict") {
      order = LevelOrder::strict;
    } else if (s == "weak") {
      order = LevelOrder::weak;
    } else {
      throw Error(ErrorCode::InvalidInput, "level_order must be 'strict' or 'weak'");
    }
  }
  Hamiltonian h(energies, order);
  if (dims) {
    if (dims->a * dims->b != h.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "dims product does not match the number of levels");
    }
    std::vector<std::size_t> identity(h.dim());
    for (std::size_t k = 0; k < identity.size(); ++k) identity[k] = k;
    h.set_bipartition(Bipartition{dims->a, dims->b, std::move(identity)});
  }
  DensityState rho = detail::state_from_json(j, h.dim(), tol);
  return {std::move(h), std::move(rho), dims};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline StateInput load_state(const std::string& path, const Tolerances& tol = {}) {
  return parse_state(read_json_file(path), tol);
}

/// {"type": "exponential", "r": 1.0} | {"type": "linear"} |
/// {"type": "tabulated", "knots": [[w, u], ...]}
inline UtilitySpec parse_utility(const json& j) {
  const std::string kind = detail::require_field(j, "type").get<std::string>();
  if (kind == "exponential") return UtilitySpec::exponential(detail::require_field(j, "r").get<double>());
  if (kind == "linear") return UtilitySpec::linear();
  if (kind == "tabulated") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& row : detail::number_matrix(detail::require_field(j, "knots"), "knots")) {
      if (row.size() != 2) throw Error(ErrorCode::InvalidUtility, "each knot is [w, u]");
      knots.emplace_back(row[0], row[1]);
    }
    return UtilitySpec::tabulated(std::move(knots));
  }
  throw Error(ErrorCode::InvalidUtility, "unknown utility kind '" + kind + "'");
}

/// 17 significant digits, '.' separator; "nan", "inf", "-inf" otherwise.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json number_or_marker(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

inline json to_json(const OptimizationOutcome& o) {
  json j;
  j["utility"] = o.optimal_utility;
  j["certainty_equivalent"] = number_or_marker(o.certainty_equivalent);
  j["permutation"] = o.permutation.label();
  j["sorted_u"] = o.sorted_u;
  j["threshold"] = o.threshold ? number_or_marker(*o.threshold) : json(nullptr);
  if (o.non_monotone_utility) j["warning"] = "utility not increasing on the work support";
  return j;
}

inline json to_json(const ComplexMatrix& m, const char* prefix) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rr = json::array(), ii = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) {
      rr.push_back(m(i, k).real());
      ii.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return json{{std::string(prefix) + "_re", re}, {std::string(prefix) + "_im", im}};
}

inline json to_json(const CoherentOutcome& o) {
  json j;
  j["utility"] = o.optimal_utility;
  j["certainty_equivalent"] = number_or_marker(o.certainty_equivalent);
  j["permutation"] = o.permutation ? json(o.permutation->label()) : json(nullptr);
  j["sorted_u"] = o.sorted_u;
  j.update(to_json(o.unitary, "unitary"));
  return j;
}

inline json to_json(const AffineDecomposition& d) {
  json terms = json::array();
  for (const auto& t : d.terms) terms.push_back({{"permutation", t.permutation.label()}, {"theta", t.theta}});
  return terms;
}

inline json to_json(const OracleReport& r) {
  json j{{"best_value", r.best_value}, {"iterations", r.iterations}, {"seed", r.seed}};
  j.update(to_json(r.best_unitary, "unitary"));
  return j;
}

inline std::string distribution_csv(const WorkDistribution& dist) {
  std::ostringstream out;
  out << "w,weight,kind\n";
  for (const auto& a : dist.atoms())
    out << format_number(a.work) << ',' << format_number(a.weight) << ',' << to_string(dist.kind()) << '\n';
  return out.str();
}

}  // namespace riskwork
