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

// Command-line front end for the riskwork library.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskwork/riskwork.hpp"
#include "riskwork/io.hpp"
#include "riskwork/sweep.hpp"

namespace {

using riskwork::Error;
using riskwork::ErrorCode;
using riskwork::json;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

riskwork::UtilitySpec utility_from_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    try {
      return riskwork::parse_utility(json::parse(arg));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidUtility, e.what());
    }
  }
  return riskwork::parse_utility(riskwork::read_json_file(arg));
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal work extraction for risk-sensitive agents"};
  app.require_subcommand(1);

  std::string input, out, freq_out, utility_arg;
  std::vector<std::string> inputs;
  double r = 0.0, r_min = -3.0, r_max = 3.0, p_min = 0.02, p_max = 0.98, epsilon = 1.0;
  std::vector<double> r_list;
  std::size_t grid = 0, q_steps = 101, budget = 20;
  std::uint64_t seed = 1;
  std::optional<double> q;
  bool vs_product = false, vs_dephased = false;

  auto* optimize = app.add_subcommand("optimize", "Optimal expected utility of a state");
  optimize->add_option("--input", input, "State JSON file")->required();
  optimize->add_option("--r", r, "Risk parameter of the exponential utility");
  optimize->add_option("--utility", utility_arg, "Utility JSON (inline or file); overrides --r");
  optimize->add_option("--out", out, "Output JSON file (default stdout)");

  auto* ergo = app.add_subcommand("ergotropy", "Risk-neutral optimum");
  ergo->add_option("--input", input, "State JSON file")->required();
  ergo->add_option("--out", out, "Output JSON file (default stdout)");

  auto* d2 = app.add_subcommand("phase-d2", "Qubit optimal permutation over (p, r)");
  d2->add_option("--p-min", p_min, "Smallest ground population");
  d2->add_option("--p-max", p_max, "Largest ground population");
  d2->add_option("--r-min", r_min, "Smallest r");
  d2->add_option("--r-max", r_max, "Largest r");
  d2->add_option("--grid", grid, "Points per axis (default 200)");
  d2->add_option("--epsilon", epsilon, "Level spacing");
  d2->add_option("--out", out, "Output CSV file (default stdout)");

  auto* d3 = app.add_subcommand("phase-d3", "Qutrit optimal permutation over the simplex");
  d3->add_option("--grid", grid, "Simplex resolution (default 100)");
  d3->add_option("--r", r_list, "Risk parameters (repeatable)");
  d3->add_option("--out", out, "Map CSV file (default stdout)");
  d3->add_option("--freq-out", freq_out, "Region-frequency CSV file");

  auto* qs = app.add_subcommand("qsweep", "Utility of the optimal cycle across q");
  qs->add_option("--input", input, "State JSON file")->required();
  qs->add_option("--r", r, "Risk parameter");
  qs->add_option("--q-steps", q_steps, "Odd number of q points on [0, 1]");
  qs->add_option("--out", out, "Output CSV file (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Which of two states an agent prefers");
  cmp->add_option("--input", inputs, "State JSON file(s)")->required();
  cmp->add_flag("--vs-product", vs_product, "Compare against the product of the marginals");
  cmp->add_flag("--vs-dephased", vs_dephased, "Compare against the dephased state");
  cmp->add_option("--r", r_list, "Risk parameters (repeatable)");
  cmp->add_option("--r-min", r_min, "Crossing search lower bound");
  cmp->add_option("--r-max", r_max, "Crossing search upper bound");
  cmp->add_option("--out", out, "Output JSON file (default stdout)");

  auto* orc = app.add_subcommand("oracle", "Random-restart search over unitary cycles");
  orc->add_option("--input", input, "State JSON file")->required();
  orc->add_option("--r", r, "Risk parameter of the exponential utility");
  orc->add_option("--utility", utility_arg, "Utility JSON (inline or file); overrides --r");
  orc->add_option("--q", q, "Quasiprobability parameter (needed for coherent states)");
  orc->add_option("--budget", budget, "Number of random restarts");
  orc->add_option("--seed", seed, "Random seed");
  orc->add_option("--out", out, "Output JSON file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: InvalidArguments: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    const riskwork::Tolerances tol = riskwork::Tolerances::from_environment("default");

    if (*optimize) {
      const auto in = riskwork::load_state(input, tol);
      if (!utility_arg.empty()) {
        const auto u = utility_from_arg(utility_arg);
        if (auto rr = u.risk_parameter()) {
          r = *rr;
        } else {
          if (!in.state.is_incoherent()) {
            throw Error(ErrorCode::NotIncoherent, "general utilities need an incoherent state");
          }
          const auto p = in.state.populations();
          emit(dump(riskwork::to_json(riskwork::optimal_general(p, in.hamiltonian, u))), out);
          return 0;
        }
      }
      if (in.state.is_incoherent()) {
        const auto p = in.state.populations();
        emit(dump(riskwork::to_json(riskwork::optimal_exponential(std::span<const double>(p), in.hamiltonian, r))),
             out);
      } else {
        emit(dump(riskwork::to_json(riskwork::optimal_coherent(in.state, in.hamiltonian, r, tol))), out);
      }
    } else if (*ergo) {
      const auto in = riskwork::load_state(input, tol);
      json j;
      if (in.state.is_incoherent()) {
        const auto p = in.state.populations();
        const auto e = riskwork::ergotropy(p, in.hamiltonian);
        j = {{"ergotropy", e.value}, {"permutation", e.permutation.label()}};
      } else {
        const auto e = riskwork::optimal_coherent(in.state, in.hamiltonian, 0.0, tol);
        j = {{"ergotropy", e.optimal_utility}, {"permutation", nullptr}};
      }
      emit(dump(j), out);
    } else if (*d2) {
      riskwork::PhaseD2Options o;
      o.p_min = p_min;
      o.p_max = p_max;
      o.r_min = r_min;
      o.r_max = r_max;
      o.epsilon = epsilon;
      if (grid != 0) o.p_steps = o.r_steps = grid;
      emit(riskwork::phase_d2_csv(riskwork::run_phase_d2(o)), out);
    } else if (*d3) {
      riskwork::PhaseD3Options o;
      if (grid != 0) o.resolution = grid;
      if (!r_list.empty()) o.r_values = r_list;
      const auto res = riskwork::run_phase_d3(o);
      emit(riskwork::phase_d3_csv(res), out);
      if (!freq_out.empty()) {
        emit(riskwork::frequency_csv(res), freq_out);
      } else if (!out.empty()) {
        std::cout << riskwork::frequency_csv(res);
      }
    } else if (*qs) {
      const auto in = riskwork::load_state(input, tol);
      emit(riskwork::qsweep_csv(riskwork::run_qsweep(in, r, q_steps, tol)), out);
    } else if (*cmp) {
      const bool derived = vs_product || vs_dephased;
      if (vs_product && vs_dephased) {
        throw Error(ErrorCode::InvalidInput, "choose one of --vs-product and --vs-dephased");
      }
      if (inputs.size() != (derived ? 1u : 2u)) {
        throw Error(ErrorCode::InvalidInput, derived ? "expected one --input" : "expected two --input files");
      }
      const auto a = riskwork::load_state(inputs[0], tol);
      const auto b = vs_product    ? riskwork::product_of_marginals(a)
                     : vs_dephased ? riskwork::dephased(a)
                                   : riskwork::load_state(inputs[1], tol);
      riskwork::CompareOptions o;
      o.r_values = r_list;
      const bool range_given = cmp->count("--r-min") > 0 || cmp->count("--r-max") > 0;
      if (range_given || r_list.empty()) o.crossing_range = std::make_pair(r_min, r_max);
      if (o.r_values.empty()) o.r_values = riskwork::linspace(r_min, r_max, 7);
      emit(dump(riskwork::to_json(riskwork::run_compare(a, b, o, tol))), out);
    } else if (*orc) {
      const auto in = riskwork::load_state(input, tol);
      const auto u = utility_arg.empty() ? riskwork::UtilitySpec::exponential(r) : utility_from_arg(utility_arg);
      const auto report = riskwork::maximize_over_unitaries(in.state, in.hamiltonian, u, q, budget, seed);
      json j = riskwork::to_json(report);
      if (auto rr = u.risk_parameter()) {
        if (in.state.is_incoherent()) {
          const auto p = in.state.populations();
          j["closed_form"] = riskwork::optimal_exponential(std::span<const double>(p), in.hamiltonian, *rr).optimal_utility;
        } else if (q && *q == 0.5) {
          j["closed_form"] = riskwork::optimal_coherent(in.state, in.hamiltonian, *rr, tol).optimal_utility;
        }
      }
      emit(dump(j), out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidInput: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << one_line(e.what()) << "\n";
    return 70;
  }
  return 0;
}
