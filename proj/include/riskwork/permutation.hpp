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

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"

namespace riskwork {

/// Permutation of energy levels, 0-based internally. `source(k)` is the
/// level whose population is moved onto level k, so the associated cycle is
/// U = sum_k e^{i phi_k} |e_k><e_{source(k)}|. Labels use 1-based tuples,
/// e.g. "(3,1,2)".
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t v : map_) {
      if (v >= map_.size() || seen[v]) {
        throw Error(ErrorCode::InvalidPermutation, "not a bijection on {1..d}");
      }
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t d) {
    std::vector<std::size_t> m(d);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  /// From a 1-based tuple such as {3, 1, 2}.
  static Permutation from_one_based(std::span<const int> tuple) {
    std::vector<std::size_t> m;
    m.reserve(tuple.size());
    for (int v : tuple) {
      if (v < 1) throw Error(ErrorCode::InvalidPermutation, "labels are 1-based");
      m.push_back(static_cast<std::size_t>(v - 1));
    }
    return Permutation(std::move(m));
  }

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator[](std::size_t k) const { return map_[k]; }
  std::size_t source(std::size_t k) const { return map_[k]; }
  std::span<const std::size_t> map() const noexcept { return map_; }

  bool is_identity() const {
    for (std::size_t k = 0; k < map_.size(); ++k)
      if (map_[k] != k) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t k = 0; k < map_.size(); ++k) inv[map_[k]] = k;
    return Permutation(std::move(inv));
  }

  std::string label() const {
    std::string s = "(";
    for (std::size_t k = 0; k < map_.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(map_[k] + 1);
    }
    return s + ")";
  }

  /// Incoherent unitary sum_k e^{i phi_k} |e_k><e_{source(k)}|; phases
  /// default to zero.
  ComplexMatrix unitary(std::span<const double> phases = {}) const {
    ComplexMatrix u(map_.size());
    for (std::size_t k = 0; k < map_.size(); ++k) {
      const double phi = phases.empty() ? 0.0 : phases[k];
      u(k, map_[k]) = std::polar(1.0, phi);
    }
    return u;
  }

  /// Real permutation matrix with P(k, source(k)) = 1.
  std::vector<double> matrix() const {
    const std::size_t d = map_.size();
    std::vector<double> p(d * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) p[k * d + map_[k]] = 1.0;
    return p;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.map_ <=> b.map_;
  }

 private:
  std::vector<std::size_t> map_;
};

/// Calls `visit(const Permutation&)` for all d! permutations in
/// lexicographic order.
template <typename Visitor>
void for_each_permutation(std::size_t d, Visitor&& visit) {
  std::vector<std::size_t> m(d);
  std::iota(m.begin(), m.end(), 0);
  do {
    visit(Permutation(m));
  } while (std::next_permutation(m.begin(), m.end()));
}

}  // namespace riskwork
