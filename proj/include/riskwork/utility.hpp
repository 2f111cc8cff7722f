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

// Utility functions of extracted work: exponential (constant absolute risk
// aversion r), linear, and tabulated strictly increasing curves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/work_stats.hpp"

namespace riskwork {

/// Below this |r| the exponential utility is evaluated as the linear one.
inline constexpr double kRiskNeutralBand = 1e-9;

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  explicit MonotoneCubic(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    const std::size_t n = knots_.size();
    if (n < 2) throw Error(ErrorCode::InvalidUtility, "tabulated utility needs >= 2 knots");
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(knots_[k].first) || !std::isfinite(knots_[k].second))
        throw Error(ErrorCode::InvalidUtility, "non-finite knot");
      if (k > 0 && !(knots_[k].first > knots_[k - 1].first && knots_[k].second > knots_[k - 1].second))
        throw Error(ErrorCode::InvalidUtility,
                    "knots must increase strictly in both w and u (knot " + std::to_string(k + 1) + ")");
    }
    std::vector<double> secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
      secant[k] = (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
    slopes_.assign(n, 0.0);
    slopes_[0] = secant[0];
    slopes_[n - 1] = secant[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) slopes_[k] = 0.5 * (secant[k - 1] + secant[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double a = slopes_[k] / secant[k];
      const double b = slopes_[k + 1] / secant[k];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double t = 3.0 / std::sqrt(s);
        slopes_[k] = t * a * secant[k];
        slopes_[k + 1] = t * b * secant[k];
      }
    }
  }

  double min_w() const { return knots_.front().first; }
  double max_w() const { return knots_.back().first; }
  double min_u() const { return knots_.front().second; }
  double max_u() const { return knots_.back().second; }
  std::span<const std::pair<double, double>> knots() const noexcept { return knots_; }

  bool contains(double w) const { return w >= min_w() && w <= max_w(); }

  double operator()(double w) const {
    if (!contains(w)) {
      throw Error(ErrorCode::OutOfTabulatedRange,
                  "w = " + std::to_string(w) + " outside [" + std::to_string(min_w()) + ", " +
                      std::to_string(max_w()) + "]");
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), w,
                               [](double x, const auto& knot) { return x < knot.first; });
    std::size_t k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    k = std::clamp<std::size_t>(k, 1, knots_.size() - 1) - 1;
    const auto [x0, y0] = knots_[k];
    const auto [x1, y1] = knots_[k + 1];
    const double h = x1 - x0;
    const double t = (w - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * slopes_[k] +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * slopes_[k + 1];
  }

 private:
  std::vector<std::pair<double, double>> knots_;
  std::vector<double> slopes_;
};

/// u(w) = (1 - e^{-r w}) / r, with u(w) = w at r = 0.
struct ExponentialUtility {
  double r = 0.0;
};

struct LinearUtility {};

struct TabulatedUtility {
  MonotoneCubic curve;
};

class UtilitySpec {
 public:
  using Variant = std::variant<ExponentialUtility, LinearUtility, TabulatedUtility>;

  UtilitySpec() : variant_(LinearUtility{}) {}
  UtilitySpec(ExponentialUtility e) : variant_(e) {  // NOLINT(implicit)
    if (!std::isfinite(e.r)) throw Error(ErrorCode::InvalidUtility, "risk parameter must be finite");
  }
  UtilitySpec(LinearUtility l) : variant_(l) {}  // NOLINT(implicit)
  UtilitySpec(TabulatedUtility t) : variant_(std::move(t)) {}  // NOLINT(implicit)

  static UtilitySpec exponential(double r) { return UtilitySpec(ExponentialUtility{r}); }
  static UtilitySpec linear() { return UtilitySpec(LinearUtility{}); }
  static UtilitySpec tabulated(std::vector<std::pair<double, double>> knots) {
    return UtilitySpec(TabulatedUtility{MonotoneCubic(std::move(knots))});
  }

  const Variant& variant() const noexcept { return variant_; }

  /// Risk parameter for exponential specs, 0 for linear.
  std::optional<double> risk_parameter() const {
    if (auto* e = std::get_if<ExponentialUtility>(&variant_)) return e->r;
    if (std::holds_alternative<LinearUtility>(variant_)) return 0.0;
    return std::nullopt;
  }

  double operator()(double w) const;

 private:
  Variant variant_;
};

/// (1 - e^{-r w}) / r evaluated without cancellation.
inline double exponential_utility(double r, double w) {
  if (std::abs(r) < kRiskNeutralBand) return w;
  return -std::expm1(-r * w) / r;
}

inline double utility_value(const UtilitySpec& u, double w) {
  return std::visit(
      [w](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ExponentialUtility>) {
          return exponential_utility(spec.r, w);
        } else if constexpr (std::is_same_v<T, LinearUtility>) {
          return w;
        } else {
          return spec.curve(w);
        }
      },
      u.variant());
}

inline double UtilitySpec::operator()(double w) const { return utility_value(*this, w); }

/// <u(w)> = sum of weight * u(w). Quasiprobabilities may leave the convex
/// hull of the utility values.
inline double expected_utility(const WorkDistribution& dist, const UtilitySpec& u) {
  double s = 0.0;
  for (const auto& a : dist.atoms()) s += a.weight * utility_value(u, a.work);
  return s;
}

/// Solves u(w_CE) = value.
inline double certainty_equivalent(double value, const UtilitySpec& u) {
  if (!std::isfinite(value)) throw Error(ErrorCode::OutOfRange, "non-finite expected utility");
  if (auto* e = std::get_if<ExponentialUtility>(&u.variant())) {
    const double r = e->r;
    if (std::abs(r) < kRiskNeutralBand) return value;
    const double arg = -r * value;  // 1 - r*value must stay positive
    if (!(arg > -1.0)) {
      throw Error(ErrorCode::OutOfRange,
                  "value " + std::to_string(value) + " outside the range of u for r = " +
                      std::to_string(r));
    }
    return -std::log1p(arg) / r;
  }
  if (std::holds_alternative<LinearUtility>(u.variant())) return value;
  const auto& curve = std::get<TabulatedUtility>(u.variant()).curve;
  if (value < curve.min_u() || value > curve.max_u()) {
    throw Error(ErrorCode::OutOfRange, "value " + std::to_string(value) +
                                           " outside tabulated utility range");
  }
  double lo = curve.min_w(), hi = curve.max_w();
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (curve(mid) < value ? lo : hi) = mid;
  }
  return std::abs(curve(lo) - value) <= std::abs(curve(hi) - value) ? lo : hi;
}

/// Arrow-Pratt coefficient -u''(w)/u'(w). Tabulated curves use centered
/// differences with step 1e-4 times the knot range.
inline double arrow_pratt(const UtilitySpec& u, double w) {
  if (auto* e = std::get_if<ExponentialUtility>(&u.variant())) return e->r;
  if (std::holds_alternative<LinearUtility>(u.variant())) return 0.0;
  const auto& curve = std::get<TabulatedUtility>(u.variant()).curve;
  const double h = 1e-4 * (curve.max_w() - curve.min_w());
  if (w - h < curve.min_w() || w + h > curve.max_w()) {
    throw Error(ErrorCode::NonDifferentiable,
                "w = " + std::to_string(w) + " too close to the end of the table");
  }
  const double up = curve(w + h), mid = curve(w), down = curve(w - h);
  const double first = (up - down) / (2 * h);
  const double second = (up - 2 * mid + down) / (h * h);
  if (!(first > 0.0)) throw Error(ErrorCode::NonDifferentiable, "u'(w) vanishes");
  return -second / first;
}

enum class Preference { First, Second, Indifferent };

constexpr std::string_view to_string(Preference p) noexcept {
  switch (p) {
    case Preference::First: return "First";
    case Preference::Second: return "Second";
    case Preference::Indifferent: return "Indifferent";
  }
  return "Indifferent";
}

/// Orders two expected utilities with a symmetric indifference band.
inline Preference compare_values(double first, double second, double band) {
  if (first > second + band) return Preference::First;
  if (second > first + band) return Preference::Second;
  return Preference::Indifferent;
}

inline Preference prefer(const WorkDistribution& first, const WorkDistribution& second,
                         const UtilitySpec& u, const Tolerances& tol = {}) {
  return compare_values(expected_utility(first, u), expected_utility(second, u), tol.indifference);
}

}  // namespace riskwork
