// Copyright 2026 The rltcut Authors
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

#ifndef RLT_EXPR_HPP_
#define RLT_EXPR_HPP_

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <vector>

namespace rlt {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double v) { return std::isfinite(v); }

/// Sparse affine expression: sum of coef*var plus a constant term.
/// Coefficients are kept in variable-id order so that iteration, printing
/// and accumulation are deterministic.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  /// Adds coef*var, erasing the entry if it cancels to exactly zero.
  void add_term(int var, double coef) {
    if (coef == 0.0) return;
    auto [it, inserted] = terms_.emplace(var, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  void add_constant(double c) { constant_ += c; }

  /// Adds scale*other (terms and constant).
  void add_scaled(const AffineExpr& other, double scale) {
    if (scale == 0.0) return;
    for (const auto& [var, coef] : other.terms_) add_term(var, scale * coef);
    constant_ += scale * other.constant_;
  }

  double coef(int var) const {
    auto it = terms_.find(var);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

  const std::map<int, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  double value_at(const std::vector<double>& x) const {
    double v = constant_;
    for (const auto& [var, coef] : terms_) v += coef * x[var];
    return v;
  }

  double coef_norm2() const {
    double s = 0.0;
    for (const auto& [var, coef] : terms_) s += coef * coef;
    return std::sqrt(s);
  }

  /// Removes entries with |coef| <= tol (cancellation dust).
  void prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= tol)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  bool operator==(const AffineExpr& other) const {
    return constant_ == other.constant_ && terms_ == other.terms_;
  }

 private:
  std::map<int, double> terms_;
  double constant_ = 0.0;
};

}  // namespace rlt

#endif  // RLT_EXPR_HPP_
