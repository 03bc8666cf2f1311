#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipext/errors.hpp"

namespace lipext {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Finite-dimensional l^p target space. Only 1 < p < inf is admissible:
/// the extreme-point characterization needs a strictly convex norm.
class NormSpec {
 public:
  NormSpec(int dim, double p);

  int dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  bool euclidean() const noexcept { return p_ == 2.0; }

 private:
  int dim_;
  double p_;
};

/// (sum_i |x_i|^p)^(1/p), evaluated with max-abs scaling so that large or
/// tiny entries neither overflow nor underflow.
template <typename Derived>
typename Derived::Scalar norm_eval(const NormSpec& norm,
                                   const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(x.size()) +
                    " does not match norm dimension " +
                    std::to_string(norm.dim()));
  }
  if (norm.euclidean()) return x.norm();
  const Scalar scale = x.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return Scalar(0);
  if (!std::isfinite(scale)) return scale;
  const Scalar p = static_cast<Scalar>(norm.p());
  const Scalar sum = (x.cwiseAbs() / scale).array().pow(p).sum();
  return scale * std::pow(sum, Scalar(1) / p);
}

struct ToleranceConfig {
  double tol_feas = 1e-9;
  double tol_tight = 1e-9;
  double tol_weight = 1e-12;

  /// Throws InvalidTolerance if any field is negative or not finite.
  void validate() const;
};

/// n+1 distinct points x_0..x_n given by their distance matrix; x_0 is the
/// basepoint. Only constructible through validate_metric / metric_closure.
class FiniteMetricSpace {
 public:
  int n() const noexcept { return static_cast<int>(dist_.rows()) - 1; }
  int size() const noexcept { return static_cast<int>(dist_.rows()); }
  double dist(int i, int j) const { return dist_(i, j); }
  const Matrix& matrix() const noexcept { return dist_; }
  double max_dist() const { return dist_.maxCoeff(); }

 private:
  explicit FiniteMetricSpace(Matrix dist) : dist_(std::move(dist)) {}
  friend FiniteMetricSpace validate_metric(const Matrix& raw);

  Matrix dist_;
};

/// y = (y_0, ..., y_n), one row per node, y_0 = 0. Membership in the unit
/// ball is a separate predicate, so points outside it are representable.
class LipschitzPoint {
 public:
  /// Throws NonzeroBasepoint if row 0 is not identically zero.
  explicit LipschitzPoint(Matrix values);

  static LipschitzPoint zero(int n, int dim) {
    return LipschitzPoint(Matrix::Zero(n + 1, dim));
  }

  int n() const noexcept { return static_cast<int>(values_.rows()) - 1; }
  int dim() const noexcept { return static_cast<int>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }
  auto row(int i) const { return values_.row(i); }

  friend bool operator==(const LipschitzPoint& a, const LipschitzPoint& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Throws DimensionMismatch unless y has n+1 rows of length norm.dim().
void check_dimensions(const LipschitzPoint& y, const FiniteMetricSpace& space,
                      const NormSpec& norm);

/// ||y_i - y_j|| in the given norm.
double pair_norm(const LipschitzPoint& y, const NormSpec& norm, int i, int j);

/// Exact check of the metric axioms; the first violation found is thrown
/// with its indices (NotSymmetric(i,j), TriangleViolation(i,j,k) where
/// dist(i,j) > dist(i,k) + dist(k,j), ...).
FiniteMetricSpace validate_metric(const Matrix& raw);

/// Shortest-path closure of a symmetric matrix with zero diagonal and
/// positive off-diagonal, relaxed until no entry changes.
FiniteMetricSpace metric_closure(const Matrix& raw);

struct PairValue {
  double value = 0.0;
  int i = 0;
  int j = 0;
};

/// max_{i<j} ||y_i - y_j|| / d(x_i, x_j), with the lexicographically first
/// maximizing pair.
PairValue lipschitz_constant_with_pair(const LipschitzPoint& y,
                                       const FiniteMetricSpace& space,
                                       const NormSpec& norm);

double lipschitz_constant(const LipschitzPoint& y,
                          const FiniteMetricSpace& space, const NormSpec& norm);

/// Allowed excess over L*d for membership: tol_feas * max(1, L*d).
inline double feasibility_slack(double bound, const ToleranceConfig& tol) {
  return tol.tol_feas * std::max(1.0, bound);
}

bool is_member(const LipschitzPoint& y, const FiniteMetricSpace& space,
               const NormSpec& norm, double lipschitz_bound = 1.0,
               const ToleranceConfig& tol = {});

/// Throws NotAMember (with the worst pair) if y is outside the unit ball.
void require_member(const LipschitzPoint& y, const FiniteMetricSpace& space,
                    const NormSpec& norm, const ToleranceConfig& tol);

/// y / max(1, Lip(y)).
LipschitzPoint rescale_into_ball(const LipschitzPoint& y,
                                 const FiniteMetricSpace& space,
                                 const NormSpec& norm);

}  // namespace lipext
