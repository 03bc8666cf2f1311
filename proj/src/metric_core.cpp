#include "lipext/metric_core.hpp"

#include <string>

namespace lipext {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidNorm: return "InvalidNorm";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NegativeOrZeroOffDiagonal: return "NegativeOrZeroOffDiagonal";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::NonzeroBasepoint: return "NonzeroBasepoint";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::NotAMember: return "NotAMember";
    case ErrorCode::EmptyCut: return "EmptyCut";
    case ErrorCode::BasepointInCut: return "BasepointInCut";
    case ErrorCode::InvalidCut: return "InvalidCut";
    case ErrorCode::NotUnitDirection: return "NotUnitDirection";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotASlackCut: return "NotASlackCut";
    case ErrorCode::IterationOverflow: return "IterationOverflow";
    case ErrorCode::ReductionFailure: return "ReductionFailure";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
  }
  return "Unknown";
}

NormSpec::NormSpec(int dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) {
    throw Error(ErrorCode::InvalidNorm,
                "norm dimension must be at least 1, got " + std::to_string(dim));
  }
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidNorm,
                "exponent p must satisfy 1 < p < inf (strictly convex norm), got " +
                    std::to_string(p));
  }
}

void ToleranceConfig::validate() const {
  for (double t : {tol_feas, tol_tight, tol_weight}) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::InvalidTolerance,
                  "tolerances must be finite and nonnegative");
    }
  }
}

LipschitzPoint::LipschitzPoint(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "a point needs at least one node and one coordinate");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::PreconditionViolation, "point has non-finite entries");
  }
  if (!values_.row(0).isZero(0.0)) {
    throw Error(ErrorCode::NonzeroBasepoint, "y_0 must be the zero vector", {0});
  }
}

void check_dimensions(const LipschitzPoint& y, const FiniteMetricSpace& space,
                      const NormSpec& norm) {
  if (y.n() != space.n() || y.dim() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "point is " + std::to_string(y.n() + 1) + "x" +
                    std::to_string(y.dim()) + ", expected " +
                    std::to_string(space.size()) + "x" +
                    std::to_string(norm.dim()));
  }
}

double pair_norm(const LipschitzPoint& y, const NormSpec& norm, int i, int j) {
  return norm_eval(norm, (y.row(i) - y.row(j)).transpose());
}

FiniteMetricSpace validate_metric(const Matrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 2) {
    throw Error(ErrorCode::NotSquare,
                "distance matrix must be square with side >= 2");
  }
  const int m = static_cast<int>(raw.rows());
  if (!raw.allFinite()) {
    throw Error(ErrorCode::PreconditionViolation,
                "distance matrix has non-finite entries");
  }
  for (int i = 0; i < m; ++i) {
    if (raw(i, i) != 0.0) {
      throw Error(ErrorCode::NonzeroDiagonal,
                  "dist[" + std::to_string(i) + "][" + std::to_string(i) +
                      "] must be 0",
                  {i});
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (raw(i, j) != raw(j, i)) {
        throw Error(ErrorCode::NotSymmetric,
                    "dist[" + std::to_string(i) + "][" + std::to_string(j) +
                        "] != dist[" + std::to_string(j) + "][" +
                        std::to_string(i) + "]",
                    {i, j});
      }
      if (!(raw(i, j) > 0.0)) {
        throw Error(ErrorCode::NegativeOrZeroOffDiagonal,
                    "distinct points need positive distance at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")",
                    {i, j});
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        if (raw(i, j) > raw(i, k) + raw(k, j)) {
          throw Error(ErrorCode::TriangleViolation,
                      "dist[" + std::to_string(i) + "][" + std::to_string(j) +
                          "] exceeds the path through " + std::to_string(k),
                      {i, j, k});
        }
      }
    }
  }
  return FiniteMetricSpace(raw);
}

FiniteMetricSpace metric_closure(const Matrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 2) {
    throw Error(ErrorCode::PreconditionViolation,
                "metric_closure needs a square matrix with side >= 2");
  }
  const int m = static_cast<int>(raw.rows());
  for (int i = 0; i < m; ++i) {
    if (raw(i, i) != 0.0) {
      throw Error(ErrorCode::PreconditionViolation, "nonzero diagonal", {i});
    }
    for (int j = i + 1; j < m; ++j) {
      if (raw(i, j) != raw(j, i) || !(raw(i, j) > 0.0) ||
          !std::isfinite(raw(i, j))) {
        throw Error(ErrorCode::PreconditionViolation,
                    "metric_closure needs a symmetric matrix with finite "
                    "positive off-diagonal entries",
                    {i, j});
      }
    }
  }

  // Floyd-Warshall, repeated until a full sweep changes nothing, so the
  // result satisfies the floating-point triangle test exactly.
  Matrix d = raw;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          const double via = d(i, k) + d(k, j);
          if (via < d(i, j)) {
            d(i, j) = via;
            d(j, i) = via;
            changed = true;
          }
        }
      }
    }
  }
  return validate_metric(d);
}

PairValue lipschitz_constant_with_pair(const LipschitzPoint& y,
                                       const FiniteMetricSpace& space,
                                       const NormSpec& norm) {
  check_dimensions(y, space, norm);
  PairValue best{0.0, 0, 1};
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      const double ratio = pair_norm(y, norm, i, j) / space.dist(i, j);
      if (ratio > best.value) best = {ratio, i, j};
    }
  }
  return best;
}

double lipschitz_constant(const LipschitzPoint& y,
                          const FiniteMetricSpace& space, const NormSpec& norm) {
  return lipschitz_constant_with_pair(y, space, norm).value;
}

namespace {

// Pair with the largest excess ||y_i - y_j|| - L d(i,j) beyond the allowance;
// value <= 0 means every pair is within the ball.
PairValue worst_violation(const LipschitzPoint& y,
                          const FiniteMetricSpace& space, const NormSpec& norm,
                          double lipschitz_bound, const ToleranceConfig& tol) {
  check_dimensions(y, space, norm);
  PairValue worst{-std::numeric_limits<double>::infinity(), 0, 1};
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      const double bound = lipschitz_bound * space.dist(i, j);
      const double excess =
          pair_norm(y, norm, i, j) - bound - feasibility_slack(bound, tol);
      if (excess > worst.value) worst = {excess, i, j};
    }
  }
  return worst;
}

}  // namespace

bool is_member(const LipschitzPoint& y, const FiniteMetricSpace& space,
               const NormSpec& norm, double lipschitz_bound,
               const ToleranceConfig& tol) {
  if (!(lipschitz_bound > 0.0)) {
    throw Error(ErrorCode::PreconditionViolation,
                "Lipschitz bound must be positive");
  }
  return worst_violation(y, space, norm, lipschitz_bound, tol).value <= 0.0;
}

void require_member(const LipschitzPoint& y, const FiniteMetricSpace& space,
                    const NormSpec& norm, const ToleranceConfig& tol) {
  const PairValue worst = worst_violation(y, space, norm, 1.0, tol);
  if (worst.value > 0.0) {
    throw Error(ErrorCode::NotAMember,
                "point leaves the unit ball at pair (" +
                    std::to_string(worst.i) + "," + std::to_string(worst.j) +
                    ")",
                {worst.i, worst.j});
  }
}

LipschitzPoint rescale_into_ball(const LipschitzPoint& y,
                                 const FiniteMetricSpace& space,
                                 const NormSpec& norm) {
  const double lip = lipschitz_constant(y, space, norm);
  // A constant within a few ulps of 1 is already in the ball; this also
  // makes the operation idempotent.
  if (lip <= 1.0 + 4.0 * std::numeric_limits<double>::epsilon()) return y;
  return LipschitzPoint(y.values() / lip);
}

}  // namespace lipext
