#include "lipext/representer.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lipext {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kBisectionWidth = 1e-12;
constexpr double kMergeTolerance = 1e-10;
constexpr double kNullspaceThreshold = 1e-10;

struct Reduction {
  std::vector<std::size_t> kept;
  std::vector<double> weights;
};

void require_tvectors(const WeightedTVectors& in) {
  if (in.ts.size() != in.weights.size() || in.ts.empty()) {
    throw Error(ErrorCode::PreconditionViolation,
                "need one positive weight per t-vector");
  }
  const Eigen::Index len = in.ts.front().size();
  for (std::size_t i = 0; i < in.ts.size(); ++i) {
    if (in.ts[i].size() != len || len < 2) {
      throw Error(ErrorCode::DimensionMismatch, "t-vectors differ in length");
    }
    if (in.ts[i][0] != 0.0) {
      throw Error(ErrorCode::PreconditionViolation, "t[0] must be 0");
    }
    if (!(in.weights[i] > 0.0)) {
      throw Error(ErrorCode::PreconditionViolation, "weights must be positive");
    }
  }
}

Reduction reduce_once(const std::vector<TVector>& ts,
                      const std::vector<double>& weights, double tol_weight) {
  const auto k = static_cast<Eigen::Index>(ts.size());
  const Eigen::Index rows = ts.front().size();  // 1 mass row + n coordinates

  // t[0] is identically zero, so its row is replaced by the mass constraint.
  Matrix system(rows, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    system.col(c) = ts[static_cast<std::size_t>(c)];
    system(0, c) = 1.0;
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  Vector mu = svd.matrixV().col(k - 1);
  const double sigma_max =
      svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  if ((system * mu).norm() > kNullspaceThreshold * std::max(1.0, sigma_max)) {
    throw Error(ErrorCode::ReductionFailure,
                "no affine dependence found among the atoms");
  }

  Eigen::Index largest = 0;
  mu.cwiseAbs().maxCoeff(&largest);
  if (mu[largest] < 0.0) mu = -mu;

  double alpha = std::numeric_limits<double>::infinity();
  Eigen::Index eliminated = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (mu[i] <= 0.0) continue;
    const double ratio = weights[static_cast<std::size_t>(i)] / mu[i];
    if (ratio < alpha) {
      alpha = ratio;
      eliminated = i;
    }
  }

  Reduction out;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (i == eliminated) continue;
    const double w = weights[static_cast<std::size_t>(i)] - alpha * mu[i];
    if (w > tol_weight) {
      out.kept.push_back(static_cast<std::size_t>(i));
      out.weights.push_back(w);
    }
  }
  return out;
}

double scalar_gap(const Vector& a, const Vector& v, double s, double d,
                  const NormSpec& norm) {
  return norm_eval(norm, a + s * v) - d;
}

// Largest s in [0, bracket...] with ||a + sign*s*v|| <= d, feasible side.
double bisect_side(const Vector& a, const Vector& v, double d,
                   const NormSpec& norm, double bracket, double sign) {
  const Vector dir = sign * v;
  double lo = 0.0;
  double hi = std::max(bracket, 1.0);
  for (int guard = 0; scalar_gap(a, dir, hi, d, norm) <= 0.0; ++guard) {
    if (guard > 64) {
      throw Error(ErrorCode::PreconditionViolation,
                  "line search did not leave the ball; is the direction zero?");
    }
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > kBisectionWidth) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (scalar_gap(a, dir, mid, d, norm) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

Direction::Direction(Vector v, const NormSpec& norm) : v_(std::move(v)) {
  if (v_.size() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  }
  if (!v_.allFinite() ||
      std::abs(norm_eval(norm, v_) - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::NotUnitDirection, "direction must have unit norm");
  }
}

Direction Direction::basis(int index, const NormSpec& norm) {
  if (index < 0 || index >= norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "basis index " + std::to_string(index) + " out of range");
  }
  return Direction(Vector::Unit(norm.dim(), index), norm);
}

Direction Direction::normalized(const Vector& v, const NormSpec& norm) {
  if (v.size() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  }
  const double length = norm_eval(norm, v);
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorCode::NotUnitDirection, "cannot normalize this direction");
  }
  return Direction(v / length, norm);
}

LipschitzPoint displace(const LipschitzPoint& base, const TVector& t,
                        const Direction& v) {
  if (t.size() != base.n() + 1 || v.dim() != base.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "t-vector or direction does not match the point");
  }
  if (t[0] != 0.0) {
    throw Error(ErrorCode::PreconditionViolation, "t[0] must be 0");
  }
  return LipschitzPoint(base.values() + t * v.vector().transpose());
}

TVector shift_on(const TVector& t, const NodeSet& cut, double s) {
  TVector out = t;
  for (int node : cut) out[node] += s;
  return out;
}

ScalarInterval pair_interval_closed_form(const Vector& a, const Vector& v,
                                         double d) {
  const double vv = v.squaredNorm();
  const double b = a.dot(v);
  const double na = a.norm();
  const double c = (na - d) * (na + d);
  if (!(c < 0.0) || !(vv > 0.0)) {
    throw Error(ErrorCode::PreconditionViolation,
                "closed-form line search needs ||a|| < d and v != 0");
  }
  // Roots of vv s^2 + 2 b s + c = 0; the product of roots is c / vv, which
  // avoids cancellation in the smaller-magnitude root.
  const double sq = std::sqrt(b * b - vv * c);
  ScalarInterval out;
  if (b >= 0.0) {
    out.lower = (-b - sq) / vv;
    out.upper = c / (vv * out.lower);
  } else {
    out.upper = (-b + sq) / vv;
    out.lower = c / (vv * out.upper);
  }
  return out;
}

ScalarInterval pair_interval_bisection(const Vector& a, const Vector& v,
                                       double d, const NormSpec& norm,
                                       double bracket) {
  if (!(scalar_gap(a, v, 0.0, d, norm) < 0.0)) {
    throw Error(ErrorCode::PreconditionViolation,
                "bisection line search needs ||a|| < d");
  }
  return {-bisect_side(a, v, d, norm, bracket, -1.0),
          bisect_side(a, v, d, norm, bracket, 1.0)};
}

FeasibleInterval feasible_interval(const LipschitzPoint& y, const NodeSet& cut,
                                   const Direction& v,
                                   const FiniteMetricSpace& space,
                                   const NormSpec& norm,
                                   const ToleranceConfig& tol) {
  tol.validate();
  require_member(y, space, norm, tol);
  // evaluate_cut validates S; its slack is not needed here.
  (void)evaluate_cut(y, cut, space, norm);
  if (v.dim() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  }

  std::vector<char> in(static_cast<std::size_t>(space.size()), 0);
  for (int node : cut) in[static_cast<std::size_t>(node)] = 1;

  FeasibleInterval out;
  out.lower = -std::numeric_limits<double>::infinity();
  out.upper = std::numeric_limits<double>::infinity();
  const double bracket = 2.0 * space.max_dist();
  for (int i : cut) {
    for (int j = 0; j < space.size(); ++j) {
      if (in[static_cast<std::size_t>(j)]) continue;
      if (is_tight_pair(y, space, norm, tol, i, j)) {
        throw Error(ErrorCode::NotASlackCut,
                    "cross pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ") is already tight",
                    {i, j});
      }
      const Vector a = (y.row(i) - y.row(j)).transpose();
      const double d = space.dist(i, j);
      const ScalarInterval s =
          norm.euclidean()
              ? pair_interval_closed_form(a, v.vector(), d)
              : pair_interval_bisection(a, v.vector(), d, norm, bracket);
      if (s.upper < out.upper) {
        out.upper = s.upper;
        out.upper_binding = {i, j};
      }
      if (s.lower > out.lower) {
        out.lower = s.lower;
        out.lower_binding = {i, j};
      }
    }
  }
  return out;
}

Atom push_to_extreme(const LipschitzPoint& y, const Direction& v,
                     const FiniteMetricSpace& space, const NormSpec& norm,
                     const ToleranceConfig& tol, PushTrace* trace) {
  require_member(y, space, norm, tol);
  TVector t = TVector::Zero(space.size());
  LipschitzPoint point = y;
  for (int step = 0;; ++step) {
    if (trace) trace->visited.push_back(t);
    ExtremalityCertificate cert = certify_extremality(point, space, norm, tol);
    if (is_extreme(cert)) return Atom{std::move(t), std::move(point), std::move(cert)};
    const NodeSet& cut = std::get<NotExtreme>(cert).cut.nodes;
    if (trace) trace->unreachable_sizes.push_back(static_cast<int>(cut.size()));
    if (step >= space.n()) {
      throw Error(ErrorCode::IterationOverflow,
                  "push_to_extreme exceeded n steps; tolerances are inconsistent");
    }
    const FeasibleInterval range = feasible_interval(point, cut, v, space, norm, tol);
    t = shift_on(t, cut, range.upper);
    point = displace(y, t, v);
  }
}

WeightedTVectors caratheodory_step(const WeightedTVectors& in,
                                   double tol_weight) {
  require_tvectors(in);
  const auto n = static_cast<std::size_t>(in.ts.front().size() - 1);
  if (in.ts.size() < n + 2) {
    throw Error(ErrorCode::PreconditionViolation,
                "Caratheodory reduction needs at least n+2 t-vectors");
  }
  const Reduction r = reduce_once(in.ts, in.weights, tol_weight);
  WeightedTVectors out;
  for (std::size_t idx = 0; idx < r.kept.size(); ++idx) {
    out.ts.push_back(in.ts[r.kept[idx]]);
    out.weights.push_back(r.weights[idx]);
  }
  return out;
}

WeightedTVectors caratheodory_reduce(const WeightedTVectors& in,
                                     double tol_weight) {
  WeightedTVectors current = caratheodory_step(in, tol_weight);
  const auto limit = static_cast<std::size_t>(in.ts.front().size());
  while (current.ts.size() > limit) current = caratheodory_step(current, tol_weight);
  return current;
}

Decomposition decompose(const LipschitzPoint& y, const Direction& v,
                        const FiniteMetricSpace& space, const NormSpec& norm,
                        const DecomposeOptions& options) {
  const ToleranceConfig& tol = options.tol;
  tol.validate();
  require_member(y, space, norm, tol);
  const auto max_atoms = static_cast<std::size_t>(space.n() + 1);

  struct Pending {
    TVector t;
    double weight;
  };
  std::vector<Pending> stack{{TVector::Zero(space.size()), 1.0}};
  std::vector<Atom> atoms;
  std::vector<double> weights;

  while (!stack.empty()) {
    Pending node = std::move(stack.back());
    stack.pop_back();
    if (options.on_visit) options.on_visit(node.t);
    LipschitzPoint point = displace(y, node.t, v);
    ExtremalityCertificate cert = certify_extremality(point, space, norm, tol);

    if (const auto* slack = std::get_if<NotExtreme>(&cert)) {
      const NodeSet& cut = slack->cut.nodes;
      const FeasibleInterval range =
          feasible_interval(point, cut, v, space, norm, tol);
      const double a = range.lower;
      const double b = range.upper;
      // t = [(-a)(t + b 1_S) + b (t + a 1_S)] / (b - a)
      stack.push_back({shift_on(node.t, cut, a), node.weight * b / (b - a)});
      stack.push_back({shift_on(node.t, cut, b), node.weight * (-a) / (b - a)});
      continue;
    }

    auto same = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& atom) {
      return (atom.t - node.t).cwiseAbs().maxCoeff() <= kMergeTolerance;
    });
    if (same != atoms.end()) {
      weights[static_cast<std::size_t>(same - atoms.begin())] += node.weight;
      continue;
    }
    atoms.push_back(Atom{std::move(node.t), std::move(point), std::move(cert)});
    weights.push_back(node.weight);

    while (atoms.size() > max_atoms) {
      std::vector<TVector> ts;
      ts.reserve(atoms.size());
      for (const Atom& atom : atoms) ts.push_back(atom.t);
      const Reduction r = reduce_once(ts, weights, tol.tol_weight);
      std::vector<Atom> kept_atoms;
      for (std::size_t idx : r.kept) kept_atoms.push_back(std::move(atoms[idx]));
      atoms = std::move(kept_atoms);
      weights = r.weights;
    }
  }

  Decomposition dec;
  dec.direction = v.vector();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    dec.atoms.push_back({weights[i], std::move(atoms[i])});
  }
  return dec;
}

bool VerificationReport::passed() const {
  if (!(count_ok && weights_nonnegative && weight_sum_ok && reconstruction_ok &&
        direction_ok)) {
    return false;
  }
  return std::all_of(atoms.begin(), atoms.end(),
                     [](const AtomReport& r) { return r.passed(); });
}

VerificationReport verify_decomposition(const LipschitzPoint& y,
                                        const Decomposition& dec,
                                        const FiniteMetricSpace& space,
                                        const NormSpec& norm,
                                        const ToleranceConfig& tol) {
  check_dimensions(y, space, norm);
  VerificationReport report;
  report.k = dec.k();
  report.count_ok = report.k >= 1 && report.k <= space.n() + 1;

  report.direction_ok =
      dec.direction.size() == norm.dim() && dec.direction.allFinite() &&
      std::abs(norm_eval(norm, dec.direction) - 1.0) <= kUnitTolerance;

  double weight_sum = 0.0;
  report.weights_nonnegative = true;
  for (const WeightedAtom& wa : dec.atoms) {
    if (!(wa.weight >= 0.0) || !std::isfinite(wa.weight)) {
      report.weights_nonnegative = false;
    }
    weight_sum += wa.weight;
  }
  report.weight_sum_deviation = std::abs(weight_sum - 1.0);
  report.weight_sum_ok = report.weight_sum_deviation <= kWeightSumTolerance;

  Matrix combination = Matrix::Zero(y.values().rows(), y.values().cols());
  bool shapes_ok = true;
  for (const WeightedAtom& wa : dec.atoms) {
    const Atom& atom = wa.atom;
    AtomReport entry;
    entry.shape_ok = atom.t.size() == space.size() &&
                     atom.point.n() == space.n() &&
                     atom.point.dim() == norm.dim() && atom.t.allFinite();
    if (!entry.shape_ok) {
      shapes_ok = false;
      report.atoms.push_back(entry);
      continue;
    }
    combination += wa.weight * atom.point.values();

    entry.member = is_member(atom.point, space, norm, 1.0, tol);
    if (entry.member) {
      entry.extreme = is_extreme(certify_extremality(atom.point, space, norm, tol));
      if (space.n() <= kMaxOracleVerifyNodes) {
        entry.oracle_extreme =
            !cut_oracle_bruteforce(atom.point, space, norm, tol).has_value();
      }
    }

    entry.t_bound_ok = true;
    for (int i = 1; i <= space.n(); ++i) {
      if (std::abs(atom.t[i]) > 2.0 * space.dist(i, 0) + tol.tol_feas) {
        entry.t_bound_ok = false;
      }
    }

    entry.consistent = false;
    if (report.direction_ok && atom.t[0] == 0.0) {
      const Matrix expected =
          y.values() + atom.t * dec.direction.transpose();
      entry.consistent = (expected - atom.point.values()).cwiseAbs().maxCoeff() <=
                         kReconstructionTolerance;
    }
    report.atoms.push_back(entry);
  }

  report.reconstruction_error =
      shapes_ok && !dec.atoms.empty()
          ? (combination - y.values()).cwiseAbs().maxCoeff()
          : std::numeric_limits<double>::infinity();
  report.reconstruction_ok =
      report.reconstruction_error <= kReconstructionTolerance;
  return report;
}

}  // namespace lipext
