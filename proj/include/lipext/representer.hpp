#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lipext/extremality.hpp"

namespace lipext {

/// Unit vector (in the target norm) along which every node is displaced.
class Direction {
 public:
  /// Throws NotUnitDirection unless norm_eval(v) == 1 within 1e-12.
  Direction(Vector v, const NormSpec& norm);

  /// e_index.
  static Direction basis(int index, const NormSpec& norm);
  /// v / ||v||; throws NotUnitDirection for the zero vector.
  static Direction normalized(const Vector& v, const NormSpec& norm);

  const Vector& vector() const noexcept { return v_; }
  int dim() const noexcept { return static_cast<int>(v_.size()); }

 private:
  Vector v_;
};

/// Per-node displacement scalars t, t[0] = 0. The point y + t*v moves node i
/// by t[i] * v.
using TVector = Vector;

/// y + t*v, row by row.
LipschitzPoint displace(const LipschitzPoint& base, const TVector& t,
                        const Direction& v);

/// t + s * 1_S.
TVector shift_on(const TVector& t, const NodeSet& cut, double s);

struct Atom {
  TVector t;
  LipschitzPoint point;
  // Present on atoms produced by push_to_extreme / decompose, absent on atoms
  // read back from documents. verify_decomposition always re-certifies.
  std::optional<ExtremalityCertificate> certificate;
};

struct WeightedAtom {
  double weight = 0.0;
  Atom atom;
};

struct Decomposition {
  Vector direction;
  std::vector<WeightedAtom> atoms;

  int k() const noexcept { return static_cast<int>(atoms.size()); }
};

/// Admissible s-interval of the map s -> ||a + s v|| <= d, i.e. the roots of
/// the convex function s -> ||a + s v|| - d around s = 0. Requires ||a|| < d.
struct ScalarInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Closed-form roots of ||a + s v||_2^2 = d^2.
ScalarInterval pair_interval_closed_form(const Vector& a, const Vector& v,
                                         double d);

/// Bisection on each side to absolute width 1e-12; the returned endpoints are
/// on the feasible side. Valid for any l^p norm.
ScalarInterval pair_interval_bisection(const Vector& a, const Vector& v,
                                       double d, const NormSpec& norm,
                                       double bracket);

struct FeasibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::pair<int, int> lower_binding{0, 0};
  std::pair<int, int> upper_binding{0, 0};
};

/// Maximal [lower, upper] (lower < 0 < upper) such that moving exactly the
/// nodes of S by s*v stays in the unit ball. Uses the closed form for p = 2,
/// bisection otherwise. Throws NotASlackCut if a cross pair is already tight.
FeasibleInterval feasible_interval(const LipschitzPoint& y, const NodeSet& cut,
                                   const Direction& v,
                                   const FiniteMetricSpace& space,
                                   const NormSpec& norm,
                                   const ToleranceConfig& tol = {});

/// Per-step record of push_to_extreme, for inspection in tests.
struct PushTrace {
  std::vector<int> unreachable_sizes;
  std::vector<TVector> visited;
};

/// Moves the unreachable set along v to its upper endpoint until the point
/// certifies Extreme. At most n steps.
Atom push_to_extreme(const LipschitzPoint& y, const Direction& v,
                     const FiniteMetricSpace& space, const NormSpec& norm,
                     const ToleranceConfig& tol = {}, PushTrace* trace = nullptr);

struct DecomposeOptions {
  ToleranceConfig tol;
  // Called with every t the recursion certifies, leaves and inner nodes.
  std::function<void(const TVector&)> on_visit;
};

/// Convex combination of at most n+1 certified extreme points equal to y.
/// Binary splits along cut indicators, with Caratheodory reduction whenever
/// more than n+1 atoms are completed.
Decomposition decompose(const LipschitzPoint& y, const Direction& v,
                        const FiniteMetricSpace& space, const NormSpec& norm,
                        const DecomposeOptions& options = {});

struct WeightedTVectors {
  std::vector<TVector> ts;
  std::vector<double> weights;
};

/// One elimination step: an affine dependence mu (sum mu = 0,
/// sum mu_i t^i = 0) from the SVD nullspace, sign fixed so that the entry of
/// largest magnitude is positive, then w -= alpha * mu with
/// alpha = min_{mu_i > 0} w_i / mu_i. Needs at least n+2 vectors.
WeightedTVectors caratheodory_step(const WeightedTVectors& in,
                                   double tol_weight = 1e-12);

/// Repeats caratheodory_step until at most n+1 vectors remain.
WeightedTVectors caratheodory_reduce(const WeightedTVectors& in,
                                     double tol_weight = 1e-12);

struct AtomReport {
  bool member = false;
  bool extreme = false;
  std::optional<bool> oracle_extreme;  // run only when n <= 10
  bool t_bound_ok = false;
  bool consistent = false;  // point == y + t*v within 1e-8, t[0] == 0
  bool shape_ok = false;

  bool passed() const {
    return shape_ok && member && extreme && oracle_extreme.value_or(true) &&
           t_bound_ok && consistent;
  }
};

struct VerificationReport {
  int k = 0;
  bool count_ok = false;
  double weight_sum_deviation = 0.0;
  bool weights_nonnegative = false;
  bool weight_sum_ok = false;
  double reconstruction_error = 0.0;
  bool reconstruction_ok = false;
  bool direction_ok = false;
  std::vector<AtomReport> atoms;

  bool passed() const;
};

inline constexpr double kWeightSumTolerance = 1e-9;
inline constexpr double kReconstructionTolerance = 1e-8;
inline constexpr int kMaxOracleVerifyNodes = 10;

/// Independent check of a decomposition of y; never throws on bad content,
/// only on inconsistent dimensions between y, space and norm.
VerificationReport verify_decomposition(const LipschitzPoint& y,
                                        const Decomposition& dec,
                                        const FiniteMetricSpace& space,
                                        const NormSpec& norm,
                                        const ToleranceConfig& tol = {});

}  // namespace lipext
