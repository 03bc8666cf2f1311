#include <gtest/gtest.h>

#include <random>

#include "lipext/instance_gen.hpp"
#include "lipext/representer.hpp"
#include "test_support.hpp"

namespace {

using namespace lipext;
using lipext::testing::matrix;
using lipext::testing::point;
using lipext::testing::unit_simplex;

const NormSpec kL2(2, 2.0);
const Direction kE1 = Direction::basis(0, kL2);

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an lipext::Error";
  return ErrorCode::PreconditionViolation;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(DirectionTest, UnitNormRequired) {
  EXPECT_NO_THROW(Direction(vec({0, 1}), kL2));
  EXPECT_EQ(code_of([] { Direction(vec({1, 1}), kL2); }), ErrorCode::NotUnitDirection);
  EXPECT_EQ(code_of([] { Direction::normalized(vec({0, 0}), kL2); }),
            ErrorCode::NotUnitDirection);
  EXPECT_EQ(code_of([] { Direction::basis(2, kL2); }), ErrorCode::DimensionMismatch);
  const NormSpec l3(2, 3.0);
  EXPECT_NEAR(norm_eval(l3, Direction::normalized(vec({1, 1}), l3).vector()), 1.0, 1e-15);
}

TEST(PairIntervalTest, ClosedFormExamples) {
  // (0.5 + s)^2 = 1 -> s = -1.5, 0.5.
  const auto s = pair_interval_closed_form(vec({0.5, 0}), vec({1, 0}), 1.0);
  EXPECT_NEAR(s.lower, -1.5, 1e-15);
  EXPECT_NEAR(s.upper, 0.5, 1e-15);
  // s^2 + 0.25 = 1.
  const auto t = pair_interval_closed_form(vec({0, 0.5}), vec({1, 0}), 1.0);
  EXPECT_NEAR(t.lower, -std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(t.upper, std::sqrt(0.75), 1e-15);
}

TEST(PairIntervalTest, BisectionMatchesOnCollinearCase) {
  // Along the direction every l^p norm is |0.5 + s|.
  for (double p : {1.5, 2.0, 3.0}) {
    const auto s = pair_interval_bisection(vec({0.5, 0}), vec({1, 0}), 1.0,
                                           NormSpec(2, p), 2.0);
    EXPECT_NEAR(s.lower, -1.5, 1e-11);
    EXPECT_NEAR(s.upper, 0.5, 1e-11);
  }
}

TEST(PairIntervalTest, ClosedFormAgreesWithBisection) {
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Vector a(3), v(3);
    for (int c = 0; c < 3; ++c) {
      a[c] = unit(engine);
      v[c] = unit(engine);
    }
    v.normalize();
    const double d = a.norm() * (1.0 + 2.0 * std::abs(unit(engine))) + 1e-3;
    const auto closed = pair_interval_closed_form(a, v, d);
    const auto bisect = pair_interval_bisection(a, v, d, NormSpec(3, 2.0), 2.0 * d);
    EXPECT_NEAR(closed.lower, bisect.lower, 1e-8);
    EXPECT_NEAR(closed.upper, bisect.upper, 1e-8);
  }
}

TEST(FeasibleIntervalTest, Examples) {
  const auto one = unit_simplex(1);
  const auto zero = feasible_interval(LipschitzPoint::zero(1, 2), {1}, kE1, one, kL2);
  EXPECT_NEAR(zero.lower, -1.0, 1e-15);
  EXPECT_NEAR(zero.upper, 1.0, 1e-15);

  const auto off = feasible_interval(point({{0, 0}, {0, 0.5}}), {1}, kE1, one, kL2);
  EXPECT_NEAR(off.lower, -std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(off.upper, std::sqrt(0.75), 1e-15);

  const auto shifted = feasible_interval(point({{0, 0}, {0.5, 0}}), {1}, kE1, one, kL2);
  EXPECT_NEAR(shifted.lower, -1.5, 1e-15);
  EXPECT_NEAR(shifted.upper, 0.5, 1e-15);
}

TEST(FeasibleIntervalTest, BindingPairs) {
  // Cross pairs of S = {1,2}: (1,0) allows [-1.4, 0.6], (2,0) allows [-1, 1].
  const auto r = feasible_interval(point({{0, 0}, {0.4, 0}, {0, 0}}), {1, 2}, kE1,
                                   unit_simplex(2), kL2);
  EXPECT_NEAR(r.upper, 0.6, 1e-15);
  EXPECT_NEAR(r.lower, -1.0, 1e-15);
  EXPECT_EQ(r.upper_binding, (std::pair<int, int>{1, 0}));
  EXPECT_EQ(r.lower_binding, (std::pair<int, int>{2, 0}));
}

TEST(FeasibleIntervalTest, RejectsTightCrossPair) {
  try {
    feasible_interval(point({{0, 0}, {1, 0}}), {1}, kE1, unit_simplex(1), kL2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotASlackCut);
    EXPECT_EQ(e.indices(), (std::vector<int>{1, 0}));
  }
}

TEST(FeasibleIntervalTest, EndpointsAreSharp) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.n = 1 + static_cast<int>(seed % 5);
    cfg.dim = 1 + static_cast<int>(seed % 3);
    cfg.p = std::array{1.5, 2.0, 3.0}[seed % 3];
    const NormSpec norm = cfg.norm();
    const auto space = gen_random_metric(cfg);
    const auto y = gen_member(cfg, space, 0.5);
    const auto cert = certify_extremality(y, space, norm);
    ASSERT_FALSE(is_extreme(cert));
    const NodeSet& cut = std::get<NotExtreme>(cert).cut.nodes;
    const Direction v = gen_direction(cfg);
    const auto r = feasible_interval(y, cut, v, space, norm);
    ASSERT_LT(r.lower, 0.0);
    ASSERT_GT(r.upper, 0.0);
    for (auto [s, binding] : {std::pair{r.upper, r.upper_binding},
                              std::pair{r.lower, r.lower_binding}}) {
      const auto at = displace(y, shift_on(TVector::Zero(space.size()), cut, s), v);
      EXPECT_TRUE(is_member(at, space, norm)) << "seed " << seed;
      EXPECT_TRUE(is_tight_pair(at, space, norm, {}, binding.first, binding.second));
      const double beyond = s + (s > 0 ? 1e-6 : -1e-6);
      const auto past = displace(y, shift_on(TVector::Zero(space.size()), cut, beyond), v);
      EXPECT_GT(pair_norm(past, norm, binding.first, binding.second),
                space.dist(binding.first, binding.second))
          << "seed " << seed;
    }
  }
}

TEST(PushToExtremeTest, ExtremeIsFixedPoint) {
  const auto y = point({{0, 0}, {1, 0}});
  const Atom atom = push_to_extreme(y, kE1, unit_simplex(1), kL2);
  EXPECT_EQ(atom.t, TVector::Zero(2));
  EXPECT_EQ(atom.point, y);
}

TEST(PushToExtremeTest, ZeroMapOneStep) {
  PushTrace trace;
  const Atom atom =
      push_to_extreme(LipschitzPoint::zero(1, 2), kE1, unit_simplex(1), kL2, {}, &trace);
  EXPECT_NEAR(atom.t[1], 1.0, 1e-15);
  EXPECT_NEAR((atom.point.values() - matrix({{0, 0}, {1, 0}})).norm(), 0.0, 1e-15);
  EXPECT_EQ(trace.unreachable_sizes, std::vector<int>{1});
}

TEST(PushToExtremeTest, TwoStepTrace) {
  // Step 1: S = {1,2}, binding (1,0) at s = 0.6 -> y1 = 1, y2 = 0.6.
  // Step 2: S = {2}, (2,0) allows 0.4 and (2,1) allows 1.4 -> y2 = 1.
  PushTrace trace;
  const auto space = unit_simplex(2);
  const Atom atom = push_to_extreme(point({{0, 0}, {0.4, 0}, {0, 0}}), kE1, space, kL2,
                                    {}, &trace);
  EXPECT_EQ(trace.unreachable_sizes, (std::vector<int>{2, 1}));
  EXPECT_NEAR(atom.t[0], 0.0, 0.0);
  EXPECT_NEAR(atom.t[1], 0.6, 1e-12);
  EXPECT_NEAR(atom.t[2], 1.0, 1e-12);
  EXPECT_NEAR((atom.point.values() - matrix({{0, 0}, {1, 0}, {1, 0}})).norm(), 0.0, 1e-12);
  ASSERT_TRUE(atom.certificate.has_value());
  EXPECT_EQ(std::get<Extreme>(*atom.certificate).parent, (std::vector<int>{-1, 0, 0}));
}

TEST(PushToExtremeTest, ProgressAndBounds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.n = 1 + static_cast<int>(seed % 8);
    cfg.dim = 1 + static_cast<int>(seed % 4);
    cfg.p = std::array{1.5, 2.0, 3.0}[seed % 3];
    const auto space = gen_euclidean_space(cfg);
    PushTrace trace;
    const Atom atom = push_to_extreme(gen_member(cfg, space), gen_direction(cfg), space,
                                      cfg.norm(), {}, &trace);
    EXPECT_TRUE(is_extreme(certify_extremality(atom.point, space, cfg.norm())));
    EXPECT_LE(static_cast<int>(trace.unreachable_sizes.size()), cfg.n);
    for (std::size_t i = 1; i < trace.unreachable_sizes.size(); ++i) {
      EXPECT_LT(trace.unreachable_sizes[i], trace.unreachable_sizes[i - 1]);
    }
    for (const TVector& t : trace.visited) {
      for (int i = 1; i <= cfg.n; ++i) {
        EXPECT_LE(std::abs(t[i]), 2.0 * space.dist(i, 0) + 1e-9);
      }
    }
  }
}

TEST(DecomposeTest, ExtremePointIsSingleAtom) {
  const auto y = point({{0, 0}, {1, 0}, {0, 0}});
  const Decomposition dec = decompose(y, kE1, unit_simplex(2), kL2);
  ASSERT_EQ(dec.k(), 1);
  EXPECT_EQ(dec.atoms[0].weight, 1.0);
  EXPECT_EQ(dec.atoms[0].atom.point, y);
}

TEST(DecomposeTest, ZeroMapSplitsEvenly) {
  const Decomposition dec = decompose(LipschitzPoint::zero(1, 2), kE1, unit_simplex(1), kL2);
  ASSERT_EQ(dec.k(), 2);
  EXPECT_DOUBLE_EQ(dec.atoms[0].weight, 0.5);
  EXPECT_DOUBLE_EQ(dec.atoms[1].weight, 0.5);
  EXPECT_NEAR(dec.atoms[0].atom.point.values()(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(dec.atoms[1].atom.point.values()(1, 0), -1.0, 1e-15);
}

TEST(DecomposeTest, OffCenterWeights) {
  // Interval (-1.5, 0.5): weights 1.5/2 at +0.5 and 0.5/2 at -1.5.
  const auto y = point({{0, 0}, {0.5, 0}});
  const Decomposition dec = decompose(y, kE1, unit_simplex(1), kL2);
  ASSERT_EQ(dec.k(), 2);
  EXPECT_NEAR(dec.atoms[0].weight, 0.75, 1e-15);
  EXPECT_NEAR(dec.atoms[1].weight, 0.25, 1e-15);
  EXPECT_NEAR(dec.atoms[0].atom.point.values()(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(dec.atoms[1].atom.point.values()(1, 0), -1.0, 1e-15);
  EXPECT_TRUE(verify_decomposition(y, dec, unit_simplex(1), kL2).passed());
}

TEST(DecomposeTest, RejectsNonMember) {
  EXPECT_EQ(code_of([] {
              decompose(point({{0, 0}, {2, 0}}), kE1, unit_simplex(1), kL2);
            }),
            ErrorCode::NotAMember);
}

TEST(DecomposeTest, RandomMembers) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.n = 1 + static_cast<int>(seed % 7);
    cfg.dim = 1 + static_cast<int>((seed / 3) % 4);
    cfg.p = std::array{1.5, 2.0, 3.0}[seed % 3];
    const NormSpec norm = cfg.norm();
    const auto space = seed % 2 ? gen_random_metric(cfg) : gen_euclidean_space(cfg);
    const auto y = gen_member(cfg, space);
    double worst_t = 0.0;
    DecomposeOptions options;
    options.on_visit = [&](const TVector& t) {
      for (int i = 1; i <= cfg.n; ++i) {
        worst_t = std::max(worst_t, std::abs(t[i]) - 2.0 * space.dist(i, 0));
      }
    };
    const Decomposition dec =
        decompose(y, Direction::basis(0, norm), space, norm, options);
    EXPECT_LE(dec.k(), cfg.n + 1);
    EXPECT_LE(worst_t, 1e-9);
    double total = 0.0;
    for (const auto& wa : dec.atoms) {
      EXPECT_GE(wa.weight, 0.0);
      total += wa.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12 * dec.k());
    const VerificationReport report = verify_decomposition(y, dec, space, norm);
    EXPECT_TRUE(report.passed()) << "seed " << seed;
    EXPECT_LE(report.reconstruction_error, 1e-8);
  }
}

TEST(DecomposeTest, AtomCountDoesNotDependOnTargetDimension) {
  const auto space = metric_closure(matrix({{0, 1.0, 2.0, 1.5, 3.0},
                                            {1.0, 0, 1.2, 2.0, 2.5},
                                            {2.0, 1.2, 0, 1.1, 1.4},
                                            {1.5, 2.0, 1.1, 0, 2.2},
                                            {3.0, 2.5, 1.4, 2.2, 0}}));
  const std::array<double, 5> pattern{0.0, 0.3, -0.2, 0.5, 0.1};
  std::optional<int> reference;
  for (int dim : {1, 2, 8, 32}) {
    const NormSpec norm(dim, 2.0);
    Matrix values = Matrix::Zero(5, dim);
    for (int i = 0; i < 5; ++i) values(i, 0) = pattern[static_cast<std::size_t>(i)];
    const LipschitzPoint y(values);
    const Decomposition dec = decompose(y, Direction::basis(0, norm), space, norm);
    EXPECT_LE(dec.k(), 5);
    if (!reference) reference = dec.k();
    EXPECT_EQ(dec.k(), *reference) << "dim " << dim;
    EXPECT_TRUE(verify_decomposition(y, dec, space, norm).passed());
  }
}

TEST(CaratheodoryTest, SymmetricExample) {
  // 2x3 system [1 1 1; 1 -1 0] has null vector (1, 1, -2); flipped so the
  // largest entry is positive, the weight on (0,0) goes to zero.
  const WeightedTVectors in{{vec({0, 1}), vec({0, -1}), vec({0, 0})}, {0.25, 0.25, 0.5}};
  const WeightedTVectors out = caratheodory_reduce(in);
  ASSERT_EQ(out.ts.size(), 2u);
  EXPECT_EQ(out.ts[0], vec({0, 1}));
  EXPECT_EQ(out.ts[1], vec({0, -1}));
  EXPECT_NEAR(out.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(out.weights[1], 0.5, 1e-15);
}

TEST(CaratheodoryTest, CollinearMiddleIsEliminated) {
  const WeightedTVectors in{{vec({0, 0}), vec({0, 0.5}), vec({0, 1})}, {0.3, 0.4, 0.3}};
  const WeightedTVectors out = caratheodory_step(in);
  ASSERT_EQ(out.ts.size(), 2u);
  EXPECT_EQ(out.ts[0], vec({0, 0}));
  EXPECT_EQ(out.ts[1], vec({0, 1}));
  EXPECT_NEAR(out.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(out.weights[1], 0.5, 1e-15);
}

TEST(CaratheodoryTest, Preconditions) {
  EXPECT_EQ(code_of([] {
              caratheodory_step({{vec({0, 1}), vec({0, -1})}, {0.5, 0.5}});
            }),
            ErrorCode::PreconditionViolation);
  EXPECT_EQ(code_of([] {
              caratheodory_step({{vec({0, 1}), vec({0, -1}), vec({1, 0})}, {0.2, 0.3, 0.5}});
            }),
            ErrorCode::PreconditionViolation);
  EXPECT_EQ(code_of([] {
              caratheodory_step({{vec({0, 1}), vec({0, -1}), vec({0, 0})}, {0.5, 0.5, 0.0}});
            }),
            ErrorCode::PreconditionViolation);
}

TEST(CaratheodoryTest, PreservesMassAndBarycenter) {
  std::mt19937_64 engine(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 6;
    const int count = n + 2 + trial % 5;
    WeightedTVectors in;
    for (int c = 0; c < count; ++c) {
      Vector t(n + 1);
      t[0] = 0.0;
      for (int i = 1; i <= n; ++i) t[i] = unit(engine);
      in.ts.push_back(t);
      in.weights.push_back(weight(engine));
    }
    const WeightedTVectors out = caratheodory_reduce(in);
    EXPECT_LE(static_cast<int>(out.ts.size()), n + 1);
    double mass_in = 0.0, mass_out = 0.0;
    Vector bary_in = Vector::Zero(n + 1), bary_out = Vector::Zero(n + 1);
    for (std::size_t i = 0; i < in.ts.size(); ++i) {
      mass_in += in.weights[i];
      bary_in += in.weights[i] * in.ts[i];
    }
    for (std::size_t i = 0; i < out.ts.size(); ++i) {
      EXPECT_GT(out.weights[i], 0.0);
      mass_out += out.weights[i];
      bary_out += out.weights[i] * out.ts[i];
    }
    EXPECT_NEAR(mass_out, mass_in, 1e-10);
    EXPECT_LE((bary_out - bary_in).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(VerifyDecompositionTest, DetectsBadWeights) {
  const auto y = LipschitzPoint::zero(1, 2);
  Decomposition dec = decompose(y, kE1, unit_simplex(1), kL2);
  dec.atoms[0].weight = 0.6;
  dec.atoms[1].weight = 0.6;
  const auto report = verify_decomposition(y, dec, unit_simplex(1), kL2);
  EXPECT_FALSE(report.passed());
  EXPECT_FALSE(report.weight_sum_ok);
  EXPECT_NEAR(report.weight_sum_deviation, 0.2, 1e-15);
}

TEST(VerifyDecompositionTest, DetectsNonExtremeAtom) {
  const auto y = LipschitzPoint::zero(1, 2);
  Decomposition dec;
  dec.direction = kE1.vector();
  dec.atoms.push_back({1.0, Atom{TVector::Zero(2), y, std::nullopt}});
  const auto report = verify_decomposition(y, dec, unit_simplex(1), kL2);
  EXPECT_FALSE(report.passed());
  ASSERT_EQ(report.atoms.size(), 1u);
  EXPECT_TRUE(report.atoms[0].member);
  EXPECT_FALSE(report.atoms[0].extreme);
  EXPECT_EQ(report.atoms[0].oracle_extreme, std::optional<bool>(false));
  EXPECT_TRUE(report.weight_sum_ok);
  EXPECT_TRUE(report.reconstruction_ok);
}

TEST(VerifyDecompositionTest, DetectsInconsistentAtomAndCount) {
  const auto space = unit_simplex(1);
  const auto y = point({{0, 0}, {0.5, 0}});
  Decomposition dec = decompose(y, kE1, space, kL2);
  Decomposition moved = dec;
  moved.atoms[1].atom.t[1] += 1e-3;
  EXPECT_FALSE(verify_decomposition(y, moved, space, kL2).atoms[1].consistent);

  Decomposition extra = dec;
  extra.atoms.push_back({0.0, dec.atoms[0].atom});
  const auto report = verify_decomposition(y, extra, space, kL2);
  EXPECT_FALSE(report.count_ok);
  EXPECT_FALSE(report.passed());
}

}  // namespace
