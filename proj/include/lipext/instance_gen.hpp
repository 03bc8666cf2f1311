#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "lipext/representer.hpp"

namespace lipext {

// Seeded instance generators.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniform reals are formed directly from the top 53 bits of each
// 64-bit draw, (x >> 11) * 2^-53, rather than through
// std::uniform_real_distribution (whose algorithm is implementation-defined),
// so a seed reproduces the same instance with any conforming standard library.
// Each generator seeds its own engine with seed ^ <generator-specific salt>.

struct GenConfig {
  std::uint64_t seed = 0;
  int n = 1;
  int dim = 1;
  double p = 2.0;
  int embed_dim = 2;
  double scale = 1.0;

  /// Throws PreconditionViolation unless all sizes/scales are positive and
  /// 1 < p < inf.
  void validate() const;
  NormSpec norm() const { return NormSpec(dim, p); }
};

/// Uniform in [0, 1) from one 64-bit draw.
double uniform01(std::mt19937_64& engine);

/// n+1 points uniform in [0, scale]^embed_dim with Euclidean distances.
/// Exactly coincident samples are redrawn.
FiniteMetricSpace gen_euclidean_space(const GenConfig& cfg);

/// Symmetric off-diagonal entries uniform in (0, scale], then metric_closure.
FiniteMetricSpace gen_random_metric(const GenConfig& cfg);

/// Random member of the unit ball: coordinates uniform in [-scale, scale],
/// rescaled into the ball, then multiplied by a shrink factor. The default
/// shrink is min(1, 1.25 u) with u uniform in [0, 1), so about one draw in
/// five stays on the boundary.
LipschitzPoint gen_member(const GenConfig& cfg, const FiniteMetricSpace& space,
                          std::optional<double> shrink = std::nullopt);

/// Random unit vector (in the cfg norm) drawn from the same seed.
Direction gen_direction(const GenConfig& cfg);

/// gen_member pushed to an extreme point along gen_direction.
Atom gen_extreme(const GenConfig& cfg, const FiniteMetricSpace& space);

}  // namespace lipext
