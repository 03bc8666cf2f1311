#include "lipext/instance_gen.hpp"

#include <algorithm>
#include <cmath>

namespace lipext {

namespace {

constexpr std::uint64_t kEuclideanSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kRandomMetricSalt = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kMemberSalt = 0x94d049bb133111ebULL;
constexpr std::uint64_t kDirectionSalt = 0xd6e8feb86659fd93ULL;

std::mt19937_64 engine_for(const GenConfig& cfg, std::uint64_t salt) {
  return std::mt19937_64(cfg.seed ^ salt);
}

}  // namespace

void GenConfig::validate() const {
  if (n < 1 || dim < 1 || embed_dim < 1 || !(scale > 0.0) ||
      !std::isfinite(scale)) {
    throw Error(ErrorCode::PreconditionViolation,
                "generator sizes and scale must be positive");
  }
  (void)norm();  // rejects p outside (1, inf)
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

FiniteMetricSpace gen_euclidean_space(const GenConfig& cfg) {
  cfg.validate();
  auto engine = engine_for(cfg, kEuclideanSalt);
  const int m = cfg.n + 1;
  Matrix points(m, cfg.embed_dim);
  for (int i = 0; i < m; ++i) {
    bool distinct = false;
    while (!distinct) {
      for (int c = 0; c < cfg.embed_dim; ++c) {
        points(i, c) = cfg.scale * uniform01(engine);
      }
      distinct = true;
      for (int j = 0; j < i && distinct; ++j) {
        distinct = points.row(i) != points.row(j);
      }
    }
  }
  Matrix dist = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      dist(i, j) = dist(j, i) = (points.row(i) - points.row(j)).norm();
    }
  }
  // Rounded Euclidean distances can miss the triangle inequality by an ulp
  // on nearly collinear triples; the closure is a no-op otherwise.
  return metric_closure(dist);
}

FiniteMetricSpace gen_random_metric(const GenConfig& cfg) {
  cfg.validate();
  auto engine = engine_for(cfg, kRandomMetricSalt);
  const int m = cfg.n + 1;
  Matrix raw = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      raw(i, j) = raw(j, i) = cfg.scale * (1.0 - uniform01(engine));
    }
  }
  return metric_closure(raw);
}

LipschitzPoint gen_member(const GenConfig& cfg, const FiniteMetricSpace& space,
                          std::optional<double> shrink) {
  cfg.validate();
  const NormSpec norm = cfg.norm();
  if (space.n() != cfg.n) {
    throw Error(ErrorCode::DimensionMismatch, "space size does not match cfg.n");
  }
  auto engine = engine_for(cfg, kMemberSalt);
  Matrix values = Matrix::Zero(space.size(), cfg.dim);
  for (int i = 1; i < space.size(); ++i) {
    for (int c = 0; c < cfg.dim; ++c) {
      values(i, c) = cfg.scale * (2.0 * uniform01(engine) - 1.0);
    }
  }
  const double factor =
      shrink.value_or(std::min(1.0, 1.25 * uniform01(engine)));
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw Error(ErrorCode::PreconditionViolation, "shrink must lie in [0, 1]");
  }
  const LipschitzPoint inside =
      rescale_into_ball(LipschitzPoint(std::move(values)), space, norm);
  return LipschitzPoint(factor * inside.values());
}

Direction gen_direction(const GenConfig& cfg) {
  cfg.validate();
  const NormSpec norm = cfg.norm();
  auto engine = engine_for(cfg, kDirectionSalt);
  for (;;) {
    Vector v(cfg.dim);
    for (int c = 0; c < cfg.dim; ++c) v[c] = 2.0 * uniform01(engine) - 1.0;
    if (norm_eval(norm, v) > 1e-3) return Direction::normalized(v, norm);
  }
}

Atom gen_extreme(const GenConfig& cfg, const FiniteMetricSpace& space) {
  const NormSpec norm = cfg.norm();
  return push_to_extreme(gen_member(cfg, space), gen_direction(cfg), space, norm);
}

}  // namespace lipext
