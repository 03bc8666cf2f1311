#include "lipext/extremality.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>

namespace lipext {

namespace {

void require_valid_cut(const NodeSet& cut, int n) {
  if (cut.empty()) throw Error(ErrorCode::EmptyCut, "cut must be nonempty");
  for (std::size_t k = 0; k < cut.size(); ++k) {
    const int node = cut[k];
    if (node == 0) {
      throw Error(ErrorCode::BasepointInCut, "cut must not contain node 0", {0});
    }
    if (node < 0 || node > n) {
      throw Error(ErrorCode::PreconditionViolation,
                  "cut node " + std::to_string(node) + " out of range", {node});
    }
    if (k > 0 && cut[k - 1] >= node) {
      throw Error(ErrorCode::PreconditionViolation,
                  "cut must be sorted and free of duplicates");
    }
  }
}

std::vector<char> membership_mask(const NodeSet& cut, int size) {
  std::vector<char> in(static_cast<std::size_t>(size), 0);
  for (int node : cut) in[static_cast<std::size_t>(node)] = 1;
  return in;
}

// Slack of the cut given as a mask; pairs are visited with i in S, j outside,
// in lexicographic (i, j) order so the first strict minimum is the witness.
SlackCut slack_of_mask(const LipschitzPoint& y, const std::vector<char>& in,
                       const FiniteMetricSpace& space, const NormSpec& norm) {
  SlackCut result;
  result.epsilon = std::numeric_limits<double>::infinity();
  for (int i = 0; i < space.size(); ++i) {
    if (!in[static_cast<std::size_t>(i)]) continue;
    result.nodes.push_back(i);
    for (int j = 0; j < space.size(); ++j) {
      if (in[static_cast<std::size_t>(j)]) continue;
      const double slack = space.dist(i, j) - pair_norm(y, norm, i, j);
      if (slack < result.epsilon) {
        result.epsilon = slack;
        result.binding = {i, j};
      }
    }
  }
  return result;
}

}  // namespace

bool is_tight_pair(const LipschitzPoint& y, const FiniteMetricSpace& space,
                   const NormSpec& norm, const ToleranceConfig& tol, int i,
                   int j) {
  const double d = space.dist(i, j);
  return d - pair_norm(y, norm, i, j) <= tol.tol_tight * std::max(1.0, d);
}

bool TightGraph::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes) return false;
  const auto& nbrs = adjacency[static_cast<std::size_t>(i)];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

TightGraph build_tight_graph(const LipschitzPoint& y,
                             const FiniteMetricSpace& space,
                             const NormSpec& norm, const ToleranceConfig& tol) {
  tol.validate();
  require_member(y, space, norm, tol);
  TightGraph graph;
  graph.n_nodes = space.size();
  graph.adjacency.resize(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      if (is_tight_pair(y, space, norm, tol, i, j)) {
        graph.edges.emplace_back(i, j);
        graph.adjacency[static_cast<std::size_t>(i)].push_back(j);
        graph.adjacency[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  for (auto& nbrs : graph.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return graph;
}

ExtremalityCertificate certify_extremality(const LipschitzPoint& y,
                                           const FiniteMetricSpace& space,
                                           const NormSpec& norm,
                                           const ToleranceConfig& tol) {
  const TightGraph graph = build_tight_graph(y, space, norm, tol);
  const auto size = static_cast<std::size_t>(space.size());
  std::vector<int> parent(size, -1);
  std::vector<char> reached(size, 0);
  reached[0] = 1;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int w : graph.adjacency[static_cast<std::size_t>(u)]) {
      if (reached[static_cast<std::size_t>(w)]) continue;
      reached[static_cast<std::size_t>(w)] = 1;
      parent[static_cast<std::size_t>(w)] = u;
      queue.push_back(w);
    }
  }
  if (std::all_of(reached.begin(), reached.end(), [](char r) { return r != 0; })) {
    return Extreme{std::move(parent)};
  }
  std::vector<char> unreached(size, 0);
  for (std::size_t i = 0; i < size; ++i) unreached[i] = reached[i] ? 0 : 1;
  return NotExtreme{slack_of_mask(y, unreached, space, norm)};
}

SlackCut evaluate_cut(const LipschitzPoint& y, const NodeSet& cut,
                      const FiniteMetricSpace& space, const NormSpec& norm) {
  check_dimensions(y, space, norm);
  require_valid_cut(cut, space.n());
  return slack_of_mask(y, membership_mask(cut, space.size()), space, norm);
}

double min_cut_slack(const LipschitzPoint& y, const NodeSet& cut,
                     const FiniteMetricSpace& space, const NormSpec& norm) {
  return evaluate_cut(y, cut, space, norm).epsilon;
}

std::pair<LipschitzPoint, LipschitzPoint> split_nonextreme(
    const LipschitzPoint& y, const SlackCut& cut, const Vector& direction,
    const FiniteMetricSpace& space, const NormSpec& norm,
    const ToleranceConfig& tol) {
  tol.validate();
  check_dimensions(y, space, norm);
  if (direction.size() != norm.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  }
  if (std::abs(norm_eval(norm, direction) - 1.0) > 1e-12) {
    throw Error(ErrorCode::NotUnitDirection, "direction must have unit norm");
  }
  require_member(y, space, norm, tol);
  const SlackCut actual = evaluate_cut(y, cut.nodes, space, norm);
  if (actual.epsilon <= tol.tol_tight) {
    throw Error(ErrorCode::InvalidCut,
                "cut has no slack: pair (" + std::to_string(actual.binding.first) +
                    "," + std::to_string(actual.binding.second) + ") is tight",
                {actual.binding.first, actual.binding.second});
  }
  if (!(cut.epsilon > 0.0) || cut.epsilon > actual.epsilon) {
    throw Error(ErrorCode::InvalidCut,
                "cut epsilon must lie in (0, min cut slack]");
  }

  Matrix plus = y.values();
  Matrix minus = y.values();
  const Eigen::RowVectorXd step = cut.epsilon * direction.transpose();
  for (int node : cut.nodes) {
    plus.row(node) += step;
    minus.row(node) -= step;
  }
  return {LipschitzPoint(std::move(plus)), LipschitzPoint(std::move(minus))};
}

std::optional<SlackCut> cut_oracle_bruteforce(const LipschitzPoint& y,
                                              const FiniteMetricSpace& space,
                                              const NormSpec& norm,
                                              const ToleranceConfig& tol) {
  tol.validate();
  const int n = space.n();
  if (n > kMaxOracleNodes) {
    throw Error(ErrorCode::TooLarge,
                "brute-force cut oracle is limited to n <= " +
                    std::to_string(kMaxOracleNodes));
  }
  require_member(y, space, norm, tol);

  // tight(i, j) is fixed for the whole enumeration; compute it once.
  const auto size = static_cast<std::size_t>(space.size());
  std::vector<std::vector<char>> tight(size, std::vector<char>(size, 0));
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      const char t = is_tight_pair(y, space, norm, tol, i, j) ? 1 : 0;
      tight[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t;
      tight[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = t;
    }
  }

  const std::uint64_t limit = std::uint64_t{1} << n;
  std::vector<char> in(size, 0);
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    for (int b = 0; b < n; ++b) {
      in[static_cast<std::size_t>(b + 1)] = ((mask >> b) & 1U) ? 1 : 0;
    }
    bool slack_everywhere = true;
    for (std::size_t i = 1; i < size && slack_everywhere; ++i) {
      if (!in[i]) continue;
      for (std::size_t j = 0; j < size; ++j) {
        if (!in[j] && tight[i][j]) {
          slack_everywhere = false;
          break;
        }
      }
    }
    if (slack_everywhere) return slack_of_mask(y, in, space, norm);
  }
  return std::nullopt;
}

bool check_certificate(const ExtremalityCertificate& cert,
                       const LipschitzPoint& y, const FiniteMetricSpace& space,
                       const NormSpec& norm, const ToleranceConfig& tol) {
  check_dimensions(y, space, norm);
  if (!is_member(y, space, norm, 1.0, tol)) return false;
  if (const auto* ext = std::get_if<Extreme>(&cert)) {
    if (static_cast<int>(ext->parent.size()) != space.size()) return false;
    if (ext->parent[0] != -1) return false;
    for (int start = 1; start <= space.n(); ++start) {
      int node = start;
      int steps = 0;
      while (node != 0) {
        const int up = ext->parent[static_cast<std::size_t>(node)];
        if (up < 0 || up > space.n() || ++steps > space.n()) return false;
        if (!is_tight_pair(y, space, norm, tol, node, up)) return false;
        node = up;
      }
    }
    return true;
  }
  const SlackCut& cut = std::get<NotExtreme>(cert).cut;
  try {
    const SlackCut actual = evaluate_cut(y, cut.nodes, space, norm);
    return cut.epsilon > tol.tol_tight && cut.epsilon <= actual.epsilon;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace lipext
