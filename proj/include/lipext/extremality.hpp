#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "lipext/metric_core.hpp"

namespace lipext {

/// Node subset, stored as sorted ascending indices.
using NodeSet = std::vector<int>;

/// Pair (i, j) is tight when d(i,j) - ||y_i - y_j|| <= tol_tight * max(1, d).
bool is_tight_pair(const LipschitzPoint& y, const FiniteMetricSpace& space,
                   const NormSpec& norm, const ToleranceConfig& tol, int i,
                   int j);

/// Graph of tight pairs; chains of tight pairs from node 0 are exactly what
/// extreme points require of every node.
struct TightGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographic order
  std::vector<std::vector<int>> adjacency;  // ascending neighbour lists

  bool has_edge(int i, int j) const;
};

TightGraph build_tight_graph(const LipschitzPoint& y,
                             const FiniteMetricSpace& space,
                             const NormSpec& norm, const ToleranceConfig& tol = {});

struct SlackCut {
  NodeSet nodes;  // S, nonempty, never contains 0
  double epsilon = 0.0;
  // Lexicographically smallest cross pair (i in S, j outside) attaining epsilon.
  std::pair<int, int> binding{0, 0};
};

struct Extreme {
  // parent[i] is the predecessor of node i on a tight path to node 0;
  // parent[0] = -1.
  std::vector<int> parent;
};

struct NotExtreme {
  SlackCut cut;
};

using ExtremalityCertificate = std::variant<Extreme, NotExtreme>;

inline bool is_extreme(const ExtremalityCertificate& cert) {
  return std::holds_alternative<Extreme>(cert);
}

/// BFS from node 0 over the tight graph (neighbours in ascending order).
/// Extreme carries the BFS tree; otherwise the cut is the whole unreachable
/// set together with its slack.
ExtremalityCertificate certify_extremality(const LipschitzPoint& y,
                                           const FiniteMetricSpace& space,
                                           const NormSpec& norm,
                                           const ToleranceConfig& tol = {});

/// min over i in S, j not in S of d(i,j) - ||y_i - y_j||. May be <= 0.
double min_cut_slack(const LipschitzPoint& y, const NodeSet& cut,
                     const FiniteMetricSpace& space, const NormSpec& norm);

/// Same as min_cut_slack, plus the lexicographically smallest binding pair.
SlackCut evaluate_cut(const LipschitzPoint& y, const NodeSet& cut,
                      const FiniteMetricSpace& space, const NormSpec& norm);

/// y +/- epsilon * v on the nodes of the cut. Both halves are members and
/// average back to y.
std::pair<LipschitzPoint, LipschitzPoint> split_nonextreme(
    const LipschitzPoint& y, const SlackCut& cut, const Vector& direction,
    const FiniteMetricSpace& space, const NormSpec& norm,
    const ToleranceConfig& tol = {});

/// Largest n accepted by cut_oracle_bruteforce.
inline constexpr int kMaxOracleNodes = 20;

/// Enumerates every nonempty S subset of {1..n} in ascending bitmask order
/// (bit b <-> node b+1) and returns the first S whose cross pairs are all
/// non-tight. Exponential; independent of the BFS path.
std::optional<SlackCut> cut_oracle_bruteforce(const LipschitzPoint& y,
                                              const FiniteMetricSpace& space,
                                              const NormSpec& norm,
                                              const ToleranceConfig& tol = {});

/// Checks a certificate against y without trusting its producer.
bool check_certificate(const ExtremalityCertificate& cert,
                       const LipschitzPoint& y, const FiniteMetricSpace& space,
                       const NormSpec& norm, const ToleranceConfig& tol = {});

}  // namespace lipext
