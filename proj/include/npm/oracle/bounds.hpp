#pragma once

#include <span>
#include <vector>

#include "npm/mask/similarity.hpp"
#include "npm/oracle/tabular_mdp.hpp"

namespace npm::oracle {

struct CollapseBoundReport {
  double lhs = 0.0;  // ||V^pi - V^collapsed||_inf
  double rhs = 0.0;  // gamma r_max / (1 - gamma)^2 sqrt(2 epsilon)
  bool holds = false;
  /// False when some cluster contains an ordered pair with KL >= epsilon;
  /// lhs/rhs are still filled in but `holds` is false.
  bool precondition_ok = true;
  double max_intra_cluster_kl = 0.0;
  std::vector<mask::ActionClusterSet> clusters;
};

/// Performance-loss bound for collapsing epsilon-clusters.
double collapse_bound(double gamma, double r_max, double epsilon);

/// Clusters every state from the exact KL matrix with threshold epsilon and
/// compares the exact values of pi and its collapsed policy.
CollapseBoundReport collapse_bound_check(const TabularMDP& mdp, const TabularPolicy& pi, double epsilon);
/// Same comparison with caller-supplied clusters; the cluster condition is
/// verified rather than assumed.
CollapseBoundReport collapse_bound_check(const TabularMDP& mdp, const TabularPolicy& pi, double epsilon,
                          std::vector<mask::ActionClusterSet> clusters);

struct PinskerReport {
  double tv = 0.0;
  double kl = 0.0;
  bool holds = false;
  /// tv^2 - kl/2 (negative when the inequality holds strictly).
  double violation = 0.0;
};

PinskerReport pinsker_check(std::span<const double> p, std::span<const double> q);

}  // namespace npm::oracle
