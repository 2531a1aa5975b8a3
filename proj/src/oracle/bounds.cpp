#include "npm/oracle/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "npm/oracle/exact.hpp"
#include "npm/oracle/policy_eval.hpp"

namespace npm::oracle {

double collapse_bound(double gamma, double r_max, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("collapse_bound: epsilon must be non-negative");
  return gamma * r_max / ((1.0 - gamma) * (1.0 - gamma)) * std::sqrt(2.0 * epsilon);
}

CollapseBoundReport collapse_bound_check(const TabularMDP& mdp, const TabularPolicy& pi, double epsilon) {
  std::vector<mask::ActionClusterSet> clusters;
  clusters.reserve(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) clusters.push_back(mask::cluster(exact_kl_matrix(mdp, s), epsilon));
  return collapse_bound_check(mdp, pi, epsilon, std::move(clusters));
}

CollapseBoundReport collapse_bound_check(const TabularMDP& mdp, const TabularPolicy& pi, double epsilon,
                          std::vector<mask::ActionClusterSet> clusters) {
  CollapseBoundReport report;
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (const auto& members : clusters.at(s).clusters) {
      for (ActionId a : members) {
        for (ActionId b : members) {
          if (a == b) continue;
          const double kl = exact_kl(mdp.dense_row(s, a), mdp.dense_row(s, b));
          report.max_intra_cluster_kl = std::max(report.max_intra_cluster_kl, kl);
          if (!(kl < epsilon)) report.precondition_ok = false;
        }
      }
    }
  }
  const TabularPolicy collapsed = collapse_policy(pi, clusters);
  const std::vector<double> v = exact_policy_eval(mdp, pi);
  const std::vector<double> vc = exact_policy_eval(mdp, collapsed);
  for (std::size_t s = 0; s < v.size(); ++s) report.lhs = std::max(report.lhs, std::abs(v[s] - vc[s]));
  report.rhs = collapse_bound(mdp.gamma(), mdp.r_max(), epsilon);
  report.holds = report.precondition_ok && report.lhs <= report.rhs + 1e-9;
  report.clusters = std::move(clusters);
  return report;
}

PinskerReport pinsker_check(std::span<const double> p, std::span<const double> q) {
  PinskerReport report;
  report.tv = total_variation(p, q);
  report.kl = exact_kl(p, q);
  report.violation = report.tv * report.tv - 0.5 * report.kl;
  report.holds = report.violation <= 0.0;
  return report;
}

}  // namespace npm::oracle
