#include "npm/oracle/policy_eval.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <stdexcept>

namespace npm::oracle {

namespace {

// Row of P^pi(.|s), aggregating policy mass over actions with identical rows.
std::map<int, double> mixed_row(const TabularMDP& mdp, const TabularPolicy& pi, int s) {
  const int n = mdp.num_actions();
  std::vector<int> group_of(n, -1);
  std::vector<int> leaders;
  std::vector<double> mass;
  for (int a = 0; a < n; ++a) {
    for (std::size_t g = 0; g < leaders.size(); ++g) {
      if (mdp.row(s, leaders[g]) == mdp.row(s, a)) {
        group_of[a] = static_cast<int>(g);
        break;
      }
    }
    if (group_of[a] < 0) {
      group_of[a] = static_cast<int>(leaders.size());
      leaders.push_back(a);
      mass.push_back(0.0);
    }
    mass[group_of[a]] += pi(s, a);
  }
  std::map<int, double> row;
  for (std::size_t g = 0; g < leaders.size(); ++g) {
    if (mass[g] == 0.0) continue;
    for (const auto& [next, p] : mdp.row(s, leaders[g])) row[next] += mass[g] * p;
  }
  return row;
}

}  // namespace

std::vector<double> exact_policy_eval(const TabularMDP& mdp, const TabularPolicy& pi) {
  const int n = mdp.num_states();
  if (pi.num_states() != n || pi.num_actions() != mdp.num_actions())
    throw std::invalid_argument("policy_eval: policy shape mismatch");
  const double gamma = mdp.gamma();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::map<int, double>> rows(n);
  for (int s = 0; s < n; ++s) {
    rows[s] = mixed_row(mdp, pi, s);
    triplets.emplace_back(s, s, 1.0);
    for (const auto& [next, p] : rows[s]) triplets.emplace_back(s, next, -gamma * p);
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success) throw std::runtime_error("policy_eval: singular system");
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(mdp.rewards().data(), n);
  const Eigen::VectorXd v = solver.solve(r);
  if (solver.info() != Eigen::Success) throw std::runtime_error("policy_eval: solve failed");
  const double residual = (system * v - r).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) throw std::runtime_error("policy_eval: residual above 1e-10");
  return {v.data(), v.data() + n};
}

std::vector<double> iterative_policy_eval(const TabularMDP& mdp, const TabularPolicy& pi,
                                          int iterations) {
  const int n = mdp.num_states();
  std::vector<double> v(n, 0.0);
  std::vector<double> next(n);
  for (int it = 0; it < iterations; ++it) {
    for (int s = 0; s < n; ++s) {
      double expected = 0.0;
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const double w = pi(s, a);
        if (w == 0.0) continue;
        for (const auto& [succ, p] : mdp.row(s, a)) expected += w * p * v[succ];
      }
      next[s] = mdp.rewards()[s] + mdp.gamma() * expected;
    }
    v.swap(next);
  }
  return v;
}

TabularPolicy collapse_policy(const TabularPolicy& pi,
                              const std::vector<mask::ActionClusterSet>& clusters_per_state) {
  if (static_cast<int>(clusters_per_state.size()) != pi.num_states())
    throw std::invalid_argument("collapse_policy: one cluster set per state required");
  TabularPolicy out = pi;
  for (int s = 0; s < pi.num_states(); ++s) {
    const auto& set = clusters_per_state[s];
    set.validate(pi.num_actions());
    for (std::size_t c = 0; c < set.clusters.size(); ++c) {
      double mass = 0.0;
      for (ActionId a : set.clusters[c]) mass += pi(s, a);
      for (ActionId a : set.clusters[c]) out(s, a) = 0.0;
      out(s, set.representatives[c]) = mass;
    }
  }
  return out;
}

}  // namespace npm::oracle
