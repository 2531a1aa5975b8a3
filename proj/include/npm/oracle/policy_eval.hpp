#pragma once

#include <vector>

#include "npm/mask/similarity.hpp"
#include "npm/oracle/tabular_mdp.hpp"

namespace npm::oracle {

/// Solves V = r + gamma P^pi V with a sparse LU factorisation. Actions with
/// bitwise-identical transition rows are aggregated before mixing, so two
/// policies that put equal total mass on such a group give bitwise-identical
/// values. Throws std::runtime_error when the residual exceeds 1e-10.
std::vector<double> exact_policy_eval(const TabularMDP& mdp, const TabularPolicy& pi);

/// Plain iterative evaluation, used as an independent cross-check.
std::vector<double> iterative_policy_eval(const TabularMDP& mdp, const TabularPolicy& pi,
                                          int iterations);

/// Moves each cluster's probability mass onto its representative.
TabularPolicy collapse_policy(const TabularPolicy& pi,
                              const std::vector<mask::ActionClusterSet>& clusters_per_state);

}  // namespace npm::oracle
