#include "npm/oracle/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npm/core/rng.hpp"
#include "npm/oracle/bounds.hpp"
#include "npm/oracle/exact.hpp"
#include "npm/oracle/policy_eval.hpp"
#include "npm/oracle/random_mdp.hpp"

namespace npm::oracle {

namespace {

constexpr double kEpsilonGrid[] = {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};

int uniform_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.uniform_index(hi - lo + 1)); }

AuditCheck make(std::string name) {
  AuditCheck c;
  c.name = std::move(name);
  c.max_violation = -std::numeric_limits<double>::infinity();
  return c;
}

}  // namespace

AuditCheck audit_identity(const AuditConfig& config) {
  AuditCheck check = make("kl_nvalue_identity");
  Rng rng = Rng(config.seed).derive(101);
  for (int k = 0; k < config.identity_instances; ++k) {
    const int ns = uniform_int(rng, 2, config.max_states);
    const int na = uniform_int(rng, 2, config.max_actions);
    const TabularMDP mdp = random_mdp(rng, ns, na, 0.9, 0.3);
    const TabularPolicy pi = TabularPolicy::uniform(ns, na);
    double worst = 0.0;
    for (int s = 0; s < ns; ++s) worst = std::max(worst, exact_similarity(mdp, pi, s).max_identity_error);
    ++check.instances;
    check.passes += worst <= config.identity_tolerance;
    check.max_violation = std::max(check.max_violation, worst - config.identity_tolerance);
  }
  return check;
}

AuditCheck audit_collapse_bound(const AuditConfig& config) {
  AuditCheck check = make("collapse_bound");
  Rng rng = Rng(config.seed).derive(102);
  for (int k = 0; k < config.bound_instances; ++k) {
    const int ns = uniform_int(rng, 2, config.max_states);
    const int base = uniform_int(rng, 1, config.max_actions - 1);
    const int copies = uniform_int(rng, 1, config.max_actions - base);
    const double gamma = 0.5 + 0.45 * rng.uniform();
    const double eps = kEpsilonGrid[rng.uniform_index(std::size(kEpsilonGrid))];
    const TabularMDP mdp = near_duplicate_mdp(rng, ns, base, copies, gamma, rng.uniform(), eps);
    const TabularPolicy pi = random_policy(rng, ns, base + copies);
    CollapseBoundReport report;
    if (config.break_precondition && base >= 2) {
      std::vector<mask::ActionClusterSet> clusters;
      for (int s = 0; s < ns; ++s) {
        mask::ActionClusterSet c = mask::cluster(exact_kl_matrix(mdp, s), eps);
        // Fold the cluster holding action 1 into the one holding action 0.
        auto holds = [](const std::vector<ActionId>& m, ActionId a) {
          return std::find(m.begin(), m.end(), a) != m.end();
        };
        auto first = std::find_if(c.clusters.begin(), c.clusters.end(), [&](auto& m) { return holds(m, 0); });
        auto second = std::find_if(c.clusters.begin(), c.clusters.end(), [&](auto& m) { return holds(m, 1); });
        if (first != second) {
          first->insert(first->end(), second->begin(), second->end());
          std::sort(first->begin(), first->end());
          c.clusters.erase(second);
          c.representatives.clear();
          for (const auto& m : c.clusters) c.representatives.push_back(m.front());
        }
        clusters.push_back(std::move(c));
      }
      report = collapse_bound_check(mdp, pi, eps, std::move(clusters));
    } else {
      report = collapse_bound_check(mdp, pi, eps);
    }
    ++check.instances;
    if (!report.precondition_ok) {
      ++check.precondition_failures;
      continue;
    }
    check.passes += report.holds;
    check.max_violation = std::max(check.max_violation, report.lhs - report.rhs);
  }
  return check;
}

AuditCheck audit_exact_duplicates(const AuditConfig& config) {
  AuditCheck check = make("collapse_exact_duplicates");
  Rng rng = Rng(config.seed).derive(103);
  for (int k = 0; k < config.exact_duplicate_instances; ++k) {
    const int ns = uniform_int(rng, 2, config.max_states);
    const int base = uniform_int(rng, 1, config.max_actions - 1);
    const int copies = uniform_int(rng, 1, config.max_actions - base);
    const TabularMDP mdp = near_duplicate_mdp(rng, ns, base, copies, 0.9, 0.0, 1e-12);
    const TabularPolicy pi = random_policy(rng, ns, base + copies);
    const CollapseBoundReport report = collapse_bound_check(mdp, pi, 1e-12);
    ++check.instances;
    if (!report.precondition_ok) {
      ++check.precondition_failures;
      continue;
    }
    check.passes += report.lhs == 0.0;
    check.max_violation = std::max(check.max_violation, report.lhs);
  }
  return check;
}

AuditCheck audit_pinsker(const AuditConfig& config) {
  AuditCheck check = make("pinsker");
  Rng rng = Rng(config.seed).derive(104);
  for (int k = 0; k < config.pinsker_pairs; ++k) {
    const int n = uniform_int(rng, 1, config.max_support);
    const std::vector<double> p = random_distribution(rng, n, 0.3);
    const std::vector<double> q = random_distribution(rng, n, rng.bernoulli(0.5) ? 0.3 : 0.0);
    const PinskerReport report = pinsker_check(p, q);
    ++check.instances;
    check.passes += report.holds;
    if (std::isfinite(report.violation)) check.max_violation = std::max(check.max_violation, report.violation);
  }
  return check;
}

std::vector<AuditCheck> run_audits(const AuditConfig& config) {
  return {audit_identity(config), audit_collapse_bound(config), audit_exact_duplicates(config), audit_pinsker(config)};
}

nlohmann::json audit_report(const std::vector<AuditCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const AuditCheck& c : checks) {
    out.push_back({{"name", c.name},
                   {"instances", c.instances},
                   {"passes", c.passes},
                   {"max_violation", std::isfinite(c.max_violation) ? nlohmann::json(c.max_violation) : nlohmann::json()},
                   {"precondition_failures", c.precondition_failures}});
  }
  return {{"checks", out}};
}

}  // namespace npm::oracle
