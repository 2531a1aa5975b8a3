#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace npm::oracle {

struct AuditConfig {
  std::uint64_t seed = 0;
  int identity_instances = 50;
  int bound_instances = 100;
  int exact_duplicate_instances = 20;
  int pinsker_pairs = 10000;
  int max_states = 20;
  int max_actions = 6;
  int max_support = 8;
  double identity_tolerance = 1e-10;
  /// Merges one pair of distinct actions into a cluster at every state of
  /// the bound audit, so the cluster condition is deliberately broken.
  bool break_precondition = false;
};

/// One named audit. `max_violation` is the largest (measured - allowed)
/// over instances; it is non-positive when every instance passes.
struct AuditCheck {
  std::string name;
  int instances = 0;
  int passes = 0;
  double max_violation = 0.0;
  /// Instances rejected because the cluster condition did not hold; these
  /// are not counted as bound violations.
  int precondition_failures = 0;

  bool ok() const { return passes == instances && precondition_failures == 0; }
};

/// KL(P_i || P_j) against N(ii) - N(ij) on random MDPs under uniform pi,
/// over every pair with shared support.
AuditCheck audit_identity(const AuditConfig& config);
/// Collapse bound on random MDPs with epsilon-close duplicated actions.
AuditCheck audit_collapse_bound(const AuditConfig& config);
/// Exactly duplicated actions: the collapsed policy's values must equal the
/// original ones bitwise.
AuditCheck audit_exact_duplicates(const AuditConfig& config);
/// TV^2 <= KL / 2 on random distribution pairs.
AuditCheck audit_pinsker(const AuditConfig& config);

std::vector<AuditCheck> run_audits(const AuditConfig& config);

/// {checks: [{name, instances, passes, max_violation, precondition_failures}]}
nlohmann::json audit_report(const std::vector<AuditCheck>& checks);

}  // namespace npm::oracle
