#include "npm/agents/mask_provider.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "npm/agents/masking.hpp"
#include "npm/oracle/env_tabular.hpp"

namespace npm::agents {

std::string to_string(MaskMode mode) {
  switch (mode) {
    case MaskMode::kLearned: return "learned";
    case MaskMode::kOracle: return "oracle";
    case MaskMode::kGroundTruth: return "ground_truth";
    case MaskMode::kNone: return "none";
    case MaskMode::kSoft: return "soft";
  }
  throw std::logic_error("unreachable mask mode");
}

MaskMode parse_mask_mode(const std::string& name) {
  for (MaskMode m : {MaskMode::kLearned, MaskMode::kOracle, MaskMode::kGroundTruth, MaskMode::kNone, MaskMode::kSoft})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mask_mode: " + name);
}

std::vector<double> MaskProvider::logit_bias(const Environment& env) {
  return hard_mask_bias(env.num_actions(), valid_actions(env));
}

NoMask::NoMask(int num_actions) : all_(num_actions) { std::iota(all_.begin(), all_.end(), 0); }

LearnedMask::LearnedMask(mask::NValueModel model, double epsilon) : model_(std::move(model)), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("learned mask: epsilon must be positive");
}

const mask::ActionClusterSet& LearnedMask::clusters(const Observation& obs) {
  const std::string key = observation_key(obs);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, mask::cluster(mask::similarity(model_, obs), epsilon_)).first;
  return it->second;
}

std::vector<ActionId> LearnedMask::valid_actions(const Environment& env) {
  if (env.num_actions() != model_.num_actions()) throw std::invalid_argument("learned mask: action count mismatch");
  return mask::minimal_action_space(clusters(env.observation()));
}

SoftMask::SoftMask(mask::NValueModel model, double eta) : model_(std::move(model)), eta_(eta) {}

std::vector<ActionId> SoftMask::valid_actions(const Environment& env) {
  std::vector<ActionId> all(env.num_actions());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<double> SoftMask::logit_bias(const Environment& env) {
  const Observation obs = env.observation();
  const std::string key = observation_key(obs);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, soft_mask_bias(mask::similarity(model_, obs), eta_)).first;
  return it->second;
}

OracleMask::OracleMask(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("oracle mask: epsilon must be positive");
}

std::vector<ActionId> OracleMask::valid_actions(const Environment& env) {
  const auto* discrete = dynamic_cast<const DiscreteEnvironment*>(&env);
  if (discrete == nullptr) throw std::invalid_argument("oracle mask needs a discrete environment, got " + env.name());
  const std::uint64_t code = discrete->state_code();
  auto it = cache_.find(code);
  if (it == cache_.end())
    it = cache_.emplace(code, mask::minimal_action_space(mask::cluster(oracle::state_kl_matrix(*discrete), epsilon_)))
             .first;
  return it->second;
}

std::vector<ActionId> representatives(const ActionPartition& partition) {
  std::vector<ActionId> reps;
  for (const auto& members : partition) reps.push_back(*std::min_element(members.begin(), members.end()));
  std::sort(reps.begin(), reps.end());
  return reps;
}

std::vector<ActionId> GroundTruthMask::valid_actions(const Environment& env) {
  return representatives(env.ground_truth_clusters());
}

std::unique_ptr<MaskProvider> make_mask_provider(MaskMode mode, int num_actions, double epsilon, double eta,
                                                 std::optional<mask::NValueModel> model) {
  switch (mode) {
    case MaskMode::kNone: return std::make_unique<NoMask>(num_actions);
    case MaskMode::kOracle: return std::make_unique<OracleMask>(epsilon);
    case MaskMode::kGroundTruth: return std::make_unique<GroundTruthMask>();
    case MaskMode::kLearned:
      if (!model) throw std::invalid_argument("learned mask needs an N-value checkpoint");
      return std::make_unique<LearnedMask>(std::move(*model), epsilon);
    case MaskMode::kSoft:
      if (!model) throw std::invalid_argument("soft mask needs an N-value checkpoint");
      return std::make_unique<SoftMask>(std::move(*model), eta);
  }
  throw std::logic_error("unreachable mask mode");
}

}  // namespace npm::agents
