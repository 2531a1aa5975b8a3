#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "npm/core/environment.hpp"
#include "npm/mask/models.hpp"
#include "npm/mask/similarity.hpp"

namespace npm::agents {

enum class MaskMode { kLearned, kOracle, kGroundTruth, kNone, kSoft };
std::string to_string(MaskMode mode);
MaskMode parse_mask_mode(const std::string& name);

/// Supplies the minimal action set at the environment's current state.
class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  virtual MaskMode mode() const = 0;
  /// Sorted, non-empty set of representatives.
  virtual std::vector<ActionId> valid_actions(const Environment& env) = 0;
  /// Additive logit offsets for policy learners; -infinity masks an action.
  virtual std::vector<double> logit_bias(const Environment& env);
};

class NoMask final : public MaskProvider {
 public:
  explicit NoMask(int num_actions);
  MaskMode mode() const override { return MaskMode::kNone; }
  std::vector<ActionId> valid_actions(const Environment&) override { return all_; }

 private:
  std::vector<ActionId> all_;
};

/// Clusters the learned similarity matrix; matrices are cached by
/// observation bytes for the lifetime of the provider (one checkpoint).
class LearnedMask final : public MaskProvider {
 public:
  LearnedMask(mask::NValueModel model, double epsilon);
  MaskMode mode() const override { return MaskMode::kLearned; }
  std::vector<ActionId> valid_actions(const Environment& env) override;
  const mask::ActionClusterSet& clusters(const Observation& obs);
  const mask::NValueModel& model() const { return model_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  mask::NValueModel model_;
  double epsilon_;
  std::unordered_map<std::string, mask::ActionClusterSet> cache_;
};

/// Keeps every action but reweights the policy by average similarity.
class SoftMask final : public MaskProvider {
 public:
  SoftMask(mask::NValueModel model, double eta);
  MaskMode mode() const override { return MaskMode::kSoft; }
  std::vector<ActionId> valid_actions(const Environment& env) override;
  std::vector<double> logit_bias(const Environment& env) override;

 private:
  mask::NValueModel model_;
  double eta_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

/// Clusters exact transition KLs; requires a DiscreteEnvironment.
class OracleMask final : public MaskProvider {
 public:
  explicit OracleMask(double epsilon);
  MaskMode mode() const override { return MaskMode::kOracle; }
  std::vector<ActionId> valid_actions(const Environment& env) override;

 private:
  double epsilon_;
  std::unordered_map<std::uint64_t, std::vector<ActionId>> cache_;
};

/// Representatives of the environment's labelled redundancy classes.
class GroundTruthMask final : public MaskProvider {
 public:
  MaskMode mode() const override { return MaskMode::kGroundTruth; }
  std::vector<ActionId> valid_actions(const Environment& env) override;
};

/// Lowest member of each class.
std::vector<ActionId> representatives(const ActionPartition& partition);

/// Builds the provider for `mode`. Learned and soft modes need `model`
/// (std::invalid_argument otherwise).
std::unique_ptr<MaskProvider> make_mask_provider(MaskMode mode, int num_actions, double epsilon, double eta,
                                                 std::optional<mask::NValueModel> model);

}  // namespace npm::agents
