#pragma once

#include <span>
#include <vector>

#include "npm/core/types.hpp"
#include "npm/mask/similarity.hpp"

namespace npm::agents {

/// Argmax of q over `valid`, ties to the lowest index. Throws
/// std::invalid_argument when `valid` is empty or out of range.
ActionId masked_argmax(std::span<const double> q, std::span<const ActionId> valid);

/// Zeroes `invalid` entries and renormalises the rest. Throws
/// std::invalid_argument when no probability mass remains.
std::vector<double> masked_probs(std::span<const double> pi, std::span<const ActionId> invalid);

/// out_i proportional to pi_i * exp(eta * mean_{j != i} m[i][j]).
std::vector<double> soft_mask_probs(std::span<const double> pi, const mask::SimilarityMatrix& m, double eta);

/// Logit offsets equivalent to soft_mask_probs: eta * mean_{j != i} m[i][j].
std::vector<double> soft_mask_bias(const mask::SimilarityMatrix& m, double eta);

/// Logit offsets 0 for valid actions and -infinity for the rest.
std::vector<double> hard_mask_bias(int num_actions, std::span<const ActionId> valid);

/// Actions in [0, num_actions) not listed in `valid`.
std::vector<ActionId> complement(int num_actions, std::span<const ActionId> valid);

}  // namespace npm::agents
