#pragma once

#include <limits>
#include <span>
#include <vector>

#include "npm/mask/similarity.hpp"
#include "npm/oracle/tabular_mdp.hpp"

namespace npm::oracle {

/// Value returned by exact_kl when p puts mass where q has none.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// KL(p || q) in nats with 0 ln(0/q) = 0; kInfinite on support mismatch.
/// Throws std::invalid_argument unless both are distributions of equal size.
double exact_kl(std::span<const double> p, std::span<const double> q);

/// Total variation 0.5 * sum |p_i - q_i|.
double total_variation(std::span<const double> p, std::span<const double> q);

/// Bayes posterior over actions given (s, s') under policy pi.
/// Throws std::domain_error when s' is unreachable from s under pi.
std::vector<double> exact_inverse_posterior(const TabularMDP& mdp, const TabularPolicy& pi, int s,
                                            int s_next);

/// Exact N(s, a_i, a_j) = E_{s' ~ P(.|s,a_i)} ln(posterior(a_j|s,s') / pi(a_j|s)).
/// kInfinite-signed values appear when the posterior of a_j vanishes on the
/// support of a_i (returned as -infinity).
std::vector<double> exact_nvalues(const TabularMDP& mdp, const TabularPolicy& pi, int s);

struct ExactSimilarity {
  /// Direct KL matrix (route a).
  mask::SimilarityMatrix matrix;
  /// Largest |KL - (N(ii) - N(ij))| over finite pairs.
  double max_identity_error = 0.0;
  int checked_pairs = 0;
  /// Pairs with infinite KL, where the N-form route is skipped.
  int skipped_pairs = 0;
};

/// Similarity matrix at state s computed twice: directly from the transition
/// rows and through the inverse-posterior N-form. Requires pi(a|s) > 0 for
/// every action (throws std::domain_error otherwise).
ExactSimilarity exact_similarity(const TabularMDP& mdp, const TabularPolicy& pi, int s);

/// Direct KL matrix only; no policy needed.
mask::SimilarityMatrix exact_kl_matrix(const TabularMDP& mdp, int s);

}  // namespace npm::oracle
