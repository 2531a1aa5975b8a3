#include "npm/oracle/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace npm::oracle {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": invalid probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

// KL between two sparse rows sorted by state.
double sparse_kl(const SparseRow& p, const SparseRow& q) {
  double total = 0.0;
  std::size_t j = 0;
  for (const auto& [state, pv] : p) {
    while (j < q.size() && q[j].first < state) ++j;
    if (j == q.size() || q[j].first != state) return kInfinite;
    total += pv * std::log(pv / q[j].second);
  }
  return total;
}

void check_full_support(const TabularPolicy& pi, int s) {
  for (double p : pi.row(s))
    if (!(p > 0.0)) throw std::domain_error("exact_similarity: pi(a|s) must be positive for every action");
}

}  // namespace

double exact_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("exact_kl: size mismatch");
  check_distribution(p, "exact_kl p");
  check_distribution(q, "exact_kl q");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInfinite;
    total += p[i] * std::log(p[i] / q[i]);
  }
  return total;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

std::vector<double> exact_inverse_posterior(const TabularMDP& mdp, const TabularPolicy& pi, int s,
                                            int s_next) {
  const int n = mdp.num_actions();
  std::vector<double> joint(n);
  double marginal = 0.0;
  for (int a = 0; a < n; ++a) {
    joint[a] = pi(s, a) * mdp.prob(s, a, s_next);
    marginal += joint[a];
  }
  if (!(marginal > 0.0)) throw std::domain_error("exact_inverse_posterior: successor unreachable under pi");
  for (double& v : joint) v /= marginal;
  return joint;
}

std::vector<double> exact_nvalues(const TabularMDP& mdp, const TabularPolicy& pi, int s) {
  check_full_support(pi, s);
  const int n = mdp.num_actions();
  std::vector<double> nvals(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& [next, p_next] : mdp.row(s, i)) {
      const std::vector<double> post = exact_inverse_posterior(mdp, pi, s, next);
      for (int j = 0; j < n; ++j) {
        double& cell = nvals[static_cast<std::size_t>(i) * n + j];
        if (post[j] == 0.0) cell = -kInfinite;
        else if (std::isfinite(cell)) cell += p_next * std::log(post[j] / pi(s, j));
      }
    }
  }
  return nvals;
}

mask::SimilarityMatrix exact_kl_matrix(const TabularMDP& mdp, int s) {
  const int n = mdp.num_actions();
  auto m = mask::SimilarityMatrix::zeros(n, std::to_string(s));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m.at(i, j) = sparse_kl(mdp.row(s, i), mdp.row(s, j));
  return m;
}

ExactSimilarity exact_similarity(const TabularMDP& mdp, const TabularPolicy& pi, int s) {
  check_full_support(pi, s);
  ExactSimilarity out;
  out.matrix = exact_kl_matrix(mdp, s);
  const std::vector<double> nvals = exact_nvalues(mdp, pi, s);
  const int n = mdp.num_actions();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double kl = out.matrix.at(i, j);
      if (std::isinf(kl)) {
        ++out.skipped_pairs;
        continue;
      }
      const double via_n = nvals[static_cast<std::size_t>(i) * n + i] - nvals[static_cast<std::size_t>(i) * n + j];
      out.max_identity_error = std::max(out.max_identity_error, std::abs(kl - via_n));
      ++out.checked_pairs;
    }
  }
  return out;
}

}  // namespace npm::oracle
