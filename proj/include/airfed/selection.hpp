#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "airfed/config.hpp"
#include "airfed/rng.hpp"

namespace airfed {

// A point of the probability simplex: the robustness weights over clients.
struct SimplexWeights {
  std::vector<double> values;

  static SimplexWeights uniform(std::size_t n);
  std::size_t size() const noexcept { return values.size(); }
  bool is_valid(double tol = 1e-9) const;
};

// Client sampling distribution. `log_weights` holds unnormalised log-masses
// (-inf for zero mass); sampling reads them, not `values`, and stays exact
// when `values` underflow at large bias factors.
struct SelectionDistribution {
  std::vector<double> values;
  std::vector<double> log_weights;
  Policy policy = Policy::ca_afl;

  static SelectionDistribution from_probabilities(std::vector<double> probs, Policy policy);
  static SelectionDistribution from_log_weights(std::vector<double> log_weights, Policy policy);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t support() const noexcept;
};

// Energy expert: y_i = h_i^C / sum_j h_j^C, evaluated in log space.
SelectionDistribution bias_pmf(std::span<const double> channels, double c_factor);

// Product of experts: rho_i = lambda_i y_i / sum_j lambda_j y_j. A uniform
// expert cancels exactly, returning the other one unchanged.
SelectionDistribution poe_combine(const SimplexWeights& lambda, const SelectionDistribution& y);

// k distinct ids. Each draw is taken from the remaining ids with their masses
// renormalised, so the second draw has marginal sum_{j!=i} rho_j/(1-rho_j) rho_i.
// Throws if k exceeds the support of rho.
std::vector<std::size_t> sample_without_replacement(const SelectionDistribution& rho, std::size_t k,
                                                    RandomStream& rng);

// As above, but when rho has fewer than k positive entries all of them are
// taken and the remaining slots are filled uniformly from the zero-mass ids.
std::vector<std::size_t> sample_with_fallback(const SelectionDistribution& rho, std::size_t k,
                                              RandomStream& rng);

// k ids drawn uniformly without replacement from {0, ..., n-1}.
std::vector<std::size_t> sample_uniform(std::size_t n, std::size_t k, RandomStream& rng);

// Ids of the k largest channels, largest first; ties go to the lower id.
std::vector<std::size_t> top_k(std::span<const double> channels, std::size_t k);

// Euclidean projection onto the probability simplex (sort and threshold).
SimplexWeights project_simplex(std::span<const double> v);

// lambda_i += gamma * loss_i for each reported client, then re-project.
SimplexWeights ascent_update(const SimplexWeights& lambda, const std::map<std::size_t, double>& losses,
                             double gamma);

}  // namespace airfed
