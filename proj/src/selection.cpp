#include "airfed/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace airfed {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Order-independent sum: permuting the input cannot change the result.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("SimplexWeights::uniform: empty simplex");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

bool SimplexWeights::is_valid(double tol) const {
  if (values.empty()) return false;
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

SelectionDistribution SelectionDistribution::from_probabilities(std::vector<double> probs, Policy policy) {
  SelectionDistribution out;
  out.log_weights.resize(probs.size());
  std::transform(probs.begin(), probs.end(), out.log_weights.begin(),
                 [](double p) { return p > 0.0 ? std::log(p) : kNegInf; });
  out.values = std::move(probs);
  out.policy = policy;
  return out;
}

SelectionDistribution SelectionDistribution::from_log_weights(std::vector<double> log_weights, Policy policy) {
  double top = kNegInf;
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("SelectionDistribution: log-weight must be finite or -inf");
    }
    top = std::max(top, lw);
  }
  if (top == kNegInf) throw std::domain_error("SelectionDistribution: all masses are zero");

  SelectionDistribution out;
  out.values.resize(log_weights.size());
  std::transform(log_weights.begin(), log_weights.end(), out.values.begin(),
                 [top](double lw) { return std::exp(lw - top); });
  const double total = sorted_sum(out.values);
  for (double& v : out.values) v /= total;
  out.log_weights = std::move(log_weights);
  out.policy = policy;
  return out;
}

std::size_t SelectionDistribution::support() const noexcept {
  return static_cast<std::size_t>(std::count_if(log_weights.begin(), log_weights.end(),
                                                [](double lw) { return lw != kNegInf; }));
}

SelectionDistribution bias_pmf(std::span<const double> channels, double c_factor) {
  if (channels.empty()) throw std::invalid_argument("bias_pmf: no channels");
  if (!std::isfinite(c_factor)) throw std::invalid_argument("bias_pmf: bias factor must be finite");
  std::vector<double> lw(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (!(channels[i] > 0.0) || !std::isfinite(channels[i])) {
      throw std::invalid_argument("bias_pmf: channel " + std::to_string(i) + " is not positive");
    }
    lw[i] = c_factor == 0.0 ? 0.0 : c_factor * std::log(channels[i]);
  }
  return SelectionDistribution::from_log_weights(std::move(lw), Policy::ca_afl);
}

SelectionDistribution poe_combine(const SimplexWeights& lambda, const SelectionDistribution& y) {
  if (lambda.size() != y.size()) throw std::invalid_argument("poe_combine: size mismatch");
  if (all_equal(y.values)) return SelectionDistribution::from_probabilities(lambda.values, y.policy);
  if (all_equal(lambda.values)) return y;
  std::vector<double> lw(lambda.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const double l = lambda.values[i];
    lw[i] = (l > 0.0 && y.log_weights[i] != kNegInf) ? std::log(l) + y.log_weights[i] : kNegInf;
  }
  try {
    return SelectionDistribution::from_log_weights(std::move(lw), y.policy);
  } catch (const std::domain_error&) {
    throw std::domain_error("poe_combine: experts have disjoint support");
  }
}

std::vector<std::size_t> sample_without_replacement(const SelectionDistribution& rho, std::size_t k,
                                                    RandomStream& rng) {
  const std::size_t n = rho.size();
  if (k > n) {
    throw std::invalid_argument("sample_without_replacement: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " clients");
  }
  if (k > rho.support()) {
    throw std::invalid_argument("sample_without_replacement: k exceeds the support of the distribution");
  }

  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < n; ++i) {
    if (rho.log_weights[i] != kNegInf) remaining.push_back(i);
  }
  std::vector<double> weights(remaining.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> picked;
  picked.reserve(k);
  while (picked.size() < k) {
    double top = kNegInf;
    for (std::size_t id : remaining) top = std::max(top, rho.log_weights[id]);
    weights.resize(remaining.size());
    double total = 0.0;
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      weights[j] = std::exp(rho.log_weights[remaining[j]] - top);
      total += weights[j];
    }
    const double target = unit(rng) * total;
    std::size_t slot = remaining.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      acc += weights[j];
      if (target < acc && weights[j] > 0.0) {
        slot = j;
        break;
      }
    }
    picked.push_back(remaining[slot]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(slot));
  }
  return picked;
}

std::vector<std::size_t> sample_with_fallback(const SelectionDistribution& rho, std::size_t k,
                                              RandomStream& rng) {
  const std::size_t support = rho.support();
  if (k <= support) return sample_without_replacement(rho, k, rng);
  if (k > rho.size()) throw std::invalid_argument("sample_with_fallback: k exceeds the number of clients");

  std::vector<std::size_t> picked;
  std::vector<std::size_t> zero_mass;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    (rho.log_weights[i] != kNegInf ? picked : zero_mass).push_back(i);
  }
  for (std::size_t slot : sample_uniform(zero_mass.size(), k - support, rng)) {
    picked.push_back(zero_mass[slot]);
  }
  return picked;
}

std::vector<std::size_t> sample_uniform(std::size_t n, std::size_t k, RandomStream& rng) {
  if (k > n) throw std::invalid_argument("sample_uniform: k exceeds n");
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(k);
  return ids;
}

std::vector<std::size_t> top_k(std::span<const double> channels, std::size_t k) {
  if (k > channels.size()) throw std::invalid_argument("top_k: k exceeds the number of clients");
  std::vector<std::size_t> ids(channels.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return channels[a] > channels[b]; });
  ids.resize(k);
  return ids;
}

SimplexWeights project_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());

  double prefix = 0.0;
  double threshold = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    prefix += sorted[r];
    const double candidate = (prefix - 1.0) / static_cast<double>(r + 1);
    if (sorted[r] - candidate > 0.0) threshold = candidate;
  }

  SimplexWeights out;
  out.values.resize(v.size());
  std::transform(v.begin(), v.end(), out.values.begin(),
                 [threshold](double x) { return std::max(x - threshold, 0.0); });
  return out;
}

SimplexWeights ascent_update(const SimplexWeights& lambda, const std::map<std::size_t, double>& losses,
                             double gamma) {
  std::vector<double> shifted = lambda.values;
  for (const auto& [id, value] : losses) {
    if (id >= shifted.size()) throw std::out_of_range("ascent_update: unknown client id " + std::to_string(id));
    shifted[id] += gamma * value;
  }
  return project_simplex(shifted);
}

}  // namespace airfed
