#include "airfed/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace airfed {

ModelParams::ModelParams(std::size_t n_features, std::size_t n_classes, std::vector<double> values)
    : n_features_(n_features), n_classes_(n_classes), values_(std::move(values)) {
  if (values_.size() != (n_features + 1) * n_classes) {
    throw std::invalid_argument("ModelParams: expected " + std::to_string((n_features + 1) * n_classes) +
                                " values, got " + std::to_string(values_.size()));
  }
}

bool ModelParams::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void check_batch(const ModelParams& w, SampleIndices batch, const Dataset& ds, const char* what) {
  if (batch.empty()) throw std::invalid_argument(std::string(what) + ": empty batch");
  if (w.n_features() != ds.n_features || w.n_classes() < ds.n_classes) {
    throw std::invalid_argument(std::string(what) + ": model shape does not match dataset");
  }
  for (std::size_t i : batch) {
    if (i >= ds.size()) throw std::out_of_range(std::string(what) + ": sample index out of range");
  }
}

// Softmax in place; returns log-sum-exp of the original logits.
double softmax_inplace(std::span<double> z) {
  const double shift = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - shift);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return shift + std::log(sum);
}

}  // namespace

void logits(const ModelParams& w, std::span<const double> x, std::span<double> out) {
  const std::size_t c = w.n_classes();
  const auto params = w.values();
  const auto bias = params.subspan(w.n_features() * c, c);
  std::copy(bias.begin(), bias.end(), out.begin());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* row = params.data() + j * c;
    for (std::size_t k = 0; k < c; ++k) out[k] += xj * row[k];
  }
}

double loss(const ModelParams& w, SampleIndices batch, const Dataset& ds) {
  check_batch(w, batch, ds, "loss");
  std::vector<double> z(w.n_classes());
  double total = 0.0;
  for (std::size_t i : batch) {
    logits(w, ds.row(i), z);
    const double label_logit = z[ds.labels[i]];
    total += softmax_inplace(z) - label_logit;
  }
  return total / static_cast<double>(batch.size());
}

ModelParams gradient(const ModelParams& w, SampleIndices batch, const Dataset& ds) {
  check_batch(w, batch, ds, "gradient");
  const std::size_t c = w.n_classes();
  const std::size_t d = w.n_features();
  ModelParams g(d, c);
  auto grad = g.values();
  std::vector<double> p(c);
  for (std::size_t i : batch) {
    logits(w, ds.row(i), p);
    softmax_inplace(p);
    p[ds.labels[i]] -= 1.0;
    const auto x = ds.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      double* row = grad.data() + j * c;
      for (std::size_t k = 0; k < c; ++k) row[k] += xj * p[k];
    }
    double* bias = grad.data() + d * c;
    for (std::size_t k = 0; k < c; ++k) bias[k] += p[k];
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (double& v : grad) v *= scale;
  return g;
}

ModelParams local_step(const ModelParams& w, double lr, SampleIndices batch, const Dataset& ds) {
  if (!(lr >= 0.0)) throw std::invalid_argument("local_step: learning rate must be non-negative");
  ModelParams next = gradient(w, batch, ds);
  const auto base = w.values();
  auto out = next.values();
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = base[m] - lr * out[m];
  return next;
}

std::size_t predict(const ModelParams& w, std::span<const double> x) {
  std::vector<double> z(w.n_classes());
  logits(w, x, z);
  // max_element returns the first maximum.
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

double accuracy(const ModelParams& w, SampleIndices indices, const Dataset& ds) {
  if (indices.empty()) throw std::invalid_argument("accuracy: empty index list");
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    if (predict(w, ds.row(i)) == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace airfed
