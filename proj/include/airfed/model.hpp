#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "airfed/data.hpp"

namespace airfed {

// Multinomial logistic regression weights, (n_features + 1) x n_classes,
// row-major. The last row is the bias (input coordinate fixed to 1).
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(std::size_t n_features, std::size_t n_classes)
      : n_features_(n_features), n_classes_(n_classes), values_((n_features + 1) * n_classes, 0.0) {}
  ModelParams(std::size_t n_features, std::size_t n_classes, std::vector<double> values);

  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& at(std::size_t input, std::size_t cls) { return values_[input * n_classes_ + cls]; }
  double at(std::size_t input, std::size_t cls) const { return values_[input * n_classes_ + cls]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const ModelParams& other) const noexcept {
    return n_features_ == other.n_features_ && n_classes_ == other.n_classes_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<double> values_;
};

using SampleIndices = std::span<const std::size_t>;

void logits(const ModelParams& w, std::span<const double> x, std::span<double> out);

// Mean softmax cross-entropy over the batch.
double loss(const ModelParams& w, SampleIndices batch, const Dataset& ds);

ModelParams gradient(const ModelParams& w, SampleIndices batch, const Dataset& ds);

// w - lr * gradient(w); the input is left untouched.
ModelParams local_step(const ModelParams& w, double lr, SampleIndices batch, const Dataset& ds);

// Argmax class, ties resolved toward the lowest id.
std::size_t predict(const ModelParams& w, std::span<const double> x);

double accuracy(const ModelParams& w, SampleIndices indices, const Dataset& ds);

}  // namespace airfed
