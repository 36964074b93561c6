#include "airfed/aircomp.hpp"

#include <cmath>
#include <stdexcept>

namespace airfed {

AggregationResult aggregate(std::span<const ModelParams> models, double noise_std, RandomStream& rng) {
  if (models.empty()) throw std::invalid_argument("aggregate: no models to combine");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("aggregate: noise_std must be non-negative");
  for (const auto& m : models) {
    if (!m.same_shape(models.front())) throw std::invalid_argument("aggregate: model shape mismatch");
  }

  AggregationResult out{ModelParams(models.front().n_features(), models.front().n_classes()), 0.0};
  auto sum = out.mean_model.values();
  for (const auto& m : models) {
    const auto v = m.values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }

  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    double sq = 0.0;
    for (double& s : sum) {
      const double z = noise(rng);
      sq += z * z;
      s += z;
    }
    out.noise_draw_norm = std::sqrt(sq);
  }

  const double k = static_cast<double>(models.size());
  for (double& s : sum) s /= k;
  return out;
}

}  // namespace airfed
