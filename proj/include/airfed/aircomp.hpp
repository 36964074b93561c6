#pragma once

#include <span>

#include "airfed/model.hpp"
#include "airfed/rng.hpp"

namespace airfed {

struct AggregationResult {
  ModelParams mean_model;
  double noise_draw_norm = 0.0;
};

// Post-equalisation over-the-air average: (sum of models + z) / K with
// z ~ N(0, noise_std^2 I) and K the list length. No noise is drawn when
// noise_std is zero.
AggregationResult aggregate(std::span<const ModelParams> models, double noise_std, RandomStream& rng);

}  // namespace airfed
