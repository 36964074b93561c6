#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "airfed/config.hpp"
#include "airfed/rng.hpp"

namespace airfed {

// Row-major sample matrix with integer class labels.
struct Dataset {
  std::vector<double> features;
  std::vector<std::size_t> labels;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
};

// Reads an IDX image/label pair (gzip or raw). Pixels are scaled to [0,1].
// Throws std::runtime_error naming the offending file.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

struct SyntheticShape {
  double noise_min = 0.2;
  double noise_max = 1.0;
  double noise_exponent = 8.0;
};

// Balanced Gaussian blobs. Class k has mean (1 + k / d) on coordinate k mod d,
// so neighbouring means sit at unit or sqrt(2) distance, and isotropic noise
// sigma_k = noise_min + (noise_max - noise_min) * (k / (n_classes - 1))^noise_exponent.
// An exponent of 1 grades difficulty linearly; larger exponents leave most
// classes easy and a few late classes hard.
Dataset synthesize(std::size_t n_samples, std::size_t d, std::size_t n_classes, RandomStream& rng,
                   SyntheticShape shape = {});

struct ClientShards {
  std::vector<std::vector<std::size_t>> assignments;
  std::vector<std::vector<std::size_t>> test_assignments;
  std::size_t dropped = 0;  // training samples left over after equal-size sharding
};

// Sort by label (stable), cut into n_clients * shards_per_client equal shards,
// and deal them out in order. Leftover samples at the tail are dropped.
ClientShards shard_by_label(const Dataset& ds, const Dataset& test_ds, std::size_t n_clients,
                            std::size_t shards_per_client, ClientEval eval = ClientEval::label_matched);

}  // namespace airfed
