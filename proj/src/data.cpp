#include "airfed/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include <zlib.h>

namespace airfed {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// gzread passes uncompressed files through unchanged.
class GzReader {
 public:
  explicit GzReader(const std::filesystem::path& path)
      : path_(path.string()), file_(gzopen(path_.c_str(), "rb"), &gzclose) {
    if (!file_) throw std::runtime_error("cannot open IDX file " + path_);
  }

  void read(void* dst, std::size_t n) {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
      const int got = gzread(file_.get(), out, chunk);
      if (got <= 0) throw std::runtime_error("truncated IDX file " + path_);
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  std::uint32_t be32() {
    std::array<unsigned char, 4> b{};
    read(b.data(), b.size());
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<gzFile_s, decltype(&gzclose)> file_;
};

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  GzReader images(images_path);
  GzReader labels(labels_path);

  if (images.be32() != kImageMagic) throw std::runtime_error("bad IDX image magic in " + images.path());
  if (labels.be32() != kLabelMagic) throw std::runtime_error("bad IDX label magic in " + labels.path());

  const std::size_t n_images = images.be32();
  const std::size_t rows = images.be32();
  const std::size_t cols = images.be32();
  const std::size_t n_labels = labels.be32();
  if (n_images != n_labels) {
    throw std::runtime_error("sample count mismatch: " + images.path() + " has " + std::to_string(n_images) +
                             ", " + labels.path() + " has " + std::to_string(n_labels));
  }

  Dataset ds;
  ds.n_features = rows * cols;
  std::vector<unsigned char> pixels(n_images * ds.n_features);
  images.read(pixels.data(), pixels.size());
  ds.features.resize(pixels.size());
  std::transform(pixels.begin(), pixels.end(), ds.features.begin(),
                 [](unsigned char p) { return static_cast<double>(p) / 255.0; });

  std::vector<unsigned char> raw_labels(n_labels);
  labels.read(raw_labels.data(), raw_labels.size());
  ds.labels.assign(raw_labels.begin(), raw_labels.end());
  ds.n_classes = ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  return ds;
}

Dataset synthesize(std::size_t n_samples, std::size_t d, std::size_t n_classes, RandomStream& rng,
                   SyntheticShape shape) {
  if (n_samples == 0 || d == 0 || n_classes == 0) {
    throw std::invalid_argument("synthesize: all sizes must be positive");
  }
  auto mean_height = [d](std::size_t k) { return 1.0 + static_cast<double>(k / d); };
  auto noise_of = [&](std::size_t k) {
    if (n_classes == 1) return shape.noise_min;
    const double frac = static_cast<double>(k) / static_cast<double>(n_classes - 1);
    return shape.noise_min + (shape.noise_max - shape.noise_min) * std::pow(frac, shape.noise_exponent);
  };

  Dataset ds;
  ds.n_features = d;
  ds.n_classes = n_classes;
  ds.features.resize(n_samples * d);
  ds.labels.resize(n_samples);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t k = i % n_classes;
    ds.labels[i] = k;
    const double sigma = noise_of(k);
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = (j == k % d) ? mean_height(k) : 0.0;
      ds.features[i * d + j] = mean + sigma * gauss(rng);
    }
  }
  return ds;
}

ClientShards shard_by_label(const Dataset& ds, const Dataset& test_ds, std::size_t n_clients,
                            std::size_t shards_per_client, ClientEval eval) {
  if (ds.size() == 0) throw std::invalid_argument("shard_by_label: empty training dataset");
  if (test_ds.size() == 0) throw std::invalid_argument("shard_by_label: empty test dataset");
  if (n_clients == 0 || shards_per_client == 0) {
    throw std::invalid_argument("shard_by_label: need at least one client and one shard each");
  }

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.labels[a] < ds.labels[b]; });

  const std::size_t n_shards = n_clients * shards_per_client;
  const std::size_t shard_size = ds.size() / n_shards;
  if (shard_size == 0) {
    throw std::invalid_argument("shard_by_label: " + std::to_string(ds.size()) + " samples cannot fill " +
                                std::to_string(n_shards) + " shards");
  }

  ClientShards out;
  out.dropped = ds.size() - shard_size * n_shards;
  if (out.dropped > 0) {
    std::clog << "warning: dropping " << out.dropped << " training samples that do not fill a shard\n";
  }
  out.assignments.resize(n_clients);
  out.test_assignments.resize(n_clients);
  for (std::size_t c = 0; c < n_clients; ++c) {
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(c * shards_per_client * shard_size);
    out.assignments[c].assign(first, first + static_cast<std::ptrdiff_t>(shards_per_client * shard_size));

    std::set<std::size_t> labels;
    for (std::size_t idx : out.assignments[c]) labels.insert(ds.labels[idx]);
    auto& test = out.test_assignments[c];
    for (std::size_t j = 0; j < test_ds.size(); ++j) {
      if (eval == ClientEval::full_test || labels.contains(test_ds.labels[j])) test.push_back(j);
    }
    if (test.empty()) {
      throw std::invalid_argument("shard_by_label: client " + std::to_string(c) +
                                  " has no test samples with its training labels");
    }
  }
  return out;
}

}  // namespace airfed
