#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace airfed {

enum class Policy { fedavg, afl, ca_afl, greedy_topk };
enum class DatasetKind { idx_files, synthetic };

// How per-client test accuracy is measured: on the test samples whose labels
// occur in the client's training shard, or on the whole test set.
enum class ClientEval { label_matched, full_test };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct SimConfig {
  std::size_t n_clients = 100;
  std::size_t k_selected = 40;
  std::size_t rounds = 500;
  double bias_factor = 2.0;
  Policy policy = Policy::ca_afl;

  double lr_init = 0.1;
  double lr_decay = 0.998;
  double ascent_lr = 8e-3;
  std::size_t batch_size = 50;
  std::size_t ascent_batch_size = 50;

  std::size_t n_subcarriers = 64;
  std::size_t model_dim = 7850;
  double scaling_factor_watts = 0.5e-3;
  double symbol_period_s = 1e-3;
  double channel_floor = 0.05;
  double aircomp_noise_std = 0.0;

  std::uint64_t seed = 1;

  DatasetKind dataset = DatasetKind::synthetic;
  std::size_t shards_per_client = 1;
  ClientEval client_eval = ClientEval::label_matched;
  std::size_t eval_every = 1;
  std::string output_path = "airfed_rounds.csv";

  // dataset = idx_files
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;

  // dataset = synthetic
  std::size_t synthetic_train_samples = 60000;
  std::size_t synthetic_test_samples = 10000;
  std::size_t synthetic_dim = 784;
  std::size_t synthetic_classes = 10;
  double synthetic_noise_min = 0.2;
  double synthetic_noise_max = 1.0;
  double synthetic_noise_exponent = 8.0;
};

// Parses a JSON object of configuration keys. Absent keys keep their defaults;
// an empty document yields the all-default configuration.
SimConfig parse_config(std::string_view source);
SimConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the first offending key.
void validate(const SimConfig& cfg);

}  // namespace airfed
