#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "airfed/channel.hpp"
#include "airfed/config.hpp"
#include "airfed/data.hpp"
#include "airfed/model.hpp"
#include "airfed/record.hpp"
#include "airfed/rng.hpp"
#include "airfed/selection.hpp"

namespace airfed {

// Per-consumer random streams, one per label.
struct RandomStreams {
  RandomStream channel;
  RandomStream descent;
  RandomStream ascent;
  RandomStream noise;

  static RandomStreams from_seed(std::uint64_t seed);
};

// Epoch-style mini-batches over one client's shard: drawn without
// replacement, reshuffled once fewer than a full batch remain.
class BatchSampler {
 public:
  BatchSampler(std::vector<std::size_t> pool, std::size_t batch_size, RandomStream rng);

  std::vector<std::size_t> next();

 private:
  std::vector<std::size_t> pool_;
  std::size_t batch_size_;
  std::size_t cursor_ = 0;
  RandomStream rng_;
};

BatchSampler descent_sampler(const std::vector<std::size_t>& shard, std::size_t batch_size, std::uint64_t seed,
                             std::size_t client);

struct TrainerState {
  ModelParams global_model;
  SimplexWeights lambda;
  std::size_t round = 0;
  double lr = 0.0;
  EnergyLedger ledger;
  std::vector<RoundRecord> history;
};

TrainerState initial_state(const SimConfig& cfg, std::size_t n_features, std::size_t n_classes);

bool uses_lambda(Policy policy);

// rho^(t) for the configured policy. fedavg is uniform, afl is lambda, ca_afl
// is the product of lambda and the channel-bias PMF, greedy_topk spreads 1/K
// over the K strongest channels.
SelectionDistribution selection_distribution(const TrainerState& state, const ChannelRealization& realization,
                                             const SimConfig& cfg);

// D^(t), in draw order.
std::vector<std::size_t> select_clients(const TrainerState& state, const ChannelRealization& realization,
                                        const SimConfig& cfg, RandomStream& rng);

struct LoadedData {
  Dataset train;
  Dataset test;
};

LoadedData load_data(const SimConfig& cfg);

class Trainer {
 public:
  Trainer(SimConfig cfg, const Dataset& train, const Dataset& test);
  Trainer(SimConfig cfg, const Dataset& train, const Dataset& test, ClientShards shards);

  const TrainerState& state() const noexcept { return state_; }
  const ClientShards& shards() const noexcept { return shards_; }
  const SimConfig& config() const noexcept { return cfg_; }

  // One pass of the descent-ascent loop. Throws once every round has run.
  const RoundRecord& run_round();

  // Runs the remaining rounds, handing each record to `sink` if given.
  const std::vector<RoundRecord>& run(const std::function<void(const RoundRecord&)>& sink = {});

 private:
  void evaluate(RoundRecord& record) const;

  SimConfig cfg_;
  const Dataset& train_;
  const Dataset& test_;
  ClientShards shards_;
  RandomStreams streams_;
  std::vector<BatchSampler> descent_batches_;
  std::vector<RandomStream> ascent_batch_rngs_;
  TrainerState state_;
};

// Loads data, runs all rounds and writes the round table to cfg.output_path.
std::vector<RoundRecord> run(const SimConfig& cfg);

}  // namespace airfed
