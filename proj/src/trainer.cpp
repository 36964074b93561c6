#include "airfed/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "airfed/aircomp.hpp"

namespace airfed {

RandomStreams RandomStreams::from_seed(std::uint64_t seed) {
  return {seeded_rng(seed, "channel"), seeded_rng(seed, "descent-sampling"), seeded_rng(seed, "ascent-sampling"),
          seeded_rng(seed, "noise")};
}

BatchSampler::BatchSampler(std::vector<std::size_t> pool, std::size_t batch_size, RandomStream rng)
    : pool_(std::move(pool)), batch_size_(std::min(batch_size, pool_.size())), rng_(std::move(rng)) {
  if (pool_.empty()) throw std::invalid_argument("BatchSampler: empty sample pool");
  if (batch_size_ == 0) throw std::invalid_argument("BatchSampler: batch size must be positive");
  std::shuffle(pool_.begin(), pool_.end(), rng_);
}

std::vector<std::size_t> BatchSampler::next() {
  if (cursor_ + batch_size_ > pool_.size()) {
    std::shuffle(pool_.begin(), pool_.end(), rng_);
    cursor_ = 0;
  }
  const auto first = pool_.begin() + static_cast<std::ptrdiff_t>(cursor_);
  cursor_ += batch_size_;
  return {first, first + static_cast<std::ptrdiff_t>(batch_size_)};
}

BatchSampler descent_sampler(const std::vector<std::size_t>& shard, std::size_t batch_size, std::uint64_t seed,
                             std::size_t client) {
  return BatchSampler(shard, batch_size, seeded_rng(seed, "batch/" + std::to_string(client)));
}

TrainerState initial_state(const SimConfig& cfg, std::size_t n_features, std::size_t n_classes) {
  TrainerState s;
  s.global_model = ModelParams(n_features, n_classes);
  s.lambda = SimplexWeights::uniform(cfg.n_clients);
  s.lr = cfg.lr_init;
  return s;
}

bool uses_lambda(Policy policy) { return policy == Policy::afl || policy == Policy::ca_afl; }

SelectionDistribution selection_distribution(const TrainerState& state, const ChannelRealization& realization,
                                             const SimConfig& cfg) {
  const std::size_t n = cfg.n_clients;
  if (realization.n_clients != n || state.lambda.size() != n) {
    throw std::invalid_argument("selection_distribution: realization does not cover every client");
  }
  switch (cfg.policy) {
    case Policy::fedavg:
      return SelectionDistribution::from_probabilities(SimplexWeights::uniform(n).values, Policy::fedavg);
    case Policy::afl:
      return SelectionDistribution::from_probabilities(state.lambda.values, Policy::afl);
    case Policy::ca_afl:
      return poe_combine(state.lambda, bias_pmf(realization.effective, cfg.bias_factor));
    case Policy::greedy_topk: {
      std::vector<double> mass(n, 0.0);
      for (std::size_t id : top_k(realization.effective, cfg.k_selected)) {
        mass[id] = 1.0 / static_cast<double>(cfg.k_selected);
      }
      return SelectionDistribution::from_probabilities(std::move(mass), Policy::greedy_topk);
    }
  }
  throw std::logic_error("selection_distribution: unhandled policy");
}

std::vector<std::size_t> select_clients(const TrainerState& state, const ChannelRealization& realization,
                                        const SimConfig& cfg, RandomStream& rng) {
  switch (cfg.policy) {
    case Policy::greedy_topk:
      return top_k(realization.effective, cfg.k_selected);
    case Policy::fedavg:
      return sample_uniform(cfg.n_clients, cfg.k_selected, rng);
    case Policy::afl:
    case Policy::ca_afl:
      return sample_with_fallback(selection_distribution(state, realization, cfg), cfg.k_selected, rng);
  }
  throw std::logic_error("select_clients: unhandled policy");
}

LoadedData load_data(const SimConfig& cfg) {
  if (cfg.dataset == DatasetKind::idx_files) {
    return {load_idx(cfg.train_images, cfg.train_labels), load_idx(cfg.test_images, cfg.test_labels)};
  }
  RandomStream rng = seeded_rng(cfg.seed, "data");
  const SyntheticShape shape{cfg.synthetic_noise_min, cfg.synthetic_noise_max, cfg.synthetic_noise_exponent};
  Dataset train = synthesize(cfg.synthetic_train_samples, cfg.synthetic_dim, cfg.synthetic_classes, rng, shape);
  Dataset test = synthesize(cfg.synthetic_test_samples, cfg.synthetic_dim, cfg.synthetic_classes, rng, shape);
  return {std::move(train), std::move(test)};
}

Trainer::Trainer(SimConfig cfg, const Dataset& train, const Dataset& test)
    : Trainer(cfg, train, test,
              shard_by_label(train, test, cfg.n_clients, cfg.shards_per_client, cfg.client_eval)) {}

Trainer::Trainer(SimConfig cfg, const Dataset& train, const Dataset& test, ClientShards shards)
    : cfg_(std::move(cfg)),
      train_(train),
      test_(test),
      shards_(std::move(shards)),
      streams_(RandomStreams::from_seed(cfg_.seed)) {
  validate(cfg_);
  if (train.n_features != test.n_features) {
    throw std::invalid_argument("Trainer: train and test feature dimensions differ");
  }
  const std::size_t n_classes = std::max(train.n_classes, test.n_classes);
  const std::size_t expected = (train.n_features + 1) * n_classes;
  if (cfg_.model_dim != expected) {
    throw ConfigError("model_dim", "is " + std::to_string(cfg_.model_dim) + " but the data needs (" +
                                       std::to_string(train.n_features) + "+1)*" + std::to_string(n_classes) +
                                       " = " + std::to_string(expected));
  }
  if (shards_.assignments.size() != cfg_.n_clients || shards_.test_assignments.size() != cfg_.n_clients) {
    throw std::invalid_argument("Trainer: shard count does not match n_clients");
  }

  descent_batches_.reserve(cfg_.n_clients);
  ascent_batch_rngs_.reserve(cfg_.n_clients);
  for (std::size_t i = 0; i < cfg_.n_clients; ++i) {
    descent_batches_.push_back(descent_sampler(shards_.assignments[i], cfg_.batch_size, cfg_.seed, i));
    ascent_batch_rngs_.push_back(seeded_rng(cfg_.seed, "ascent-batch/" + std::to_string(i)));
  }
  state_ = initial_state(cfg_, train.n_features, n_classes);
}

const RoundRecord& Trainer::run_round() {
  if (state_.round >= cfg_.rounds) throw std::logic_error("run_round: all rounds have been run");
  const std::size_t t = state_.round;

  const ChannelRealization channels =
      draw_channels(cfg_.n_clients, cfg_.n_subcarriers, cfg_.channel_floor, streams_.channel);

  std::vector<std::size_t> selected = select_clients(state_, channels, cfg_, streams_.descent);
  std::sort(selected.begin(), selected.end());

  std::vector<ModelParams> local_models;
  local_models.reserve(selected.size());
  for (std::size_t id : selected) {
    const auto batch = descent_batches_[id].next();
    local_models.push_back(local_step(state_.global_model, state_.lr, batch, train_));
  }
  state_.global_model = aggregate(local_models, cfg_.aircomp_noise_std, streams_.noise).mean_model;

  std::vector<std::size_t> ascent;
  if (uses_lambda(cfg_.policy)) {
    ascent = sample_uniform(cfg_.n_clients, cfg_.k_selected, streams_.ascent);
    std::sort(ascent.begin(), ascent.end());
    std::map<std::size_t, double> losses;
    for (std::size_t id : ascent) {
      const auto& shard = shards_.assignments[id];
      std::vector<std::size_t> batch;
      for (std::size_t slot : sample_uniform(shard.size(), std::min(cfg_.ascent_batch_size, shard.size()),
                                             ascent_batch_rngs_[id])) {
        batch.push_back(shard[slot]);
      }
      losses[id] = loss(state_.global_model, batch, train_);
    }
    state_.lambda = ascent_update(state_.lambda, losses, cfg_.ascent_lr);
  }

  const auto& energy = state_.ledger.record(
      t, selected, channels, EnergyModel{cfg_.scaling_factor_watts, cfg_.model_dim, cfg_.symbol_period_s});

  RoundRecord record;
  record.round = t;
  record.round_energy_j = energy.total_j;
  record.cumulative_energy_j = state_.ledger.cumulative_j();
  record.selected_clients = std::move(selected);
  record.ascent_clients = std::move(ascent);

  const bool due = t == 0 || (t + 1) % cfg_.eval_every == 0 || t + 1 == cfg_.rounds;
  if (due) {
    evaluate(record);
  } else {
    const auto& prev = state_.history.back();
    record.avg_accuracy = prev.avg_accuracy;
    record.worst_accuracy = prev.worst_accuracy;
    record.accuracy_std = prev.accuracy_std;
  }

  state_.history.push_back(std::move(record));
  state_.round = t + 1;
  state_.lr = cfg_.lr_init * std::pow(cfg_.lr_decay, static_cast<double>(state_.round));
  return state_.history.back();
}

void Trainer::evaluate(RoundRecord& record) const {
  std::vector<char> correct(test_.size());
  for (std::size_t j = 0; j < test_.size(); ++j) {
    correct[j] = predict(state_.global_model, test_.row(j)) == test_.labels[j];
  }

  std::vector<double> acc(cfg_.n_clients);
  for (std::size_t i = 0; i < cfg_.n_clients; ++i) {
    const auto& idx = shards_.test_assignments[i];
    std::size_t hits = 0;
    for (std::size_t j : idx) hits += static_cast<std::size_t>(correct[j]);
    acc[i] = static_cast<double>(hits) / static_cast<double>(idx.size());
  }

  double mean = 0.0;
  for (double a : acc) mean += a;
  mean /= static_cast<double>(acc.size());
  double var = 0.0;
  for (double a : acc) var += (a - mean) * (a - mean);
  var /= static_cast<double>(acc.size());

  record.worst_accuracy = *std::min_element(acc.begin(), acc.end());
  // A rounded mean of equal entries can land one ulp below them.
  record.avg_accuracy = std::max(mean, record.worst_accuracy);
  record.accuracy_std = std::sqrt(var);
}

const std::vector<RoundRecord>& Trainer::run(const std::function<void(const RoundRecord&)>& sink) {
  while (state_.round < cfg_.rounds) {
    const auto& record = run_round();
    if (sink) sink(record);
  }
  return state_.history;
}

std::vector<RoundRecord> run(const SimConfig& cfg) {
  const LoadedData data = load_data(cfg);
  Trainer trainer(cfg, data.train, data.test);

  std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + cfg.output_path);
  RoundRecordWriter writer(out);
  return trainer.run([&](const RoundRecord& r) { writer.write(r); });
}

}  // namespace airfed
