#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "airfed/rng.hpp"

namespace airfed {

// One block-fading draw: |h_{i,b}| for every client i and subcarrier b, and
// the per-client effective channel used for both scheduling and energy.
struct ChannelRealization {
  std::size_t n_clients = 0;
  std::size_t n_subcarriers = 0;
  std::vector<double> per_subcarrier;  // n_clients x n_subcarriers, row-major
  std::vector<double> effective;

  std::span<const double> row(std::size_t client) const {
    return {per_subcarrier.data() + client * n_subcarriers, n_subcarriers};
  }
};

// Magnitudes of CN(0,1) draws, resampled until they reach `floor`.
ChannelRealization draw_channels(std::size_t n_clients, std::size_t n_subcarriers, double floor,
                                 RandomStream& rng);

// (mean_b 1/|h_b|^2)^(-1/2)
double effective_channel(std::span<const double> row);

// Scaling-and-inversion energy psi * M * tau / |h|^2, in joules.
double upload_energy(double effective_h, double psi_w, std::size_t model_dim, double symbol_period_s);

struct EnergyModel {
  double psi_w = 0.5e-3;
  std::size_t model_dim = 7850;
  double symbol_period_s = 1e-3;
};

class EnergyLedger {
 public:
  struct Round {
    std::size_t round = 0;
    std::vector<std::pair<std::size_t, double>> per_client;
    double total_j = 0.0;
  };

  // Charges every client in `selected` for its upload this round.
  const Round& record(std::size_t round, std::span<const std::size_t> selected,
                      const ChannelRealization& realization, const EnergyModel& model);

  const std::vector<Round>& rounds() const noexcept { return rounds_; }
  double cumulative_j() const noexcept { return cumulative_j_; }

 private:
  std::vector<Round> rounds_;
  double cumulative_j_ = 0.0;
};

}  // namespace airfed
