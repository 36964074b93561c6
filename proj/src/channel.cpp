#include "airfed/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace airfed {

ChannelRealization draw_channels(std::size_t n_clients, std::size_t n_subcarriers, double floor,
                                 RandomStream& rng) {
  if (!(floor >= 0.0 && floor < 1.0)) throw std::invalid_argument("draw_channels: floor must lie in [0, 1)");
  if (n_subcarriers == 0) throw std::invalid_argument("draw_channels: need at least one subcarrier");

  ChannelRealization out;
  out.n_clients = n_clients;
  out.n_subcarriers = n_subcarriers;
  out.per_subcarrier.resize(n_clients * n_subcarriers);
  out.effective.resize(n_clients);

  // Real and imaginary parts each carry half of the unit power.
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));
  for (double& h : out.per_subcarrier) {
    do {
      const double re = component(rng);
      const double im = component(rng);
      h = std::hypot(re, im);
    } while (h < floor || h == 0.0);
  }
  for (std::size_t i = 0; i < n_clients; ++i) out.effective[i] = effective_channel(out.row(i));
  return out;
}

double effective_channel(std::span<const double> row) {
  if (row.empty()) throw std::invalid_argument("effective_channel: empty row");
  double inv_power = 0.0;
  for (double h : row) {
    if (!(h > 0.0)) throw std::invalid_argument("effective_channel: non-positive subcarrier magnitude");
    inv_power += 1.0 / (h * h);
  }
  return 1.0 / std::sqrt(inv_power / static_cast<double>(row.size()));
}

double upload_energy(double effective_h, double psi_w, std::size_t model_dim, double symbol_period_s) {
  if (!(effective_h > 0.0)) throw std::invalid_argument("upload_energy: channel must be positive");
  const double per_symbol_j = psi_w * symbol_period_s;
  return per_symbol_j * static_cast<double>(model_dim) / (effective_h * effective_h);
}

const EnergyLedger::Round& EnergyLedger::record(std::size_t round, std::span<const std::size_t> selected,
                                                const ChannelRealization& realization,
                                                const EnergyModel& model) {
  Round entry;
  entry.round = round;
  entry.per_client.reserve(selected.size());
  for (std::size_t id : selected) {
    if (id >= realization.n_clients) {
      throw std::out_of_range("EnergyLedger: unknown client id " + std::to_string(id));
    }
    const double e = upload_energy(realization.effective[id], model.psi_w, model.model_dim,
                                   model.symbol_period_s);
    entry.per_client.emplace_back(id, e);
    entry.total_j += e;
  }
  cumulative_j_ += entry.total_j;
  rounds_.push_back(std::move(entry));
  return rounds_.back();
}

}  // namespace airfed
