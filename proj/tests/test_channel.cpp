#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airfed/channel.hpp"

using namespace airfed;

TEST_CASE("draw_channels respects the truncation floor") {
  auto rng = seeded_rng(1, "channel");
  const auto r = draw_channels(100, 1000, 0.05, rng);
  CHECK(r.per_subcarrier.size() == 100000);
  CHECK(*std::min_element(r.per_subcarrier.begin(), r.per_subcarrier.end()) >= 0.05);
  for (std::size_t i = 0; i < r.n_clients; ++i) {
    CHECK(r.effective[i] == doctest::Approx(effective_channel(r.row(i))).epsilon(1e-12));
  }
}

TEST_CASE("untruncated draws have unit mean-square magnitude") {
  auto rng = seeded_rng(2, "channel");
  const auto r = draw_channels(1000, 1000, 0.0, rng);
  double sq = 0.0;
  for (double h : r.per_subcarrier) sq += h * h;
  CHECK(sq / 1e6 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("draw_channels rejects a floor at or above one") {
  auto rng = seeded_rng(3, "channel");
  CHECK_THROWS_AS(draw_channels(2, 2, 1.0, rng), std::invalid_argument);
}

TEST_CASE("effective_channel") {
  const double ones[] = {1.0, 1.0};
  CHECK(effective_channel(ones) == 1.0);
  const double row[] = {1.0, 0.5};
  CHECK(effective_channel(row) == doctest::Approx(1.0 / std::sqrt(2.5)).epsilon(1e-15));
  const double swapped[] = {0.5, 1.0};
  CHECK(effective_channel(swapped) == effective_channel(row));
  const double bad[] = {1.0, 0.0};
  CHECK_THROWS_AS(effective_channel(bad), std::invalid_argument);
}

TEST_CASE("effective channel never exceeds the quadratic mean or the max entry") {
  auto rng = seeded_rng(4, "channel");
  const auto r = draw_channels(200, 16, 0.05, rng);
  for (std::size_t i = 0; i < r.n_clients; ++i) {
    const auto row = r.row(i);
    double sq = 0.0;
    for (double h : row) sq += h * h;
    const double rms = std::sqrt(sq / static_cast<double>(row.size()));
    CHECK(r.effective[i] <= rms * (1.0 + 1e-12));
    CHECK(r.effective[i] <= *std::max_element(row.begin(), row.end()) * (1.0 + 1e-12));
  }
}

TEST_CASE("upload_energy") {
  CHECK(upload_energy(1.0, 0.5e-3, 7850, 1e-3) == 3.925e-3);
  const double e1 = upload_energy(0.7, 0.5e-3, 7850, 1e-3);
  const double e2 = upload_energy(1.4, 0.5e-3, 7850, 1e-3);
  CHECK(e2 == doctest::Approx(e1 / 4.0).epsilon(1e-15));
  CHECK(upload_energy(0.3, 0.5e-3, 0, 1e-3) == 0.0);
  CHECK_THROWS_AS(upload_energy(0.0, 0.5e-3, 7850, 1e-3), std::invalid_argument);

  double previous = INFINITY;
  for (double h = 0.05; h < 5.0; h *= 1.1) {
    const double e = upload_energy(h, 0.5e-3, 7850, 1e-3);
    CHECK(e < previous);
    previous = e;
  }
}

TEST_CASE("energy ledger") {
  const EnergyModel model{0.5e-3, 7850, 1e-3};
  ChannelRealization r;
  r.n_clients = 4;
  r.n_subcarriers = 1;
  r.per_subcarrier = {0.5, 0.8, 0.8, 1.3};
  r.effective = r.per_subcarrier;

  EnergyLedger ledger;
  SUBCASE("empty selection costs nothing") {
    CHECK(ledger.record(0, {}, r, model).total_j == 0.0);
    CHECK(ledger.cumulative_j() == 0.0);
  }

  SUBCASE("equal channels cost the same") {
    const std::size_t ids[] = {1, 2};
    const auto& round = ledger.record(0, ids, r, model);
    CHECK(round.per_client[0].second == round.per_client[1].second);
  }

  SUBCASE("round total is the sum of independent per-client energies") {
    const std::size_t ids[] = {0, 2, 3};
    const double expected = upload_energy(0.5, 0.5e-3, 7850, 1e-3) + upload_energy(0.8, 0.5e-3, 7850, 1e-3) +
                            upload_energy(1.3, 0.5e-3, 7850, 1e-3);
    CHECK(ledger.record(0, ids, r, model).total_j == doctest::Approx(expected).epsilon(1e-15));
  }

  SUBCASE("unknown client ids are rejected") {
    const std::size_t ids[] = {4};
    CHECK_THROWS_AS(ledger.record(0, ids, r, model), std::out_of_range);
  }

  SUBCASE("cumulative equals the sum of round totals") {
    auto rng = seeded_rng(5, "channel");
    auto pick = seeded_rng(5, "pick");
    for (std::size_t t = 0; t < 50; ++t) {
      const auto real = draw_channels(10, 4, 0.05, rng);
      std::vector<std::size_t> ids;
      for (std::size_t i = 0; i < 10; ++i) {
        if (pick() % 2) ids.push_back(i);
      }
      const auto& round = ledger.record(t, ids, real, model);
      double sum = 0.0;
      for (const auto& [id, e] : round.per_client) sum += e;
      CHECK(round.total_j == sum);
    }
    double total = 0.0;
    for (const auto& round : ledger.rounds()) total += round.total_j;
    CHECK(ledger.cumulative_j() == total);
  }
}
