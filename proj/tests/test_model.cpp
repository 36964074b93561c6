#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "airfed/model.hpp"
#include "oracles.hpp"

using namespace airfed;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed) {
  auto rng = seeded_rng(seed, "test-data");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset ds;
  ds.n_features = d;
  ds.n_classes = c;
  ds.features.resize(n * d);
  ds.labels.resize(n);
  for (auto& v : ds.features) v = unit(rng);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = i % c;
  return ds;
}

ModelParams random_model(std::size_t d, std::size_t c, std::uint64_t seed, double scale = 1.0) {
  auto rng = seeded_rng(seed, "test-model");
  std::normal_distribution<double> g(0.0, scale);
  ModelParams w(d, c);
  for (double& v : w.values()) v = g(rng);
  return w;
}

std::vector<std::size_t> iota_batch(std::size_t n) {
  std::vector<std::size_t> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = i;
  return b;
}

// Straight transcription of softmax cross-entropy for one sample, no shifting.
double reference_loss_one(const ModelParams& w, std::span<const double> x, std::size_t label) {
  const std::size_t c = w.n_classes();
  const std::size_t d = w.n_features();
  std::vector<double> z(c);
  for (std::size_t k = 0; k < c; ++k) {
    z[k] = w.at(d, k);
    for (std::size_t j = 0; j < d; ++j) z[k] += x[j] * w.at(j, k);
  }
  double denom = 0.0;
  for (double v : z) denom += std::exp(v);
  return -std::log(std::exp(z[label]) / denom);
}

}  // namespace

TEST_CASE("zero model gives uniform softmax loss") {
  const auto ds10 = random_dataset(30, 4, 10, 1);
  const auto batch = iota_batch(30);
  CHECK(loss(ModelParams(4, 10), batch, ds10) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
  const auto ds2 = random_dataset(8, 3, 2, 2);
  CHECK(loss(ModelParams(3, 2), iota_batch(8), ds2) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("loss matches a direct transcription on single samples") {
  const auto ds = random_dataset(25, 6, 4, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto w = random_model(6, 4, 100 + s);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::size_t one[] = {i};
      CHECK(std::abs(loss(w, one, ds) - reference_loss_one(w, ds.row(i), ds.labels[i])) < 1e-12);
    }
  }
}

TEST_CASE("empty batches are rejected") {
  const auto ds = random_dataset(4, 2, 2, 4);
  const ModelParams w(2, 2);
  CHECK_THROWS_AS(loss(w, {}, ds), std::invalid_argument);
  CHECK_THROWS_AS(gradient(w, {}, ds), std::invalid_argument);
  CHECK_THROWS_AS(accuracy(w, {}, ds), std::invalid_argument);
}

TEST_CASE("gradient matches finite differences on a 6-parameter toy problem") {
  const auto ds = random_dataset(5, 2, 2, 5);
  const auto w = random_model(2, 2, 6);
  REQUIRE(w.size() == 6);
  const auto batch = iota_batch(5);
  const auto g = gradient(w, batch, ds);
  const auto fd = oracle::finite_difference_gradient(w, batch, ds, 1e-5);
  CHECK(oracle::max_relative_error(g.values(), fd) < 1e-5);
}

TEST_CASE("gradient check, 20 random draws, d=5 c=3") {
  const auto ds = random_dataset(60, 5, 3, 7);
  auto rng = seeded_rng(8, "test-batches");
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto w = random_model(5, 3, 200 + s);
    std::vector<std::size_t> batch = iota_batch(60);
    std::shuffle(batch.begin(), batch.end(), rng);
    batch.resize(1 + s % 12);
    const auto g = gradient(w, batch, ds);
    const auto fd = oracle::finite_difference_gradient(w, batch, ds, 1e-5);
    CHECK(oracle::max_relative_error(g.values(), fd) < 1e-5);
  }
}

TEST_CASE("duplicating the batch leaves the mean gradient unchanged") {
  const auto ds = random_dataset(10, 3, 3, 9);
  const auto w = random_model(3, 3, 10);
  auto batch = iota_batch(10);
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const auto g1 = gradient(w, batch, ds);
  const auto g2 = gradient(w, doubled, ds);
  for (std::size_t m = 0; m < g1.size(); ++m) {
    CHECK(g2.values()[m] == doctest::Approx(g1.values()[m]).epsilon(1e-14));
  }
}

TEST_CASE("gradient vanishes as a separating model scales up") {
  Dataset ds;
  ds.n_features = 1;
  ds.n_classes = 2;
  ds.features = {1.0};
  ds.labels = {1};
  const std::size_t one[] = {0};
  double previous = INFINITY;
  for (double scale : {1.0, 4.0, 16.0, 64.0}) {
    ModelParams w(1, 2);
    w.at(0, 1) = scale;
    double norm = 0.0;
    const auto g = gradient(w, one, ds);
    for (double v : g.values()) norm += v * v;
    norm = std::sqrt(norm);
    CHECK(norm < previous);
    previous = norm;
  }
  CHECK(previous < 1e-20);
}

TEST_CASE("loss is midpoint-convex") {
  const auto ds = random_dataset(40, 5, 3, 11);
  const auto batch = iota_batch(40);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto w1 = random_model(5, 3, 300 + s, 3.0);
    const auto w2 = random_model(5, 3, 400 + s, 3.0);
    ModelParams mid = w1;
    for (std::size_t m = 0; m < mid.size(); ++m) mid.values()[m] = 0.5 * (w1.values()[m] + w2.values()[m]);
    CHECK(loss(mid, batch, ds) <= 0.5 * (loss(w1, batch, ds) + loss(w2, batch, ds)) + 1e-9);
  }
}

TEST_CASE("loss and gradient stay finite for logits near 1e4") {
  const auto ds = random_dataset(10, 2, 3, 12);
  ModelParams w(2, 3);
  w.at(2, 0) = 1e4;
  w.at(2, 1) = -1e4;
  w.at(0, 2) = 5e3;
  const auto batch = iota_batch(10);
  CHECK(std::isfinite(loss(w, batch, ds)));
  CHECK(gradient(w, batch, ds).all_finite());
}

TEST_CASE("local_step") {
  const auto ds = random_dataset(20, 4, 3, 13);
  const auto batch = iota_batch(20);
  const auto w = random_model(4, 3, 14);

  SUBCASE("zero learning rate is the identity") { CHECK(local_step(w, 0.0, batch, ds) == w); }

  SUBCASE("a small step lowers the loss and leaves the input alone") {
    const ModelParams before = w;
    const auto next = local_step(w, 1e-2, batch, ds);
    CHECK(w == before);
    CHECK(loss(next, batch, ds) < loss(w, batch, ds));
  }

  SUBCASE("doubling the rate doubles the displacement") {
    const auto a = local_step(w, 0.05, batch, ds);
    const auto b = local_step(w, 0.10, batch, ds);
    for (std::size_t m = 0; m < w.size(); ++m) {
      const double extrapolated = w.values()[m] + 2.0 * (a.values()[m] - w.values()[m]);
      CHECK(b.values()[m] == doctest::Approx(extrapolated).epsilon(1e-12));
    }
  }
}

TEST_CASE("accuracy") {
  SUBCASE("zero model predicts class 0 everywhere") {
    const auto ds = random_dataset(30, 3, 4, 15);
    const auto idx = iota_batch(30);
    const double label0 = static_cast<double>(std::count(ds.labels.begin(), ds.labels.end(), 0u)) / 30.0;
    CHECK(accuracy(ModelParams(3, 4), idx, ds) == label0);
  }

  SUBCASE("separating model scores 1") {
    Dataset ds;
    ds.n_features = 2;
    ds.n_classes = 2;
    ds.features = {1, 0, 0, 1, 0.9, 0.1, 0.2, 0.8};
    ds.labels = {0, 1, 0, 1};
    ModelParams w(2, 2);
    w.at(0, 0) = 1.0;
    w.at(1, 1) = 1.0;
    CHECK(accuracy(w, iota_batch(4), ds) == 1.0);
  }

  SUBCASE("matches a brute-force argmax count") {
    const auto ds = random_dataset(100, 8, 10, 16);
    const auto w = random_model(8, 10, 17);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      std::size_t best = 0;
      double best_z = -INFINITY;
      for (std::size_t k = 0; k < 10; ++k) {
        double z = w.at(8, k);
        for (std::size_t j = 0; j < 8; ++j) z += ds.row(i)[j] * w.at(j, k);
        if (z > best_z) {
          best_z = z;
          best = k;
        }
      }
      hits += best == ds.labels[i];
    }
    CHECK(accuracy(w, iota_batch(100), ds) == static_cast<double>(hits) / 100.0);
  }
}
