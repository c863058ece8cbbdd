#include <doctest.h>

#include <cmath>

#include "oracles/brute_force.hpp"
#include "stablebench/model.hpp"
#include "support.hpp"

using namespace stablebench;

namespace {

const ModelParams kParams{5000.0, 200.0, 0.0};

}  // namespace

TEST_CASE("predicted throughput limits") {
  // Small writes: x / l0.
  CHECK(predicted_throughput(1e-6, kParams) == doctest::Approx(1e-6 / 5000.0).epsilon(1e-9));
  CHECK(predicted_throughput(5000.0 * 200.0, kParams) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(predicted_throughput(1e15, kParams) == doctest::Approx(200.0).epsilon(1e-8));

  double prev = 0.0;
  for (double x = 1.0; x < 1e12; x *= 1.7) {
    const double t = predicted_throughput(x, kParams);
    CHECK(t > prev);
    CHECK(t < 200.0);
    prev = t;
  }
}

TEST_CASE("batched gain") {
  CHECK(batched_throughput_gain(100, 1, kParams) == 1.0);
  CHECK(batched_throughput_gain(64, 64, kParams) == 64.0);  // exactly one 4 kB block
  CHECK(batched_throughput_gain(4096, 1, kParams) == 1.0);

  const double x = 4096, y = 1024;
  const double expected = (x * y / (5000 + x * y / 200)) / (x / (5000 + x / 200));
  CHECK(batched_throughput_gain(4096, 1024, kParams) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(197.9465014).epsilon(1e-9));
  CHECK(batched_throughput_gain(4096, 1024, kParams) < 1024.0);

  CHECK(batched_throughput_gain(8, 1024, kParams, 1 << 20) == 1024.0);
  CHECK_THROWS_AS(batched_throughput_gain(0, 4, kParams), ConfigError);
}

TEST_CASE("batched gain is bounded by y and monotone within each regime") {
  for (std::uint64_t x : {1ULL, 7ULL, 64ULL, 512ULL, 4096ULL, 65536ULL}) {
    double prev_inside = 0.0, prev_beyond = 0.0;
    for (std::uint64_t y = 1; y <= 20000; y += (y < 64 ? 1 : 37)) {
      const double g = batched_throughput_gain(x, y, kParams);
      CHECK(g <= static_cast<double>(y));
      if (x * y <= kDefaultBlockLimit) {
        CHECK(g == static_cast<double>(y));
        CHECK(g >= prev_inside);
        prev_inside = g;
      } else {
        if (y > 1) CHECK(g < static_cast<double>(y));
        CHECK(g >= prev_beyond);
        prev_beyond = g;
      }
    }
  }
}

TEST_CASE("fit recovers exact affine data") {
  const auto sizes = oracle::doubling(4096, 16 << 20);
  std::vector<double> lat, thr;
  for (auto x : sizes) {
    lat.push_back(5000.0 + x / 200.0);
    thr.push_back(1.0);
  }
  const auto fit = fit_latency_model(support::curve_from_means(sizes, thr, lat));
  CHECK(fit.l0_us == doctest::Approx(5000.0).epsilon(1e-10));
  CHECK(fit.bandwidth == doctest::Approx(200.0).epsilon(1e-10));
  CHECK(fit.fit_residual_us < 1e-6);
}

TEST_CASE("fit: two-point line") {
  const auto c = support::curve_from_means({4096, 8192}, {1, 1}, {6000, 7000});
  const auto fit = fit_latency_model(c);
  CHECK(1.0 / fit.bandwidth == doctest::Approx(1000.0 / 4096.0).epsilon(1e-12));
  CHECK(fit.l0_us == doctest::Approx(5000.0).epsilon(1e-12));
  CHECK(fit.fit_residual_us == doctest::Approx(0.0));
}

TEST_CASE("fit: noisy synthetic sweep agrees with an independent least-squares solve") {
  const auto curve = aggregate_curve(support::synthetic_runs(5000.0, 200.0, 50.0, 42));
  const auto fit = fit_latency_model(curve);
  std::vector<double> xs, ys;
  for (const auto& p : curve.points) {
    xs.push_back(static_cast<double>(p.buffer.bytes()));
    ys.push_back(p.latency.mean);
  }
  const auto [intercept, slope] = oracle::ols_cramer(xs, ys);
  CHECK(fit.l0_us == doctest::Approx(intercept).epsilon(1e-9));
  CHECK(fit.bandwidth == doctest::Approx(1.0 / slope).epsilon(1e-9));
  CHECK(std::fabs(fit.l0_us - 5000.0) / 5000.0 < 0.05);
  CHECK(std::fabs(fit.bandwidth - 200.0) / 200.0 < 0.05);
  CHECK(fit.fit_residual_us > 0.0);
}

TEST_CASE("fit: degenerate and unphysical inputs") {
  CHECK_THROWS_AS(fit_latency_model(support::curve_from_means({4096}, {1}, {10})), ModelError);
  // Latency falling with size gives a negative slope.
  CHECK_THROWS_AS(fit_latency_model(support::curve_from_means({4096, 8192, 16384}, {1, 1, 1},
                                                              {300, 200, 100})),
                  ModelError);
  // A steep two-point line has a negative intercept.
  CHECK_THROWS_AS(fit_latency_model(support::curve_from_means({4096, 8192}, {1, 1}, {100, 1000})),
                  ModelError);
}

TEST_CASE("fitted model reproduces noise-free measured throughput") {
  const auto curve = aggregate_curve(support::synthetic_runs(5000.0, 200.0, 0.0, 0, 3));
  const auto fit = fit_latency_model(curve);
  for (const auto& p : curve.points) {
    const double predicted_kbps =
        predicted_throughput(static_cast<double>(p.buffer.bytes()), fit) * 1e6 / 1024.0;
    CHECK(std::fabs(predicted_kbps - p.throughput.mean) / p.throughput.mean < 1e-6);
  }
}

TEST_CASE("optimal ratio buffer") {
  CHECK(optimal_ratio_buffer(kParams) == 1'000'000.0);
  CHECK(optimal_ratio_buffer({5000.0, 400.0, 0.0}) == 2'000'000.0);
  CHECK(predicted_latency(1e6, kParams) == doctest::Approx(10000.0));
  CHECK(predicted_throughput(1e6, kParams) == doctest::Approx(100.0));
  CHECK_THROWS_AS(optimal_ratio_buffer({0.0, 1.0, 0.0}), ModelError);

  // Grid search at 1-byte resolution over [1, 10 x*].
  const auto ratio = [](double x) {
    const double l = 5000.0 + x / 200.0;
    return x / (l * l);
  };
  double best_x = 1.0, best = ratio(1.0);
  for (double x = 2.0; x <= 1e7; x += 1.0) {
    const double r = ratio(x);
    if (r > best) {
      best = r;
      best_x = x;
    }
  }
  CHECK(std::fabs(best_x - 1e6) <= 1.0);
}

TEST_CASE("ratio argmax over a geometric sweep brackets l0 * B") {
  for (double bw : {20.0, 75.0, 200.0, 900.0}) {
    for (double l0 : {100.0, 1000.0, 5000.0, 20000.0}) {
      const ModelParams m{l0, bw, 0.0};
      const auto sizes = oracle::doubling(4096, 1ULL << 30);
      std::vector<double> r;
      for (auto x : sizes) r.push_back(predicted_throughput(x, m) / predicted_latency(x, m));
      const std::size_t k = oracle::argmax_first(r);
      const double xstar = optimal_ratio_buffer(m);
      if (xstar < 4096 || xstar > (1ULL << 30)) continue;
      const bool brackets = (sizes[k] <= xstar && (k + 1 == sizes.size() || sizes[k + 1] >= xstar)) ||
                            (sizes[k] >= xstar && (k == 0 || sizes[k - 1] <= xstar));
      CHECK(brackets);
    }
  }
}
