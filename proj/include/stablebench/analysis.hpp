#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stablebench/core.hpp"
#include "stablebench/stats.hpp"

namespace stablebench {

struct Curve {
  std::string backend_id;
  std::vector<CurvePoint> points;  // strictly ascending buffer size

  std::vector<BufferSize> sizes() const;

  friend bool operator==(const Curve&, const Curve&) = default;
};

/// Half-open run of indices into Curve::points.
struct PointRange {
  std::size_t first = 0;
  std::size_t count = 0;

  bool empty() const noexcept { return count == 0; }
  std::size_t end() const noexcept { return first + count; }

  friend bool operator==(const PointRange&, const PointRange&) = default;
};

struct PhaseClassification {
  PointRange flat_latency;  // throughput rising, latency ~ constant
  PointRange rising;        // both rising
  PointRange saturated;     // throughput ~ constant, latency rising

  friend bool operator==(const PhaseClassification&, const PhaseClassification&) = default;
};

inline constexpr double kDefaultLatencyBand = 1.25;
inline constexpr double kDefaultThroughputBand = 0.90;

enum class RecommendationRule { throughput_floor, latency_ceiling, floor_and_ceiling, ratio_optimal };

std::string_view to_string(RecommendationRule rule);

struct Recommendation {
  BufferSize buffer;
  RecommendationRule rule = RecommendationRule::ratio_optimal;
  double achieved_throughput = 0.0;  // kB/s
  double achieved_latency = 0.0;     // us
  bool feasible = true;              // false: buffer is the nearest miss

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct RatioPoint {
  BufferSize buffer;
  double ratio = 0.0;
};

struct RatioCurve {
  std::vector<RatioPoint> points;
  std::size_t argmax = 0;  // ties resolve to the smallest buffer
};

struct SizeComparison {
  BufferSize buffer;
  TTestResult result;
};

/// Two-level aggregation: per-run throughput and per-run mean latency, then
/// Stats across runs for each size. Order of the input does not matter.
Curve aggregate_curve(std::span<const RunRecord> runs);

RatioCurve ratio_curve(const Curve& curve);

PhaseClassification detect_phases(const Curve& curve, double latency_band = kDefaultLatencyBand,
                                  double throughput_band = kDefaultThroughputBand);

Recommendation recommend_buffer(const Curve& curve, std::optional<double> min_throughput_kbps,
                                std::optional<double> max_latency_us);

/// Per-size t-test of the per-run throughput samples of a against b.
std::vector<SizeComparison> compare_curves(const Curve& a, const Curve& b,
                                           double threshold = kDefaultSignificance,
                                           TTestVariant variant = TTestVariant::pooled);

}  // namespace stablebench
