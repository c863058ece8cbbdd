#include "stablebench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace stablebench {

std::vector<BufferSize> Curve::sizes() const {
  std::vector<BufferSize> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.buffer);
  return out;
}

std::string_view to_string(RecommendationRule rule) {
  switch (rule) {
    case RecommendationRule::throughput_floor: return "throughput_floor";
    case RecommendationRule::latency_ceiling: return "latency_ceiling";
    case RecommendationRule::floor_and_ceiling: return "floor_and_ceiling";
    case RecommendationRule::ratio_optimal: return "ratio_optimal";
  }
  return "unknown";
}

Curve aggregate_curve(std::span<const RunRecord> runs) {
  if (runs.empty()) {
    throw DataError("no runs to aggregate");
  }
  Curve curve;
  curve.backend_id = runs.front().backend_id;

  std::map<std::uint64_t, std::vector<const RunRecord*>> by_size;
  for (const auto& r : runs) {
    if (r.backend_id != curve.backend_id) {
      throw DataError("mixed backends in one curve: '" + curve.backend_id + "' and '" +
                      r.backend_id + "'");
    }
    r.validate();
    by_size[r.buffer.bytes()].push_back(&r);
  }

  const std::size_t expected = by_size.begin()->second.size();
  for (auto& [bytes, group] : by_size) {
    if (group.size() != expected) {
      throw DataError("uneven repetition count at buffer " + BufferSize(bytes).label() + ": " +
                      std::to_string(group.size()) + " runs, expected " +
                      std::to_string(expected));
    }
    // Fixed summation order makes the result independent of input order.
    std::sort(group.begin(), group.end(), [](const RunRecord* x, const RunRecord* y) {
      return std::forward_as_tuple(x->run_index, x->elapsed_us, x->write_latencies_us) <
             std::forward_as_tuple(y->run_index, y->elapsed_us, y->write_latencies_us);
    });

    CurvePoint point;
    point.buffer = BufferSize(bytes);
    for (const RunRecord* r : group) {
      point.throughput_samples.push_back(r->throughput_kbps());
      point.latency_samples.push_back(r->mean_latency_us());
    }
    point.throughput = describe(point.throughput_samples);
    point.latency = describe(point.latency_samples);
    point.ratio = point.throughput.mean / point.latency.mean;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

RatioCurve ratio_curve(const Curve& curve) {
  if (curve.points.empty()) {
    throw DataError("ratio of an empty curve");
  }
  RatioCurve out;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (!(p.latency.mean > 0.0)) {
      throw DataError("zero latency at buffer " + p.buffer.label());
    }
    out.points.push_back({p.buffer, p.throughput.mean / p.latency.mean});
    if (out.points[i].ratio > out.points[out.argmax].ratio) out.argmax = i;
  }
  return out;
}

PhaseClassification detect_phases(const Curve& curve, double latency_band,
                                  double throughput_band) {
  const std::size_t n = curve.points.size();
  if (n < 3) {
    throw DataError("phase detection needs at least 3 points, got " + std::to_string(n));
  }
  if (!(latency_band > 0.0) || !(throughput_band > 0.0)) {
    throw ConfigError("phase bands must be positive");
  }

  double baseline_latency = curve.points.front().latency.mean;
  double max_throughput = curve.points.front().throughput.mean;
  for (const auto& p : curve.points) {
    baseline_latency = std::min(baseline_latency, p.latency.mean);
    max_throughput = std::max(max_throughput, p.throughput.mean);
  }

  std::size_t prefix = 0;
  while (prefix < n && curve.points[prefix].latency.mean <= latency_band * baseline_latency) {
    ++prefix;
  }
  std::size_t suffix = 0;
  while (suffix < n &&
         curve.points[n - 1 - suffix].throughput.mean >= throughput_band * max_throughput) {
    ++suffix;
  }
  // Saturation wins any overlap.
  prefix = std::min(prefix, n - suffix);

  PhaseClassification phases;
  phases.flat_latency = {0, prefix};
  phases.rising = {prefix, n - suffix - prefix};
  phases.saturated = {n - suffix, suffix};
  return phases;
}

namespace {

Recommendation at_point(const CurvePoint& p, RecommendationRule rule, bool feasible) {
  return {p.buffer, rule, p.throughput.mean, p.latency.mean, feasible};
}

}  // namespace

Recommendation recommend_buffer(const Curve& curve, std::optional<double> min_throughput_kbps,
                                std::optional<double> max_latency_us) {
  const auto& pts = curve.points;
  if (pts.empty()) {
    throw DataError("cannot recommend from an empty curve");
  }
  if (min_throughput_kbps && !(std::isfinite(*min_throughput_kbps) && *min_throughput_kbps > 0.0)) {
    throw ConfigError("throughput floor must be a positive number");
  }
  if (max_latency_us && !(std::isfinite(*max_latency_us) && *max_latency_us > 0.0)) {
    throw ConfigError("latency ceiling must be a positive number");
  }

  if (!min_throughput_kbps && !max_latency_us) {
    return at_point(pts[ratio_curve(curve).argmax], RecommendationRule::ratio_optimal, true);
  }

  const auto meets_floor = [&](const CurvePoint& p) {
    return !min_throughput_kbps || p.throughput.mean >= *min_throughput_kbps;
  };
  const auto meets_ceiling = [&](const CurvePoint& p) {
    return !max_latency_us || p.latency.mean <= *max_latency_us;
  };

  if (min_throughput_kbps && !max_latency_us) {
    for (const auto& p : pts) {
      if (meets_floor(p)) return at_point(p, RecommendationRule::throughput_floor, true);
    }
    // Nearest miss: highest throughput, smallest buffer on ties.
    const auto best = std::max_element(pts.begin(), pts.end(), [](const auto& x, const auto& y) {
      return x.throughput.mean < y.throughput.mean;
    });
    return at_point(*best, RecommendationRule::throughput_floor, false);
  }

  if (max_latency_us && !min_throughput_kbps) {
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      if (meets_ceiling(*it)) return at_point(*it, RecommendationRule::latency_ceiling, true);
    }
    const auto best = std::min_element(pts.begin(), pts.end(), [](const auto& x, const auto& y) {
      return x.latency.mean < y.latency.mean;
    });
    return at_point(*best, RecommendationRule::latency_ceiling, false);
  }

  for (const auto& p : pts) {
    if (meets_floor(p) && meets_ceiling(p)) {
      return at_point(p, RecommendationRule::floor_and_ceiling, true);
    }
  }
  // Nearest miss: smallest worst-case relative violation of either bound.
  const auto violation = [&](const CurvePoint& p) {
    const double shortfall =
        std::max(0.0, (*min_throughput_kbps - p.throughput.mean) / std::fabs(*min_throughput_kbps));
    const double excess =
        std::max(0.0, (p.latency.mean - *max_latency_us) / std::fabs(*max_latency_us));
    return std::max(shortfall, excess);
  };
  const auto best = std::min_element(pts.begin(), pts.end(), [&](const auto& x, const auto& y) {
    return violation(x) < violation(y);
  });
  return at_point(*best, RecommendationRule::floor_and_ceiling, false);
}

std::vector<SizeComparison> compare_curves(const Curve& a, const Curve& b, double threshold,
                                           TTestVariant variant) {
  if (a.sizes() != b.sizes()) {
    throw DataError("curves '" + a.backend_id + "' and '" + b.backend_id +
                    "' were swept over different buffer sizes");
  }
  std::vector<SizeComparison> out;
  out.reserve(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    out.push_back({a.points[i].buffer,
                   t_test(a.points[i].throughput_samples, b.points[i].throughput_samples, variant,
                          threshold)});
  }
  return out;
}

}  // namespace stablebench
