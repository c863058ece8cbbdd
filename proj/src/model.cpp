#include "stablebench/model.hpp"

#include <cmath>
#include <set>

namespace stablebench {

void ModelParams::validate() const {
  if (!(l0_us > 0.0) || !(bandwidth > 0.0) || !(fit_residual_us >= 0.0)) {
    throw ModelError("model parameters must satisfy l0 > 0, B > 0, residual >= 0");
  }
}

double predicted_latency(double bytes, const ModelParams& params) {
  return params.l0_us + bytes / params.bandwidth;
}

double predicted_throughput(double bytes, const ModelParams& params) {
  return bytes / predicted_latency(bytes, params);
}

double batched_throughput_gain(std::uint64_t message_bytes, std::uint64_t messages,
                               const ModelParams& params, std::uint64_t block_limit) {
  if (message_bytes == 0 || messages == 0) {
    throw ConfigError("batched gain needs at least one message of at least one byte");
  }
  const double batch = static_cast<double>(message_bytes) * static_cast<double>(messages);
  if (batch <= static_cast<double>(block_limit)) {
    return static_cast<double>(messages);
  }
  const double x = static_cast<double>(message_bytes);
  return predicted_throughput(batch, params) / predicted_throughput(x, params);
}

ModelParams fit_latency_model(const Curve& curve) {
  std::set<std::uint64_t> distinct;
  for (const auto& p : curve.points) distinct.insert(p.buffer.bytes());
  if (distinct.size() < 2) {
    throw ModelError("latency fit needs at least two distinct buffer sizes");
  }

  const double n = static_cast<double>(curve.points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& p : curve.points) {
    mean_x += static_cast<double>(p.buffer.bytes());
    mean_y += p.latency.mean;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : curve.points) {
    const double dx = static_cast<double>(p.buffer.bytes()) - mean_x;
    sxx += dx * dx;
    sxy += dx * (p.latency.mean - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  if (!(slope > 0.0) || !(intercept > 0.0)) {
    throw ModelError("affine latency fit is not physical (intercept " + std::to_string(intercept) +
                     " us, slope " + std::to_string(slope) +
                     " us/byte); restrict the fitted range");
  }

  ModelParams params;
  params.l0_us = intercept;
  params.bandwidth = 1.0 / slope;
  double ss = 0.0;
  for (const auto& p : curve.points) {
    const double r = p.latency.mean - (intercept + slope * static_cast<double>(p.buffer.bytes()));
    ss += r * r;
  }
  params.fit_residual_us = std::sqrt(ss / n);
  return params;
}

double optimal_ratio_buffer(const ModelParams& params) {
  params.validate();
  return params.l0_us * params.bandwidth;
}

}  // namespace stablebench
