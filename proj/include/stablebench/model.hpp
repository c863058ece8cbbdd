#pragma once

// Affine synchronous-write model: latency(x) = l0 + x / B.
//
// l0 is the fixed cost of one durable write (block write plus metadata
// update, which are only observable as a sum). B is the asymptotic transfer
// rate. Throughput x / latency(x) rises like x / l0 for small writes and
// saturates at B.

#include <cstdint>

#include "stablebench/analysis.hpp"

namespace stablebench {

inline constexpr std::uint64_t kDefaultBlockLimit = 4096;

struct ModelParams {
  double l0_us = 0.0;
  double bandwidth = 0.0;  // bytes per microsecond
  double fit_residual_us = 0.0;

  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws ModelError for fits the affine law cannot describe.
class ModelError : public DataError {
 public:
  using DataError::DataError;
};

double predicted_latency(double bytes, const ModelParams& params);

/// bytes per microsecond.
double predicted_throughput(double bytes, const ModelParams& params);

/// Throughput gain from batching `messages` writes of `message_bytes` into one.
/// Exactly `messages` while the batch fits in block_limit (latency unchanged),
/// from the full affine law beyond it.
double batched_throughput_gain(std::uint64_t message_bytes, std::uint64_t messages,
                               const ModelParams& params,
                               std::uint64_t block_limit = kDefaultBlockLimit);

/// Least squares of mean latency against buffer bytes.
ModelParams fit_latency_model(const Curve& curve);

/// Maximizer of throughput/latency = x / (l0 + x/B)^2, i.e. l0 * B bytes.
double optimal_ratio_buffer(const ModelParams& params);

}  // namespace stablebench
