#include <algorithm>
#include <cmath>

#include "stablebench/bench.hpp"

namespace stablebench {

void SyntheticDeviceSpec::validate() const {
  if (!(l0_us > 0.0) || !std::isfinite(l0_us)) {
    throw ConfigError("synthetic l0 must be positive");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("synthetic bandwidth must be positive");
  }
  if (!(noise_stddev_us >= 0.0) || !std::isfinite(noise_stddev_us)) {
    throw ConfigError("synthetic noise stddev must be non-negative");
  }
}

double synthetic_write_latency(const SyntheticDeviceSpec& spec, BufferSize buffer) {
  const double latency = spec.l0_us + static_cast<double>(buffer.bytes()) / spec.bandwidth;
  return std::max(latency, 1.0);
}

double synthetic_write_latency(const SyntheticDeviceSpec& spec, BufferSize buffer,
                               std::mt19937_64& rng) {
  double latency = spec.l0_us + static_cast<double>(buffer.bytes()) / spec.bandwidth;
  if (spec.noise_stddev_us > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_stddev_us);
    latency += noise(rng);
  }
  return std::max(latency, 1.0);
}

SyntheticBackend::SyntheticBackend(SyntheticDeviceSpec spec, std::string label)
    : spec_(spec), label_(std::move(label)), rng_(spec.seed) {
  spec_.validate();
  if (label_.empty()) label_ = "synthetic";
}

void SyntheticBackend::prepare(std::uint64_t, int, BufferSize buffer) {
  buffer_ = buffer;
  clock_us_ = 0.0;
}

// Payload is ignored; the write size is the buffer announced in prepare().
double SyntheticBackend::timed_write(std::span<const std::byte>) {
  const double latency = synthetic_write_latency(spec_, buffer_, rng_);
  clock_us_ += latency;
  return latency;
}

}  // namespace stablebench
