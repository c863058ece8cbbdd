#include "stablebench/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <numeric>

namespace stablebench {

BufferSize::BufferSize(std::uint64_t bytes) : bytes_(bytes) {
  if (bytes == 0) {
    throw ConfigError("buffer size must be at least 1 byte");
  }
}

std::string BufferSize::label() const {
  constexpr std::uint64_t kKi = 1024;
  if (bytes_ % (kKi * kKi * kKi) == 0) return std::to_string(bytes_ / (kKi * kKi * kKi)) + "g";
  if (bytes_ % (kKi * kKi) == 0) return std::to_string(bytes_ / (kKi * kKi)) + "m";
  if (bytes_ % kKi == 0) return std::to_string(bytes_ / kKi) + "k";
  return std::to_string(bytes_);
}

std::uint64_t parse_size(const std::string& text) {
  if (text.empty()) {
    throw ConfigError("empty size");
  }
  std::uint64_t multiplier = 1;
  std::string_view digits(text);
  switch (std::tolower(static_cast<unsigned char>(text.back()))) {
    case 'k': multiplier = 1ULL << 10; break;
    case 'm': multiplier = 1ULL << 20; break;
    case 'g': multiplier = 1ULL << 30; break;
    default: break;
  }
  if (multiplier != 1) digits.remove_suffix(1);

  std::uint64_t value = 0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || digits.empty()) {
    throw ConfigError("invalid size '" + text + "' (expected e.g. 4096, 4k, 16m)");
  }
  if (value > std::numeric_limits<std::uint64_t>::max() / multiplier) {
    throw ConfigError("size '" + text + "' overflows");
  }
  return value * multiplier;
}

void SweepConfig::validate() const {
  if (!min_buffer.is_power_of_two() || !max_buffer.is_power_of_two()) {
    throw ConfigError("min and max buffer sizes must be powers of two");
  }
  if (min_buffer > max_buffer) {
    throw ConfigError("min buffer (" + min_buffer.label() + ") exceeds max buffer (" +
                      max_buffer.label() + ")");
  }
  if (max_buffer.bytes() > file_size) {
    throw ConfigError("max buffer (" + max_buffer.label() + ") exceeds file size (" +
                      std::to_string(file_size) + " bytes)");
  }
  // Every swept size divides max_buffer, so this covers all of them.
  if (file_size % max_buffer.bytes() != 0) {
    throw ConfigError("file size must be a multiple of the max buffer size");
  }
  if (repetitions < 1) {
    throw ConfigError("repetitions must be positive");
  }
  if (target_path.empty()) {
    throw ConfigError("target path is empty");
  }
}

std::vector<BufferSize> SweepConfig::swept_sizes() const {
  std::vector<BufferSize> sizes;
  for (std::uint64_t b = min_buffer.bytes(); b <= max_buffer.bytes(); b *= 2) {
    sizes.emplace_back(b);
  }
  return sizes;
}

double RunRecord::throughput_kbps() const {
  return (static_cast<double>(bytes_written) / kBytesPerKb) / (elapsed_us / kMicrosPerSecond);
}

double RunRecord::mean_latency_us() const {
  if (write_latencies_us.empty()) return 0.0;
  return std::accumulate(write_latencies_us.begin(), write_latencies_us.end(), 0.0) /
         static_cast<double>(write_latencies_us.size());
}

void RunRecord::validate() const {
  if (write_latencies_us.empty()) {
    throw DataError("run record has no write latencies");
  }
  if (bytes_written != buffer.bytes() * write_latencies_us.size()) {
    throw DataError("run record bytes_written does not match buffer x write count");
  }
  const double slowest = *std::max_element(write_latencies_us.begin(), write_latencies_us.end());
  if (!(elapsed_us > 0.0) || elapsed_us < slowest) {
    throw DataError("run record elapsed time is shorter than its slowest write");
  }
}

}  // namespace stablebench
