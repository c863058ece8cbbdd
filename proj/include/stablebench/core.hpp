#pragma once

// Domain types shared by every stablebench module.
//
// Units: sizes in bytes, 1 kB = 1024 bytes; durations in microseconds;
// throughput in kB/s.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablebench {

inline constexpr double kBytesPerKb = 1024.0;
inline constexpr double kMicrosPerSecond = 1.0e6;

/* ----------------------------- Errors ----------------------------- */

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected configuration or argument; maps to the CLI usage exit code.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failed system call or file access.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a precondition of an analysis step.
class DataError : public Error {
 public:
  using Error::Error;
};

/* ----------------------------- BufferSize ----------------------------- */

class BufferSize {
 public:
  constexpr BufferSize() = default;
  /// Throws ConfigError when bytes is zero.
  explicit BufferSize(std::uint64_t bytes);

  constexpr std::uint64_t bytes() const noexcept { return bytes_; }
  double kb() const noexcept { return static_cast<double>(bytes_) / kBytesPerKb; }
  bool is_power_of_two() const noexcept { return (bytes_ & (bytes_ - 1)) == 0; }

  /// "4k", "16m", "1536" style label using the largest exact suffix.
  std::string label() const;

  friend constexpr auto operator<=>(const BufferSize&, const BufferSize&) = default;

 private:
  std::uint64_t bytes_ = 1;
};

/// Parses "4096", "4k", "16m", "1g" (case-insensitive, binary multiples).
std::uint64_t parse_size(const std::string& text);

/* ----------------------------- SweepConfig ----------------------------- */

struct SweepConfig {
  BufferSize min_buffer{4 * 1024};
  BufferSize max_buffer{16 * 1024 * 1024};
  std::uint64_t file_size = 16 * 1024 * 1024;
  int repetitions = 30;
  bool sync_per_write = true;
  bool bypass_cache = true;
  std::string target_path = ".";
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// min_buffer * 2^k up to max_buffer. Requires a valid config.
  std::vector<BufferSize> swept_sizes() const;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/* ----------------------------- RunRecord ----------------------------- */

struct RunRecord {
  BufferSize buffer;
  std::uint64_t bytes_written = 0;
  double elapsed_us = 0.0;
  std::vector<double> write_latencies_us;
  int run_index = 0;
  std::string backend_id;

  /// bytes_written / elapsed in kB/s.
  double throughput_kbps() const;
  double mean_latency_us() const;

  /// Throws DataError if the record's structural invariants do not hold.
  void validate() const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/* ----------------------------- Stats ----------------------------- */

struct Stats {
  double mean = 0.0;
  std::optional<double> stddev;  // sample (n-1); absent for n == 1
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Stats&, const Stats&) = default;
};

/* ----------------------------- CurvePoint ----------------------------- */

struct CurvePoint {
  BufferSize buffer;
  Stats throughput;  // kB/s
  Stats latency;     // us per write
  double ratio = 0.0;

  // Per-run values in run_index order, kept for pairwise comparison.
  std::vector<double> throughput_samples;
  std::vector<double> latency_samples;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

}  // namespace stablebench
