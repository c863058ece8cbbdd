#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stablebench/core.hpp"

namespace stablebench {

/// A device + file system under test.
///
/// The engine calls prepare() once per pass, then timed_write() once per
/// buffer, then finish(). now_us() is the clock the engine uses to time the
/// whole pass; synthetic backends return simulated time from it.
class DeviceBackend {
 public:
  virtual ~DeviceBackend() = default;

  virtual void prepare(std::uint64_t file_size, int run_index, BufferSize buffer) = 0;

  /// Writes data durably and returns the write+barrier latency in microseconds.
  virtual double timed_write(std::span<const std::byte> data) = 0;

  /// Closes and removes whatever prepare() created. Safe to call twice.
  virtual void finish() = 0;

  virtual double now_us() = 0;

  /// Label recorded into RunRecord::backend_id.
  virtual std::string id() const = 0;

  /// False when timed_write ignores the buffer contents.
  virtual bool consumes_data() const { return true; }
};

/* ----------------------------- Synthetic ----------------------------- */

struct SyntheticDeviceSpec {
  double l0_us = 5000.0;           // fixed per-write cost
  double bandwidth = 200.0;        // bytes per microsecond
  double noise_stddev_us = 0.0;    // Gaussian, added per write
  std::uint64_t seed = 0;

  void validate() const;
};

/// l0 + bytes/bandwidth plus one Gaussian draw from rng, clamped to >= 1 us.
/// The rng is not touched when noise_stddev_us is zero.
double synthetic_write_latency(const SyntheticDeviceSpec& spec, BufferSize buffer,
                               std::mt19937_64& rng);

/// Noise-free latency; no rng involved.
double synthetic_write_latency(const SyntheticDeviceSpec& spec, BufferSize buffer);

class SyntheticBackend final : public DeviceBackend {
 public:
  explicit SyntheticBackend(SyntheticDeviceSpec spec, std::string label = {});

  void prepare(std::uint64_t file_size, int run_index, BufferSize buffer) override;
  double timed_write(std::span<const std::byte> data) override;
  void finish() override {}
  double now_us() override { return clock_us_; }
  std::string id() const override { return label_; }
  bool consumes_data() const override { return false; }

  const SyntheticDeviceSpec& spec() const noexcept { return spec_; }

 private:
  SyntheticDeviceSpec spec_;
  std::string label_;
  std::mt19937_64 rng_;
  BufferSize buffer_;
  double clock_us_ = 0.0;
};

/* ----------------------------- POSIX file ----------------------------- */

struct FileBackendOptions {
  std::string directory;
  std::string label;          // defaults to the directory
  bool sync_per_write = true;  // fsync after every write
  bool bypass_cache = true;    // O_DIRECT where supported
};

/// Writes fresh `stablebench.<pid>.<run>.<size>.dat` files in a directory.
///
/// With bypass_cache the file is opened O_DIRECT|O_SYNC. If the platform or
/// file system rejects O_DIRECT, or STABLEBENCH_NO_DIRECT=1 is set, the
/// backend switches to flush-per-write for the rest of its lifetime and
/// appends "+flush-fallback" to its id.
class FileBackend final : public DeviceBackend {
 public:
  explicit FileBackend(FileBackendOptions options);
  ~FileBackend() override;

  FileBackend(const FileBackend&) = delete;
  FileBackend& operator=(const FileBackend&) = delete;

  void prepare(std::uint64_t file_size, int run_index, BufferSize buffer) override;
  double timed_write(std::span<const std::byte> data) override;
  void finish() override;
  double now_us() override;
  std::string id() const override;

  bool direct_io_active() const noexcept { return direct_; }
  bool fell_back() const noexcept { return fell_back_; }
  const std::string& current_path() const noexcept { return path_; }

 private:
  int open_target(bool direct, bool truncate);
  void switch_to_fallback();

  FileBackendOptions options_;
  bool direct_ = false;
  bool fell_back_ = false;
  int fd_ = -1;
  std::string path_;
  std::uint64_t offset_ = 0;
  std::chrono::steady_clock::time_point origin_;
};

/* ----------------------------- Engine ----------------------------- */

/// One pass: file_size / buffer sequential durable writes to a fresh target.
/// Throws ConfigError if buffer does not divide file_size; I/O errors
/// propagate from the backend.
RunRecord run_single_pass(BufferSize buffer, std::uint64_t file_size, DeviceBackend& backend,
                          int run_index);

struct SweepFailure {
  int repetition = 0;
  BufferSize buffer;
  std::string message;
};

struct SweepOutcome {
  std::vector<RunRecord> runs;  // everything completed before any failure
  std::optional<SweepFailure> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

using ProgressFn = std::function<void(int repetition, int repetitions, BufferSize buffer)>;

/// Repetitions outer, swept sizes inner; run_index is the 1-based repetition.
SweepOutcome run_sweep(const SweepConfig& config, DeviceBackend& backend,
                       const ProgressFn& progress = {});

}  // namespace stablebench
