#include "stablebench/bench.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>

namespace stablebench {

namespace {

constexpr std::size_t kBufferAlignment = 4096;

struct AlignedDelete {
  void operator()(std::byte* p) const noexcept {
    ::operator delete[](p, std::align_val_t{kBufferAlignment});
  }
};

using AlignedBuffer = std::unique_ptr<std::byte[], AlignedDelete>;

AlignedBuffer make_aligned(std::size_t bytes) {
  // Round up so the allocation itself is a multiple of the alignment.
  const std::size_t rounded = (bytes + kBufferAlignment - 1) / kBufferAlignment * kBufferAlignment;
  return AlignedBuffer(
      static_cast<std::byte*>(::operator new[](rounded, std::align_val_t{kBufferAlignment})));
}

// Incompressible fill; fixed seed so every pass writes the same bytes.
void fill_pattern(std::span<std::byte> out) {
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  std::size_t i = 0;
  while (i < out.size()) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    const std::size_t n = std::min<std::size_t>(sizeof state, out.size() - i);
    std::memcpy(out.data() + i, &state, n);
    i += n;
  }
}

}  // namespace

RunRecord run_single_pass(BufferSize buffer, std::uint64_t file_size, DeviceBackend& backend,
                          int run_index) {
  if (file_size == 0 || file_size % buffer.bytes() != 0) {
    throw ConfigError("buffer " + buffer.label() + " does not divide file size " +
                      std::to_string(file_size));
  }
  const std::uint64_t writes = file_size / buffer.bytes();

  AlignedBuffer storage;
  std::span<const std::byte> payload;
  if (backend.consumes_data()) {
    storage = make_aligned(buffer.bytes());
    std::span<std::byte> writable(storage.get(), buffer.bytes());
    fill_pattern(writable);
    payload = writable;
  }

  RunRecord record;
  record.buffer = buffer;
  record.run_index = run_index;
  record.write_latencies_us.reserve(writes);

  backend.prepare(file_size, run_index, buffer);
  try {
    const double start = backend.now_us();
    for (std::uint64_t i = 0; i < writes; ++i) {
      record.write_latencies_us.push_back(backend.timed_write(payload));
    }
    record.elapsed_us = backend.now_us() - start;
  } catch (...) {
    backend.finish();
    throw;
  }
  backend.finish();

  record.bytes_written = buffer.bytes() * writes;
  record.backend_id = backend.id();
  return record;
}

SweepOutcome run_sweep(const SweepConfig& config, DeviceBackend& backend,
                       const ProgressFn& progress) {
  config.validate();
  const auto sizes = config.swept_sizes();

  SweepOutcome outcome;
  outcome.runs.reserve(sizes.size() * static_cast<std::size_t>(config.repetitions));
  for (int rep = 1; rep <= config.repetitions; ++rep) {
    for (const auto& size : sizes) {
      if (progress) progress(rep, config.repetitions, size);
      try {
        outcome.runs.push_back(run_single_pass(size, config.file_size, backend, rep));
      } catch (const std::exception& e) {
        outcome.failure = SweepFailure{rep, size,
                                       "repetition " + std::to_string(rep) + ", buffer " +
                                           size.label() + ": " + e.what()};
        return outcome;
      }
    }
  }
  return outcome;
}

}  // namespace stablebench
