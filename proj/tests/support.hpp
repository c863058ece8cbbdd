#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "stablebench/analysis.hpp"
#include "stablebench/bench.hpp"
#include "stablebench/core.hpp"

namespace support {

inline stablebench::SweepConfig default_synthetic_config(int runs = 30) {
  stablebench::SweepConfig c;
  c.repetitions = runs;
  c.target_path = "synthetic";
  return c;
}

inline std::vector<stablebench::RunRecord> synthetic_runs(double l0, double bw, double noise,
                                                          std::uint64_t seed, int runs = 30,
                                                          std::string label = "synthetic") {
  stablebench::SyntheticBackend backend({l0, bw, noise, seed}, std::move(label));
  auto outcome = stablebench::run_sweep(default_synthetic_config(runs), backend);
  return std::move(outcome.runs);
}

/// Builds a curve directly from per-size means (one synthetic "run" each).
inline stablebench::Curve curve_from_means(const std::vector<std::uint64_t>& sizes,
                                           const std::vector<double>& thr,
                                           const std::vector<double>& lat) {
  stablebench::Curve c;
  c.backend_id = "fixture";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    stablebench::CurvePoint p;
    p.buffer = stablebench::BufferSize(sizes[i]);
    p.throughput = {thr[i], std::nullopt, 1, thr[i], thr[i]};
    p.latency = {lat[i], std::nullopt, 1, lat[i], lat[i]};
    p.ratio = thr[i] / lat[i];
    p.throughput_samples = {thr[i]};
    p.latency_samples = {lat[i]};
    c.points.push_back(p);
  }
  return c;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "stablebench-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace support
