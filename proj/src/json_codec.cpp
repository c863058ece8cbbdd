#include "json_codec.hpp"

namespace stablebench::detail {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Wraps nlohmann's type errors so callers see one error family.
template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad or missing field '") + key + "': " + e.what());
  }
}

Json range_json(const Curve& c, const PointRange& r) {
  Json j;
  j["count"] = r.count;
  if (r.empty()) {
    j["from_bytes"] = nullptr;
    j["to_bytes"] = nullptr;
  } else {
    j["from_bytes"] = c.points[r.first].buffer.bytes();
    j["to_bytes"] = c.points[r.end() - 1].buffer.bytes();
  }
  return j;
}

}  // namespace

Json to_json(const SweepConfig& config) {
  Json j;
  j["min_buffer"] = config.min_buffer.bytes();
  j["max_buffer"] = config.max_buffer.bytes();
  j["file_size"] = config.file_size;
  j["repetitions"] = config.repetitions;
  j["sync_per_write"] = config.sync_per_write;
  j["bypass_cache"] = config.bypass_cache;
  j["target_path"] = config.target_path;
  j["seed"] = config.seed ? Json(*config.seed) : Json(nullptr);
  return j;
}

SweepConfig config_from_json(const Json& j) {
  SweepConfig c;
  c.min_buffer = BufferSize(field<std::uint64_t>(j, "min_buffer"));
  c.max_buffer = BufferSize(field<std::uint64_t>(j, "max_buffer"));
  c.file_size = field<std::uint64_t>(j, "file_size");
  c.repetitions = field<int>(j, "repetitions");
  c.sync_per_write = field<bool>(j, "sync_per_write");
  c.bypass_cache = field<bool>(j, "bypass_cache");
  c.target_path = field<std::string>(j, "target_path");
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = field<std::uint64_t>(j, "seed");
  return c;
}

Json to_json(const RunRecord& run) {
  Json j;
  j["run_index"] = run.run_index;
  j["backend_id"] = run.backend_id;
  j["buffer"] = run.buffer.bytes();
  j["bytes_written"] = run.bytes_written;
  j["elapsed_us"] = run.elapsed_us;
  j["write_latencies_us"] = run.write_latencies_us;
  return j;
}

RunRecord run_from_json(const Json& j) {
  RunRecord r;
  r.run_index = field<int>(j, "run_index");
  r.backend_id = field<std::string>(j, "backend_id");
  r.buffer = BufferSize(field<std::uint64_t>(j, "buffer"));
  r.bytes_written = field<std::uint64_t>(j, "bytes_written");
  r.elapsed_us = field<double>(j, "elapsed_us");
  r.write_latencies_us = field<std::vector<double>>(j, "write_latencies_us");
  return r;
}

Json to_json(const Stats& s) {
  Json j;
  j["mean"] = s.mean;
  j["stddev"] = optional_number(s.stddev);
  j["n"] = s.n;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

Json to_json(const CurvePoint& p) {
  Json j;
  j["buffer_bytes"] = p.buffer.bytes();
  j["buffer_kb"] = p.buffer.kb();
  j["throughput_kbps"] = to_json(p.throughput);
  j["latency_us"] = to_json(p.latency);
  j["ratio"] = p.ratio;
  j["throughput_samples"] = p.throughput_samples;
  j["latency_samples"] = p.latency_samples;
  return j;
}

Json to_json(const Curve& c) {
  Json j;
  j["backend"] = c.backend_id;
  Json points = Json::array();
  for (const auto& p : c.points) points.push_back(to_json(p));
  j["points"] = std::move(points);
  return j;
}

Json to_json(const Recommendation& r) {
  Json j;
  j["buffer_bytes"] = r.buffer.bytes();
  j["buffer_kb"] = r.buffer.kb();
  j["rule"] = std::string(to_string(r.rule));
  j["feasible"] = r.feasible;
  j["achieved_throughput_kbps"] = r.achieved_throughput;
  j["achieved_latency_us"] = r.achieved_latency;
  return j;
}

Json to_json(const ModelParams& m) {
  Json j;
  j["l0_us"] = m.l0_us;
  j["bandwidth_bytes_per_us"] = m.bandwidth;
  j["fit_residual_us"] = m.fit_residual_us;
  j["optimal_ratio_buffer_bytes"] = m.l0_us * m.bandwidth;
  return j;
}

Json to_json(const Curve& c, const PhaseClassification& phases) {
  Json j;
  j["flat_latency"] = range_json(c, phases.flat_latency);
  j["rising"] = range_json(c, phases.rising);
  j["saturated"] = range_json(c, phases.saturated);
  return j;
}

}  // namespace stablebench::detail
