#include "stablebench/report.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "json_codec.hpp"

namespace stablebench {

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    throw DataError("non-finite value cannot be written as a CSV/JSON number");
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw DataError("number formatting failed");
  }
  return std::string(buf.data(), end);
}

namespace {

// Backend labels are free text; quote them when they would break the row.
std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void stats_row(std::ostream& out, const std::string& backend, const std::string& kb,
               const char* metric, const Stats& s) {
  out << backend << ',' << kb << ',' << metric << ',' << format_number(s.mean) << ','
      << (s.stddev ? format_number(*s.stddev) : std::string()) << ',' << s.n << ','
      << format_number(s.min) << ',' << format_number(s.max) << '\n';
}

}  // namespace

void emit_csv(const Curve& curve, std::ostream& out) {
  if (curve.points.empty()) {
    throw DataError("cannot emit CSV for an empty curve");
  }
  const std::string backend = csv_field(curve.backend_id);
  out << kCsvHeader << '\n';
  for (const auto& p : curve.points) {
    const std::string kb = format_number(p.buffer.kb());
    stats_row(out, backend, kb, "throughput_kbps", p.throughput);
    stats_row(out, backend, kb, "latency_us", p.latency);
    out << backend << ',' << kb << ",ratio," << format_number(p.ratio) << ",," << p.throughput.n
        << ",,\n";
  }
  if (!out) {
    throw IoError("failed writing CSV output");
  }
}

void emit_json(const std::vector<Curve>& curves, const AnalysisBundle& analysis,
               std::ostream& out) {
  using detail::Json;
  if (curves.empty()) {
    throw DataError("cannot emit a JSON report without curves");
  }
  Json doc;
  doc["schema"] = "stablebench.sweep";
  doc["schema_version"] = kJsonSchemaVersion;
  Json list = Json::array();
  for (const auto& c : curves) list.push_back(detail::to_json(c));
  doc["curves"] = std::move(list);

  if (!analysis.empty()) {
    Json a;
    if (analysis.phases) a["phases"] = detail::to_json(curves.front(), *analysis.phases);
    if (analysis.recommendation) a["recommendation"] = detail::to_json(*analysis.recommendation);
    if (analysis.model) a["model_params"] = detail::to_json(*analysis.model);
    if (analysis.comparison) {
      const auto& cmp = *analysis.comparison;
      Json c;
      c["a"] = cmp.a;
      c["b"] = cmp.b;
      c["threshold"] = cmp.threshold;
      c["variant"] = std::string(to_string(cmp.variant));
      Json rows = Json::array();
      for (const auto& row : cmp.rows) {
        Json r;
        r["buffer_bytes"] = row.buffer.bytes();
        // JSON has no infinity; degenerate rows carry null t.
        r["t"] = std::isfinite(row.result.t) ? Json(row.result.t) : Json(nullptr);
        r["df"] = row.result.df;
        r["p"] = row.result.p_two_sided;
        r["significant"] = row.result.significant;
        r["degenerate"] = row.result.degenerate;
        rows.push_back(std::move(r));
      }
      c["rows"] = std::move(rows);
      a["comparisons"] = std::move(c);
    }
    doc["analysis"] = std::move(a);
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing JSON output");
  }
}

std::string canonicalize_json(const std::string& document) {
  try {
    return detail::Json::parse(document).dump(2) + '\n';
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON report: ") + e.what());
  }
}

}  // namespace stablebench
