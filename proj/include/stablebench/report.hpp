#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stablebench/analysis.hpp"
#include "stablebench/core.hpp"
#include "stablebench/model.hpp"

namespace stablebench {

inline constexpr int kArchiveSchemaVersion = 1;
inline constexpr int kJsonSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kCsvHeader = "backend,buffer_kb,metric,mean,stddev,n,min,max";

class ArchiveError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public ArchiveError {
 public:
  using ArchiveError::ArchiveError;
};

class SchemaVersionError : public ArchiveError {
 public:
  SchemaVersionError(int found, int expected);
  int found() const noexcept { return found_; }
  int expected() const noexcept { return expected_; }

 private:
  int found_;
  int expected_;
};

struct ArchiveManifest {
  int schema_version = kArchiveSchemaVersion;
  std::string tool_version = kToolVersion;
  SweepConfig config;
  std::string backend_id;
  std::string created_at;  // RFC 3339, UTC
  std::size_t run_count = 0;
  std::string checksum;    // SHA-256 hex over the run payloads in archive order

  friend bool operator==(const ArchiveManifest&, const ArchiveManifest&) = default;
};

struct LoadedArchive {
  ArchiveManifest manifest;
  std::vector<RunRecord> runs;
};

/// Current UTC time as RFC 3339 with second precision.
std::string utc_timestamp_now();

/// Gzip-compressed tar: manifest.json followed by runs/NNNNNN.json, one
/// single-line JSON document per record. Identical inputs and created_at
/// give byte-identical files.
ArchiveManifest write_archive(const std::vector<RunRecord>& runs, const SweepConfig& config,
                              const std::filesystem::path& path,
                              std::optional<std::string> created_at = std::nullopt);

LoadedArchive load_archive(const std::filesystem::path& path);

/// In-memory forms of the two calls above, for callers that manage bytes.
std::string encode_archive(const std::vector<RunRecord>& runs, const SweepConfig& config,
                           ArchiveManifest& manifest);
LoadedArchive decode_archive(const std::string& bytes);

/* ----------------------------- CSV / JSON ----------------------------- */

void emit_csv(const Curve& curve, std::ostream& out);

struct CurveComparison {
  std::string a;
  std::string b;
  double threshold = kDefaultSignificance;
  TTestVariant variant = TTestVariant::pooled;
  std::vector<SizeComparison> rows;
};

/// Results attached to a JSON report. Phases and model refer to the first curve.
struct AnalysisBundle {
  std::optional<PhaseClassification> phases;
  std::optional<Recommendation> recommendation;
  std::optional<ModelParams> model;
  std::optional<CurveComparison> comparison;

  bool empty() const noexcept { return !phases && !recommendation && !model && !comparison; }
};

void emit_json(const std::vector<Curve>& curves, const AnalysisBundle& analysis,
               std::ostream& out);

/// Parses a report and re-emits it in canonical form.
std::string canonicalize_json(const std::string& document);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double value);

}  // namespace stablebench
