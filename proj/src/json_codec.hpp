#pragma once

// JSON encodings shared by the archive and the report writer.

#include <json.hpp>

#include "stablebench/analysis.hpp"
#include "stablebench/core.hpp"
#include "stablebench/model.hpp"

namespace stablebench::detail {

using Json = nlohmann::ordered_json;

Json to_json(const SweepConfig& config);
SweepConfig config_from_json(const Json& j);

Json to_json(const RunRecord& run);
RunRecord run_from_json(const Json& j);

Json to_json(const Stats& s);
Json to_json(const CurvePoint& p);
Json to_json(const Curve& c);
Json to_json(const Recommendation& r);
Json to_json(const ModelParams& m);
Json to_json(const Curve& c, const PhaseClassification& phases);

}  // namespace stablebench::detail
