#pragma once

#include "itm/perturb.hpp"
#include "itm/vectors.hpp"

#include <json.hpp>

namespace itm {

using nlohmann::json;

// Map files: {"r": 3, "beta": ["1/3","2/3"], "gamma": ["1/3","0","-2/3"]}.
// Rationals are always strings so values stay exact. beta lists only the
// interior discontinuities. Throws Error("parse", ...) with a field
// diagnostic on malformed input.
json map_to_json(const ParamVector& p);
ParamVector map_from_json(const json& j);

ParamVector load_map_file(const std::string& path);
void save_map_file(const std::string& path, const ParamVector& p);

json to_json(const SignedPoint& x);
json to_json(const IntervalSet& s);
json to_json(const AttractorResult& a);
json to_json(const ComponentsReport& c);
json to_json(const ReturnMapData& d);
json to_json(const CorrespondenceReport& rep);
json to_json(const A3Result& a3, const ParamVector& p);
json to_json(const StabilityReport& rep, const ParamVector& p);
json to_json(const CoefVector& v);
json to_json(const ComponentVectorBundle& b);
json to_json(const PerturbationOutcome& out);
json to_json(const PipelineTrail& trail);

}  // namespace itm
