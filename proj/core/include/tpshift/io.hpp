#pragma once

// JSON and CSV forms of the library types. Parsing failures surface as
// Error{Errc::kConfig} naming the offending field.

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "tpshift/density.hpp"
#include "tpshift/experiment.hpp"
#include "tpshift/generator.hpp"
#include "tpshift/jensen.hpp"
#include "tpshift/sigret.hpp"
#include "tpshift/sispace.hpp"

namespace tpshift {

using Json = nlohmann::json;

// {"c0": 1, "gamma": 1, "deltas": [...]}; c0 and gamma are optional.
GeneratorParams params_from_json(const Json& j);
Json to_json(const GeneratorParams& p);

// {"offset": k0, "coeffs": [...]}
CoeffSeq coeffs_from_json(const Json& j);
Json to_json(const CoeffSeq& c);

// {"points": [...], "window": [lo, hi]}; the window defaults to the hull.
PointSet point_set_from_json(const Json& j);
Json to_json(const PointSet& p);

ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

Json to_json(const DensityProfile& p);
Json to_json(const Lemma1Report& r);
Json to_json(const SubadditivityReport& r);
Json to_json(const ZeroSet& z);
Json to_json(const InterlaceReport& r);
Json to_json(const SegmentReport& r);
Json to_json(const BaseCaseReport& r);
Json to_json(const RetrievalResult& r);
Json to_json(const ExperimentReport& r);

// Header "kind,r,value".
std::string density_csv(const DensityProfile& p);
// Header "density,trials,successes,mean_residual".
std::string experiment_csv(const ExperimentReport& r);

// Throws Errc::kConfig with the parser's position on malformed input.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
// 16 hex digits of fnv1a64 over the compact dump of j.
std::string config_hash(const Json& j);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace tpshift
