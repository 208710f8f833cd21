// json_io.hpp — the canonical instance / tree-bundle / report file formats.
#pragma once

#include <json.hpp>

#include "hhs/combine.hpp"
#include "hhs/constructions.hpp"
#include "hhs/verifier.hpp"

namespace hhs {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json graph_to_json(const MetricGraph& g);
MetricGraph graph_from_json(const json& j);

json instance_to_json(const HInstance& h);
RawInstance instance_from_json(const json& j);  // throws ParseError on malformed input

// tree-of-structures bundle
json bundle_to_json(const TreeOfHHS& t);
TreeOfHHS bundle_from_json(const json& j);

// report: per-axiom status and constants, witnesses, seed, approximations
json report_to_json(const VerifyReport& rep, const ConstantsReport& consts,
                    std::uint64_t seed);

json constants_to_json(const ConstantsReport& c);

}  // namespace hhs
