#pragma once

#include <string>

#include <json.hpp>

#include "listreg/core.hpp"

namespace listreg {

using Json = nlohmann::ordered_json;

// {"n": int, "Q": int, "kind": "total"|"partial", "rows": [[int|"*",...],...]}
Json class_to_json(const HypothesisClass& cls);
HypothesisClass class_from_json(const Json& j);

// {"Q": int, "support": [[x, y_num, mass_num, mass_den],...]}
Json distribution_to_json(const FiniteDistribution& dist, std::int64_t resolution);
FiniteDistribution distribution_from_json(const Json& j);

// {"Q": int, "pairs": [[x, y_num],...]}
Json sample_to_json(const LabeledSample& sample, std::int64_t resolution);
LabeledSample sample_from_json(const Json& j);

// {"k": int, "gamma": "p/q", "queries": [{"x": int, "list": ["p/q",...]},...]}
Json hypothesis_to_json(const std::vector<LabelList>& per_point, int k, const Rat& gamma);
std::vector<LabelList> hypothesis_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace listreg
