#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "reception/evaluator.hpp"

namespace reception::eval {

using json = nlohmann::json;

inline constexpr const char* kAggregatesFile = "aggregates.json";
inline constexpr const char* kBundlesFile = "bundles.jsonl";
inline constexpr const char* kMessagesFile = "messages.jsonl";

// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
json number_to_json(double x);
double number_from_json(const json& j);

json to_json(const stats::RecCurve& curve);
stats::RecCurve rec_curve_from_json(const json& j);

json to_json(const AggregateEval& a);
AggregateEval aggregate_from_json(const json& j);

json to_json(const SampleBundle& b);
SampleBundle bundle_from_json(const json& j);

json to_json(const MessageEval& e);

// {"aggregates":[...]}
void write_aggregates(const std::filesystem::path& path, std::span<const AggregateEval> aggregates);
std::vector<AggregateEval> read_aggregates(const std::filesystem::path& path);

void write_bundles(const std::filesystem::path& path, std::span<const SampleBundle> bundles);
std::vector<SampleBundle> read_bundles(const std::filesystem::path& path);

void write_message_evals(const std::filesystem::path& path, std::span<const MessageEval> evals);

}  // namespace reception::eval
