#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "reception/protocol.hpp"
#include "reception/statlab.hpp"

namespace reception::preview {

using json = nlohmann::json;

inline constexpr int kMaxResponses = 200;

struct DraftRequest {
  std::string author;
  std::string message;
  int n = 30;
  protocol::SamplingParams params;  // params.seed pins the preview
};

// Cleans the message and checks the request; throws ValidationError.
// Returns the cleaned message.
std::string validate_draft(const DraftRequest& draft);

struct ScoredResponse {
  std::string text;
  double s = 0.0;
  stats::SentimentBin bin = stats::SentimentBin::neutral;
};

struct PreviewResult {
  std::vector<ScoredResponse> responses;
  double mean_s = 0.0;
  double sd_s = 0.0;        // sample sd; 0 when undefined
  bool sd_defined = false;  // false for a single response
  stats::BinCounts bin_counts;
  std::uint64_t seed = 0;

  std::string summary() const;  // "−0.253 ± 0.491"
};

// Builds a result from already-scored texts. Throws on size mismatch or an
// empty list.
PreviewResult summarize(std::vector<std::string> texts, std::span<const double> scores, std::uint64_t seed = 0);

// Seed for an unpinned request: 53 random bits, so it survives a round trip
// through a double (the UI's number type).
std::uint64_t fresh_seed();

// The seed used when a draft does not pin one.
PreviewResult preview_draft(const DraftRequest& draft, const protocol::Backend& backend, std::uint64_t seed);
PreviewResult preview_draft(const DraftRequest& draft, const protocol::Backend& backend);

struct ComparisonResult {
  PreviewResult a;
  PreviewResult b;
  double delta_mean = 0.0;  // b minus a

  std::string delta_text() const;  // "+0.47"
};

ComparisonResult make_comparison(PreviewResult a, PreviewResult b);

// Both drafts are validated before any backend call. Unpinned drafts get
// independent seeds derived from `base_seed`.
ComparisonResult compare_drafts(const DraftRequest& a, const DraftRequest& b, const protocol::Backend& backend,
                                std::uint64_t base_seed);
ComparisonResult compare_drafts(const DraftRequest& a, const DraftRequest& b, const protocol::Backend& backend);

// Three decimals with a proper minus sign (U+2212): "−0.253 ± 0.491".
std::string format_mean_sd(double mean, double sd);
// Two decimals, explicit sign, "0.00" for zero: "+0.47", "−0.30".
std::string format_delta(double delta);

DraftRequest draft_from_json(const json& j);
json to_json(const DraftRequest& d);
json to_json(const PreviewResult& r);
json to_json(const ComparisonResult& c);

}  // namespace reception::preview
