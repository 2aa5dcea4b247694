#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reception/corpus.hpp"
#include "reception/embedding.hpp"
#include "reception/protocol.hpp"
#include "reception/statlab.hpp"

namespace reception::eval {

// Where the generated sample comes from. The substitutions replace the
// backend's output with a known sample, for calibrating the pipeline.
enum class GeneratedSource { backend, reference, random };

std::string_view to_string(GeneratedSource source);
GeneratedSource parse_generated_source(std::string_view text);

struct EvalConfig {
  int sample_size = 30;
  std::uint64_t seed = 0;
  int account_breakdown_min_messages = 20;
  stats::NormalizationMode normalization = stats::NormalizationMode::joint;
  double alpha = 0.05;
  int workers = 4;  // concurrent messages; 0 means hardware concurrency
  GeneratedSource generated_source = GeneratedSource::backend;

  void validate() const;
};

struct SampledText {
  std::string id;  // empty for generated texts
  std::string text;
  bool operator==(const SampledText&) const = default;
};

struct RawSamples {
  std::vector<SampledText> primary;
  std::vector<SampledText> reference;
  std::vector<SampledText> random;
  bool operator==(const RawSamples&) const = default;
};

// Every response in the dataset, grouped by the message it answers. Random
// samples for a message come from all the other groups.
class ResponsePool {
 public:
  explicit ResponsePool(const corpus::CorpusSplit& split);

  std::size_t size() const { return entries_.size(); }
  std::size_t message_count() const { return ranges_.size(); }
  // Responses answering `message_id`, as [begin, end) into the pool.
  std::pair<std::size_t, std::size_t> range_of(std::string_view message_id) const;
  const SampledText& at(std::size_t i) const { return entries_[i]; }
  const std::string& message_of(std::size_t i) const;

 private:
  struct Range {
    std::string message_id;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<SampledText> entries_;
  std::vector<Range> ranges_;  // sorted by message id, contiguous
};

// Throws ValidationError when the thread has fewer than 2N responses or the
// pool holds fewer than N responses to other messages.
RawSamples draw_samples(const corpus::MessageThread& thread, const ResponsePool& pool,
                        const EvalConfig& config);

// Sampling params with the per-message generation seed filled in unless the
// caller pinned one.
protocol::SamplingParams generation_params(const corpus::MessageThread& thread,
                                           const EvalConfig& config,
                                           const protocol::SamplingParams& params);

std::vector<std::string> collect_generated(const protocol::Backend& backend,
                                           const corpus::MessageThread& thread,
                                           const EvalConfig& config,
                                           const protocol::SamplingParams& params);

struct ScoredText {
  std::string id;
  std::string text;
  EmbeddingVector embedding;
  protocol::SentimentScore sentiment;
};

struct SampleBundle {
  std::string message_id;
  std::string author;
  std::string message_text;
  std::vector<ScoredText> primary;
  std::vector<ScoredText> reference;
  std::vector<ScoredText> random;
  std::vector<ScoredText> generated;
};

// Embeds and scores all four samples in one batch per call.
SampleBundle score_bundle(const protocol::Backend& backend, const corpus::MessageThread& thread,
                          const RawSamples& samples, const std::vector<std::string>& generated);

struct ComparisonEval {
  stats::SimilarityProfile profile;
  stats::BinCounts bins;
  stats::ChiSquareResult chi_square;  // primary row vs this row
};

struct MessageEval {
  std::string message_id;
  std::string author;
  stats::BinCounts primary_bins;
  ComparisonEval reference;
  ComparisonEval model;
  ComparisonEval random;
};

MessageEval evaluate_message(const SampleBundle& bundle);

struct AggregateEval {
  std::string group;  // "ALL" or an account
  std::size_t messages = 0;
  std::size_t list_length = 0;
  double e_max = 0.0;
  stats::RecCurve rec_reference;
  stats::RecCurve rec_model;
  stats::RecCurve rec_random;
  std::optional<stats::TTestResult> gt_vs_random;  // reference vs random
  std::optional<stats::TTestResult> me_vs_random;  // model vs random
  std::optional<stats::PearsonResult> baselines;   // reference vs random lists
  double fail_to_reject_reference = 0.0;  // percent of messages with p >= alpha
  double fail_to_reject_model = 0.0;
  double fail_to_reject_random = 0.0;
  std::optional<double> auc_pct_difference;
  std::optional<double> ttest_pct_difference;
};

inline constexpr const char* kAllGroup = "ALL";

// Throws ValidationError on an empty group.
AggregateEval aggregate(std::span<const MessageEval> evals, std::string group,
                        const EvalConfig& config);

// 100 * (model - random) / (reference - random); nullopt when the
// denominator is zero.
std::optional<double> model_pct_difference(double model, double reference, double random);

// ALL first, then accounts with enough messages, largest first (ties by
// case-folded name). An account is named as it first appears in `evals`.
std::vector<AggregateEval> aggregate_groups(std::span<const MessageEval> evals,
                                            const EvalConfig& config);

struct RunReport {
  std::vector<SampleBundle> bundles;   // ascending message id
  std::vector<MessageEval> evals;      // aligned with bundles
  std::vector<AggregateEval> aggregates;
  std::size_t test_messages = 0;
  std::size_t skipped = 0;     // too few responses
  std::size_t incomplete = 0;  // backend failure
  std::vector<std::string> warnings;
};

// Capabilities are checked before any message is processed. Throws
// ValidationError when no message completes.
RunReport run_evaluation(const protocol::Backend& backend, const corpus::CorpusSplit& split,
                         const EvalConfig& config, const protocol::SamplingParams& params = {});

}  // namespace reception::eval
