#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reception/embedding.hpp"

namespace reception::protocol {

inline constexpr std::size_t kMaxBatch = 256;

struct SamplingParams {
  int num_beams = 3;
  int top_k = 50;  // 0 disables top-k filtering
  double top_p = 0.95;
  double temperature = 1.5;
  std::optional<std::uint64_t> seed;

  void validate() const;
  bool operator==(const SamplingParams&) const = default;
};

struct SentimentScore {
  double p_neg = 0.0;
  double p_neu = 1.0;
  double p_pos = 0.0;
  double s = 0.0;

  // Validates the probabilities and derives s.
  static SentimentScore from_probs(double p_neg, double p_neu, double p_pos);
  void validate() const;
  bool operator==(const SentimentScore&) const = default;
};

// Expected class value with weights {-1, 0, +1}. Probabilities must be
// non-negative and sum to 1 within 1e-6; throws ValidationError otherwise.
double sentiment_from_probs(double p_neg, double p_neu, double p_pos);

enum class Capability { generate, embed, sentiment };

std::string_view to_string(Capability c);
std::optional<Capability> parse_capability(std::string_view text);

struct BackendInfo {
  std::string name;
  int embed_dim = 0;
  std::vector<Capability> capabilities;

  bool has(Capability c) const;
  void validate() const;
  bool operator==(const BackendInfo&) const = default;
};

struct GenerateRequest {
  std::string author;
  std::string message;
  int n = 0;
  SamplingParams params;

  bool operator==(const GenerateRequest&) const = default;
};

struct EmbedResult {
  int dim = 0;
  std::vector<std::vector<double>> vectors;

  bool operator==(const EmbedResult&) const = default;
};

// A generation / embedding / sentiment provider. Implementations answer raw
// requests; the free functions below enforce the contract around them.
// Implementations must be safe for concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendInfo info() const = 0;
  virtual std::vector<std::string> generate(const GenerateRequest& request) const = 0;
  virtual EmbedResult embed(std::span<const std::string> texts) const = 0;
  virtual std::vector<SentimentScore> sentiment(std::span<const std::string> texts) const = 0;
};

void require_capability(const BackendInfo& info, Capability c);

// n texts, each free of the reserved prompt tokens.
std::vector<std::string> generate(const Backend& backend, std::string_view author,
                                  std::string_view message, int n,
                                  const SamplingParams& params = {});

// One unit vector per text, order preserving. Identical texts in a batch are
// sent once, so they always receive identical vectors.
std::vector<EmbeddingVector> embed(const Backend& backend, std::span<const std::string> texts);

std::vector<SentimentScore> sentiment(const Backend& backend, std::span<const std::string> texts);

}  // namespace reception::protocol
