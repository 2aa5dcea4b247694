#include "reception/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reception/error.hpp"
#include "reception/prompt.hpp"

namespace reception::protocol {

namespace {

constexpr double kProbSumTolerance = 1e-6;
constexpr double kScoreTolerance = 1e-9;

void require_texts(std::span<const std::string> texts, const char* op) {
  if (texts.empty()) throw ValidationError(std::string(op) + ": text list is empty");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw ValidationError(std::string(op) + ": text " + std::to_string(i) + " is empty");
    }
  }
}

// Unique texts in first-seen order, plus the index of each input in it.
std::pair<std::vector<std::string>, std::vector<std::size_t>> dedupe(
    std::span<const std::string> texts) {
  std::vector<std::string> unique;
  std::vector<std::size_t> slot(texts.size());
  std::map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto [it, inserted] = seen.emplace(texts[i], unique.size());
    if (inserted) unique.push_back(texts[i]);
    slot[i] = it->second;
  }
  return {std::move(unique), std::move(slot)};
}

}  // namespace

void SamplingParams::validate() const {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  if (top_k < 0) throw ValidationError("top_k must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p must lie in (0, 1]");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be positive");
  }
}

double sentiment_from_probs(double p_neg, double p_neu, double p_pos) {
  for (double p : {p_neg, p_neu, p_pos}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("sentiment probabilities must lie in [0, 1]");
  }
  const double sum = p_neg + p_neu + p_pos;
  if (std::fabs(sum - 1.0) > kProbSumTolerance) {
    throw ValidationError("sentiment probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  return -1.0 * p_neg + 0.0 * p_neu + 1.0 * p_pos;
}

SentimentScore SentimentScore::from_probs(double p_neg, double p_neu, double p_pos) {
  return {p_neg, p_neu, p_pos, sentiment_from_probs(p_neg, p_neu, p_pos)};
}

void SentimentScore::validate() const {
  const double expected = sentiment_from_probs(p_neg, p_neu, p_pos);
  if (!(std::fabs(s - expected) <= kScoreTolerance)) {
    throw ValidationError("sentiment score s does not equal p_pos - p_neg");
  }
}

std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::generate: return "generate";
    case Capability::embed: return "embed";
    case Capability::sentiment: return "sentiment";
  }
  return "";
}

std::optional<Capability> parse_capability(std::string_view text) {
  for (auto c : {Capability::generate, Capability::embed, Capability::sentiment}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool BackendInfo::has(Capability c) const {
  return std::find(capabilities.begin(), capabilities.end(), c) != capabilities.end();
}

void BackendInfo::validate() const {
  if (embed_dim < 2) throw ProtocolError("backend embed_dim must be >= 2");
}

void require_capability(const BackendInfo& info, Capability c) {
  if (!info.has(c)) {
    throw CapabilityError("backend '" + info.name + "' does not support " + std::string(to_string(c)));
  }
}

std::vector<std::string> generate(const Backend& backend, std::string_view author,
                                  std::string_view message, int n,
                                  const SamplingParams& params) {
  if (n < 0) throw ValidationError("generate: n must be >= 0");
  if (message.empty()) throw ValidationError("generate: message is empty");
  params.validate();
  if (n == 0) return {};
  require_capability(backend.info(), Capability::generate);

  GenerateRequest req{std::string(author), std::string(message), n, params};
  std::vector<std::string> out = backend.generate(req);
  if (out.size() != static_cast<std::size_t>(n)) {
    throw ProtocolError("generate returned " + std::to_string(out.size()) + " texts, expected " +
                        std::to_string(n));
  }
  for (const auto& t : out) {
    if (auto tok = prompt::find_special_token(t)) {
      throw ProtocolError("generated text contains reserved token " + std::string(*tok));
    }
  }
  return out;
}

std::vector<EmbeddingVector> embed(const Backend& backend, std::span<const std::string> texts) {
  require_texts(texts, "embed");
  const BackendInfo info = backend.info();
  info.validate();
  require_capability(info, Capability::embed);

  auto [unique, slot] = dedupe(texts);
  EmbedResult raw = backend.embed(unique);
  if (raw.dim != info.embed_dim) {
    throw ProtocolError("embed dim " + std::to_string(raw.dim) + " does not match advertised " +
                        std::to_string(info.embed_dim));
  }
  if (raw.vectors.size() != unique.size()) throw ProtocolError("embed returned the wrong number of vectors");

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(unique.size());
  for (auto& v : raw.vectors) {
    if (v.size() != static_cast<std::size_t>(info.embed_dim)) {
      throw ProtocolError("embedding length does not match advertised dim");
    }
    vectors.push_back(EmbeddingVector::from_delivered(std::move(v)));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i : slot) out.push_back(vectors[i]);
  return out;
}

std::vector<SentimentScore> sentiment(const Backend& backend, std::span<const std::string> texts) {
  require_texts(texts, "sentiment");
  require_capability(backend.info(), Capability::sentiment);

  auto [unique, slot] = dedupe(texts);
  std::vector<SentimentScore> raw = backend.sentiment(unique);
  if (raw.size() != unique.size()) throw ProtocolError("sentiment returned the wrong number of scores");
  for (const auto& s : raw) {
    try {
      s.validate();
    } catch (const ValidationError& e) {
      throw ProtocolError(std::string("backend sentiment score invalid: ") + e.what());
    }
  }
  std::vector<SentimentScore> out;
  out.reserve(texts.size());
  for (std::size_t i : slot) out.push_back(raw[i]);
  return out;
}

}  // namespace reception::protocol
