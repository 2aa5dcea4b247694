#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reception/corpus.hpp"
#include "reception/protocol.hpp"

namespace reception::protocol {

struct MockConfig {
  int dim = 64;
  std::uint64_t seed = 0;
  std::vector<std::string> positive_words = default_positive_words();
  std::vector<std::string> negative_words = default_negative_words();

  static std::vector<std::string> default_positive_words();
  static std::vector<std::string> default_negative_words();
};

// Deterministic offline backend.
//  * embed: feature hashing of lower-cased word tokens into `dim` signed
//    buckets, seeded, unit-normalized.
//  * sentiment: signed word-list sum z squashed through a 3-way softmax with
//    logits (-1.5 z, 1, 1.5 z) for (neg, neu, pos).
//  * generate: responses of the training messages whose mock embeddings
//    are closest to the query (ties: same author, then corpus order), taken
//    in that order and cycled when the corpus runs out.
// Immutable after construction; every call is a pure function of its inputs.
class MockBackend final : public Backend {
 public:
  // Without a corpus the backend cannot generate.
  explicit MockBackend(MockConfig config = {});
  MockBackend(std::span<const corpus::TrainExample> corpus, MockConfig config = {});

  BackendInfo info() const override;
  std::vector<std::string> generate(const GenerateRequest& request) const override;
  EmbedResult embed(std::span<const std::string> texts) const override;
  std::vector<SentimentScore> sentiment(std::span<const std::string> texts) const override;

  std::vector<double> embed_one(const std::string& text) const;
  SentimentScore score_one(const std::string& text) const;

  // Indices into pool() in descending preference for `message`/`author`.
  std::vector<std::size_t> ranked_entries(const std::string& author, const std::string& message) const;
  std::size_t nearest_entry(const std::string& author, const std::string& message) const;

  struct Entry {
    std::string author;
    std::string message;
    std::vector<double> embedding;
    std::vector<std::string> responses;
  };
  const std::vector<Entry>& pool() const { return pool_; }

 private:
  MockConfig config_;
  std::vector<std::string> positive_;  // sorted, folded
  std::vector<std::string> negative_;
  std::vector<Entry> pool_;
};

// Lower-cased ASCII-alphanumeric word tokens; bytes >= 0x80 are word bytes.
std::vector<std::string> mock_tokens(std::string_view text);

}  // namespace reception::protocol
