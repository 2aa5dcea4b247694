#pragma once

#include <cstdint>
#include <vector>

#include "reception/corpus.hpp"

namespace reception::synthetic {

// Seeded archive whose responses cluster by message topic. Each message has
// a skewed sentiment profile (mostly negative, neutral or positive) that its
// responses follow, expressed through the mock backend's sentiment words.
struct SyntheticConfig {
  std::uint64_t seed = 2022;
  int topics = 10;
  int test_messages = 50;
  int responses_per_test_message = 70;
  int train_messages = 150;
  int min_train_responses = 4;
  int max_train_responses = 20;
  // Test messages assigned round-robin to these accounts (in order) until
  // each has `messages_per_featured_account`; the rest go to other accounts.
  std::vector<std::string> featured_accounts = {"WHO", "CDCgov", "CDCDirector"};
  int messages_per_featured_account = 20;
  double url_rate = 0.15;
  double emoji_rate = 0.15;

  void validate() const;
};

// Archive records (messages followed by their responses), ascending id.
std::vector<corpus::TweetRecord> generate_archive(const SyntheticConfig& config = {});

// Screen names used as message authors, suitable for an allowlist.
std::vector<std::string> account_names(const SyntheticConfig& config = {});

}  // namespace reception::synthetic
