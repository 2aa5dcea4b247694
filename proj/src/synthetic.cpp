#include "reception/synthetic.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

#include "reception/error.hpp"
#include "reception/mock_backend.hpp"
#include "reception/rng.hpp"

namespace reception::synthetic {

namespace {

constexpr std::uint64_t kFirstId = 1250000000000000000ULL;

const std::array<const char*, 7> kOtherAccounts = {"ECDC_EU", "NIH", "HHSGov", "US_FDA",
                                                   "NHSEngland", "CDCemergency", "PHE_uk"};

const std::array<const char*, 6> kEmoji = {"\xF0\x9F\x98\xB7",                  // face with mask
                                           "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD",  // thumbs up, skin tone
                                           "\xE2\x9D\xA4\xEF\xB8\x8F",          // heart + VS16
                                           "\xF0\x9F\x92\x89",                  // syringe
                                           "\xF0\x9F\x87\xBA\xF0\x9F\x87\xB8",  // flag
                                           "\xF0\x9F\xA4\xA6\xE2\x80\x8D\xE2\x99\x82\xEF\xB8\x8F"};

enum class Mood { negative, neutral, positive };

struct Profile {
  double negative;
  double neutral;
};

constexpr Profile profile_for(Mood m) {
  switch (m) {
    case Mood::negative: return {0.80, 0.15};
    case Mood::neutral: return {0.10, 0.80};
    case Mood::positive: return {0.05, 0.15};
  }
  return {1.0 / 3, 1.0 / 3};
}

class Vocabulary {
 public:
  explicit Vocabulary(rng::Engine& eng) : eng_(eng) {
    for (const auto& w : protocol::MockConfig::default_positive_words()) used_.insert(w);
    for (const auto& w : protocol::MockConfig::default_negative_words()) used_.insert(w);
  }

  std::string fresh() {
    static const char* consonants = "bdfgklmnprstvz";
    static const char* vowels = "aeiou";
    for (;;) {
      std::string w;
      const auto syllables = 2 + rng::uniform_below(eng_, 2);
      for (std::uint64_t i = 0; i < syllables; ++i) {
        w.push_back(consonants[rng::uniform_below(eng_, 14)]);
        w.push_back(vowels[rng::uniform_below(eng_, 5)]);
      }
      if (used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> fresh(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh());
    return out;
  }

 private:
  rng::Engine& eng_;
  std::set<std::string> used_;
};

const std::string& pick(rng::Engine& eng, const std::vector<std::string>& words) {
  return words[rng::uniform_below(eng, words.size())];
}

std::string random_link(rng::Engine& eng) {
  static const char* alnum = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string s = rng::uniform_below(eng, 2) ? "https://t.co/" : "http://example.org/news/";
  for (int i = 0; i < 10; ++i) s.push_back(alnum[rng::uniform_below(eng, 62)]);
  return s;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

struct PlannedMessage {
  std::string author;
  int topic = 0;
  int responses = 0;
};

}  // namespace

void SyntheticConfig::validate() const {
  if (topics < 1) throw ValidationError("synthetic topics must be >= 1");
  if (test_messages < 0 || train_messages < 0) throw ValidationError("message counts must be >= 0");
  if (responses_per_test_message < 1) throw ValidationError("responses_per_test_message must be >= 1");
  if (min_train_responses < 1 || max_train_responses < min_train_responses) {
    throw ValidationError("train response range must satisfy 1 <= min <= max");
  }
  if (messages_per_featured_account < 0) throw ValidationError("messages_per_featured_account must be >= 0");
  if (url_rate < 0 || url_rate > 1 || emoji_rate < 0 || emoji_rate > 1) {
    throw ValidationError("decoration rates must lie in [0, 1]");
  }
}

std::vector<std::string> account_names(const SyntheticConfig& config) {
  std::vector<std::string> names = config.featured_accounts;
  for (const char* a : kOtherAccounts) names.emplace_back(a);
  return names;
}

std::vector<corpus::TweetRecord> generate_archive(const SyntheticConfig& config) {
  config.validate();
  rng::Engine eng(config.seed);
  Vocabulary vocab(eng);

  std::vector<std::vector<std::string>> topic_words;
  for (int t = 0; t < config.topics; ++t) topic_words.push_back(vocab.fresh(20));
  const auto generic = vocab.fresh(40);
  const auto positive = protocol::MockConfig::default_positive_words();
  const auto negative = protocol::MockConfig::default_negative_words();

  std::vector<std::string> others;
  for (const char* a : kOtherAccounts) others.emplace_back(a);
  const auto all_accounts = account_names(config);

  std::vector<PlannedMessage> plan;
  for (const auto& account : config.featured_accounts) {
    for (int i = 0; i < config.messages_per_featured_account; ++i) {
      if (static_cast<int>(plan.size()) == config.test_messages) break;
      plan.push_back({account, 0, config.responses_per_test_message});
    }
  }
  while (static_cast<int>(plan.size()) < config.test_messages) {
    plan.push_back({others[plan.size() % others.size()], 0, config.responses_per_test_message});
  }
  const auto span = static_cast<std::uint64_t>(config.max_train_responses - config.min_train_responses + 1);
  for (int i = 0; i < config.train_messages; ++i) {
    plan.push_back({all_accounts[rng::uniform_below(eng, all_accounts.size())], 0,
                    config.min_train_responses + static_cast<int>(rng::uniform_below(eng, span))});
  }
  for (auto& m : plan) m.topic = static_cast<int>(rng::uniform_below(eng, config.topics));
  rng::shuffle(eng, plan);

  const auto base = corpus::parse_timestamp("2020-03-01T00:00:00Z");
  std::uint64_t next_id = kFirstId;
  std::vector<corpus::TweetRecord> records;

  for (std::size_t mi = 0; mi < plan.size(); ++mi) {
    const auto& m = plan[mi];
    const auto& words = topic_words[m.topic];
    const auto keywords = vocab.fresh(2);
    const auto mood = static_cast<Mood>(rng::uniform_below(eng, 3));
    const auto profile = profile_for(mood);
    const auto msg_time = base + std::chrono::hours(6 * mi);

    std::vector<std::string> tokens;
    for (int i = 0; i < 10; ++i) tokens.push_back(pick(eng, words));
    tokens.insert(tokens.end(), keywords.begin(), keywords.end());
    std::string text = join(tokens);
    if (rng::uniform_unit(eng) < 0.5) text += " " + random_link(eng);

    corpus::TweetRecord message;
    message.id = std::to_string(next_id++);
    message.text = text;
    message.author = m.author;
    message.created_at = msg_time;
    records.push_back(message);

    for (int r = 0; r < m.responses; ++r) {
      std::vector<std::string> rt;
      for (int i = 0; i < 3; ++i) rt.push_back(pick(eng, generic));
      for (int i = 0; i < 4; ++i) rt.push_back(pick(eng, words));
      for (const auto& k : keywords) {
        if (rng::uniform_unit(eng) < 0.6) rt.push_back(k);
      }
      const double u = rng::uniform_unit(eng);
      if (u < profile.negative) {
        rt.push_back(pick(eng, negative));
        rt.push_back(pick(eng, negative));
      } else if (u >= profile.negative + profile.neutral) {
        rt.push_back(pick(eng, positive));
        rt.push_back(pick(eng, positive));
      }
      rng::shuffle(eng, rt);
      std::string response = join(rt);
      if (rng::uniform_unit(eng) < 0.3) response = "@" + m.author + " " + response;
      if (rng::uniform_unit(eng) < config.url_rate) response += " " + random_link(eng);
      if (rng::uniform_unit(eng) < config.emoji_rate) {
        response += " ";
        response += kEmoji[rng::uniform_below(eng, kEmoji.size())];
      }

      corpus::TweetRecord rec;
      rec.id = std::to_string(next_id++);
      rec.text = std::move(response);
      rec.author = "user" + std::to_string(rng::uniform_below(eng, 5000));
      rec.created_at = msg_time + std::chrono::minutes(r + 1);
      if (rng::uniform_unit(eng) < 0.8) {
        rec.in_reply_to_id = message.id;
      } else {
        rec.quoted_id = message.id;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace reception::synthetic
