#include "reception/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reception/error.hpp"
#include "reception/rng.hpp"
#include "reception/text.hpp"

namespace reception::protocol {

namespace {

constexpr double kSentimentGain = 1.5;
constexpr double kNeutralLogit = 1.0;

std::vector<std::string> folded_sorted(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(text::fold_ascii(w));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<std::string> MockConfig::default_positive_words() {
  return {"thank", "thanks", "great", "good", "love", "safe", "helpful", "grateful",
          "excellent", "amazing", "hope", "support", "wonderful", "happy",
          "appreciate", "proud", "glad", "brilliant", "best", "together"};
}

std::vector<std::string> MockConfig::default_negative_words() {
  return {"lie", "lies", "liar", "lied", "shame", "shameful", "disgrace", "corrupt",
          "hate", "bad", "terrible", "poison", "dangerous", "fraud", "resign",
          "stupid", "wrong", "criminal", "worst", "failed"};
}

std::vector<std::string> mock_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                      (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (word) {
      cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

MockBackend::MockBackend(MockConfig config) : MockBackend({}, std::move(config)) {}

MockBackend::MockBackend(std::span<const corpus::TrainExample> corpus, MockConfig config)
    : config_(std::move(config)),
      positive_(folded_sorted(config_.positive_words)),
      negative_(folded_sorted(config_.negative_words)) {
  if (config_.dim < 2) throw ValidationError("mock backend dim must be >= 2");
  std::map<std::string, std::size_t> by_message_id;
  for (const auto& ex : corpus) {
    auto [it, inserted] = by_message_id.emplace(ex.message_id, pool_.size());
    if (inserted) pool_.push_back({ex.author, ex.message, embed_one(ex.message), {}});
    pool_[it->second].responses.push_back(ex.response);
  }
}

BackendInfo MockBackend::info() const {
  BackendInfo info{"mock", config_.dim, {Capability::embed, Capability::sentiment}};
  if (!pool_.empty()) info.capabilities.insert(info.capabilities.begin(), Capability::generate);
  return info;
}

std::vector<double> MockBackend::embed_one(const std::string& text) const {
  const auto dim = static_cast<std::uint64_t>(config_.dim);
  std::vector<double> v(config_.dim, 0.0);
  for (const auto& tok : mock_tokens(text)) {
    const std::uint64_t h = rng::derive_seed(config_.seed, tok);
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double ss = 0.0;
  for (double x : v) ss += x * x;
  if (ss == 0.0) {
    // No tokens (or full cancellation): fall back to hashing the whole text.
    const std::uint64_t h = rng::derive_seed(config_.seed ^ 0xA5A5A5A5ULL, text);
    v[h % dim] = 1.0;
    ss = 1.0;
  }
  const double n = std::sqrt(ss);
  for (double& x : v) x /= n;
  return v;
}

SentimentScore MockBackend::score_one(const std::string& text) const {
  if (text.empty()) throw ValidationError("sentiment: empty text");
  double z = 0.0;
  for (const auto& tok : mock_tokens(text)) {
    if (std::binary_search(positive_.begin(), positive_.end(), tok)) z += 1.0;
    if (std::binary_search(negative_.begin(), negative_.end(), tok)) z -= 1.0;
  }
  const double ln = -kSentimentGain * z;
  const double lu = kNeutralLogit;
  const double lp = kSentimentGain * z;
  const double m = std::max({ln, lu, lp});
  const double en = std::exp(ln - m);
  const double eu = std::exp(lu - m);
  const double ep = std::exp(lp - m);
  const double sum = en + eu + ep;
  return SentimentScore::from_probs(en / sum, eu / sum, ep / sum);
}

std::vector<std::size_t> MockBackend::ranked_entries(const std::string& author, const std::string& message) const {
  if (pool_.empty()) throw CapabilityError("mock backend has no corpus to generate from");
  const std::vector<double> q = embed_one(message);
  const std::string folded_author = text::fold_ascii(author);
  struct Key {
    double sim;
    bool same_author;
  };
  std::vector<Key> keys;
  keys.reserve(pool_.size());
  for (const auto& e : pool_) keys.push_back({dot(q, e.embedding), text::fold_ascii(e.author) == folded_author});
  std::vector<std::size_t> order(pool_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a].sim != keys[b].sim) return keys[a].sim > keys[b].sim;
    return keys[a].same_author && !keys[b].same_author;
  });
  return order;
}

std::size_t MockBackend::nearest_entry(const std::string& author, const std::string& message) const {
  return ranked_entries(author, message).front();
}

std::vector<std::string> MockBackend::generate(const GenerateRequest& request) const {
  if (request.message.empty()) throw ValidationError("generate: message is empty");
  if (request.n < 0) throw ValidationError("generate: n must be >= 0");
  if (request.n == 0) return {};
  const auto n = static_cast<std::size_t>(request.n);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t idx : ranked_entries(request.author, request.message)) {
    for (const auto& r : pool_[idx].responses) {
      if (out.size() == n) return out;
      out.push_back(r);
    }
  }
  for (std::size_t i = 0; out.size() < n; ++i) out.push_back(out[i]);
  return out;
}

EmbedResult MockBackend::embed(std::span<const std::string> texts) const {
  EmbedResult r;
  r.dim = config_.dim;
  r.vectors.reserve(texts.size());
  for (const auto& t : texts) {
    if (t.empty()) throw ValidationError("embed: empty text");
    r.vectors.push_back(embed_one(t));
  }
  return r;
}

std::vector<SentimentScore> MockBackend::sentiment(std::span<const std::string> texts) const {
  std::vector<SentimentScore> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score_one(t));
  return out;
}

}  // namespace reception::protocol
