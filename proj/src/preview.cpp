#include "reception/preview.hpp"

#include <random>

#include "reception/error.hpp"
#include "reception/reports.hpp"
#include "reception/rng.hpp"
#include "reception/text.hpp"
#include "reception/wire.hpp"

namespace reception::preview {

namespace {

constexpr std::uint64_t kSeedMask = (std::uint64_t{1} << 53) - 1;
const char* const kMinus = "\xE2\x88\x92";

std::string with_minus(const std::string& s) { return s[0] == '-' ? kMinus + s.substr(1) : s; }

json bins_json(const stats::BinCounts& b) { return {{"neg", b.negative}, {"neu", b.neutral}, {"pos", b.positive}}; }

}  // namespace

std::string validate_draft(const DraftRequest& draft) {
  if (draft.n < 1 || draft.n > kMaxResponses) {
    throw ValidationError("n must lie in [1, " + std::to_string(kMaxResponses) + "], got " + std::to_string(draft.n));
  }
  draft.params.validate();
  if (text::clean_text(draft.author).empty()) throw ValidationError("author must not be empty");
  std::string cleaned = text::clean_text(draft.message);
  if (cleaned.empty()) throw ValidationError("draft message is empty after cleaning");
  return cleaned;
}

std::string PreviewResult::summary() const { return format_mean_sd(mean_s, sd_s); }

PreviewResult summarize(std::vector<std::string> texts, std::span<const double> scores, std::uint64_t seed) {
  if (texts.size() != scores.size()) throw ValidationError("summarize: texts and scores differ in length");
  if (texts.empty()) throw ValidationError("summarize: no responses");
  PreviewResult r;
  r.seed = seed;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto bin = stats::bin_sentiment(scores[i]);
    r.responses.push_back({std::move(texts[i]), scores[i], bin});
    r.bin_counts.add(bin);
  }
  r.mean_s = stats::mean(scores);
  r.sd_defined = scores.size() >= 2;
  r.sd_s = r.sd_defined ? stats::sample_sd(scores) : 0.0;
  return r;
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  const std::uint64_t hi = rd(), lo = rd();
  return ((hi << 32) ^ lo) & kSeedMask;
}

PreviewResult preview_draft(const DraftRequest& draft, const protocol::Backend& backend, std::uint64_t seed) {
  const std::string message = validate_draft(draft);
  const auto info = backend.info();
  protocol::require_capability(info, protocol::Capability::generate);
  protocol::require_capability(info, protocol::Capability::sentiment);

  protocol::SamplingParams params = draft.params;
  if (!params.seed) params.seed = seed;
  auto texts = protocol::generate(backend, draft.author, message, draft.n, params);
  const auto scores = protocol::sentiment(backend, texts);
  std::vector<double> s;
  for (const auto& sc : scores) s.push_back(sc.s);
  return summarize(std::move(texts), s, *params.seed);
}

PreviewResult preview_draft(const DraftRequest& draft, const protocol::Backend& backend) {
  return preview_draft(draft, backend, fresh_seed());
}

std::string ComparisonResult::delta_text() const { return format_delta(delta_mean); }

ComparisonResult make_comparison(PreviewResult a, PreviewResult b) {
  ComparisonResult c;
  c.delta_mean = b.mean_s - a.mean_s;
  c.a = std::move(a);
  c.b = std::move(b);
  return c;
}

ComparisonResult compare_drafts(const DraftRequest& a, const DraftRequest& b, const protocol::Backend& backend,
                                std::uint64_t base_seed) {
  validate_draft(a);
  validate_draft(b);
  auto ra = preview_draft(a, backend, rng::mix(base_seed, 0) & kSeedMask);
  auto rb = preview_draft(b, backend, rng::mix(base_seed, 1) & kSeedMask);
  return make_comparison(std::move(ra), std::move(rb));
}

ComparisonResult compare_drafts(const DraftRequest& a, const DraftRequest& b, const protocol::Backend& backend) {
  return compare_drafts(a, b, backend, fresh_seed());
}

std::string format_mean_sd(double mean, double sd) {
  return with_minus(reports::format_fixed(mean, 3)) + " \xC2\xB1 " + reports::format_fixed(sd, 3);
}

std::string format_delta(double delta) {
  const std::string s = reports::format_fixed(delta, 2);
  if (reports::round_half_away(delta, 2) == 0.0) return s;
  return s[0] == '-' ? with_minus(s) : "+" + s;
}

DraftRequest draft_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("draft must be a JSON object");
  DraftRequest d;
  try {
    d.author = j.at("author").get<std::string>();
    d.message = j.at("message").get<std::string>();
    if (j.contains("n")) {
      if (!j["n"].is_number_integer()) throw ValidationError("n must be an integer");
      const auto n = j["n"].get<long long>();
      if (n < 1 || n > kMaxResponses) {
        throw ValidationError("n must lie in [1, " + std::to_string(kMaxResponses) + "], got " + std::to_string(n));
      }
      d.n = static_cast<int>(n);
    }
    if (j.contains("params")) d.params = wire::decode_params(j["params"]);
    if (j.contains("seed") && !j["seed"].is_null()) {
      if (!j["seed"].is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
      d.params.seed = j["seed"].get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed draft: ") + e.what());
  }
  return d;
}

json to_json(const DraftRequest& d) {
  return {{"author", d.author}, {"message", d.message}, {"n", d.n}, {"params", wire::encode_params(d.params)}};
}

json to_json(const PreviewResult& r) {
  json responses = json::array();
  for (const auto& x : r.responses) {
    responses.push_back({{"text", x.text}, {"s", x.s}, {"bin", std::string(stats::to_string(x.bin))}});
  }
  return {{"responses", responses}, {"n", r.responses.size()}, {"mean_s", r.mean_s},
          {"sd_s", r.sd_s},         {"sd_defined", r.sd_defined}, {"bin_counts", bins_json(r.bin_counts)},
          {"summary", r.summary()}, {"seed", r.seed}};
}

json to_json(const ComparisonResult& c) {
  return {{"a", to_json(c.a)}, {"b", to_json(c.b)}, {"delta_mean", c.delta_mean}, {"delta_text", c.delta_text()}};
}

}  // namespace reception::preview
