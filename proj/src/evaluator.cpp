#include "reception/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "reception/error.hpp"
#include "reception/rng.hpp"
#include "reception/text.hpp"

namespace reception::eval {

namespace {

constexpr std::uint64_t kGenerationSalt = 0x67656E6572617465ULL;

std::vector<EmbeddingVector> embeddings_of(const std::vector<ScoredText>& xs) {
  std::vector<EmbeddingVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.embedding);
  return out;
}

stats::BinCounts bins_of(const std::vector<ScoredText>& xs) {
  stats::BinCounts counts;
  for (const auto& x : xs) counts.add(stats::bin_sentiment(x.sentiment.s));
  return counts;
}

ComparisonEval compare(const std::vector<EmbeddingVector>& primary, const stats::BinCounts& primary_bins,
                       const std::vector<ScoredText>& other) {
  ComparisonEval c;
  c.profile = stats::max_similarity_profile(primary, embeddings_of(other));
  c.bins = bins_of(other);
  c.chi_square = stats::chi_square_homogeneity(primary_bins, c.bins);
  return c;
}

template <typename Fn>
auto optional_stat(Fn&& fn) -> std::optional<decltype(fn())> {
  try {
    return fn();
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

double fail_to_reject(std::span<const MessageEval> evals, double alpha, ComparisonEval MessageEval::*which) {
  std::size_t kept = 0;
  for (const auto& e : evals) {
    if ((e.*which).chi_square.p >= alpha) ++kept;
  }
  return 100.0 * static_cast<double>(kept) / static_cast<double>(evals.size());
}

std::vector<std::string> texts_of(const std::vector<SampledText>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.text);
  return out;
}

}  // namespace

std::string_view to_string(GeneratedSource source) {
  switch (source) {
    case GeneratedSource::backend: return "backend";
    case GeneratedSource::reference: return "reference";
    case GeneratedSource::random: return "random";
  }
  return "backend";
}

GeneratedSource parse_generated_source(std::string_view text) {
  if (text == "backend") return GeneratedSource::backend;
  if (text == "reference") return GeneratedSource::reference;
  if (text == "random") return GeneratedSource::random;
  throw ValidationError("unknown generated source '" + std::string(text) +
                        "' (expected backend, reference or random)");
}

void EvalConfig::validate() const {
  if (sample_size < 1) throw ValidationError("sample size N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("significance level alpha must lie in (0, 1)");
  if (account_breakdown_min_messages < 1) throw ValidationError("account_breakdown_min_messages must be >= 1");
  if (workers < 0) throw ValidationError("workers must be >= 0");
}

ResponsePool::ResponsePool(const corpus::CorpusSplit& split) {
  std::map<std::string, std::vector<SampledText>, decltype(&corpus::id_less)> grouped(&corpus::id_less);
  for (const auto& t : split.test) {
    auto& g = grouped[t.message_id];
    for (const auto& r : t.responses) g.push_back({r.id, r.clean_text});
  }
  for (const auto& ex : split.train) grouped[ex.message_id].push_back({ex.response_id, ex.response});
  for (auto& [id, group] : grouped) {
    std::sort(group.begin(), group.end(),
              [](const SampledText& a, const SampledText& b) { return corpus::id_less(a.id, b.id); });
    const std::size_t begin = entries_.size();
    entries_.insert(entries_.end(), group.begin(), group.end());
    ranges_.push_back({id, begin, entries_.size()});
  }
}

std::pair<std::size_t, std::size_t> ResponsePool::range_of(std::string_view message_id) const {
  auto it = std::lower_bound(ranges_.begin(), ranges_.end(), message_id,
                             [](const Range& r, std::string_view id) { return corpus::id_less(r.message_id, id); });
  if (it == ranges_.end() || it->message_id != message_id) return {0, 0};
  return {it->begin, it->end};
}

const std::string& ResponsePool::message_of(std::size_t i) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), i,
                             [](std::size_t idx, const Range& r) { return idx < r.end; });
  if (it == ranges_.end()) throw ValidationError("response pool index out of range");
  return it->message_id;
}

RawSamples draw_samples(const corpus::MessageThread& thread, const ResponsePool& pool,
                        const EvalConfig& config) {
  const auto n = static_cast<std::size_t>(config.sample_size);
  if (thread.responses.size() < 2 * n) {
    throw ValidationError("message " + thread.message_id + " has " + std::to_string(thread.responses.size()) +
                          " responses; " + std::to_string(2 * n) + " needed");
  }
  const auto [own_begin, own_end] = pool.range_of(thread.message_id);
  const std::size_t own = own_end - own_begin;
  const std::size_t eligible = pool.size() - own;
  if (eligible < n) {
    throw ValidationError("only " + std::to_string(eligible) + " responses to other messages; " +
                          std::to_string(n) + " needed for the random sample");
  }

  rng::Engine eng(rng::derive_seed(config.seed, thread.message_id));
  RawSamples out;
  const auto known = rng::sample_without_replacement(eng, thread.responses.size(), 2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const auto& r = thread.responses[known[i]];
    (i < n ? out.primary : out.reference).push_back({r.id, r.clean_text});
  }
  for (std::size_t j : rng::sample_without_replacement(eng, eligible, n)) {
    out.random.push_back(pool.at(j < own_begin ? j : j + own));
  }
  return out;
}

protocol::SamplingParams generation_params(const corpus::MessageThread& thread, const EvalConfig& config,
                                           const protocol::SamplingParams& params) {
  protocol::SamplingParams p = params;
  if (!p.seed) p.seed = rng::derive_seed(config.seed ^ kGenerationSalt, thread.message_id);
  return p;
}

std::vector<std::string> collect_generated(const protocol::Backend& backend, const corpus::MessageThread& thread,
                                           const EvalConfig& config, const protocol::SamplingParams& params) {
  return protocol::generate(backend, thread.author, thread.clean_text, config.sample_size,
                            generation_params(thread, config, params));
}

SampleBundle score_bundle(const protocol::Backend& backend, const corpus::MessageThread& thread,
                          const RawSamples& samples, const std::vector<std::string>& generated) {
  std::vector<std::string> texts;
  for (const auto* part : {&samples.primary, &samples.reference, &samples.random}) {
    for (const auto& x : *part) texts.push_back(x.text);
  }
  texts.insert(texts.end(), generated.begin(), generated.end());

  const auto vectors = protocol::embed(backend, texts);
  const auto scores = protocol::sentiment(backend, texts);

  SampleBundle b;
  b.message_id = thread.message_id;
  b.author = thread.author;
  b.message_text = thread.clean_text;
  std::size_t k = 0;
  auto fill = [&](const std::vector<SampledText>& src, std::vector<ScoredText>& dst) {
    for (const auto& x : src) {
      dst.push_back({x.id, x.text, vectors[k], scores[k]});
      ++k;
    }
  };
  fill(samples.primary, b.primary);
  fill(samples.reference, b.reference);
  fill(samples.random, b.random);
  for (const auto& g : generated) {
    b.generated.push_back({"", g, vectors[k], scores[k]});
    ++k;
  }
  return b;
}

MessageEval evaluate_message(const SampleBundle& bundle) {
  MessageEval e;
  e.message_id = bundle.message_id;
  e.author = bundle.author;
  const auto primary = embeddings_of(bundle.primary);
  e.primary_bins = bins_of(bundle.primary);
  e.reference = compare(primary, e.primary_bins, bundle.reference);
  e.model = compare(primary, e.primary_bins, bundle.generated);
  e.random = compare(primary, e.primary_bins, bundle.random);
  return e;
}

std::optional<double> model_pct_difference(double model, double reference, double random) {
  const double denom = reference - random;
  if (denom == 0.0) return std::nullopt;
  return 100.0 * ((model - random) / denom);
}

AggregateEval aggregate(std::span<const MessageEval> evals, std::string group, const EvalConfig& config) {
  if (evals.empty()) throw ValidationError("aggregate: group '" + group + "' has no messages");
  AggregateEval a;
  a.group = std::move(group);
  a.messages = evals.size();

  stats::SimilarityProfile ref, model, rand;
  for (const auto& e : evals) {
    ref.values.insert(ref.values.end(), e.reference.profile.values.begin(), e.reference.profile.values.end());
    model.values.insert(model.values.end(), e.model.profile.values.begin(), e.model.profile.values.end());
    rand.values.insert(rand.values.end(), e.random.profile.values.begin(), e.random.profile.values.end());
  }
  a.list_length = ref.values.size();

  const auto errors = stats::to_error_lists(ref, model, rand, config.normalization);
  a.e_max = errors.e_max;
  a.rec_reference = stats::rec_curve(errors.reference, errors.e_max);
  a.rec_model = stats::rec_curve(errors.model, errors.e_max);
  a.rec_random = stats::rec_curve(errors.random, errors.e_max);

  a.gt_vs_random = optional_stat([&] { return stats::paired_t_test(ref.values, rand.values); });
  a.me_vs_random = optional_stat([&] { return stats::paired_t_test(model.values, rand.values); });
  a.baselines = optional_stat([&] { return stats::pearson(ref.values, rand.values); });

  a.fail_to_reject_reference = fail_to_reject(evals, config.alpha, &MessageEval::reference);
  a.fail_to_reject_model = fail_to_reject(evals, config.alpha, &MessageEval::model);
  a.fail_to_reject_random = fail_to_reject(evals, config.alpha, &MessageEval::random);

  a.auc_pct_difference = model_pct_difference(a.rec_model.auc, a.rec_reference.auc, a.rec_random.auc);
  if (a.gt_vs_random && a.me_vs_random) {
    a.ttest_pct_difference = model_pct_difference(a.me_vs_random->mean_diff, a.gt_vs_random->mean_diff, 0.0);
  }
  return a;
}

std::vector<AggregateEval> aggregate_groups(std::span<const MessageEval> evals, const EvalConfig& config) {
  std::vector<AggregateEval> out;
  out.push_back(aggregate(evals, kAllGroup, config));

  struct Group {
    std::string name;
    std::vector<MessageEval> evals;
  };
  std::map<std::string, Group> by_account;
  for (const auto& e : evals) {
    auto& g = by_account[text::fold_ascii(e.author)];
    if (g.evals.empty()) g.name = e.author;
    g.evals.push_back(e);
  }
  std::vector<const Group*> qualifying;
  for (const auto& [_, g] : by_account) {
    if (static_cast<int>(g.evals.size()) >= config.account_breakdown_min_messages) qualifying.push_back(&g);
  }
  std::stable_sort(qualifying.begin(), qualifying.end(),
                   [](const Group* a, const Group* b) { return a->evals.size() > b->evals.size(); });
  for (const Group* g : qualifying) out.push_back(aggregate(g->evals, g->name, config));
  return out;
}

RunReport run_evaluation(const protocol::Backend& backend, const corpus::CorpusSplit& split,
                         const EvalConfig& config, const protocol::SamplingParams& params) {
  config.validate();
  params.validate();
  const auto info = backend.info();
  info.validate();
  protocol::require_capability(info, protocol::Capability::embed);
  protocol::require_capability(info, protocol::Capability::sentiment);
  if (config.generated_source == GeneratedSource::backend) {
    protocol::require_capability(info, protocol::Capability::generate);
  }

  RunReport report;
  report.test_messages = split.test.size();
  const ResponsePool pool(split);

  std::vector<const corpus::MessageThread*> work;
  std::vector<RawSamples> drawn;
  for (const auto& t : split.test) {
    try {
      drawn.push_back(draw_samples(t, pool, config));
      work.push_back(&t);
    } catch (const ValidationError& e) {
      ++report.skipped;
      report.warnings.push_back(std::string("skipped: ") + e.what());
    }
  }

  std::vector<std::optional<SampleBundle>> bundles(work.size());
  std::vector<std::string> failures(work.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size() || abort.load()) return;
      const auto& thread = *work[i];
      try {
        std::vector<std::string> generated;
        switch (config.generated_source) {
          case GeneratedSource::backend: generated = collect_generated(backend, thread, config, params); break;
          case GeneratedSource::reference: generated = texts_of(drawn[i].reference); break;
          case GeneratedSource::random: generated = texts_of(drawn[i].random); break;
        }
        bundles[i] = score_bundle(backend, thread, drawn[i], generated);
      } catch (const TransportError& e) {
        failures[i] = e.what();
      } catch (const ProtocolError& e) {
        failures[i] = e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        abort.store(true);
        return;
      }
    }
  };

  std::size_t workers = config.workers > 0 ? static_cast<std::size_t>(config.workers)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(work.size(), 1));
  {
    std::vector<std::jthread> pool_threads;
    for (std::size_t w = 0; w < workers; ++w) pool_threads.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!bundles[i]) {
      ++report.incomplete;
      report.warnings.push_back("incomplete: message " + work[i]->message_id + ": " + failures[i]);
      continue;
    }
    report.evals.push_back(evaluate_message(*bundles[i]));
    report.bundles.push_back(std::move(*bundles[i]));
  }
  if (report.evals.empty()) throw ValidationError("no test message completed evaluation");
  report.aggregates = aggregate_groups(report.evals, config);
  return report;
}

}  // namespace reception::eval
