#include "reception/eval_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "reception/error.hpp"

namespace reception::eval {

namespace {

std::string dump(const json& j, int indent = -1) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

json bins_to_json(const stats::BinCounts& b) {
  return {{"neg", b.negative}, {"neu", b.neutral}, {"pos", b.positive}};
}

json ttest_to_json(const std::optional<stats::TTestResult>& t) {
  if (!t) return nullptr;
  return {{"mean_diff", number_to_json(t->mean_diff)},
          {"t", number_to_json(t->t)},
          {"df", t->df},
          {"p", number_to_json(t->p)}};
}

std::optional<stats::TTestResult> ttest_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return stats::TTestResult{number_from_json(j.at("mean_diff")), number_from_json(j.at("t")),
                            j.at("df").get<int>(), number_from_json(j.at("p"))};
}

json optional_number(const std::optional<double>& x) { return x ? number_to_json(*x) : json(nullptr); }

std::optional<double> optional_number_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from_json(j);
}

json scored_to_json(const ScoredText& s) {
  json emb = json::array();
  for (double x : s.embedding.components()) emb.push_back(x);
  return {{"id", s.id},
          {"text", s.text},
          {"embedding", emb},
          {"sentiment",
           {{"neg", s.sentiment.p_neg}, {"neu", s.sentiment.p_neu}, {"pos", s.sentiment.p_pos}, {"s", s.sentiment.s}}}};
}

ScoredText scored_from_json(const json& j) {
  ScoredText s;
  s.id = j.at("id").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.embedding = EmbeddingVector::stored(j.at("embedding").get<std::vector<double>>());
  const auto& sj = j.at("sentiment");
  s.sentiment = {sj.at("neg").get<double>(), sj.at("neu").get<double>(), sj.at("pos").get<double>(),
                 sj.at("s").get<double>()};
  return s;
}

json sample_to_json(const std::vector<ScoredText>& xs) {
  json arr = json::array();
  for (const auto& x : xs) arr.push_back(scored_to_json(x));
  return arr;
}

std::vector<ScoredText> sample_from_json(const json& j) {
  std::vector<ScoredText> out;
  for (const auto& x : j) out.push_back(scored_from_json(x));
  return out;
}

json comparison_to_json(const ComparisonEval& c) {
  return {{"profile", c.profile.values},
          {"bins", bins_to_json(c.bins)},
          {"chi_square",
           {{"statistic", number_to_json(c.chi_square.statistic)},
            {"df", c.chi_square.df},
            {"p", number_to_json(c.chi_square.p)}}}};
}

}  // namespace

json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

json to_json(const stats::RecCurve& curve) {
  json pts = json::array();
  for (const auto& p : curve.points) pts.push_back({p.tolerance, p.accuracy});
  return {{"e_max", curve.e_max}, {"auc", curve.auc}, {"points", pts}};
}

stats::RecCurve rec_curve_from_json(const json& j) {
  stats::RecCurve c;
  c.e_max = j.at("e_max").get<double>();
  c.auc = j.at("auc").get<double>();
  for (const auto& p : j.at("points")) c.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return c;
}

json to_json(const AggregateEval& a) {
  json baselines = nullptr;
  if (a.baselines) {
    baselines = {{"r", number_to_json(a.baselines->r)}, {"p", number_to_json(a.baselines->p)}, {"n", a.baselines->n}};
  }
  return {{"group", a.group},
          {"messages", a.messages},
          {"list_length", a.list_length},
          {"e_max", a.e_max},
          {"rec",
           {{"reference", to_json(a.rec_reference)},
            {"model", to_json(a.rec_model)},
            {"random", to_json(a.rec_random)}}},
          {"ttest", {{"gt_vs_random", ttest_to_json(a.gt_vs_random)}, {"me_vs_random", ttest_to_json(a.me_vs_random)}}},
          {"pearson_baselines", baselines},
          {"chi_square_fail_to_reject_pct",
           {{"reference", a.fail_to_reject_reference},
            {"model", a.fail_to_reject_model},
            {"random", a.fail_to_reject_random}}},
          {"model_pct_difference",
           {{"auc", optional_number(a.auc_pct_difference)}, {"ttest", optional_number(a.ttest_pct_difference)}}}};
}

AggregateEval aggregate_from_json(const json& j) {
  try {
    AggregateEval a;
    a.group = j.at("group").get<std::string>();
    a.messages = j.at("messages").get<std::size_t>();
    a.list_length = j.at("list_length").get<std::size_t>();
    a.e_max = j.at("e_max").get<double>();
    a.rec_reference = rec_curve_from_json(j.at("rec").at("reference"));
    a.rec_model = rec_curve_from_json(j.at("rec").at("model"));
    a.rec_random = rec_curve_from_json(j.at("rec").at("random"));
    a.gt_vs_random = ttest_from_json(j.at("ttest").at("gt_vs_random"));
    a.me_vs_random = ttest_from_json(j.at("ttest").at("me_vs_random"));
    const auto& pb = j.at("pearson_baselines");
    if (!pb.is_null()) {
      a.baselines = stats::PearsonResult{number_from_json(pb.at("r")), number_from_json(pb.at("p")),
                                         pb.at("n").get<std::size_t>()};
    }
    const auto& ftr = j.at("chi_square_fail_to_reject_pct");
    a.fail_to_reject_reference = ftr.at("reference").get<double>();
    a.fail_to_reject_model = ftr.at("model").get<double>();
    a.fail_to_reject_random = ftr.at("random").get<double>();
    a.auc_pct_difference = optional_number_from(j.at("model_pct_difference").at("auc"));
    a.ttest_pct_difference = optional_number_from(j.at("model_pct_difference").at("ttest"));
    return a;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed aggregate: ") + e.what());
  }
}

json to_json(const SampleBundle& b) {
  return {{"message_id", b.message_id},
          {"author", b.author},
          {"message", b.message_text},
          {"primary", sample_to_json(b.primary)},
          {"reference", sample_to_json(b.reference)},
          {"random", sample_to_json(b.random)},
          {"generated", sample_to_json(b.generated)}};
}

SampleBundle bundle_from_json(const json& j) {
  try {
    SampleBundle b;
    b.message_id = j.at("message_id").get<std::string>();
    b.author = j.at("author").get<std::string>();
    b.message_text = j.at("message").get<std::string>();
    b.primary = sample_from_json(j.at("primary"));
    b.reference = sample_from_json(j.at("reference"));
    b.random = sample_from_json(j.at("random"));
    b.generated = sample_from_json(j.at("generated"));
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed bundle: ") + e.what());
  }
}

json to_json(const MessageEval& e) {
  return {{"message_id", e.message_id},
          {"author", e.author},
          {"primary_bins", bins_to_json(e.primary_bins)},
          {"reference", comparison_to_json(e.reference)},
          {"model", comparison_to_json(e.model)},
          {"random", comparison_to_json(e.random)}};
}

void write_aggregates(const std::filesystem::path& path, std::span<const AggregateEval> aggregates) {
  json arr = json::array();
  for (const auto& a : aggregates) arr.push_back(to_json(a));
  auto out = open_out(path);
  out << dump({{"aggregates", arr}}, 2) << '\n';
}

std::vector<AggregateEval> read_aggregates(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("aggregates") || !j["aggregates"].is_array()) {
    throw ParseError(path.string() + ": expected {\"aggregates\": [...]}");
  }
  std::vector<AggregateEval> out;
  for (const auto& a : j["aggregates"]) out.push_back(aggregate_from_json(a));
  return out;
}

void write_bundles(const std::filesystem::path& path, std::span<const SampleBundle> bundles) {
  auto out = open_out(path);
  for (const auto& b : bundles) out << dump(to_json(b)) << '\n';
}

std::vector<SampleBundle> read_bundles(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<SampleBundle> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(bundle_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_message_evals(const std::filesystem::path& path, std::span<const MessageEval> evals) {
  auto out = open_out(path);
  for (const auto& e : evals) out << dump(to_json(e)) << '\n';
}

}  // namespace reception::eval
