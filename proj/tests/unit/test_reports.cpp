#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fakes.hpp"
#include "reception/error.hpp"
#include "reception/eval_io.hpp"
#include "reception/evaluator.hpp"
#include "reception/mock_backend.hpp"
#include "reception/reports.hpp"
#include "reception/rng.hpp"

using namespace reception;
using namespace reception::reports;
using eval::AggregateEval;

namespace {

AggregateEval with_aucs(std::string group, double ref, double model, double rand) {
  AggregateEval a;
  a.group = std::move(group);
  a.messages = 3;
  a.list_length = 90;
  a.rec_reference.auc = ref;
  a.rec_model.auc = model;
  a.rec_random.auc = rand;
  a.auc_pct_difference = eval::model_pct_difference(model, ref, rand);
  return a;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

eval::ScoredText scored(const protocol::MockBackend& mock, const std::string& text, double s) {
  protocol::SentimentScore sc;
  sc.p_neg = s < 0 ? -s : 0;
  sc.p_pos = s > 0 ? s : 0;
  sc.p_neu = 1 - sc.p_neg - sc.p_pos;
  sc.s = sc.p_pos - sc.p_neg;
  return {"", text, EmbeddingVector::from_delivered(mock.embed_one(text)), sc};
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) area += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return area;
}

}  // namespace

TEST_CASE("rounding") {
  CHECK(format_fixed(71.68141592920354, 1) == "71.7");
  CHECK(format_fixed(0.0005, 3) == "0.001");
  CHECK(format_fixed(-0.0005, 3) == "-0.001");
  CHECK(format_fixed(2.5, 0) == "3");
  CHECK(format_fixed(-2.5, 0) == "-3");
  CHECK(format_fixed(-0.00001, 2) == "0.00");
  CHECK(format_fixed(0.125, 2) == "0.13");
  CHECK(round_half_away(1.25, 1) == 1.3);
}

TEST_CASE("AUC table") {
  const std::vector<AggregateEval> aggs = {with_aucs("ALL", 0.571, 0.539, 0.458), with_aucs("CDCgov", 0.5, 0.4, 0.3)};
  const auto csv = render_auc_table(aggs, TableFormat::csv);
  CHECK(csv ==
        "Comparison,ALL,CDCgov\n"
        "Primary vs. Reference,0.571,0.500\n"
        "Primary vs. Model,0.539,0.400\n"
        "Primary vs. Random,0.458,0.300\n"
        "Model % Difference,71.7%,50.0%\n");
  const auto tex = render_auc_table(aggs, TableFormat::latex);
  CHECK(tex.find("Model \\% Difference & 71.7\\% & 50.0\\% \\\\") != std::string::npos);
  CHECK(render_auc_table(aggs, TableFormat::csv) == csv);
}

TEST_CASE("columns for empty groups are omitted") {
  auto empty = with_aucs("NIH", 0.5, 0.5, 0.5);
  empty.messages = 0;
  const std::vector<AggregateEval> aggs = {with_aucs("ALL", 0.571, 0.539, 0.458), empty};
  CHECK(split_lines(render_auc_table(aggs, TableFormat::csv))[0] == "Comparison,ALL");
  CHECK(split_lines(render_chi_square_table(aggs, TableFormat::csv))[0] == "Comparison,ALL");
}

TEST_CASE("undefined percentage renders n/a") {
  const std::vector<AggregateEval> aggs = {with_aucs("ALL", 0.5, 0.5, 0.5)};
  CHECK(split_lines(render_auc_table(aggs, TableFormat::csv))[4] == "Model % Difference,n/a");
}

TEST_CASE("t-test and chi-square tables") {
  auto a = with_aucs("ALL", 0.5, 0.4, 0.3);
  a.gt_vs_random = stats::TTestResult{0.113, 9.1, 2999, 1e-9};
  a.me_vs_random = stats::TTestResult{0.080, 5.2, 2999, 0.0123};
  a.ttest_pct_difference = eval::model_pct_difference(0.080, 0.113, 0.0);
  a.fail_to_reject_reference = 72.88;
  a.fail_to_reject_model = 44.06;
  a.fail_to_reject_random = 20.0;
  const std::vector<AggregateEval> aggs = {a};
  CHECK(render_ttest_table(aggs, TableFormat::csv) ==
        "Comparison,ALL\n"
        "GT vs. Random,+0.113\n"
        "ME vs. Random,+0.080\n"
        "GT vs. Random p-value,<0.001\n"
        "ME vs. Random p-value,0.012\n"
        "Model % Difference,70.8%\n");
  CHECK(render_chi_square_table(aggs, TableFormat::csv) ==
        "Comparison,ALL\n"
        "Primary vs. Reference,72.9%\n"
        "Primary vs. Model,44.1%\n"
        "Primary vs. Random,20.0%\n");
  CHECK(render_chi_square_table(aggs, TableFormat::latex).find("72.9\\%") != std::string::npos);
  CHECK(render_ttest_table(aggs, TableFormat::latex).find("$<0.001$") != std::string::npos);
}

TEST_CASE("rendered percentages equal rounded model_pct_difference") {
  rng::Engine eng(4);
  for (int i = 0; i < 500; ++i) {
    const double rand = rng::uniform_unit(eng) * 0.5;
    const double ref = rand + 0.001 + rng::uniform_unit(eng) * 0.5;
    const double model = rand + (rng::uniform_unit(eng) * 1.4 - 0.2) * (ref - rand);
    const std::vector<AggregateEval> aggs = {with_aucs("ALL", ref, model, rand)};
    const auto pct = *eval::model_pct_difference(model, ref, rand);
    CHECK(split_lines(render_auc_table(aggs, TableFormat::csv))[4] == "Model % Difference," + format_fixed(pct, 1) + "%");
    CHECK(std::abs(round_half_away(pct, 1) - pct) <= 0.05 + 1e-12);
  }
}

TEST_CASE("REC plot data") {
  const std::vector<double> two = {0.2, 0.4};
  AggregateEval a;
  a.group = "ALL";
  a.messages = 1;
  a.e_max = 1.0;
  a.rec_reference = stats::rec_curve(two, 1.0);
  a.rec_model = stats::rec_curve(two, 1.0);
  a.rec_random = stats::rec_curve(std::vector<double>{0.6, 1.0}, 1.0);

  SUBCASE("two-error staircase") {
    const auto& pts = a.rec_reference.points;
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == stats::RecPoint{0.0, 0.0});
    CHECK(pts[1] == stats::RecPoint{0.2, 0.5});
    CHECK(pts[2] == stats::RecPoint{0.4, 1.0});
    CHECK(pts[3] == stats::RecPoint{1.0, 1.0});
    const auto csv = split_lines(render_rec_csv(a));
    CHECK(csv[0] == "curve,tolerance,accuracy");
    CHECK(csv[1] == "reference,0,0");
    CHECK(csv[2] == "reference,0.20000000000000001,0.5");
    CHECK(csv[3] == "reference,0.40000000000000002,1");
    CHECK(csv[4] == "reference,1,1");
  }
  SUBCASE("identical error lists give equal AUC labels") {
    const auto svg = render_rec_svg(a);
    CHECK(svg.find("Primary vs. Reference (AUC=0.700)") != std::string::npos);
    CHECK(svg.find("Primary vs. Model (AUC=0.700)") != std::string::npos);
    CHECK(svg.find("<!-- curve=reference auc=0.69999999999999996") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  }
  SUBCASE("emitted points integrate to the labeled AUC") {
    for (const auto* c : {&a.rec_reference, &a.rec_model, &a.rec_random}) {
      CHECK(std::abs(integrate_rec_points(c->points) - c->auc) <= 1e-6);
    }
  }
  SUBCASE("non-monotone points rejected") {
    auto bad = a;
    std::swap(bad.rec_model.points[1], bad.rec_model.points[2]);
    CHECK_THROWS_AS(validate_rec_points(bad.rec_model), ValidationError);
    CHECK_THROWS_AS(render_rec_svg(bad), ValidationError);
  }
}

TEST_CASE("REC plots from a real run integrate to their labels") {
  const auto split = testing::synthetic_split(testing::small_synthetic());
  const protocol::MockBackend mock(split.train);
  for (auto mode : {stats::NormalizationMode::joint, stats::NormalizationMode::per_list}) {
    eval::EvalConfig cfg;
    cfg.normalization = mode;
    const auto rep = eval::run_evaluation(mock, split, cfg);
    for (const auto& a : rep.aggregates) {
      for (const auto* c : {&a.rec_reference, &a.rec_model, &a.rec_random}) {
        CHECK_NOTHROW(validate_rec_points(*c));
        CHECK(std::abs(integrate_rec_points(c->points) - c->auc) <= 1e-6);
      }
      // The embedded SVG data reproduces the labels too.
      const auto svg = render_rec_svg(a);
      std::size_t pos = 0;
      int curves = 0;
      while ((pos = svg.find("<!-- curve=", pos)) != std::string::npos) {
        const auto auc_at = svg.find(" auc=", pos) + 5;
        const auto pts_at = svg.find(" points=", pos);
        const double auc = std::stod(svg.substr(auc_at, pts_at - auc_at));
        const auto end = svg.find(" -->", pts_at);
        std::vector<stats::RecPoint> pts;
        std::istringstream in(svg.substr(pts_at + 8, end - pts_at - 8));
        std::string item;
        while (std::getline(in, item, ';')) {
          const auto colon = item.find(':');
          pts.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        }
        CHECK(std::abs(integrate_rec_points(pts) - auc) <= 1e-6);
        ++curves;
        pos = end;
      }
      CHECK(curves == 3);
    }
  }
}

TEST_CASE("sentiment density") {
  const protocol::MockBackend mock;
  eval::SampleBundle b;
  b.message_id = "1";
  b.author = "WHO";
  const std::vector<double> mixed = {-0.6, -0.45, -0.4, -0.3, -0.2, -0.15, -0.1, 0.0,
                                     0.0,  0.05,  0.1,  0.2,  0.25, 0.3,   0.4,  0.55};
  const std::vector<double> sym = {-0.8, -0.3, 0.3, 0.8};
  for (std::size_t i = 0; i < mixed.size(); ++i) b.primary.push_back(scored(mock, "p" + std::to_string(i), mixed[i]));
  for (std::size_t i = 0; i < sym.size(); ++i) b.reference.push_back(scored(mock, "r" + std::to_string(i), sym[i]));
  for (int i = 0; i < 4; ++i) b.generated.push_back(scored(mock, "g" + std::to_string(i), -1.0));
  b.random.push_back(scored(mock, "x", 0.5));
  const std::vector<eval::SampleBundle> bundles = {b};

  const auto t = sentiment_density(bundles, DensityGrouping::role);
  REQUIRE(t.grid.size() == 201);
  CHECK(t.grid.front() == -1.1);
  CHECK(t.grid.back() == doctest::Approx(1.1).epsilon(1e-15));
  REQUIRE(t.series.size() == 2);
  CHECK(t.series[0].name == "Primary");
  CHECK(t.series[1].name == "Reference");
  CHECK(t.warnings.size() == 2);  // Model all -1, Random has one score
  CHECK(std::abs(trapezoid(t.grid, t.series[0].density) - 1.0) <= 1e-2);
  const auto& d = t.series[1].density;
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i] - d[d.size() - 1 - i]) <= 1e-9);

  const auto acc = sentiment_density(bundles, DensityGrouping::account);
  REQUIRE(acc.series.size() == 2);
  CHECK(acc.series[0].name == "WHO/Primary");
  const auto csv = split_lines(render_density_csv(acc));
  CHECK(csv.size() == 202);
  CHECK(csv[0] == "x,WHO/Primary,WHO/Reference");
}

TEST_CASE("ranked display") {
  const protocol::MockBackend mock;
  eval::SampleBundle b;
  b.message_id = "9";
  b.author = "CDCgov";
  b.message_text = "get boosted";
  const std::vector<std::string> texts = {"boosters save lives", "boosters are a scam", "save lives today",
                                          "weather report", "lives and boosters and lives", "nothing here"};
  for (const auto& t : texts) b.primary.push_back(scored(mock, t, 0.0));
  b.generated = b.primary;

  SUBCASE("k = N is a permutation ordered by brute-force mean") {
    const auto d = display_ranked_responses(b, texts.size());
    std::multiset<std::string> seen;
    for (const auto& r : d.primary) seen.insert(r.text);
    CHECK(seen == std::multiset<std::string>(texts.begin(), texts.end()));
    for (const auto& r : d.primary) {
      const auto it = std::find(texts.begin(), texts.end(), r.text);
      const auto& self = b.primary[it - texts.begin()];
      double sum = 0;
      for (const auto& g : b.generated) sum += stats::cosine_similarity(self.embedding, g.embedding);
      CHECK(r.score == doctest::Approx(sum / b.generated.size()).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < d.primary.size(); ++i) CHECK(d.primary[i - 1].score >= d.primary[i].score);
  }
  SUBCASE("each text's best match is itself") {
    for (const auto& p : b.primary) {
      double best = -2;
      std::string who;
      for (const auto& g : b.generated) {
        const double c = stats::cosine_similarity(p.embedding, g.embedding);
        if (c > best) {
          best = c;
          who = g.text;
        }
      }
      CHECK(who == p.text);
    }
  }
  SUBCASE("k bounds") {
    CHECK(display_ranked_responses(b, 5).primary.size() == 5);
    CHECK(display_ranked_responses(b).generated.size() == 5);
    CHECK_THROWS_AS(display_ranked_responses(b, 0), ValidationError);
    CHECK_THROWS_AS(display_ranked_responses(b, 7), ValidationError);
  }
  SUBCASE("markdown") {
    const std::vector<RankedDisplay> ds = {display_ranked_responses(b, 2)};
    const auto md = render_ranked_markdown(ds);
    CHECK(md.rfind("## CDCgov (9)\n\nget boosted\n\n", 0) == 0);
    CHECK(std::count(md.begin(), md.end(), '\n') == 9);
  }
}

TEST_CASE("aggregate and bundle JSON round trips") {
  const auto split = testing::synthetic_split(testing::small_synthetic());
  const protocol::MockBackend mock(split.train);
  eval::EvalConfig cfg;
  cfg.account_breakdown_min_messages = 3;
  const auto rep = eval::run_evaluation(mock, split, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "reception_eval_io_test";
  std::filesystem::create_directories(dir);

  eval::write_aggregates(dir / eval::kAggregatesFile, rep.aggregates);
  const auto back = eval::read_aggregates(dir / eval::kAggregatesFile);
  REQUIRE(back.size() == rep.aggregates.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(eval::to_json(back[i]) == eval::to_json(rep.aggregates[i]));
    CHECK(back[i].rec_model.auc == rep.aggregates[i].rec_model.auc);
    CHECK(back[i].rec_reference.points == rep.aggregates[i].rec_reference.points);
  }
  eval::write_bundles(dir / eval::kBundlesFile, rep.bundles);
  const auto bundles = eval::read_bundles(dir / eval::kBundlesFile);
  REQUIRE(bundles.size() == rep.bundles.size());
  for (std::size_t i = 0; i < bundles.size(); ++i) CHECK(eval::to_json(bundles[i]) == eval::to_json(rep.bundles[i]));
  // Re-evaluating the reloaded bundles reproduces the aggregates.
  std::vector<eval::MessageEval> evals;
  for (const auto& b : bundles) evals.push_back(eval::evaluate_message(b));
  const auto again = eval::aggregate_groups(evals, cfg);
  CHECK(eval::to_json(again[0]) == eval::to_json(rep.aggregates[0]));

  CHECK(eval::number_to_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(eval::number_from_json("nan")));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run manifest") {
  RunManifest m;
  m.command = "evaluate";
  m.version = "0.1.0";
  m.inputs["corpus/test.jsonl"] = "ab";
  m.counts["messages"] = 3;
  m.started_at = utc_now();
  const auto j = m.to_json();
  CHECK(j["command"] == "evaluate");
  CHECK(j["inputs"]["corpus/test.jsonl"] == "ab");
  CHECK(j["counts"]["messages"] == 3);
  CHECK((m.started_at.size() == 24 || m.started_at.size() == 20));
  CHECK(m.started_at.back() == 'Z');
}
