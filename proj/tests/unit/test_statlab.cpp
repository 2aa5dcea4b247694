#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "reception/error.hpp"
#include "reception/rng.hpp"
#include "reception/statlab.hpp"

using namespace reception;
using namespace reception::stats;

namespace {

EmbeddingVector vec(std::vector<double> c) { return EmbeddingVector::normalized(std::move(c)); }

std::vector<double> random_errors(rng::Engine& eng, std::size_t n, double scale) {
  std::vector<double> e(n);
  for (auto& x : e) x = rng::uniform_unit(eng) * scale;
  return e;
}

// Area under the staircase by summing rectangles between consecutive
// distinct tolerances, with accuracy counted directly from the list.
double brute_force_auc(const std::vector<double>& errors, double e_max) {
  std::set<double> cuts(errors.begin(), errors.end());
  cuts.insert(0.0);
  cuts.insert(e_max);
  std::vector<double> ts(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const auto within = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= ts[i]; });
    area += (ts[i + 1] - ts[i]) * static_cast<double>(within) / static_cast<double>(errors.size());
  }
  return area / e_max;
}

}  // namespace

TEST_CASE("cosine_similarity") {
  const auto u = vec({0.6, 0.8});
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == 0.0);
  CHECK(cosine_similarity(u, vec({1, 0})) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(cosine_similarity(u, u) <= 1.0);
  CHECK_THROWS_AS(cosine_similarity(u, vec({1, 0, 0})), ValidationError);
}

TEST_CASE("max_similarity_profile") {
  const std::vector<EmbeddingVector> primary = {vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 1})};
  SUBCASE("self match is 1") {
    const auto p = max_similarity_profile(primary, primary);
    for (double v : p.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("single comparison is pairwise") {
    const std::vector<EmbeddingVector> one = {vec({1, 2, 3})};
    const auto p = max_similarity_profile(primary, one);
    for (std::size_t i = 0; i < primary.size(); ++i) CHECK(p.values[i] == cosine_similarity(primary[i], one[0]));
  }
  SUBCASE("3x3 brute force") {
    const std::vector<EmbeddingVector> cmp = {vec({-1, 0.2, 0}), vec({0.3, 0.3, -1}), vec({0.1, 0.9, 0.5})};
    const auto p = max_similarity_profile(primary, cmp);
    REQUIRE(p.values.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      double best = -2;
      for (std::size_t j = 0; j < 3; ++j) best = std::max(best, cosine_similarity(primary[i], cmp[j]));
      CHECK(p.values[i] == best);
    }
  }
  SUBCASE("empty comparison") {
    const std::vector<EmbeddingVector> none;
    CHECK_THROWS_AS(max_similarity_profile(primary, none), ValidationError);
  }
}

TEST_CASE("to_error_lists") {
  SUBCASE("max already 1 leaves values unchanged") {
    const auto e = to_error_lists({{1.0, 0.5}}, {{0.25, 1.0}}, {{0.75, 0.5}});
    CHECK(e.reference == std::vector<double>{0.0, 0.5});
    CHECK(e.model == std::vector<double>{0.75, 0.0});
    CHECK(e.e_max == 0.75);
  }
  SUBCASE("per_list") {
    const auto e = to_error_lists({{0.5, 1.0}}, {{0.2, 0.4}}, {{0.3, 0.3}}, NormalizationMode::per_list);
    CHECK(e.reference == std::vector<double>{0.5, 0.0});
    CHECK(e.model[0] == doctest::Approx(0.5));
    CHECK(e.model[1] == 0.0);
    CHECK(e.random == std::vector<double>{0.0, 0.0});
    CHECK(e.e_max == 1.0);
  }
  SUBCASE("joint") {
    const auto e = to_error_lists({{1.0}}, {{0.5}}, {{0.8}});
    CHECK(e.model[0] == 0.5);
    CHECK(e.e_max >= 0.5);
    const auto j = to_error_lists({{0.5}}, {{0.25}}, {{0.4}});
    CHECK(j.reference[0] == 0.0);
    CHECK(j.model[0] == 0.5);
  }
  SUBCASE("degenerate") {
    CHECK_THROWS_AS(to_error_lists({{0.0}}, {{0.0}}, {{0.0}}), ValidationError);
    CHECK_THROWS_AS(to_error_lists({{-0.5}}, {{-0.2}}, {{-0.1}}), ValidationError);
    CHECK_THROWS_AS(to_error_lists({{1.0}}, {{0.5, 0.2}}, {{0.8}}), ValidationError);
    CHECK_THROWS_AS(to_error_lists({{0.0}}, {{0.5}}, {{0.8}}, NormalizationMode::per_list), ValidationError);
  }
  CHECK(parse_normalization("joint") == NormalizationMode::joint);
  CHECK(parse_normalization("per_list") == NormalizationMode::per_list);
  CHECK_THROWS_AS(parse_normalization("global"), ValidationError);
}

TEST_CASE("rec_curve examples") {
  const std::vector<double> zeros = {0, 0, 0};
  CHECK(rec_curve(zeros, 0.0).auc == 1.0);
  CHECK(rec_curve(zeros, 1.0).auc == 1.0);
  const std::vector<double> one = {0.7};
  CHECK(rec_curve(one, 0.7).auc == 0.0);
  const std::vector<double> two = {0.2, 0.4};
  const auto c = rec_curve(two, 1.0);
  CHECK(c.auc == doctest::Approx(0.7).epsilon(1e-15));
  REQUIRE(c.points.size() >= 3);
  CHECK(c.points.front().tolerance == 0.0);
  CHECK(c.points.back().tolerance == 1.0);
  CHECK(c.points.back().accuracy == 1.0);
  CHECK(c.accuracy_at(0.1) == 0.0);
  CHECK(c.accuracy_at(0.2) == 0.5);
  CHECK(c.accuracy_at(0.39) == 0.5);
  CHECK(c.accuracy_at(0.4) == 1.0);
  const std::vector<double> none;
  CHECK_THROWS_AS(rec_curve(none, 1.0), ValidationError);
  const std::vector<double> neg = {-0.1};
  CHECK_THROWS_AS(rec_curve(neg, 1.0), ValidationError);
}

TEST_CASE("rec_curve clamps errors above e_max") {
  const std::vector<double> e = {0.5, 2.0};
  const auto c = rec_curve(e, 1.0);
  CHECK(c.auc == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.points.back().accuracy == 1.0);
}

TEST_CASE("staircase identity, monotonicity and dominance") {
  rng::Engine eng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng::uniform_below(eng, 100);
    auto errors = random_errors(eng, n, 1.0);
    if (trial % 10 == 0) errors[0] = errors[n - 1];  // ties
    const double e_max = *std::max_element(errors.begin(), errors.end()) * (trial % 2 ? 1.0 : 1.5);
    const auto c = rec_curve(errors, e_max);
    const double m = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
    CHECK(std::abs(c.auc - (1.0 - m / e_max)) <= 1e-12);
    CHECK(c.auc >= 0.0);
    CHECK(c.auc <= 1.0);
    for (std::size_t k = 1; k < c.points.size(); ++k) {
      CHECK(c.points[k].tolerance >= c.points[k - 1].tolerance);
      CHECK(c.points[k].accuracy >= c.points[k - 1].accuracy);
    }
    CHECK(c.accuracy_at(*std::max_element(errors.begin(), errors.end())) == 1.0);

    auto worse = errors;
    for (auto& x : worse) x = std::min(e_max, x + rng::uniform_unit(eng) * 0.1);
    CHECK(rec_curve(worse, e_max).auc <= c.auc + 1e-15);
  }
}

TEST_CASE("small instances match brute-force rectangle summation") {
  rng::Engine eng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = 1 + rng::uniform_below(eng, 6);
    std::vector<double> errors(n);
    for (auto& x : errors) x = static_cast<double>(rng::uniform_below(eng, 5)) / 4.0;
    const double e_max = 1.0;
    CHECK(rec_curve(errors, e_max).auc == doctest::Approx(brute_force_auc(errors, e_max)).epsilon(1e-12));
  }
}

TEST_CASE("paired_t_test") {
  const std::vector<double> a = {1, 2, 3, 4};
  SUBCASE("a == b") {
    const auto r = paired_t_test(a, a);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("symmetric differences") {
    const std::vector<double> x = {0, 1}, y = {1, 0};
    const auto r = paired_t_test(x, y);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("mean 1, sd 1, n 4") {
    // d = a - b with mean 1 and sample sd 1
    const double h = std::sqrt(3.0) / 2.0;
    std::vector<double> d = {1 - h, 1 + h, 1 - h, 1 + h};
    const std::vector<double> zero(4, 0.0);
    const auto r = paired_t_test(d, zero);
    CHECK(r.mean_diff == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.t == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.df == 3);
    CHECK(r.p == doctest::Approx(0.1393259685588431).epsilon(1e-10));
  }
  SUBCASE("reference values") {
    const std::vector<double> x = {0.9, 0.7, 0.8, 0.65, 0.85}, y = {0.5, 0.6, 0.55, 0.7, 0.4};
    const auto r = paired_t_test(x, y);
    CHECK(r.t == doctest::Approx(2.472975320624164).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(0.06872694144108961).epsilon(1e-9));
    CHECK(std::abs(r.p - student_t_two_tailed(r.t, r.df)) <= 1e-9);
  }
  SUBCASE("constant nonzero difference") {
    const std::vector<double> b = {0, 1, 2, 3};
    const auto r = paired_t_test(a, b);
    CHECK(r.t == std::numeric_limits<double>::infinity());
    CHECK(r.p == 0.0);
    const auto s = paired_t_test(b, a);
    CHECK(s.t == -std::numeric_limits<double>::infinity());
  }
  SUBCASE("invalid input") {
    const std::vector<double> one = {1}, three = {1, 2, 3};
    CHECK_THROWS_AS(paired_t_test(one, one), ValidationError);
    CHECK_THROWS_AS(paired_t_test(a, three), ValidationError);
  }
}

TEST_CASE("paired_t_test invariance under shift and scale") {
  rng::Engine eng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 2 + rng::uniform_below(eng, 40);
    auto a = random_errors(eng, n, 1.0);
    auto b = random_errors(eng, n, 1.0);
    const auto base = paired_t_test(a, b);
    const double shift = rng::uniform_unit(eng) * 10 - 5;
    const double scale = 0.1 + rng::uniform_unit(eng) * 10;
    auto as = a, bs = b, ac = a, bc = b;
    for (std::size_t i = 0; i < n; ++i) {
      as[i] += shift;
      bs[i] += shift;
      ac[i] *= scale;
      bc[i] *= scale;
    }
    const auto shifted = paired_t_test(as, bs);
    const auto scaled = paired_t_test(ac, bc);
    CHECK(shifted.t == doctest::Approx(base.t).epsilon(1e-8));
    CHECK(shifted.p == doctest::Approx(base.p).epsilon(1e-8));
    CHECK(scaled.t == doctest::Approx(base.t).epsilon(1e-10));
    CHECK(scaled.p == doctest::Approx(base.p).epsilon(1e-10));
  }
}

TEST_CASE("pearson") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  std::vector<double> b, c;
  for (double x : a) {
    b.push_back(2 * x + 3);
    c.push_back(-x);
  }
  CHECK(pearson(a, b).r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(a, c).r == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(a, b).p == 0.0);
  const std::vector<double> x = {1, 2, 3}, y = {1, 3, 2};
  const auto r = pearson(x, y);
  CHECK(r.r == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.p == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(r.n == 3);
  const std::vector<double> u = {0.1, 0.4, 0.35, 0.8, 0.5, 0.9}, v = {0.2, 0.3, 0.5, 0.7, 0.4, 0.95};
  const auto q = pearson(u, v);
  CHECK(q.r == doctest::Approx(0.9235831844694619).epsilon(1e-12));
  CHECK(q.p == doctest::Approx(0.008536175411966862).epsilon(1e-9));
  const std::vector<double> flat = {1, 1, 1};
  CHECK_THROWS_AS(pearson(x, flat), ValidationError);
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(pearson(two, two), ValidationError);
}

TEST_CASE("pearson invariance under affine transforms") {
  rng::Engine eng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 3 + rng::uniform_below(eng, 40);
    auto a = random_errors(eng, n, 1.0);
    auto b = random_errors(eng, n, 1.0);
    const auto base = pearson(a, b);
    CHECK(std::abs(base.r) <= 1.0);
    const double scale = 0.5 + rng::uniform_unit(eng) * 4;
    auto t = a, f = a;
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = scale * a[i] + 7;
      f[i] = -scale * a[i];
    }
    CHECK(pearson(t, b).r == doctest::Approx(base.r).epsilon(1e-9));
    CHECK(pearson(f, b).r == doctest::Approx(-base.r).epsilon(1e-9));
  }
}

TEST_CASE("chi_square_homogeneity") {
  SUBCASE("identical rows") {
    const auto r = chi_square_homogeneity({10, 10, 10}, {10, 10, 10});
    CHECK(r.statistic == 0.0);
    CHECK(r.df == 2);
    CHECK(r.p == 1.0);
  }
  SUBCASE("opposite rows") {
    const auto r = chi_square_homogeneity({30, 0, 0}, {0, 0, 30});
    CHECK(r.statistic == doctest::Approx(60.0).epsilon(1e-14));
    CHECK(r.df == 1);
    CHECK(r.p == doctest::Approx(9.485737571073857e-15).epsilon(1e-8));
    CHECK(r.p < 0.05);
  }
  SUBCASE("reference contingency table, no continuity correction") {
    const auto r = chi_square_homogeneity({12, 10, 8}, {5, 10, 15});
    CHECK(r.statistic == doctest::Approx(5.012787723785166).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.p == doctest::Approx(0.08156183278661444).epsilon(1e-10));
  }
  SUBCASE("single surviving column") {
    const auto r = chi_square_homogeneity({0, 30, 0}, {0, 30, 0});
    CHECK(r.df == 0);
    CHECK(r.statistic == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("empty row") { CHECK_THROWS_AS(chi_square_homogeneity({0, 0, 0}, {1, 2, 3}), ValidationError); }
}

TEST_CASE("chi_square_homogeneity is symmetric in its rows") {
  rng::Engine eng(10);
  for (int trial = 0; trial < 300; ++trial) {
    BinCounts a{rng::uniform_below(eng, 15), rng::uniform_below(eng, 15), rng::uniform_below(eng, 15)};
    BinCounts b{rng::uniform_below(eng, 15), rng::uniform_below(eng, 15), rng::uniform_below(eng, 15)};
    if (a.total() == 0 || b.total() == 0) continue;
    const auto x = chi_square_homogeneity(a, b);
    const auto y = chi_square_homogeneity(b, a);
    CHECK(x.statistic == doctest::Approx(y.statistic).epsilon(1e-14));
    CHECK(x.df == y.df);
    CHECK(x.p == doctest::Approx(y.p).epsilon(1e-12));
    CHECK(x.p >= 0.0);
    CHECK(x.p <= 1.0);
  }
}

TEST_CASE("bin_sentiment") {
  CHECK(bin_sentiment(-0.25) == SentimentBin::neutral);
  CHECK(bin_sentiment(0.25) == SentimentBin::neutral);
  CHECK(bin_sentiment(0.2500001) == SentimentBin::positive);
  CHECK(bin_sentiment(-0.2500001) == SentimentBin::negative);
  CHECK(bin_sentiment(-1.0) == SentimentBin::negative);
  CHECK(bin_sentiment(1.0) == SentimentBin::positive);
  CHECK(bin_sentiment(0.0) == SentimentBin::neutral);
  CHECK_THROWS_AS(bin_sentiment(1.01), ValidationError);
  CHECK_THROWS_AS(bin_sentiment(std::nan("")), ValidationError);
  const std::vector<double> s = {-1, -0.3, -0.25, 0, 0.25, 0.3, 1};
  CHECK(bin_counts(s) == BinCounts{2, 3, 2});
  for (int i = -1000; i <= 1000; ++i) {
    const double x = i / 1000.0;
    const auto b = bin_sentiment(x);
    const int hits = (x < -0.25) + (x >= -0.25 && x <= 0.25) + (x > 0.25);
    CHECK(hits == 1);
    CHECK(b == (x < -0.25 ? SentimentBin::negative : x > 0.25 ? SentimentBin::positive : SentimentBin::neutral));
  }
}

TEST_CASE("descriptive helpers") {
  const std::vector<double> x = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(x) == 5.0);
  CHECK(sample_sd(x) == doctest::Approx(2.138089935299395).epsilon(1e-14));
  CHECK(sample_sd(std::vector<double>{3}) == 0.0);
  CHECK(quantile(x, 0.0) == 2.0);
  CHECK(quantile(x, 1.0) == 9.0);
  CHECK(quantile(x, 0.25) == 4.0);
  CHECK(quantile(x, 0.75) == 5.5);
  const double h = silverman_bandwidth(x);
  CHECK(h == doctest::Approx(0.9 * std::min(sample_sd(x), 1.5 / 1.34) * std::pow(8.0, -0.2)).epsilon(1e-14));
}

TEST_CASE("gaussian_kde") {
  std::vector<double> grid;
  for (int i = -4000; i <= 4000; ++i) grid.push_back(i / 1000.0);
  SUBCASE("two points integrate to one") {
    const std::vector<double> s = {-0.3, 0.5};
    const auto d = gaussian_kde(s, grid);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) area += 0.5 * (d[i] + d[i + 1]) * (grid[i + 1] - grid[i]);
    CHECK(std::abs(area - 1.0) <= 1e-3);
    for (double v : d) CHECK(v >= 0.0);
  }
  SUBCASE("symmetric samples give a symmetric density") {
    const std::vector<double> s = {-0.9, -0.4, -0.1, 0.1, 0.4, 0.9};
    const auto d = gaussian_kde(s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(d[i] - d[grid.size() - 1 - i]) <= 1e-9);
  }
  SUBCASE("degenerate samples") {
    const std::vector<double> same = {0.2, 0.2, 0.2};
    CHECK_THROWS_AS(gaussian_kde(same, grid), ValidationError);
    const std::vector<double> one = {0.2};
    CHECK_THROWS_AS(gaussian_kde(one, grid), ValidationError);
  }
}
