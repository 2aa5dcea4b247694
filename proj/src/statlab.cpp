#include "reception/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reception/error.hpp"

namespace reception::stats {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains a non-finite value");
  }
}

double max_of(std::span<const double> xs) { return *std::max_element(xs.begin(), xs.end()); }

std::vector<double> distances(std::span<const double> sims, double scale) {
  std::vector<double> out;
  out.reserve(sims.size());
  for (double v : sims) out.push_back(1.0 - v / scale);
  return out;
}

}  // namespace

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(u.dim()) +
                          " vs " + std::to_string(v.dim()) + ")");
  }
  const auto a = u.components();
  const auto b = v.components();
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

SimilarityProfile max_similarity_profile(std::span<const EmbeddingVector> primary,
                                         std::span<const EmbeddingVector> comparison) {
  if (primary.empty()) throw ValidationError("max_similarity_profile: primary set is empty");
  if (comparison.empty()) throw ValidationError("max_similarity_profile: comparison set is empty");
  SimilarityProfile profile;
  profile.values.reserve(primary.size());
  for (const auto& p : primary) {
    double best = -1.0;
    for (const auto& c : comparison) best = std::max(best, cosine_similarity(p, c));
    profile.values.push_back(best);
  }
  return profile;
}

std::vector<double> mean_similarities(std::span<const EmbeddingVector> items,
                                      std::span<const EmbeddingVector> against) {
  if (against.empty()) throw ValidationError("mean_similarities: comparison set is empty");
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& x : items) {
    double sum = 0.0;
    for (const auto& y : against) sum += cosine_similarity(x, y);
    out.push_back(sum / static_cast<double>(against.size()));
  }
  return out;
}

NormalizationMode parse_normalization(std::string_view text) {
  if (text == "joint") return NormalizationMode::joint;
  if (text == "per-list" || text == "per_list") return NormalizationMode::per_list;
  throw ValidationError("unknown normalization mode '" + std::string(text) +
                        "' (expected joint or per-list)");
}

std::string_view to_string(NormalizationMode mode) {
  return mode == NormalizationMode::joint ? "joint" : "per-list";
}

ErrorLists to_error_lists(const SimilarityProfile& reference,
                          const SimilarityProfile& model,
                          const SimilarityProfile& random,
                          NormalizationMode mode) {
  const std::size_t n = reference.values.size();
  if (n == 0 || model.values.size() != n || random.values.size() != n) {
    throw ValidationError("to_error_lists: profiles must be non-empty and of equal length");
  }
  require_finite(reference.values, "reference profile");
  require_finite(model.values, "model profile");
  require_finite(random.values, "random profile");

  ErrorLists out;
  if (mode == NormalizationMode::joint) {
    const double g = std::max({max_of(reference.values), max_of(model.values), max_of(random.values)});
    if (!(g > 0.0)) throw ValidationError("to_error_lists: non-positive global max; cannot normalize");
    out.reference = distances(reference.values, g);
    out.model = distances(model.values, g);
    out.random = distances(random.values, g);
    out.e_max = std::max({max_of(out.reference), max_of(out.model), max_of(out.random)});
  } else {
    for (const auto* p : {&reference, &model, &random}) {
      if (!(max_of(p->values) > 0.0)) {
        throw ValidationError("to_error_lists: a profile has non-positive max; cannot normalize");
      }
    }
    out.reference = distances(reference.values, max_of(reference.values));
    out.model = distances(model.values, max_of(model.values));
    out.random = distances(random.values, max_of(random.values));
    out.e_max = 1.0;
  }
  return out;
}

double RecCurve::accuracy_at(double tolerance) const {
  if (points.empty() || tolerance < points.front().tolerance) return 0.0;
  auto it = std::upper_bound(points.begin(), points.end(), tolerance,
                             [](double t, const RecPoint& p) { return t < p.tolerance; });
  return std::prev(it)->accuracy;
}

RecCurve rec_curve(std::span<const double> errors, double e_max) {
  if (errors.empty()) throw ValidationError("rec_curve: error list is empty");
  require_finite(errors, "rec_curve errors");
  if (!std::isfinite(e_max) || e_max < 0.0) throw ValidationError("rec_curve: e_max must be finite and >= 0");
  for (double e : errors) {
    if (e < 0.0) throw ValidationError("rec_curve: errors must be non-negative");
  }

  RecCurve curve;
  curve.e_max = e_max;
  if (e_max == 0.0) {
    if (max_of(errors) > 0.0) throw ValidationError("rec_curve: e_max is 0 but errors are positive");
    curve.points = {{0.0, 1.0}};
    curve.auc = 1.0;
    return curve;
  }

  std::vector<double> sorted(errors.begin(), errors.end());
  for (double& e : sorted) e = std::min(e, e_max);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::size_t at_zero = 0;
  while (at_zero < sorted.size() && sorted[at_zero] == 0.0) ++at_zero;
  curve.points.push_back({0.0, static_cast<double>(at_zero) / n});
  for (std::size_t i = at_zero; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    curve.points.push_back({sorted[i], static_cast<double>(j) / n});
    i = j;
  }
  if (curve.points.back().tolerance < e_max) curve.points.push_back({e_max, 1.0});

  // Exact integral of the step function over [0, e_max].
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < curve.points.size(); ++k) {
    area += curve.points[k].accuracy * (curve.points[k + 1].tolerance - curve.points[k].tolerance);
  }
  curve.auc = std::clamp(area / e_max, 0.0, 1.0);
  return curve;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of an empty list");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw ValidationError("quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double h = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("paired_t_test: lists differ in length");
  if (a.size() < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
  require_finite(a, "paired_t_test a");
  require_finite(b, "paired_t_test b");

  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];

  TTestResult r;
  r.df = static_cast<int>(d.size()) - 1;
  r.mean_diff = mean(d);
  const double sd = sample_sd(d);
  if (sd == 0.0) {
    if (r.mean_diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
      r.p = 0.0;
    }
    return r;
  }
  r.t = r.mean_diff / (sd / std::sqrt(static_cast<double>(d.size())));
  r.p = student_t_two_tailed(r.t, r.df);
  return r;
}

PearsonResult pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("pearson: lists differ in length");
  if (a.size() < 3) throw ValidationError("pearson: need at least 3 pairs");
  require_finite(a, "pearson a");
  require_finite(b, "pearson b");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw ValidationError("pearson: zero variance input");

  PearsonResult r;
  r.n = a.size();
  r.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  const double df = static_cast<double>(r.n - 2);
  if (std::fabs(r.r) == 1.0) {
    r.p = 0.0;
  } else {
    const double t = r.r * std::sqrt(df / (1.0 - r.r * r.r));
    r.p = df >= 1.0 ? student_t_two_tailed(t, df) : 1.0;
  }
  return r;
}

std::string_view to_string(SentimentBin bin) {
  switch (bin) {
    case SentimentBin::negative: return "negative";
    case SentimentBin::neutral: return "neutral";
    case SentimentBin::positive: return "positive";
  }
  return "neutral";
}

SentimentBin bin_sentiment(double s) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw ValidationError("sentiment score " + std::to_string(s) + " outside [-1, 1]");
  }
  if (s < -0.25) return SentimentBin::negative;
  if (s <= 0.25) return SentimentBin::neutral;
  return SentimentBin::positive;
}

void BinCounts::add(SentimentBin bin) {
  switch (bin) {
    case SentimentBin::negative: ++negative; break;
    case SentimentBin::neutral: ++neutral; break;
    case SentimentBin::positive: ++positive; break;
  }
}

BinCounts bin_counts(std::span<const double> scores) {
  BinCounts c;
  for (double s : scores) c.add(bin_sentiment(s));
  return c;
}

ChiSquareResult chi_square_homogeneity(const BinCounts& a, const BinCounts& b) {
  if (a.total() == 0 || b.total() == 0) throw ValidationError("chi_square_homogeneity: a row sums to zero");
  const double rows[2][3] = {
      {double(a.negative), double(a.neutral), double(a.positive)},
      {double(b.negative), double(b.neutral), double(b.positive)},
  };
  const double row_total[2] = {double(a.total()), double(b.total())};
  const double grand = row_total[0] + row_total[1];

  ChiSquareResult r;
  int columns = 0;
  for (int j = 0; j < 3; ++j) {
    const double col = rows[0][j] + rows[1][j];
    if (col == 0.0) continue;
    ++columns;
    for (int i = 0; i < 2; ++i) {
      const double expected = row_total[i] * col / grand;
      const double diff = rows[i][j] - expected;
      r.statistic += diff * diff / expected;
    }
  }
  r.df = columns - 1;
  if (r.df == 0) {
    r.statistic = 0.0;
    r.p = 1.0;
    return r;
  }
  r.p = r.statistic == 0.0 ? 1.0 : chi_square_sf(r.statistic, r.df);
  return r;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("kde: need at least 2 samples");
  require_finite(samples, "kde samples");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) throw ValidationError("kde: samples have zero variance");
  const double sd = sample_sd(samples);
  const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> samples,
                                 std::span<const double> grid) {
  const double h = silverman_bandwidth(samples);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) {
    double s = 0.0;
    for (double xi : samples) {
      const double z = (x - xi) / h;
      s += std::exp(-0.5 * z * z);
    }
    out.push_back(s * norm);
  }
  return out;
}

}  // namespace reception::stats
