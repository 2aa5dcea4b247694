#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "reception/embedding.hpp"
#include "reception/special_functions.hpp"

namespace reception::stats {

// ---------------------------------------------------------------------------
// Semantic similarity
// ---------------------------------------------------------------------------

// Dot product of two unit vectors, clamped to [-1, 1].
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// One value per primary response: its best cosine match in `comparison`.
struct SimilarityProfile {
  std::vector<double> values;

  bool operator==(const SimilarityProfile&) const = default;
};

SimilarityProfile max_similarity_profile(std::span<const EmbeddingVector> primary,
                                         std::span<const EmbeddingVector> comparison);

// Mean cosine of each `items` vector against all of `against`.
std::vector<double> mean_similarities(std::span<const EmbeddingVector> items,
                                      std::span<const EmbeddingVector> against);

enum class NormalizationMode {
  joint,     // one global max across the three lists; common span
  per_list,  // each list by its own max; span fixed at 1
};

NormalizationMode parse_normalization(std::string_view text);
std::string_view to_string(NormalizationMode mode);

struct ErrorLists {
  std::vector<double> reference;
  std::vector<double> model;
  std::vector<double> random;
  double e_max = 0.0;
};

// Similarities -> cosine-distance errors: divide by the max, subtract from 1.
ErrorLists to_error_lists(const SimilarityProfile& reference,
                          const SimilarityProfile& model,
                          const SimilarityProfile& random,
                          NormalizationMode mode = NormalizationMode::joint);

// ---------------------------------------------------------------------------
// Regression error characteristic curves
// ---------------------------------------------------------------------------

struct RecPoint {
  double tolerance;
  double accuracy;

  bool operator==(const RecPoint&) const = default;
};

// Right-continuous step function: accuracy at points[k] holds on
// [points[k].tolerance, points[k+1].tolerance). The first point sits at 0
// and the last at e_max, so a left-step sum over the points is the AUC.
struct RecCurve {
  std::vector<RecPoint> points;
  double e_max = 0.0;
  double auc = 0.0;

  // Fraction of errors <= tolerance.
  double accuracy_at(double tolerance) const;
};

// Errors above e_max are clamped to it. When e_max == 0 every error is zero
// and the AUC is 1.
RecCurve rec_curve(std::span<const double> errors, double e_max);

// ---------------------------------------------------------------------------
// Hypothesis tests
// ---------------------------------------------------------------------------

struct TTestResult {
  double mean_diff = 0.0;
  double t = 0.0;
  int df = 0;
  double p = 1.0;
};

// Two-tailed paired t-test on d = a - b. Zero-variance differences give
// t = 0, p = 1 when the mean is zero and t = +/-inf, p = 0 otherwise.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

PearsonResult pearson(std::span<const double> a, std::span<const double> b);

enum class SentimentBin { negative, neutral, positive };

std::string_view to_string(SentimentBin bin);

// [-1, -0.25) negative, [-0.25, 0.25] neutral, (0.25, 1] positive.
SentimentBin bin_sentiment(double s);

struct BinCounts {
  std::size_t negative = 0;
  std::size_t neutral = 0;
  std::size_t positive = 0;

  std::size_t total() const { return negative + neutral + positive; }
  void add(SentimentBin bin);
  bool operator==(const BinCounts&) const = default;
};

BinCounts bin_counts(std::span<const double> scores);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
};

// 2x3 test of homogeneity, no continuity correction. Columns whose total is
// zero are dropped before computing df.
ChiSquareResult chi_square_homogeneity(const BinCounts& a, const BinCounts& b);

// ---------------------------------------------------------------------------
// Descriptive helpers
// ---------------------------------------------------------------------------

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);
// Linear-interpolation quantile (type 7), q in [0, 1].
double quantile(std::span<const double> xs, double q);

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when the IQR is 0.
double silverman_bandwidth(std::span<const double> samples);

// Gaussian kernel density at each grid point, Silverman bandwidth.
std::vector<double> gaussian_kde(std::span<const double> samples,
                                 std::span<const double> grid);

}  // namespace reception::stats
