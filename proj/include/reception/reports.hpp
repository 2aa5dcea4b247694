#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "reception/evaluator.hpp"

namespace reception::reports {

// Half-away-from-zero rounding to `decimals` places, printed in fixed
// notation. Negative zero prints without its sign.
double round_half_away(double x, int decimals);
std::string format_fixed(double x, int decimals);

enum class TableFormat { csv, latex };

// Rows: Primary vs. Reference / Model / Random, Model % Difference.
// Columns: one per aggregate with at least one message, in input order.
std::string render_auc_table(std::span<const eval::AggregateEval> aggregates, TableFormat format);
std::string render_ttest_table(std::span<const eval::AggregateEval> aggregates, TableFormat format);
// Rows: Primary vs. Reference / Model / Random; fail-to-reject percentages.
std::string render_chi_square_table(std::span<const eval::AggregateEval> aggregates, TableFormat format);
// group,n,r,p
std::string render_pearson_table(std::span<const eval::AggregateEval> aggregates);

// Writes auc_rec, ttest_mean_diff and chi_square as .csv and .tex, plus
// pearson.csv. Returns the written paths.
std::vector<std::filesystem::path> emit_tables(std::span<const eval::AggregateEval> aggregates,
                                               const std::filesystem::path& dir);

// curve,tolerance,accuracy
std::string render_rec_csv(const eval::AggregateEval& aggregate);
std::string render_rec_svg(const eval::AggregateEval& aggregate);
// Throws ValidationError if the points are not monotone nondecreasing in
// both coordinates or do not span [0, e_max].
void validate_rec_points(const stats::RecCurve& curve);
// Left-step integral of the points divided by e_max.
double integrate_rec_points(std::span<const stats::RecPoint> points);
// rec_<group>.csv and rec_<group>.svg per aggregate.
std::vector<std::filesystem::path> emit_rec_plots(std::span<const eval::AggregateEval> aggregates,
                                                  const std::filesystem::path& dir);

enum class DensityGrouping { role, account };

struct DensitySeries {
  std::string name;
  std::vector<double> density;
};

struct DensityTable {
  std::vector<double> grid;  // 201 points over [-1.1, 1.1]
  std::vector<DensitySeries> series;
  std::vector<std::string> warnings;  // skipped groups
};

std::vector<double> density_grid();

// Series per role (Primary, Reference, Model, Random) or per account and
// role ("WHO/Primary"). Groups with fewer than two scores or zero variance
// are skipped with a warning.
DensityTable sentiment_density(std::span<const eval::SampleBundle> bundles, DensityGrouping grouping);
std::string render_density_csv(const DensityTable& table);

struct RankedText {
  std::string text;
  double score;  // mean cosine to the other set
};

struct RankedDisplay {
  std::string message_id;
  std::string author;
  std::string message;
  std::vector<RankedText> primary;    // by mean cosine to the generated set
  std::vector<RankedText> generated;  // by mean cosine to the primary set
};

// Descending score; ties keep sample order. Throws ValidationError unless
// 1 <= k <= sample size.
RankedDisplay display_ranked_responses(const eval::SampleBundle& bundle, std::size_t k = 5);
std::string render_ranked_markdown(std::span<const RankedDisplay> displays);

struct RunManifest {
  std::string command;
  std::string version;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> warnings;
  std::string started_at;
  std::string finished_at;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

// ISO-8601 UTC with millisecond precision.
std::string utc_now();

}  // namespace reception::reports
