#include "reception/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reception/corpus.hpp"
#include "reception/error.hpp"
#include "reception/text.hpp"

namespace reception::reports {

namespace {

using eval::AggregateEval;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '_': case '%': case '&': case '#': case '$': case '{': case '}':
        out += '\\';
        out += c;
        break;
      default: out += c;
    }
  }
  return out;
}

std::string percent(std::optional<double> x, TableFormat f) {
  if (!x) return "n/a";
  return format_fixed(*x, 1) + (f == TableFormat::latex ? "\\%" : "%");
}

std::string signed_fixed(double x, int decimals) {
  const std::string s = format_fixed(x, decimals);
  if (s[0] == '-' || round_half_away(x, decimals) == 0.0) return s;
  return "+" + s;
}

std::string p_value(double p) {
  if (p < 0.001) return "<0.001";
  return format_fixed(p, 3);
}

struct Row {
  std::string label;
  std::vector<std::string> cells;
};

std::vector<const AggregateEval*> columns(std::span<const AggregateEval> aggregates) {
  std::vector<const AggregateEval*> cols;
  for (const auto& a : aggregates) {
    if (a.messages > 0) cols.push_back(&a);
  }
  return cols;
}

std::string render(const std::vector<const AggregateEval*>& cols, const std::vector<Row>& rows,
                   std::size_t footer_rows, TableFormat f) {
  std::ostringstream out;
  if (f == TableFormat::csv) {
    out << "Comparison";
    for (const auto* c : cols) out << ',' << csv_cell(c->group);
    out << '\n';
    for (const auto& r : rows) {
      out << csv_cell(r.label);
      for (const auto& cell : r.cells) out << ',' << csv_cell(cell);
      out << '\n';
    }
    return out.str();
  }
  out << "\\begin{tabular}{l" << std::string(cols.size(), 'r') << "}\n\\hline\nComparison";
  for (const auto* c : cols) out << " & " << latex_escape(c->group);
  out << " \\\\\n\\hline\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + footer_rows == rows.size() && footer_rows > 0) out << "\\hline\n";
    out << latex_escape(rows[i].label);
    for (const auto& cell : rows[i].cells) out << " & " << cell;
    out << " \\\\\n";
  }
  out << "\\hline\n\\end{tabular}\n";
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string file_stem_for(const std::string& group) {
  std::string s;
  for (char c : group) {
    const auto u = static_cast<unsigned char>(c);
    s += (std::isalnum(u) || c == '-' || c == '_') ? c : '_';
  }
  return s.empty() ? "group" : s;
}

struct NamedCurve {
  const char* key;
  const char* label;
  const char* color;
  const stats::RecCurve* curve;
};

std::vector<NamedCurve> curves_of(const AggregateEval& a) {
  return {{"reference", "Primary vs. Reference", "#1f77b4", &a.rec_reference},
          {"model", "Primary vs. Model", "#d62728", &a.rec_model},
          {"random", "Primary vs. Random", "#7f7f7f", &a.rec_random}};
}

const char* kRoles[] = {"Primary", "Reference", "Model", "Random"};

const std::vector<eval::ScoredText>& role_sample(const eval::SampleBundle& b, int role) {
  switch (role) {
    case 0: return b.primary;
    case 1: return b.reference;
    case 2: return b.generated;
    default: return b.random;
  }
}

std::vector<RankedText> top_k(const std::vector<eval::ScoredText>& items, const std::vector<eval::ScoredText>& against,
                              std::size_t k) {
  std::vector<EmbeddingVector> a, b;
  for (const auto& x : items) a.push_back(x.embedding);
  for (const auto& x : against) b.push_back(x.embedding);
  const auto scores = stats::mean_similarities(a, b);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });
  std::vector<RankedText> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({items[order[i]].text, scores[order[i]]});
  return out;
}

}  // namespace

double round_half_away(double x, int decimals) {
  const long double scale = std::pow(10.0L, decimals);
  const long double r = std::roundl(static_cast<long double>(x) * scale) / scale;
  return static_cast<double>(r) + 0.0;
}

std::string format_fixed(double x, int decimals) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  double r = round_half_away(x, decimals);
  if (r == 0.0) r = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
  return buf;
}

std::string render_auc_table(std::span<const AggregateEval> aggregates, TableFormat format) {
  const auto cols = columns(aggregates);
  std::vector<Row> rows = {{"Primary vs. Reference", {}}, {"Primary vs. Model", {}},
                           {"Primary vs. Random", {}}, {"Model % Difference", {}}};
  for (const auto* c : cols) {
    rows[0].cells.push_back(format_fixed(c->rec_reference.auc, 3));
    rows[1].cells.push_back(format_fixed(c->rec_model.auc, 3));
    rows[2].cells.push_back(format_fixed(c->rec_random.auc, 3));
    rows[3].cells.push_back(percent(c->auc_pct_difference, format));
  }
  return render(cols, rows, 1, format);
}

std::string render_ttest_table(std::span<const AggregateEval> aggregates, TableFormat format) {
  const auto cols = columns(aggregates);
  std::vector<Row> rows = {{"GT vs. Random", {}}, {"ME vs. Random", {}}, {"GT vs. Random p-value", {}},
                           {"ME vs. Random p-value", {}}, {"Model % Difference", {}}};
  for (const auto* c : cols) {
    rows[0].cells.push_back(c->gt_vs_random ? signed_fixed(c->gt_vs_random->mean_diff, 3) : "n/a");
    rows[1].cells.push_back(c->me_vs_random ? signed_fixed(c->me_vs_random->mean_diff, 3) : "n/a");
    std::string p0 = c->gt_vs_random ? p_value(c->gt_vs_random->p) : "n/a";
    std::string p1 = c->me_vs_random ? p_value(c->me_vs_random->p) : "n/a";
    if (format == TableFormat::latex) {
      if (p0[0] == '<') p0 = "$" + p0 + "$";
      if (p1[0] == '<') p1 = "$" + p1 + "$";
    }
    rows[2].cells.push_back(p0);
    rows[3].cells.push_back(p1);
    rows[4].cells.push_back(percent(c->ttest_pct_difference, format));
  }
  return render(cols, rows, 1, format);
}

std::string render_chi_square_table(std::span<const AggregateEval> aggregates, TableFormat format) {
  const auto cols = columns(aggregates);
  std::vector<Row> rows = {{"Primary vs. Reference", {}}, {"Primary vs. Model", {}}, {"Primary vs. Random", {}}};
  for (const auto* c : cols) {
    rows[0].cells.push_back(percent(c->fail_to_reject_reference, format));
    rows[1].cells.push_back(percent(c->fail_to_reject_model, format));
    rows[2].cells.push_back(percent(c->fail_to_reject_random, format));
  }
  return render(cols, rows, 0, format);
}

std::string render_pearson_table(std::span<const AggregateEval> aggregates) {
  std::ostringstream out;
  out << "group,n,r,p\n";
  for (const auto* c : columns(aggregates)) {
    out << csv_cell(c->group) << ',';
    if (c->baselines) {
      out << c->baselines->n << ',' << format_fixed(c->baselines->r, 3) << ',' << p_value(c->baselines->p) << '\n';
    } else {
      out << c->list_length << ",n/a,n/a\n";
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_tables(std::span<const AggregateEval> aggregates,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };
  emit("auc_rec.csv", render_auc_table(aggregates, TableFormat::csv));
  emit("auc_rec.tex", render_auc_table(aggregates, TableFormat::latex));
  emit("ttest_mean_diff.csv", render_ttest_table(aggregates, TableFormat::csv));
  emit("ttest_mean_diff.tex", render_ttest_table(aggregates, TableFormat::latex));
  emit("chi_square.csv", render_chi_square_table(aggregates, TableFormat::csv));
  emit("chi_square.tex", render_chi_square_table(aggregates, TableFormat::latex));
  emit("pearson.csv", render_pearson_table(aggregates));
  return written;
}

void validate_rec_points(const stats::RecCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) throw ValidationError("REC curve has no points");
  if (pts.front().tolerance != 0.0) throw ValidationError("REC curve must start at tolerance 0");
  if (pts.back().tolerance != curve.e_max) throw ValidationError("REC curve must end at e_max");
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].tolerance < pts[i - 1].tolerance || pts[i].accuracy < pts[i - 1].accuracy) {
      throw ValidationError("REC curve points are not monotone nondecreasing");
    }
  }
  for (const auto& p : pts) {
    if (p.accuracy < 0.0 || p.accuracy > 1.0) throw ValidationError("REC accuracy outside [0, 1]");
  }
}

double integrate_rec_points(std::span<const stats::RecPoint> points) {
  if (points.empty()) throw ValidationError("REC curve has no points");
  const double span = points.back().tolerance - points.front().tolerance;
  if (span <= 0.0) return points.back().accuracy;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    area += points[i].accuracy * (points[i + 1].tolerance - points[i].tolerance);
  }
  return area / span;
}

std::string render_rec_csv(const AggregateEval& a) {
  std::ostringstream out;
  out << "curve,tolerance,accuracy\n";
  for (const auto& c : curves_of(a)) {
    validate_rec_points(*c.curve);
    for (const auto& p : c.curve->points) out << c.key << ',' << g17(p.tolerance) << ',' << g17(p.accuracy) << '\n';
  }
  return out.str();
}

std::string render_rec_svg(const AggregateEval& a) {
  constexpr double W = 480, H = 360, L = 60, R = 20, T = 30, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  const double span = a.e_max > 0.0 ? a.e_max : 1.0;
  auto px = [&](double t) { return L + pw * t / span; };
  auto py = [&](double acc) { return T + ph * (1.0 - acc); };
  char buf[256];

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  out << buf;
  out << "<!-- group=" << a.group << " messages=" << a.messages << " list_length=" << a.list_length
      << " e_max=" << g17(a.e_max) << " -->\n";
  for (const auto& c : curves_of(a)) {
    validate_rec_points(*c.curve);
    out << "<!-- curve=" << c.key << " auc=" << g17(c.curve->auc) << " points=";
    for (std::size_t i = 0; i < c.curve->points.size(); ++i) {
      if (i) out << ';';
      out << g17(c.curve->points[i].tolerance) << ':' << g17(c.curve->points[i].accuracy);
    }
    out << " -->\n";
  }
  out << "<rect x=\"0\" y=\"0\" width=\"480\" height=\"360\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<path d=\"M %.2f %.2f V %.2f H %.2f\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n", L, T,
                T + ph, L + pw);
  out << buf;
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" text-anchor=\"middle\">%s</text>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" text-anchor=\"end\">%s</text>\n",
                  px(f * span), T + ph + 15, format_fixed(f * span, 2).c_str(), L - 5, py(f) + 3,
                  format_fixed(f, 2).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">Tolerance (cosine distance)</text>\n"
                "<text x=\"15\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 %.2f)\">Accuracy</text>\n",
                L + pw / 2, H - 12, T + ph / 2, T + ph / 2);
  out << buf;
  out << "<text x=\"" << L + pw / 2 << "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">REC: "
      << a.group << "</text>\n";

  int legend = 0;
  for (const auto& c : curves_of(a)) {
    const auto& pts = c.curve->points;
    std::ostringstream d;
    std::snprintf(buf, sizeof buf, "M %.2f %.2f", px(pts[0].tolerance), py(pts[0].accuracy));
    d << buf;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof buf, " H %.2f V %.2f", px(pts[i].tolerance), py(pts[i].accuracy));
      d << buf;
    }
    out << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = T + ph - 45 + 15 * legend++;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"2\"/>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">%s (AUC=%s)</text>\n",
                  L + pw - 180, ly, L + pw - 160, ly, c.color, L + pw - 155, ly + 3, c.label,
                  format_fixed(c.curve->auc, 3).c_str());
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::filesystem::path> emit_rec_plots(std::span<const AggregateEval> aggregates,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto* a : columns(aggregates)) {
    const auto stem = "rec_" + file_stem_for(a->group);
    write_file(dir / (stem + ".csv"), render_rec_csv(*a));
    write_file(dir / (stem + ".svg"), render_rec_svg(*a));
    written.push_back(dir / (stem + ".csv"));
    written.push_back(dir / (stem + ".svg"));
  }
  return written;
}

std::vector<double> density_grid() {
  std::vector<double> grid(201);
  for (int i = 0; i <= 200; ++i) grid[i] = -1.1 + 2.2 * i / 200.0;
  return grid;
}

DensityTable sentiment_density(std::span<const eval::SampleBundle> bundles, DensityGrouping grouping) {
  DensityTable table;
  table.grid = density_grid();

  std::vector<std::pair<std::string, std::vector<double>>> groups;
  auto series_for = [&](const std::string& name) -> std::vector<double>& {
    for (auto& g : groups) {
      if (g.first == name) return g.second;
    }
    groups.emplace_back(name, std::vector<double>{});
    return groups.back().second;
  };

  if (grouping == DensityGrouping::role) {
    for (int role = 0; role < 4; ++role) series_for(kRoles[role]);
  }
  std::map<std::string, std::string> account_names;
  for (const auto& b : bundles) {
    std::string prefix;
    if (grouping == DensityGrouping::account) {
      auto [it, _] = account_names.emplace(text::fold_ascii(b.author), b.author);
      prefix = it->second + "/";
    }
    for (int role = 0; role < 4; ++role) {
      auto& xs = series_for(prefix + kRoles[role]);
      for (const auto& s : role_sample(b, role)) xs.push_back(s.sentiment.s);
    }
  }

  for (const auto& [name, xs] : groups) {
    if (xs.size() < 2 || stats::sample_sd(xs) == 0.0) {
      table.warnings.push_back("density group '" + name + "' skipped: needs at least two distinct scores");
      continue;
    }
    table.series.push_back({name, stats::gaussian_kde(xs, table.grid)});
  }
  return table;
}

std::string render_density_csv(const DensityTable& table) {
  std::ostringstream out;
  out << 'x';
  for (const auto& s : table.series) out << ',' << csv_cell(s.name);
  out << '\n';
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << g17(table.grid[i]);
    for (const auto& s : table.series) out << ',' << g17(s.density[i]);
    out << '\n';
  }
  return out.str();
}

RankedDisplay display_ranked_responses(const eval::SampleBundle& bundle, std::size_t k) {
  if (k < 1 || k > bundle.primary.size() || k > bundle.generated.size()) {
    throw ValidationError("display k must lie in [1, " + std::to_string(std::min(bundle.primary.size(), bundle.generated.size())) +
                          "]");
  }
  RankedDisplay d;
  d.message_id = bundle.message_id;
  d.author = bundle.author;
  d.message = bundle.message_text;
  d.primary = top_k(bundle.primary, bundle.generated, k);
  d.generated = top_k(bundle.generated, bundle.primary, k);
  return d;
}

std::string render_ranked_markdown(std::span<const RankedDisplay> displays) {
  std::ostringstream out;
  for (const auto& d : displays) {
    out << "## " << d.author << " (" << d.message_id << ")\n\n" << d.message << "\n\n";
    out << "| # | Ground truth | Score | Generated | Score |\n|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < d.primary.size(); ++i) {
      auto cell = [](std::string s) {
        std::string out;
        for (char c : s) {
          if (c == '|') out += "\\|";
          else out += c;
        }
        return out;
      };
      out << "| " << i + 1 << " | " << cell(d.primary[i].text) << " | " << format_fixed(d.primary[i].score, 3) << " | "
          << cell(d.generated[i].text) << " | " << format_fixed(d.generated[i].score, 3) << " |\n";
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"version", version},
          {"config", config},
          {"inputs", inputs},
          {"outputs", outputs},
          {"counts", counts},
          {"warnings", warnings},
          {"started_at", started_at},
          {"finished_at", finished_at}};
}

void RunManifest::write(const std::filesystem::path& path) const {
  write_file(path, to_json().dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
}

std::string utc_now() {
  return corpus::format_timestamp(
      std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()));
}

}  // namespace reception::reports
