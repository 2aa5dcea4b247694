#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "reception/config.hpp"
#include "reception/corpus.hpp"
#include "reception/corpus_io.hpp"
#include "reception/digest.hpp"
#include "reception/error.hpp"
#include "reception/eval_io.hpp"
#include "reception/evaluator.hpp"
#include "reception/http_backend.hpp"
#include "reception/mock_backend.hpp"
#include "reception/preview_server.hpp"
#include "reception/reports.hpp"
#include "reception/synthetic.hpp"

#ifndef RECEPTION_VERSION
#define RECEPTION_VERSION "0.0.0"
#endif

namespace reception::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir;
  std::string backend = "mock";
  std::string normalization;
};

config::RunConfig resolve_config(const Globals& g) {
  config::RunConfig c;
  if (!g.config_path.empty()) c.apply(config::load_key_values(g.config_path));
  if (g.seed) c.set_seed(*g.seed);
  if (!g.normalization.empty()) c.eval.normalization = stats::parse_normalization(g.normalization);
  c.validate();
  return c;
}

fs::path require_out(const Globals& g) {
  if (g.out_dir.empty()) throw ValidationError("--out <dir> is required");
  fs::create_directories(g.out_dir);
  return g.out_dir;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw IoError(std::string(what) + " not found: " + p.string());
}

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << content;
}

std::unique_ptr<protocol::Backend> make_backend(const std::string& backend_url, const std::vector<corpus::TrainExample>& train,
                                                const config::RunConfig& cfg) {
  if (backend_url == "mock") {
    protocol::MockConfig mc;
    mc.dim = cfg.mock_dim;
    return std::make_unique<protocol::MockBackend>(train, mc);
  }
  return std::make_unique<protocol::HttpBackend>(backend_url);
}

reports::RunManifest start_manifest(const std::string& command, const config::RunConfig& cfg,
                                    const std::vector<std::string>& args) {
  reports::RunManifest m;
  m.command = command;
  m.version = RECEPTION_VERSION;
  m.started_at = reports::utc_now();
  m.config = cfg.to_json();
  m.config["argv"] = args;
  return m;
}

void record_inputs(reports::RunManifest& m, std::initializer_list<fs::path> paths) {
  for (const auto& p : paths) {
    if (fs::is_regular_file(p)) m.inputs[p.string()] = digest::sha256_file(p);
  }
}

void record_outputs(reports::RunManifest& m, const std::vector<fs::path>& paths) {
  for (const auto& p : paths) m.outputs[p.filename().string()] = digest::sha256_file(p);
}

void finish_manifest(reports::RunManifest& m, const fs::path& path) {
  m.finished_at = reports::utc_now();
  m.write(path);
}

void record_split(reports::RunManifest& m, const corpus::CorpusSplit& split) {
  m.counts["train_messages"] = split.stats.train.messages;
  m.counts["train_responses"] = split.stats.train.responses;
  m.counts["test_messages"] = split.stats.test.messages;
  m.counts["test_responses"] = split.stats.test.responses;
  m.counts["duplicate_groups"] = split.stats.duplicate_groups;
  m.counts["duplicate_instances_dropped"] = split.stats.duplicate_instances_dropped;
  m.counts["train_messages_overlapping_test"] = split.stats.train_messages_overlapping_test;
  m.warnings.insert(m.warnings.end(), split.warnings.begin(), split.warnings.end());
}

std::vector<fs::path> corpus_outputs(const fs::path& dir) {
  return {dir / corpus::kTrainFile, dir / corpus::kTestFile, dir / corpus::kStatsFile, dir / corpus::kTrainPromptsFile};
}

void print_split(std::ostream& out, const corpus::CorpusSplit& split) {
  corpus::write_stats_csv(out, split.stats);
}

// Blocks SIGINT/SIGTERM in every thread and stops `stop` when one arrives.
template <typename Server>
void serve_until_signal(Server& server, std::ostream& out, const std::string& what, const std::string& host, int port) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  const int bound = server.bind(host, port);
  out << what << " listening on http://" << host << ":" << bound << std::endl;
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate generative models of public reception to messages", "reception"};
  app.set_version_flag("--version", RECEPTION_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random draw");
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--backend", g.backend, "Scoring backend: 'mock' or http://host:port")->capture_default_str();
  app.add_option("--normalization", g.normalization, "REC normalization: joint or per-list");

  std::function<void()> action;

  auto* ingest = app.add_subcommand("ingest", "Archive + allowlist -> threads and train/test corpus");
  std::string archive_path, allowlist_path;
  ingest->add_option("--archive", archive_path, "Newline-delimited JSON archive")->required();
  ingest->add_option("--allowlist", allowlist_path, "Screen names, one per line (default: built-in list)");
  ingest->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(g);
      const auto dir = require_out(g);
      require_file(archive_path, "archive");
      const auto allowlist = allowlist_path.empty() ? corpus::Allowlist::defaults()
                                                    : (require_file(allowlist_path, "allowlist"),
                                                       corpus::Allowlist::load(allowlist_path));
      auto manifest = start_manifest("ingest", cfg, args);
      record_inputs(manifest, {archive_path, allowlist_path});

      const auto parsed = corpus::parse_archive_file(archive_path);
      for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
      if (parsed.records.empty()) err << "warning: archive contains no records\n";
      manifest.warnings = parsed.warnings;
      const auto threaded = corpus::thread_responses(parsed.records, allowlist);
      const auto split = corpus::build_splits(threaded.threads, cfg.split);
      for (const auto& w : split.warnings) err << "warning: " << w << '\n';

      corpus::write_threads_file(dir / corpus::kThreadsFile, threaded.threads);
      corpus::write_corpus_dir(dir, split);

      const auto& ts = threaded.stats;
      manifest.counts = {{"records", ts.records},
                         {"lines_skipped", parsed.skipped},
                         {"allowlisted_messages", ts.allowlisted_messages},
                         {"threads", ts.threads},
                         {"responses", ts.responses},
                         {"dangling_references", ts.dangling_references},
                         {"unlisted_targets", ts.unlisted_targets},
                         {"empty_responses_dropped", ts.empty_responses_dropped},
                         {"empty_messages_dropped", ts.empty_messages_dropped}};
      record_split(manifest, split);
      auto outputs = corpus_outputs(dir);
      outputs.push_back(dir / corpus::kThreadsFile);
      record_outputs(manifest, outputs);
      finish_manifest(manifest, dir / "ingest_manifest.json");
      print_split(out, split);
    };
  });

  auto* split_cmd = app.add_subcommand("split", "threads.jsonl -> train/test corpus");
  std::string threads_path;
  split_cmd->add_option("--threads", threads_path, "threads.jsonl written by ingest")->required();
  split_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(g);
      const auto dir = require_out(g);
      require_file(threads_path, "threads file");
      auto manifest = start_manifest("split", cfg, args);
      record_inputs(manifest, {threads_path});
      const auto threads = corpus::read_threads_file(threads_path);
      const auto split = corpus::build_splits(threads, cfg.split);
      for (const auto& w : split.warnings) err << "warning: " << w << '\n';
      corpus::write_corpus_dir(dir, split);
      manifest.counts["threads"] = threads.size();
      record_split(manifest, split);
      record_outputs(manifest, corpus_outputs(dir));
      finish_manifest(manifest, dir / "split_manifest.json");
      print_split(out, split);
    };
  });

  auto* evaluate = app.add_subcommand("evaluate", "Run the evaluation scheme over a corpus");
  std::string corpus_dir;
  std::optional<int> sample_size, workers;
  std::string generated_source;
  evaluate->add_option("--corpus", corpus_dir, "Directory with train.jsonl and test.jsonl")->required();
  evaluate->add_option("--sample-size", sample_size, "Sample size N (overrides config)");
  evaluate->add_option("--workers", workers, "Concurrent messages (0 = all cores)");
  evaluate->add_option("--generated-source", generated_source, "backend, reference or random");
  evaluate->callback([&] {
    action = [&] {
      auto cfg = resolve_config(g);
      if (sample_size) cfg.set_sample_size(*sample_size);
      if (workers) cfg.eval.workers = *workers;
      if (!generated_source.empty()) cfg.eval.generated_source = eval::parse_generated_source(generated_source);
      cfg.validate();
      const auto dir = require_out(g);
      const fs::path cdir = corpus_dir;
      require_file(cdir / corpus::kTrainFile, "train split");
      require_file(cdir / corpus::kTestFile, "test split");

      auto manifest = start_manifest("evaluate", cfg, args);
      manifest.config["backend"] = g.backend;
      record_inputs(manifest, {cdir / corpus::kTrainFile, cdir / corpus::kTestFile, fs::path(g.config_path)});

      const auto split = corpus::read_corpus_dir(cdir);
      const auto backend = make_backend(g.backend, split.train, cfg);
      const auto report = eval::run_evaluation(*backend, split, cfg.eval, cfg.sampling);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';

      eval::write_aggregates(dir / eval::kAggregatesFile, report.aggregates);
      eval::write_message_evals(dir / eval::kMessagesFile, report.evals);
      eval::write_bundles(dir / eval::kBundlesFile, report.bundles);
      write_text(dir / "run_config.txt", cfg.to_text());

      manifest.counts = {{"test_messages", report.test_messages},
                         {"evaluated", report.evals.size()},
                         {"skipped", report.skipped},
                         {"incomplete", report.incomplete},
                         {"groups", report.aggregates.size()}};
      manifest.warnings = report.warnings;
      record_outputs(manifest, {dir / eval::kAggregatesFile, dir / eval::kMessagesFile, dir / eval::kBundlesFile,
                                dir / "run_config.txt"});
      finish_manifest(manifest, dir / "manifest.json");
      out << reports::render_auc_table(report.aggregates, reports::TableFormat::csv);
    };
  });

  auto* report = app.add_subcommand("report", "Render tables, REC plots, densities and examples");
  std::string eval_dir;
  std::size_t top_k = 5;
  std::size_t example_messages = 5;
  report->add_option("--eval", eval_dir, "Directory written by evaluate")->required();
  report->add_option("--top-k", top_k, "Responses shown per example")->capture_default_str();
  report->add_option("--examples", example_messages, "Messages shown in examples.md")->capture_default_str();
  report->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(g);
      const auto dir = require_out(g);
      const fs::path edir = eval_dir;
      require_file(edir / eval::kAggregatesFile, "aggregates");
      require_file(edir / eval::kBundlesFile, "bundles");
      auto manifest = start_manifest("report", cfg, args);
      record_inputs(manifest, {edir / eval::kAggregatesFile, edir / eval::kBundlesFile});

      const auto aggregates = eval::read_aggregates(edir / eval::kAggregatesFile);
      const auto bundles = eval::read_bundles(edir / eval::kBundlesFile);
      auto written = reports::emit_tables(aggregates, dir);
      const auto plots = reports::emit_rec_plots(aggregates, dir);
      written.insert(written.end(), plots.begin(), plots.end());

      for (auto [grouping, name] : {std::pair{reports::DensityGrouping::role, "density_role.csv"},
                                    std::pair{reports::DensityGrouping::account, "density_account.csv"}}) {
        const auto table = reports::sentiment_density(bundles, grouping);
        for (const auto& w : table.warnings) {
          err << "warning: " << w << '\n';
          manifest.warnings.push_back(w);
        }
        write_text(dir / name, reports::render_density_csv(table));
        written.push_back(dir / name);
      }

      std::vector<reports::RankedDisplay> displays;
      for (std::size_t i = 0; i < bundles.size() && i < example_messages; ++i) {
        displays.push_back(reports::display_ranked_responses(bundles[i], top_k));
      }
      write_text(dir / "examples.md", reports::render_ranked_markdown(displays));
      written.push_back(dir / "examples.md");

      manifest.counts = {{"groups", aggregates.size()}, {"bundles", bundles.size()}, {"examples", displays.size()}};
      record_outputs(manifest, written);
      finish_manifest(manifest, dir / "report_manifest.json");
      for (const auto& p : written) out << p.string() << '\n';
    };
  });

  std::string host = "127.0.0.1";
  int port = 0;
  std::string serve_corpus;

  auto load_train = [&]() {
    std::vector<corpus::TrainExample> train;
    if (!serve_corpus.empty()) {
      const fs::path p = fs::path(serve_corpus) / corpus::kTrainFile;
      require_file(p, "train split");
      std::ifstream in(p, std::ios::binary);
      train = corpus::read_train(in);
    }
    return train;
  };

  auto* serve = app.add_subcommand("serve-preview", "HTTP preview service for draft messages");
  std::string cors_origin = "*";
  std::string audit_log;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")->capture_default_str();
  serve->add_option("--corpus", serve_corpus, "Corpus directory for the mock backend's generator");
  serve->add_option("--cors-origin", cors_origin)->capture_default_str();
  serve->add_option("--audit-log", audit_log, "Append (timestamp, request, summary) lines to this file");
  serve->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(g);
      const auto backend = make_backend(g.backend, load_train(), cfg);
      preview::ServerOptions opts;
      opts.cors_origin = cors_origin;
      if (!audit_log.empty()) opts.audit_log = audit_log;
      preview::PreviewServer server(*backend, opts);
      serve_until_signal(server, out, "preview service", host, port);
    };
  });

  auto* mock = app.add_subcommand("mock-backend", "Serve the deterministic mock over the scoring protocol");
  mock->add_option("--host", host)->capture_default_str();
  mock->add_option("--port", port, "0 picks a free port")->capture_default_str();
  mock->add_option("--corpus", serve_corpus, "Corpus directory whose train split feeds generation");
  mock->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(g);
      protocol::MockConfig mc;
      mc.dim = cfg.mock_dim;
      protocol::MockBackend backend(load_train(), mc);
      protocol::ProtocolServer server(backend);
      serve_until_signal(server, out, "mock backend", host, port);
    };
  });

  auto* synth = app.add_subcommand("synth", "Write the seeded synthetic archive and its allowlist");
  synthetic::SyntheticConfig sc;
  synth->add_option("--test-messages", sc.test_messages)->capture_default_str();
  synth->add_option("--responses", sc.responses_per_test_message, "Responses per test message")->capture_default_str();
  synth->add_option("--train-messages", sc.train_messages)->capture_default_str();
  synth->add_option("--topics", sc.topics)->capture_default_str();
  synth->callback([&] {
    action = [&] {
      if (g.seed) sc.seed = *g.seed;
      const auto dir = require_out(g);
      const auto records = synthetic::generate_archive(sc);
      {
        std::ofstream f(dir / "archive.jsonl", std::ios::binary);
        if (!f) throw IoError("cannot write " + (dir / "archive.jsonl").string());
        for (const auto& r : records) f << corpus::format_record_line(r) << '\n';
      }
      std::string names;
      for (const auto& n : synthetic::account_names(sc)) names += n + "\n";
      write_text(dir / "allowlist.txt", names);
      out << records.size() << " records written to " << (dir / "archive.jsonl").string() << '\n';
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << RECEPTION_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const TransportError& e) {
    err << "error: backend unreachable: " << e.what() << '\n';
    return kBackendTransport;
  } catch (const ProtocolError& e) {
    err << "error: backend protocol violation: " << e.what() << '\n';
    return kBackendTransport;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kMissingInput;
  }
}

}  // namespace reception::cli
