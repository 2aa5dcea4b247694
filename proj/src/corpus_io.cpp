#include "reception/corpus_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "reception/error.hpp"
#include "reception/prompt.hpp"

namespace reception::corpus {

using json = nlohmann::json;

namespace {

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

template <typename Fn>
void for_each_json_line(std::istream& in, const char* what, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError(std::string("read failure in ") + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::string stats_row(const char* name, const SetStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.6f,%.6f,%.0f \xC2\xB1 %.0f\n", name, s.messages, s.responses,
                s.mean_responses, s.sd_responses, std::round(s.mean_responses), std::round(s.sd_responses));
  return buf;
}

}  // namespace

void write_threads(std::ostream& out, std::span<const MessageThread> threads) {
  for (const auto& t : threads) {
    json responses = json::array();
    for (const auto& r : t.responses) {
      responses.push_back({{"id", r.id}, {"raw_text", r.raw_text}, {"clean_text", r.clean_text}});
    }
    out << dump_line({{"message_id", t.message_id},
                      {"author", t.author},
                      {"raw_text", t.raw_text},
                      {"clean_text", t.clean_text},
                      {"responses", responses}})
        << '\n';
  }
}

std::vector<MessageThread> read_threads(std::istream& in) {
  std::vector<MessageThread> threads;
  for_each_json_line(in, "threads", [&](const json& j) {
    MessageThread t;
    t.message_id = j.at("message_id").get<std::string>();
    t.author = j.at("author").get<std::string>();
    t.raw_text = j.at("raw_text").get<std::string>();
    t.clean_text = j.at("clean_text").get<std::string>();
    for (const auto& r : j.at("responses")) {
      t.responses.push_back({r.at("id").get<std::string>(), r.at("raw_text").get<std::string>(),
                             r.at("clean_text").get<std::string>()});
    }
    threads.push_back(std::move(t));
  });
  return threads;
}

void write_train(std::ostream& out, std::span<const TrainExample> train) {
  for (const auto& ex : train) {
    out << dump_line({{"message_id", ex.message_id},
                      {"author", ex.author},
                      {"message", ex.message},
                      {"response_id", ex.response_id},
                      {"response", ex.response}})
        << '\n';
  }
}

std::vector<TrainExample> read_train(std::istream& in) {
  std::vector<TrainExample> train;
  for_each_json_line(in, "train", [&](const json& j) {
    train.push_back({j.at("message_id").get<std::string>(), j.at("author").get<std::string>(),
                     j.at("message").get<std::string>(), j.at("response_id").get<std::string>(),
                     j.at("response").get<std::string>()});
  });
  return train;
}

void write_train_prompts(std::ostream& out, std::span<const TrainExample> train) {
  for (const auto& ex : train) {
    out << prompt::serialize_example(ex.message, ex.author, std::string_view(ex.response)) << '\n';
  }
}

void write_stats_csv(std::ostream& out, const SplitStats& stats) {
  out << "set,messages,responses,mean_responses_per_message,sd_responses_per_message,display\n";
  out << stats_row("train", stats.train);
  out << stats_row("test", stats.test);
}

void write_corpus_dir(const std::filesystem::path& dir, const CorpusSplit& split) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / kTrainFile);
    write_train(out, split.train);
  }
  {
    auto out = open_out(dir / kTestFile);
    write_threads(out, split.test);
  }
  {
    auto out = open_out(dir / kStatsFile);
    write_stats_csv(out, split.stats);
  }
  {
    auto out = open_out(dir / kTrainPromptsFile);
    write_train_prompts(out, split.train);
  }
}

CorpusSplit read_corpus_dir(const std::filesystem::path& dir) {
  CorpusSplit split;
  {
    auto in = open_in(dir / kTrainFile);
    split.train = read_train(in);
  }
  {
    auto in = open_in(dir / kTestFile);
    split.test = read_threads(in);
  }
  std::map<std::string, std::size_t> per_message;
  for (const auto& ex : split.train) ++per_message[ex.message_id];
  std::vector<std::size_t> train_counts;
  for (const auto& [_, n] : per_message) train_counts.push_back(n);
  std::vector<std::size_t> test_counts;
  for (const auto& t : split.test) test_counts.push_back(t.responses.size());
  split.stats.train = set_stats(train_counts);
  split.stats.test = set_stats(test_counts);
  return split;
}

std::vector<MessageThread> read_threads_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_threads(in);
}

void write_threads_file(const std::filesystem::path& path, std::span<const MessageThread> threads) {
  auto out = open_out(path);
  write_threads(out, threads);
}

}  // namespace reception::corpus
