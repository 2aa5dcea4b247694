#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reception/corpus.hpp"

namespace reception::corpus {

// Standard file names inside a corpus directory.
inline constexpr const char* kThreadsFile = "threads.jsonl";
inline constexpr const char* kTrainFile = "train.jsonl";
inline constexpr const char* kTestFile = "test.jsonl";
inline constexpr const char* kStatsFile = "stats.csv";
inline constexpr const char* kTrainPromptsFile = "train_prompts.txt";

// Threads (and test threads) as one JSON object per line:
//   {"author","clean_text","message_id","raw_text",
//    "responses":[{"clean_text","id","raw_text"}]}
void write_threads(std::ostream& out, std::span<const MessageThread> threads);
std::vector<MessageThread> read_threads(std::istream& in);

// Train triples: {"author","message","message_id","response","response_id"}.
void write_train(std::ostream& out, std::span<const TrainExample> train);
std::vector<TrainExample> read_train(std::istream& in);

// One serialized training example per line.
void write_train_prompts(std::ostream& out, std::span<const TrainExample> train);

// set,messages,responses,mean_responses_per_message,sd_responses_per_message,display
void write_stats_csv(std::ostream& out, const SplitStats& stats);

void write_corpus_dir(const std::filesystem::path& dir, const CorpusSplit& split);

// Reads train.jsonl and test.jsonl; stats are recomputed from the contents.
CorpusSplit read_corpus_dir(const std::filesystem::path& dir);

std::vector<MessageThread> read_threads_file(const std::filesystem::path& path);
void write_threads_file(const std::filesystem::path& path, std::span<const MessageThread> threads);

}  // namespace reception::corpus
