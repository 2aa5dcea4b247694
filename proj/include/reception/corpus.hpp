#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reception::corpus {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// ISO-8601 with a mandatory UTC offset ("Z", "+hh:mm" or "+hhmm").
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct TweetRecord {
  std::string id;
  std::string text;
  std::string author;
  Timestamp created_at{};
  std::optional<std::string> in_reply_to_id;
  std::optional<std::string> quoted_id;

  // A record carrying both references is a reply.
  const std::optional<std::string>& response_target() const {
    return in_reply_to_id ? in_reply_to_id : quoted_id;
  }
  bool is_response() const { return in_reply_to_id || quoted_id; }

  bool operator==(const TweetRecord&) const = default;
};

struct ArchiveParseResult {
  std::vector<TweetRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// One archive line -> record. Throws ParseError on anything malformed.
TweetRecord parse_record_line(std::string_view line);
std::string format_record_line(const TweetRecord& record);

// Newline-delimited archive. Malformed lines and duplicate ids are skipped
// and counted; blank lines are ignored. Throws IoError on a failed stream.
ArchiveParseResult parse_archive(std::istream& in);
ArchiveParseResult parse_archive_file(const std::filesystem::path& path);

// Screen names compare case-insensitively, as on the platform itself.
class Allowlist {
 public:
  explicit Allowlist(std::vector<std::string> names);

  static Allowlist defaults();
  // One name per line; '#' starts a comment. Throws IoError if unreadable.
  static Allowlist load(const std::filesystem::path& path);

  bool contains(std::string_view screen_name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> folded_;  // sorted
};

struct Response {
  std::string id;
  std::string raw_text;
  std::string clean_text;

  bool operator==(const Response&) const = default;
};

struct MessageThread {
  std::string message_id;
  std::string author;
  std::string raw_text;
  std::string clean_text;
  std::vector<Response> responses;  // ascending id, unique

  bool operator==(const MessageThread&) const = default;
};

struct ThreadingStats {
  std::size_t records = 0;
  std::size_t allowlisted_messages = 0;
  std::size_t threads = 0;
  std::size_t responses = 0;
  std::size_t dangling_references = 0;    // target id absent from archive
  std::size_t unlisted_targets = 0;       // target author not allowlisted
  std::size_t empty_responses_dropped = 0;
  std::size_t empty_messages_dropped = 0;
};

struct ThreadingResult {
  std::vector<MessageThread> threads;  // ascending message id
  ThreadingStats stats;
};

ThreadingResult thread_responses(std::span<const TweetRecord> records,
                                 const Allowlist& allowlist);

// Orders decimal ids numerically; non-numeric ids fall back to byte order.
bool id_less(std::string_view a, std::string_view b);

struct SplitConfig {
  int test_min_responses = 60;
  int sample_size = 30;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainExample {
  std::string message_id;
  std::string author;
  std::string message;
  std::string response_id;
  std::string response;

  bool operator==(const TrainExample&) const = default;
};

struct SetStats {
  std::size_t messages = 0;
  std::size_t responses = 0;
  double mean_responses = 0.0;
  double sd_responses = 0.0;  // sample standard deviation

  bool operator==(const SetStats&) const = default;
};

SetStats set_stats(std::span<const std::size_t> responses_per_message);

struct SplitStats {
  SetStats train;
  SetStats test;
  std::size_t duplicate_groups = 0;
  std::size_t duplicate_instances_dropped = 0;
  std::size_t train_messages_overlapping_test = 0;

  bool operator==(const SplitStats&) const = default;
};

struct CorpusSplit {
  std::vector<TrainExample> train;    // ordered by (message id, response id)
  std::vector<MessageThread> test;    // ascending message id
  SplitStats stats;
  std::vector<std::string> warnings;
};

CorpusSplit build_splits(std::span<const MessageThread> threads,
                         const SplitConfig& config);

}  // namespace reception::corpus
