#include "reception/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "reception/error.hpp"
#include "reception/text.hpp"

namespace reception::corpus {

using json = nlohmann::json;

namespace {

int parse_digits(std::string_view s, std::size_t pos, std::size_t count,
                 std::string_view whole) {
  if (pos + count > s.size()) throw ParseError("truncated timestamp '" + std::string(whole) + "'", pos);
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') {
      throw ParseError("expected digit in timestamp '" + std::string(whole) + "'", i);
    }
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c) {
    throw ParseError(std::string("expected '") + c + "' in timestamp '" +
                         std::string(s) + "'",
                     pos);
  }
}

// Default public-health account list.
const char* const kDefaultAccounts[] = {
    "ESCAIDE", "ECDCPHT", "ecdc_tb", "ECDC_VPD", "ECDC_HIVAIDS", "ecdc_flu",
    "ECDC_Outbreaks", "ecdc_eu",
    "cdcgov", "cdcdirector", "CDC_eHealth", "CDCespanol", "BRFSS",
    "CDCasthma", "CDC_DASH", "CDCDiabetes", "cdc_drh", "CDCEnvironment",
    "CDC_Cancer", "CDC_EIDjournal", "CDC_EPHTracking", "CDC_Genomics",
    "CDC_HIVAIDS", "CDCMicrobeNet", "CDC_NCBDDD", "CDC_NCEZID", "CDC_TB",
    "CDC_AMD", "CDCChronic", "CDCEmergency", "CDCFlu", "CDCGlobal",
    "CDCGreenHealthy", "CDCHaiti", "CDCHeart_Stroke", "US_CDCIndia", "CDChep",
    "CDCInjury", "CDCKenya", "CDCMakeHealthEZ", "CDCMMWR", "CDCNPIN",
    "CDCObesity", "cdcpcd", "CDCRwanda", "CDCsouthafrica", "CDCSTD",
    "CDCTobaccofree", "CDCTravel", "CPSTF", "DrDeanCDC", "DrKhabbazCDC",
    "DrMartinCDC", "DrMerminCDC", "DrNancyM_CDC", "DrReddCDC",
    "MillionHeartsUS", "NCHStats", "niosh", "NIOSHMining", "NIOSH_MVSafety",
    "NIOSH_NPPTL", "NIOSH_TWH", "nioshbreathe", "NIOSHConstruct",
    "NIOSHespanol", "NIOSHFACE", "nioshfishing", "nioshnoise",
    "NIOSHoilandgas", "WTCHealthPrgm",
    "WHO", "InjectionSafety",
};

const std::set<std::string> kArchiveFields = {
    "id", "text", "author", "created_at", "in_reply_to_id", "quoted_id"};

std::optional<std::string> nullable_id(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be string or null", 0);
  auto s = v.get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

std::string required_string(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", 0);
  return v.get<std::string>();
}

struct MessageKey {
  std::string author;  // folded
  std::string text;
  auto operator<=>(const MessageKey&) const = default;
};

}  // namespace

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  const int year = parse_digits(s, 0, 4, s);
  expect_char(s, 4, '-');
  const int month = parse_digits(s, 5, 2, s);
  expect_char(s, 7, '-');
  const int day = parse_digits(s, 8, 2, s);
  if (s.size() <= 10 || (s[10] != 'T' && s[10] != 't' && s[10] != ' ')) {
    throw ParseError("expected 'T' in timestamp '" + std::string(s) + "'", 10);
  }
  const int hour = parse_digits(s, 11, 2, s);
  expect_char(s, 13, ':');
  const int minute = parse_digits(s, 14, 2, s);
  expect_char(s, 16, ':');
  const int second = parse_digits(s, 17, 2, s);
  std::size_t pos = 19;
  int millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    int scale = 100;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      millis += (s[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
    if (pos == start) throw ParseError("empty fraction in timestamp", pos);
  }
  if (pos >= s.size()) {
    throw ParseError("timestamp '" + std::string(s) + "' lacks a UTC offset", pos);
  }
  int offset_minutes = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    ++pos;
    const int oh = parse_digits(s, pos, 2, s);
    pos += 2;
    if (pos < s.size() && s[pos] == ':') ++pos;
    const int om = parse_digits(s, pos, 2, s);
    pos += 2;
    if (oh > 23 || om > 59) throw ParseError("offset out of range", pos);
    offset_minutes = sign * (oh * 60 + om);
  } else {
    throw ParseError("bad UTC offset in timestamp '" + std::string(s) + "'", pos);
  }
  if (pos != s.size()) throw ParseError("trailing characters in timestamp", pos);

  const year_month_day ymd{std::chrono::year{year},
                           std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw ParseError("timestamp '" + std::string(s) + "' out of range", 0);
  }
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{hour} +
                   minutes{minute} + seconds{second} + milliseconds{millis} -
                   minutes{offset_minutes}};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto days = floor<std::chrono::days>(ts);
  const year_month_day ymd{days};
  auto rest = ts - days;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto m = duration_cast<minutes>(rest);
  rest -= m;
  const auto sec = duration_cast<seconds>(rest);
  rest -= sec;
  const auto ms = rest.count();
  char buf[40];
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(sec.count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(sec.count()),
                  static_cast<int>(ms));
  }
  return buf;
}

TweetRecord parse_record_line(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  if (!obj.is_object()) throw ParseError("record is not a JSON object", 0);
  for (const auto& [key, _] : obj.items()) {
    if (!kArchiveFields.count(key)) throw ParseError("unexpected field '" + key + "'", 0);
  }
  for (const auto& key : kArchiveFields) {
    if (!obj.contains(key)) throw ParseError("missing field '" + key + "'", 0);
  }
  TweetRecord r;
  r.id = required_string(obj, "id");
  if (r.id.empty()) throw ParseError("empty id", 0);
  r.text = required_string(obj, "text");
  r.author = required_string(obj, "author");
  if (r.author.empty()) throw ParseError("empty author", 0);
  r.created_at = parse_timestamp(required_string(obj, "created_at"));
  r.in_reply_to_id = nullable_id(obj, "in_reply_to_id");
  r.quoted_id = nullable_id(obj, "quoted_id");
  return r;
}

std::string format_record_line(const TweetRecord& r) {
  json obj = {
      {"id", r.id},
      {"text", r.text},
      {"author", r.author},
      {"created_at", format_timestamp(r.created_at)},
      {"in_reply_to_id", r.in_reply_to_id ? json(*r.in_reply_to_id) : json(nullptr)},
      {"quoted_id", r.quoted_id ? json(*r.quoted_id) : json(nullptr)},
  };
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

ArchiveParseResult parse_archive(std::istream& in) {
  if (!in) throw IoError("archive stream is not readable");
  ArchiveParseResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      TweetRecord r = parse_record_line(line);
      if (!seen.insert(r.id).second) {
        ++result.skipped;
        result.warnings.push_back("line " + std::to_string(line_no) +
                                  ": duplicate id " + r.id + " skipped");
        continue;
      }
      result.records.push_back(std::move(r));
    } catch (const ParseError& e) {
      ++result.skipped;
      result.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  return result;
}

ArchiveParseResult parse_archive_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive " + path.string());
  return parse_archive(in);
}

Allowlist::Allowlist(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ValidationError("account allowlist is empty");
  folded_.reserve(names_.size());
  for (const auto& n : names_) folded_.push_back(text::fold_ascii(n));
  std::sort(folded_.begin(), folded_.end());
  folded_.erase(std::unique(folded_.begin(), folded_.end()), folded_.end());
}

Allowlist Allowlist::defaults() {
  return Allowlist(std::vector<std::string>(std::begin(kDefaultAccounts),
                                            std::end(kDefaultAccounts)));
}

Allowlist Allowlist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open allowlist " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(b, e - b + 1));
  }
  return Allowlist(std::move(names));
}

bool Allowlist::contains(std::string_view screen_name) const {
  return std::binary_search(folded_.begin(), folded_.end(),
                            text::fold_ascii(screen_name));
}

bool id_less(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (numeric(a) && numeric(b)) {
    auto strip = [](std::string_view s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string_view::npos ? std::string_view("0") : s.substr(nz);
    };
    a = strip(a);
    b = strip(b);
    if (a.size() != b.size()) return a.size() < b.size();
  }
  return a < b;
}

ThreadingResult thread_responses(std::span<const TweetRecord> records,
                                 const Allowlist& allowlist) {
  ThreadingResult result;
  result.stats.records = records.size();

  std::unordered_map<std::string_view, const TweetRecord*> by_id;
  by_id.reserve(records.size());
  for (const auto& r : records) by_id.emplace(r.id, &r);

  std::map<std::string_view, std::vector<const TweetRecord*>> attached;
  for (const auto& r : records) {
    const auto& target = r.response_target();
    if (!target) continue;
    auto it = by_id.find(*target);
    if (it == by_id.end()) {
      ++result.stats.dangling_references;
      continue;
    }
    if (!allowlist.contains(it->second->author)) {
      ++result.stats.unlisted_targets;
      continue;
    }
    attached[it->second->id].push_back(&r);
  }

  for (const auto& r : records) {
    if (allowlist.contains(r.author)) ++result.stats.allowlisted_messages;
  }

  for (auto& [message_id, responders] : attached) {
    const TweetRecord& msg = *by_id.at(message_id);
    MessageThread thread;
    thread.message_id = msg.id;
    thread.author = msg.author;
    thread.raw_text = msg.text;
    thread.clean_text = text::clean_text(msg.text);
    if (thread.clean_text.empty()) {
      ++result.stats.empty_messages_dropped;
      continue;
    }
    std::sort(responders.begin(), responders.end(),
              [](const TweetRecord* a, const TweetRecord* b) { return id_less(a->id, b->id); });
    for (const TweetRecord* resp : responders) {
      if (!thread.responses.empty() && thread.responses.back().id == resp->id) continue;
      std::string clean = text::clean_text(resp->text);
      if (clean.empty()) {
        ++result.stats.empty_responses_dropped;
        continue;
      }
      thread.responses.push_back({resp->id, resp->text, std::move(clean)});
    }
    if (thread.responses.empty()) continue;
    result.stats.responses += thread.responses.size();
    result.threads.push_back(std::move(thread));
  }
  std::sort(result.threads.begin(), result.threads.end(),
            [](const MessageThread& a, const MessageThread& b) { return id_less(a.message_id, b.message_id); });
  result.stats.threads = result.threads.size();
  return result;
}

void SplitConfig::validate() const {
  if (sample_size < 1) throw ValidationError("sample_size must be at least 1");
  if (test_min_responses < 2 * sample_size) {
    throw ValidationError("test_min_responses (" + std::to_string(test_min_responses) +
                          ") must be at least 2 x sample_size (" +
                          std::to_string(sample_size) + ")");
  }
}

SetStats set_stats(std::span<const std::size_t> counts) {
  SetStats s;
  s.messages = counts.size();
  s.responses = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (counts.empty()) return s;
  s.mean_responses = static_cast<double>(s.responses) / static_cast<double>(counts.size());
  if (counts.size() > 1) {
    double ss = 0.0;
    for (auto c : counts) {
      const double d = static_cast<double>(c) - s.mean_responses;
      ss += d * d;
    }
    s.sd_responses = std::sqrt(ss / static_cast<double>(counts.size() - 1));
  }
  return s;
}

CorpusSplit build_splits(std::span<const MessageThread> threads,
                         const SplitConfig& config) {
  config.validate();
  CorpusSplit split;

  std::map<MessageKey, std::vector<const MessageThread*>> groups;
  for (const auto& t : threads) {
    groups[{text::fold_ascii(t.author), t.clean_text}].push_back(&t);
  }

  std::vector<const MessageThread*> test;
  std::vector<const MessageThread*> train;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const MessageThread* a, const MessageThread* b) { return id_less(a->message_id, b->message_id); });
    if (members.size() > 1) {
      ++split.stats.duplicate_groups;
      split.stats.duplicate_instances_dropped += members.size() - 1;
      train.push_back(members.front());
      continue;
    }
    const MessageThread* t = members.front();
    if (t->responses.size() >= static_cast<std::size_t>(config.test_min_responses)) {
      test.push_back(t);
    } else {
      train.push_back(t);
    }
  }

  std::unordered_set<std::string_view> test_texts;
  for (const auto* t : test) test_texts.insert(t->clean_text);

  auto by_id = [](const MessageThread* a, const MessageThread* b) { return id_less(a->message_id, b->message_id); };
  std::sort(test.begin(), test.end(), by_id);
  std::sort(train.begin(), train.end(), by_id);

  std::vector<std::size_t> train_counts;
  for (const auto* t : train) {
    if (test_texts.count(t->clean_text)) {
      ++split.stats.train_messages_overlapping_test;
      continue;
    }
    train_counts.push_back(t->responses.size());
    for (const auto& r : t->responses) {
      split.train.push_back({t->message_id, t->author, t->clean_text, r.id, r.clean_text});
    }
  }

  std::vector<std::size_t> test_counts;
  for (const auto* t : test) {
    split.test.push_back(*t);
    test_counts.push_back(t->responses.size());
  }
  split.stats.train = set_stats(train_counts);
  split.stats.test = set_stats(test_counts);
  if (split.test.empty()) {
    split.warnings.push_back("test set is empty: no thread has at least " +
                             std::to_string(config.test_min_responses) +
                             " responses after duplicate removal");
  }
  return split;
}

}  // namespace reception::corpus
