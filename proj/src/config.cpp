#include "reception/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "reception/error.hpp"

namespace reception::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError("config: '" + key + "' expects a number, got '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) { return parse_number<int>(key, value); }

double parse_double(const std::string& key, const std::string& value) {
  const double d = parse_number<double>(key, value);
  if (!std::isfinite(d)) throw ValidationError("config: '" + key + "' must be finite");
  return d;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  return parse_key_values(in);
}

void RunConfig::set_seed(std::uint64_t seed) {
  split.seed = seed;
  eval.seed = seed;
}

void RunConfig::set_sample_size(int n) {
  split.sample_size = n;
  eval.sample_size = n;
}

void RunConfig::apply(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "seed") {
      set_seed(parse_number<std::uint64_t>(key, value));
    } else if (key == "sample_size" || key == "N") {
      set_sample_size(parse_int(key, value));
    } else if (key == "test_min_responses") {
      split.test_min_responses = parse_int(key, value);
    } else if (key == "account_breakdown_min_messages") {
      eval.account_breakdown_min_messages = parse_int(key, value);
    } else if (key == "normalization") {
      eval.normalization = stats::parse_normalization(value);
    } else if (key == "alpha") {
      eval.alpha = parse_double(key, value);
    } else if (key == "workers") {
      eval.workers = parse_int(key, value);
    } else if (key == "generated_source") {
      eval.generated_source = eval::parse_generated_source(value);
    } else if (key == "num_beams") {
      sampling.num_beams = parse_int(key, value);
    } else if (key == "top_k") {
      sampling.top_k = parse_int(key, value);
    } else if (key == "top_p") {
      sampling.top_p = parse_double(key, value);
    } else if (key == "temperature") {
      sampling.temperature = parse_double(key, value);
    } else if (key == "generation_seed") {
      if (value.empty()) {
        sampling.seed.reset();
      } else {
        sampling.seed = parse_number<std::uint64_t>(key, value);
      }
    } else if (key == "mock_dim") {
      mock_dim = parse_int(key, value);
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
}

void RunConfig::validate() const {
  split.validate();
  eval.validate();
  sampling.validate();
  if (mock_dim < 2) throw ValidationError("mock_dim must be >= 2");
}

nlohmann::json RunConfig::to_json() const {
  return {{"seed", eval.seed},
          {"sample_size", eval.sample_size},
          {"test_min_responses", split.test_min_responses},
          {"account_breakdown_min_messages", eval.account_breakdown_min_messages},
          {"normalization", std::string(stats::to_string(eval.normalization))},
          {"alpha", eval.alpha},
          {"workers", eval.workers},
          {"generated_source", std::string(eval::to_string(eval.generated_source))},
          {"num_beams", sampling.num_beams},
          {"top_k", sampling.top_k},
          {"top_p", sampling.top_p},
          {"temperature", sampling.temperature},
          {"generation_seed", sampling.seed ? nlohmann::json(*sampling.seed) : nlohmann::json(nullptr)},
          {"mock_dim", mock_dim}};
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "seed = " << eval.seed << '\n'
      << "sample_size = " << eval.sample_size << '\n'
      << "test_min_responses = " << split.test_min_responses << '\n'
      << "account_breakdown_min_messages = " << eval.account_breakdown_min_messages << '\n'
      << "normalization = " << stats::to_string(eval.normalization) << '\n'
      << "alpha = " << g17(eval.alpha) << '\n'
      << "workers = " << eval.workers << '\n'
      << "generated_source = " << eval::to_string(eval.generated_source) << '\n'
      << "num_beams = " << sampling.num_beams << '\n'
      << "top_k = " << sampling.top_k << '\n'
      << "top_p = " << g17(sampling.top_p) << '\n'
      << "temperature = " << g17(sampling.temperature) << '\n'
      << "generation_seed = " << (sampling.seed ? std::to_string(*sampling.seed) : "") << '\n'
      << "mock_dim = " << mock_dim << '\n';
  return out.str();
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig c;
  c.apply(load_key_values(path));
  c.validate();
  return c;
}

}  // namespace reception::config
