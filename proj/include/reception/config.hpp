#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "reception/corpus.hpp"
#include "reception/evaluator.hpp"
#include "reception/protocol.hpp"

namespace reception::config {

// Flat "key = value" text; '#' starts a comment. Duplicate keys and lines
// without '=' raise ParseError.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

struct RunConfig {
  corpus::SplitConfig split;
  eval::EvalConfig eval;
  protocol::SamplingParams sampling;
  int mock_dim = 64;

  void set_seed(std::uint64_t seed);
  void set_sample_size(int n);
  // Throws ValidationError on unknown keys or unparsable values.
  void apply(const std::map<std::string, std::string>& values);
  void validate() const;

  nlohmann::json to_json() const;
  // Loadable by apply(); reproduces this configuration.
  std::string to_text() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace reception::config
