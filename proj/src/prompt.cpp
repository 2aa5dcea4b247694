#include "reception/prompt.hpp"

#include <algorithm>

#include "reception/error.hpp"

namespace reception::prompt {

namespace {

void reject_tokens(std::string_view field, std::string_view value) {
  if (auto tok = find_special_token(value)) {
    throw ValidationError(std::string(field) + " contains reserved token " +
                          std::string(*tok));
  }
}

// Position of the earliest special token at or after `from`.
std::size_t next_token(std::string_view s, std::size_t from) {
  std::size_t best = std::string_view::npos;
  for (auto tok : kSpecialTokens) {
    best = std::min(best, s.find(tok, from));
  }
  return best;
}

}  // namespace

std::optional<std::string_view> find_special_token(std::string_view text) {
  std::optional<std::string_view> found;
  std::size_t best = std::string_view::npos;
  for (auto tok : kSpecialTokens) {
    if (auto p = text.find(tok); p < best) {
      best = p;
      found = tok;
    }
  }
  return found;
}

std::string serialize_example(std::string_view message, std::string_view author,
                              std::optional<std::string_view> response) {
  reject_tokens("message", message);
  reject_tokens("author", author);
  if (response) reject_tokens("response", *response);

  std::string out;
  out.reserve(message.size() + author.size() + (response ? response->size() : 0) + 48);
  out += kMessageToken;
  out += message;
  out += kAuthorToken;
  out += author;
  out += kResponseToken;
  if (response) {
    out += *response;
    out += kEndOfTextToken;
  }
  return out;
}

std::string serialize_example(const Example& example) {
  return serialize_example(example.message, example.author,
                           example.response ? std::optional<std::string_view>(*example.response)
                                            : std::nullopt);
}

Example parse_example(std::string_view s) {
  if (!s.starts_with(kMessageToken)) {
    throw ParseError("expected " + std::string(kMessageToken), 0);
  }
  std::size_t pos = kMessageToken.size();

  auto field_until = [&](std::string_view delimiter) {
    const std::size_t at = next_token(s, pos);
    if (at == std::string_view::npos || s.compare(at, delimiter.size(), delimiter) != 0) {
      throw ParseError("expected " + std::string(delimiter),
                       at == std::string_view::npos ? s.size() : at);
    }
    std::string value(s.substr(pos, at - pos));
    pos = at + delimiter.size();
    return value;
  };

  Example ex;
  ex.message = field_until(kAuthorToken);
  ex.author = field_until(kResponseToken);
  if (pos == s.size()) return ex;  // inference prompt
  ex.response = field_until(kEndOfTextToken);
  if (pos != s.size()) {
    throw ParseError("trailing content after " + std::string(kEndOfTextToken), pos);
  }
  return ex;
}

}  // namespace reception::prompt
