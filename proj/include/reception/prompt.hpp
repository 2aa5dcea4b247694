#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace reception::prompt {

inline constexpr std::string_view kMessageToken = "<|message|>";
inline constexpr std::string_view kAuthorToken = "<|author|>";
inline constexpr std::string_view kResponseToken = "<|response|>";
inline constexpr std::string_view kEndOfTextToken = "<|endoftext|>";

inline constexpr std::array<std::string_view, 4> kSpecialTokens = {
    kMessageToken, kAuthorToken, kResponseToken, kEndOfTextToken};

struct Example {
  std::string message;
  std::string author;
  std::optional<std::string> response;  // nullopt = inference prompt

  bool operator==(const Example&) const = default;
};

// First special token found in `text`, if any.
std::optional<std::string_view> find_special_token(std::string_view text);

// Training form ends with <|endoftext|>; the inference form (no response)
// ends right after <|response|>. Throws ValidationError naming the token if
// any field embeds a special token.
std::string serialize_example(std::string_view message, std::string_view author,
                              std::optional<std::string_view> response);
std::string serialize_example(const Example& example);

// Inverse of serialize_example. Throws ParseError with the offending offset.
Example parse_example(std::string_view serialized);

}  // namespace reception::prompt
