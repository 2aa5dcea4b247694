#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reception::text {

// UTF-8 helpers. Invalid byte sequences decode to U+FFFD so that cleaning
// never fails on arbitrary input.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view codepoints);

bool is_unicode_whitespace(char32_t c) noexcept;

// Extended_Pictographic, variation selectors, regional indicators, skin-tone
// modifiers, keycap combiner and tag characters.
bool is_emoji_codepoint(char32_t c) noexcept;

// Removes links (http://, https://, bare t.co/), emoji, collapses whitespace
// runs to a single space and trims. Idempotent.
std::string clean_text(std::string_view raw);

// True when `s` still contains something clean_text would remove.
bool contains_url(std::string_view s);
bool contains_emoji(std::string_view s);

// ASCII case folding, used for screen-name comparison.
std::string fold_ascii(std::string_view s);

}  // namespace reception::text
