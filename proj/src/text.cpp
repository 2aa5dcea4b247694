#include "reception/text.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace reception::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;
constexpr char32_t kZeroWidthJoiner = 0x200D;

struct Range {
  char32_t lo;
  char32_t hi;
};

constexpr Range kExtendedPictographic[] = {
#include "extended_pictographic.inc"
};

bool in_extended_pictographic(char32_t c) noexcept {
  auto it = std::upper_bound(
      std::begin(kExtendedPictographic), std::end(kExtendedPictographic), c,
      [](char32_t v, const Range& r) { return v < r.lo; });
  if (it == std::begin(kExtendedPictographic)) return false;
  --it;
  return c <= it->hi;
}

bool is_ascii_alnum(char32_t c) noexcept {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

char32_t lower_ascii(char32_t c) noexcept {
  return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c;
}

bool matches_at(std::u32string_view s, std::size_t i, std::string_view lit) {
  if (s.size() - i < lit.size()) return false;
  for (std::size_t k = 0; k < lit.size(); ++k) {
    if (lower_ascii(s[i + k]) != static_cast<char32_t>(lit[k])) return false;
  }
  return true;
}

// Length of the link starting at `i`, or 0 when no link starts there.
std::size_t link_length_at(std::u32string_view s, std::size_t i) {
  bool starts = matches_at(s, i, "http://") || matches_at(s, i, "https://");
  if (!starts && matches_at(s, i, "t.co/")) {
    starts = i == 0 ||
             !(is_ascii_alnum(s[i - 1]) || s[i - 1] == '.' || s[i - 1] == '/');
  }
  if (!starts) return 0;
  std::size_t end = i;
  while (end < s.size() && !is_unicode_whitespace(s[end])) ++end;
  return end - i;
}

std::u32string strip_emoji(std::u32string_view in) {
  std::vector<bool> drop(in.size(), false);
  for (std::size_t i = 0; i < in.size(); ++i) drop[i] = is_emoji_codepoint(in[i]);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != kZeroWidthJoiner) continue;
    bool prev = i > 0 && is_emoji_codepoint(in[i - 1]);
    bool next = i + 1 < in.size() && is_emoji_codepoint(in[i + 1]);
    if (prev || next) drop[i] = true;
  }
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!drop[i]) out.push_back(in[i]);
  }
  return out;
}

std::u32string strip_links(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    if (std::size_t len = link_length_at(in, i); len > 0) {
      i += len;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

std::u32string collapse_whitespace(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t c : in) {
    if (is_unicode_whitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + extra >= n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t c : codepoints) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

bool is_unicode_whitespace(char32_t c) noexcept {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_emoji_codepoint(char32_t c) noexcept {
  if (c == 0xFE0E || c == 0xFE0F) return true;       // variation selectors
  if (c >= 0x1F1E6 && c <= 0x1F1FF) return true;     // regional indicators
  if (c >= 0x1F3FB && c <= 0x1F3FF) return true;     // skin-tone modifiers
  if (c == 0x20E3) return true;                      // combining keycap
  if (c >= 0xE0020 && c <= 0xE007F) return true;     // tag sequences
  return in_extended_pictographic(c);
}

std::string clean_text(std::string_view raw) {
  std::u32string cps = decode_utf8(raw);
  cps = strip_emoji(cps);
  cps = strip_links(cps);
  cps = collapse_whitespace(cps);
  return encode_utf8(cps);
}

bool contains_url(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (link_length_at(cps, i) > 0) return true;
  }
  return false;
}

bool contains_emoji(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  return std::any_of(cps.begin(), cps.end(),
                     [](char32_t c) { return is_emoji_codepoint(c); });
}

std::string fold_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace reception::text
