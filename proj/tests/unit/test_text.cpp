#include <doctest.h>

#include <string>

#include "reception/error.hpp"
#include "reception/prompt.hpp"
#include "reception/rng.hpp"
#include "reception/text.hpp"

using namespace reception;

TEST_CASE("clean_text examples") {
  CHECK(text::clean_text("Learn more here: https://t.co/abc") == "Learn more here:");
  CHECK(text::clean_text("no links here") == "no links here");
  CHECK(text::clean_text("stay safe \xF0\x9F\x98\xB7\xF0\x9F\x98\xB7") == "stay safe");
}

TEST_CASE("clean_text details") {
  CHECK(text::clean_text("  a \t\n b  ") == "a b");
  CHECK(text::clean_text("HTTPS://Example.org/x y") == "y");
  CHECK(text::clean_text("see t.co/x now") == "see now");
  CHECK(text::clean_text("not.t.co/x") == "not.t.co/x");
  CHECK(text::clean_text("(t.co/x)") == "(");
  // heart + VS16, family ZWJ sequence, flag, keycap
  CHECK(text::clean_text("love \xE2\x9D\xA4\xEF\xB8\x8F") == "love");
  CHECK(text::clean_text("fam \xF0\x9F\x91\xA8\xE2\x80\x8D\xF0\x9F\x91\xA9\xE2\x80\x8D\xF0\x9F\x91\xA7 ok") == "fam ok");
  CHECK(text::clean_text("\xF0\x9F\x87\xBA\xF0\x9F\x87\xB8 usa") == "usa");
  // A ZWJ between letters is not adjacent to emoji and stays.
  CHECK(text::clean_text("a\xE2\x80\x8D" "b") == "a\xE2\x80\x8D" "b");
  CHECK(text::clean_text("caf\xC3\xA9 \xE2\x80\x94 ok") == "caf\xC3\xA9 \xE2\x80\x94 ok");
  CHECK(text::clean_text("") == "");
  CHECK(text::clean_text("\xF0\x9F\x98\xB7 https://t.co/a") == "");
  // No-break space and ideographic space collapse as whitespace.
  CHECK(text::clean_text("a\xC2\xA0\xE3\x80\x80" "b") == "a b");
}

TEST_CASE("clean_text invalid UTF-8 does not throw") {
  const std::string bad = "ok \xFF\xFE end";
  CHECK_NOTHROW(text::clean_text(bad));
  CHECK(text::clean_text(bad) == "ok \xEF\xBF\xBD\xEF\xBF\xBD end");
}

TEST_CASE("clean_text output is free of links and emoji and idempotent") {
  const std::vector<std::string> pieces = {
      "word", "https://t.co/Ab1", "http://x.org/p?q=1", "t.co/zz", " ", "\t", "\n", "  ",
      "\xF0\x9F\x98\xB7", "\xE2\x9D\xA4\xEF\xB8\x8F", "\xE2\x80\x8D", "\xF0\x9F\x87\xAC\xF0\x9F\x87\xA7",
      "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD", "#tag", "@user", "caf\xC3\xA9", ".", "/", "HTTP://UP.CASE",
      "\xE2\x80\x8B", "1\xEF\xB8\x8F\xE2\x83\xA3"};
  rng::Engine eng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto len = rng::uniform_below(eng, 12);
    for (std::uint64_t i = 0; i < len; ++i) s += pieces[rng::uniform_below(eng, pieces.size())];
    const auto c = text::clean_text(s);
    CHECK_FALSE(text::contains_url(c));
    CHECK_FALSE(text::contains_emoji(c));
    CHECK(text::clean_text(c) == c);
    CHECK(c.find("  ") == std::string::npos);
    if (!c.empty()) {
      CHECK(c.front() != ' ');
      CHECK(c.back() != ' ');
    }
  }
}

TEST_CASE("utf8 round trip and code point classes") {
  const std::u32string cps = {U'a', 0xE9, 0x2212, 0x1F637};
  CHECK(text::decode_utf8(text::encode_utf8(cps)) == cps);
  CHECK(text::is_emoji_codepoint(0x1F637));
  CHECK(text::is_emoji_codepoint(0xFE0F));
  CHECK(text::is_emoji_codepoint(0x1F1E6));
  CHECK_FALSE(text::is_emoji_codepoint(U'a'));
  CHECK_FALSE(text::is_emoji_codepoint(0x2212));
  CHECK(text::is_unicode_whitespace(0x3000));
  CHECK_FALSE(text::is_unicode_whitespace(0x200B));
  CHECK(text::fold_ascii("CDCgov") == "cdcgov");
}

TEST_CASE("serialize_example") {
  CHECK(prompt::serialize_example("How will people respond to THIS?", "CDCdirector", std::nullopt) ==
        "<|message|>How will people respond to THIS?<|author|>CDCdirector<|response|>");
  CHECK(prompt::serialize_example("m", "a", std::string_view("r")) ==
        "<|message|>m<|author|>a<|response|>r<|endoftext|>");
  try {
    prompt::serialize_example("bad <|response|> text", "a", std::nullopt);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("<|response|>") != std::string::npos);
  }
  CHECK_THROWS_AS(prompt::serialize_example("m", "a<|endoftext|>", std::string_view("r")), ValidationError);
}

TEST_CASE("parse_example") {
  const auto e = prompt::parse_example("<|message|>m<|author|>a<|response|>");
  CHECK(e.message == "m");
  CHECK(e.author == "a");
  CHECK_FALSE(e.response);
  CHECK_THROWS_AS(prompt::parse_example("garbage"), ParseError);
  CHECK_THROWS_AS(prompt::parse_example("<|author|>a<|message|>m<|response|>"), ParseError);
  CHECK_THROWS_AS(prompt::parse_example("<|message|>m<|author|>a<|response|>r"), ParseError);
  try {
    prompt::parse_example("<|message|>m<|response|>x");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.position() > 0);
  }
}

TEST_CASE("prompt round trip over random texts") {
  const std::string alphabet = "ab <|>mesagrpontx\xC3\xA9\n";
  rng::Engine eng(11);
  auto random_text = [&] {
    std::string s;
    const auto len = rng::uniform_below(eng, 20);
    for (std::uint64_t i = 0; i < len; ++i) s.push_back(alphabet[rng::uniform_below(eng, alphabet.size())]);
    return s;
  };
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto m = random_text();
    const auto a = random_text();
    std::optional<std::string> r;
    if (rng::uniform_below(eng, 2)) r = random_text();
    if (prompt::find_special_token(m) || prompt::find_special_token(a) || (r && prompt::find_special_token(*r))) {
      continue;
    }
    const prompt::Example ex{m, a, r};
    CHECK(prompt::parse_example(prompt::serialize_example(ex)) == ex);
    ++checked;
  }
  CHECK(checked > 1000);
}
