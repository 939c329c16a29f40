#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/preprocess.hpp"
#include "tonebias/rng.hpp"

using namespace tonebias;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& t : v) out += (out.empty() ? "" : " ") + t;
  return out;
}

std::string random_text(Rng& rng, std::size_t len) {
  static const std::string alphabet =
      "abcXYZ019 \t\n.,!?'\"-()[]{}:;\xe2\x80\x99\xe2\x80\x98\xc3\x89\xc3\xa9\xc3" "AQ";
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.index(alphabet.size())];
  return s;
}

std::string random_word(Rng& rng) {
  static const std::vector<std::string> stems = {"help", "walk", "stud", "cat", "box", "talk", "wish",
                                                 "run", "glass", "bus", "analys", "fl", "go", "seed"};
  static const std::vector<std::string> suffixes = {"", "s", "es", "ies", "ing", "ed", "sses", "ss",
                                                    "ings", "eds", "'s", "ied", "ying", "is", "us"};
  std::string w = stems[rng.index(stems.size())];
  const std::size_t k = 1 + rng.index(3);
  for (std::size_t i = 0; i < k; ++i) w += suffixes[rng.index(suffixes.size())];
  return w;
}

}  // namespace

TEST_CASE("normalize: examples") {
  CHECK(normalize("Sure!! Here's HELP.") == "sure here's help");
  CHECK(normalize("") == "");
  CHECK(normalize("a   b\tc") == "a b c");
  CHECK(normalize("  'quoted'  words ") == "quoted words");
  CHECK(normalize("don\xe2\x80\x99t") == "don't");
  CHECK(normalize("CAF\xc3\x89") == "caf\xc3\xa9");
  CHECK(normalize("e-mail, 3.5%") == "e mail 3 5");
}

TEST_CASE("normalize: idempotent and lowercase on random input") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = random_text(rng, rng.index(40));
    const std::string n = normalize(s);
    CHECK(normalize(n) == n);
    for (char c : n) CHECK_FALSE((c >= 'A' && c <= 'Z'));
    CHECK(n.find("  ") == std::string::npos);
    if (!n.empty()) {
      CHECK(n.front() != ' ');
      CHECK(n.back() != ' ');
    }
  }
}

TEST_CASE("tokenize: examples and join round trip") {
  CHECK(tokenize("sure here's help") == std::vector<std::string>{"sure", "here's", "help"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("ok") == std::vector<std::string>{"ok"});
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const std::string n = normalize(random_text(rng, rng.index(60)));
    const auto toks = tokenize(n);
    CHECK(join(toks) == n);
    for (const auto& t : toks) {
      bool has_word = false;
      for (unsigned char c : t) has_word |= c != '\'';
      CHECK(has_word);  // no pure punctuation tokens
    }
  }
}

TEST_CASE("lemmatize: rule examples") {
  const auto& lem = Lemmatizer::builtin();
  CHECK(lem.lemmatize(std::vector<std::string>{"helping", "helped", "helps"}) ==
        std::vector<std::string>{"help", "help", "help"});
  CHECK(lem.lemma("was") == "be");
  CHECK(lem.lemma("studies") == "study");
  CHECK(lem.lemma("classes") == "class");
  CHECK(lem.lemma("glass") == "glass");
  CHECK(lem.lemma("bus") == "bus");
  CHECK(lem.lemma("is") == "be");
  CHECK(lem.lemma("this") == "this");
  CHECK(lem.lemma("sing") == "sing");  // stem would be shorter than three letters
  CHECK(lem.lemma("red") == "red");
  CHECK(lem.lemma("here's") == "here's");
}

TEST_CASE("lemmatize: idempotent and length-preserving on 1000 generated tokens") {
  const auto& lem = Lemmatizer::builtin();
  Rng rng(3);
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) tokens.push_back(random_word(rng));
  const auto once = lem.lemmatize(tokens);
  const auto twice = lem.lemmatize(once);
  CHECK(once.size() == tokens.size());
  CHECK(twice == once);
}

TEST_CASE("lemmatize: builtin table entries are fixed points") {
  const auto& lem = Lemmatizer::builtin();
  CHECK(lem.table_size() > 20);
  for (const char* w : {"went", "better", "children", "running", "news", "need"}) {
    const std::string l = lem.lemma(w);
    CHECK(lem.lemma(l) == l);
  }
}

TEST_CASE("lemmatizer table parsing") {
  const Lemmatizer lem = Lemmatizer::from_table_text("# comment\nmice mouse\n\ngeese goose  # trailing\n");
  CHECK(lem.table_size() == 2);
  CHECK(lem.lemma("mice") == "mouse");
  CHECK(lem.lemma("geese") == "goose");
  // Chains resolve to their end so the table stays idempotent.
  const Lemmatizer chain = Lemmatizer::from_table_text("a1 b1\nb1 c1\n");
  CHECK(chain.lemma("a1") == "c1");
  CHECK(chain.lemma(chain.lemma("a1")) == chain.lemma("a1"));
  try {
    Lemmatizer::from_table_text("one two three\n");
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedLine);
  }
  try {
    Lemmatizer::from_table_text("ab cd\ncd ab\n");
    FAIL("expected a cycle error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
  tbtest::TempDir dir;
  write_file(dir / "t.txt", "oxen ox\n");
  CHECK(Lemmatizer::from_file(dir / "t.txt").lemma("oxen") == "ox");
}

TEST_CASE("length filter: inclusive bounds") {
  auto doc = [](std::size_t n) {
    CleanDoc d;
    d.raw_len = n;
    return d;
  };
  CHECK(length_filter(doc(3)).kept);
  CHECK_FALSE(length_filter(doc(2)).kept);
  CHECK(length_filter(doc(200)).kept);
  CHECK_FALSE(length_filter(doc(201)).kept);
  CHECK_FALSE(length_filter(doc(0)).kept);
  try {
    length_filter(doc(5), {5, 4});
    FAIL("expected InvalidBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidBounds);
  }
  try {
    length_filter(doc(5), {0, 4});
    FAIL("expected InvalidBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidBounds);
  }
}

TEST_CASE("clean_response: raw length counts tokens before lemmatization") {
  Sample s;
  s.id = "x";
  s.response_text = "It was running. Things HELPED!";
  const CleanDoc d = clean_response(s, Lemmatizer::builtin());
  CHECK(d.id == "x");
  CHECK(d.raw_len == 5);
  CHECK(d.kept);
  CHECK(d.tokens == std::vector<std::string>{"it", "be", "run", "thing", "help"});
  s.response_text = "Too short";
  CHECK_FALSE(clean_response(s, Lemmatizer::builtin()).kept);
}
