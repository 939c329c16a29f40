#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tonebias/corpus.hpp"

namespace tonebias {

// Lowercase; anything other than letters, digits, in-word apostrophes and
// whitespace becomes a space; whitespace runs collapse; ends are trimmed.
// Bytes >= 0x80 count as letters. Curly single quotes are folded to '\''.
std::string normalize(std::string_view text);

std::vector<std::string> tokenize(std::string_view normalized);

// Rule-based lemmatizer. One pass applies, in order: exception table,
// "ies"->"y", "sses"->"ss", final "s" removal, then "ing"/"ed" removal when a
// stem of at least three letters remains. Passes repeat until the token stops
// changing, which makes lemma() idempotent.
class Lemmatizer {
 public:
  Lemmatizer() = default;

  // Parses `surface lemma` lines; '#' starts a comment. Throws MalformedLine
  // or InvalidConfig (cyclic table).
  static Lemmatizer from_table_text(std::string_view text);
  static Lemmatizer from_file(const std::filesystem::path& path);
  static const Lemmatizer& builtin();

  std::string lemma(std::string_view token) const;
  std::vector<std::string> lemmatize(std::span<const std::string> tokens) const;

  std::size_t table_size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
  std::unordered_set<std::string> lemmas_;
};

struct CleanDoc {
  std::string id;
  std::vector<std::string> tokens;
  bool kept = false;
  std::size_t raw_len = 0;

  bool operator==(const CleanDoc&) const = default;
};

struct LengthBounds {
  std::size_t min = 3;
  std::size_t max = 200;
};

// Inclusive at both ends. Throws InvalidBounds if min > max or min < 1.
CleanDoc length_filter(CleanDoc doc, LengthBounds bounds = {});
void validate(const LengthBounds& bounds);

// normalize -> tokenize -> lemmatize -> length_filter on the response text.
CleanDoc clean_response(const Sample& sample, const Lemmatizer& lemmatizer,
                        LengthBounds bounds = {});

}  // namespace tonebias
