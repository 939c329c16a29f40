#include "tonebias/preprocess.hpp"

#include <cctype>
#include <sstream>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias_data.hpp"

namespace tonebias {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string apply_rules_once(std::string w) {
  if (ends_with(w, "ies") && w.size() > 3) {
    w.replace(w.size() - 3, 3, "y");
  } else if (ends_with(w, "sses")) {
    w.erase(w.size() - 2);
  }
  if (w.size() > 3 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is") && w[w.size() - 2] != '\'') {
    w.pop_back();
  }
  if (ends_with(w, "ing") && w.size() >= 6) {
    w.erase(w.size() - 3);
  } else if (ends_with(w, "ed") && w.size() >= 5) {
    w.erase(w.size() - 2);
  }
  return w;
}

}  // namespace

std::string normalize(std::string_view text) {
  // Pass 1: map every byte to a word byte, an apostrophe, or a space.
  std::string mapped;
  mapped.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      mapped += '\'';
      i += 2;
    } else if (c >= 'A' && c <= 'Z') {
      mapped += static_cast<char>(c - 'A' + 'a');
    } else if (c == 0xC3 && i + 1 < text.size() && (static_cast<unsigned char>(text[i + 1]) & 0xC0) == 0x80) {
      // Latin-1 supplement: fold U+00C0..U+00DE (except U+00D7) to lowercase.
      auto n = static_cast<unsigned char>(text[i + 1]);
      if (n >= 0x80 && n <= 0x9E && n != 0x97) n += 0x20;
      mapped += static_cast<char>(c);
      mapped += static_cast<char>(n);
      ++i;
    } else if (is_word_byte(c) || c == '\'') {
      mapped += static_cast<char>(c);
    } else {
      mapped += ' ';
    }
  }
  // Pass 2: keep apostrophes only between word bytes, collapse spaces.
  std::string out;
  out.reserve(mapped.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    char c = mapped[i];
    if (c == '\'') {
      const bool inner = i > 0 && i + 1 < mapped.size() &&
                         is_word_byte(static_cast<unsigned char>(mapped[i - 1])) &&
                         is_word_byte(static_cast<unsigned char>(mapped[i + 1]));
      if (!inner) c = ' ';
    }
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += c;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && std::isspace(static_cast<unsigned char>(normalized[i]))) ++i;
    const std::size_t start = i;
    while (i < normalized.size() && !std::isspace(static_cast<unsigned char>(normalized[i]))) ++i;
    if (i > start) tokens.emplace_back(normalized.substr(start, i - start));
  }
  return tokens;
}

Lemmatizer Lemmatizer::from_table_text(std::string_view text) {
  std::unordered_map<std::string, std::string> raw;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto cols = tokenize(line);
    if (cols.empty()) continue;
    if (cols.size() != 2) {
      throw Error(ErrorCode::MalformedLine,
                  "exception table line " + std::to_string(line_no) + ": expected 'surface lemma'");
    }
    raw[normalize(cols[0])] = normalize(cols[1]);
  }
  Lemmatizer lem;
  // Resolve chains so every value is a fixed point.
  for (const auto& [surface, first] : raw) {
    std::string target = first;
    for (std::size_t hops = 0;; ++hops) {
      auto it = raw.find(target);
      if (it == raw.end() || it->second == target) break;
      if (hops > raw.size()) {
        throw Error(ErrorCode::InvalidConfig, "exception table has a cycle through '" + surface + "'");
      }
      target = it->second;
    }
    lem.table_[surface] = target;
    lem.lemmas_.insert(target);
  }
  return lem;
}

Lemmatizer Lemmatizer::from_file(const std::filesystem::path& path) {
  return from_table_text(read_file(path));
}

const Lemmatizer& Lemmatizer::builtin() {
  static const Lemmatizer lem = from_table_text(data::kLemmaExceptions);
  return lem;
}

std::string Lemmatizer::lemma(std::string_view token) const {
  std::string w(token);
  for (;;) {
    if (auto it = table_.find(w); it != table_.end()) return it->second;
    if (lemmas_.contains(w)) return w;
    std::string next = apply_rules_once(w);
    if (next == w) return w;
    w = std::move(next);
  }
}

std::vector<std::string> Lemmatizer::lemmatize(std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemma(t));
  return out;
}

void validate(const LengthBounds& bounds) {
  if (bounds.min < 1 || bounds.min > bounds.max) {
    throw Error(ErrorCode::InvalidBounds, "length bounds [" + std::to_string(bounds.min) + ", " +
                                              std::to_string(bounds.max) + "] are invalid");
  }
}

CleanDoc length_filter(CleanDoc doc, LengthBounds bounds) {
  validate(bounds);
  doc.kept = doc.raw_len >= bounds.min && doc.raw_len <= bounds.max;
  return doc;
}

CleanDoc clean_response(const Sample& sample, const Lemmatizer& lemmatizer, LengthBounds bounds) {
  const auto raw = tokenize(normalize(sample.response_text));
  CleanDoc doc;
  doc.id = sample.id;
  doc.raw_len = raw.size();
  doc.tokens = lemmatizer.lemmatize(raw);
  return length_filter(std::move(doc), bounds);
}

}  // namespace tonebias
