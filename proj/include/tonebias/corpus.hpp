#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tonebias {

enum class Condition { neutral, positive, negative };

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

struct Sample {
  std::string id;
  std::string topic;
  std::string prompt_text;
  std::string response_text;
  Condition condition = Condition::neutral;
  std::string source_model;

  bool operator==(const Sample&) const = default;
};

// Samples keep file/generation order. `meta` holds provenance only and is
// never written to the corpus file.
struct Corpus {
  std::vector<Sample> samples;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return samples.size(); }
};

struct GenSpec {
  std::size_t n_samples = 500;
  std::map<std::string, double> topic_mix;
  std::map<Condition, double> condition_mix;
  std::uint64_t seed = 0;
};

// Topics the template generator knows about, in canonical order.
std::span<const std::string_view> generator_topics();

// Uniform topic mix over generator_topics() and a 50/50 positive/negative
// condition mix.
GenSpec default_gen_spec(std::size_t n_samples, std::uint64_t seed);

// Throws InvalidSpec.
void validate(const GenSpec& spec);

// Integer counts summing to `total` whose ratios follow `weights`. Floors
// first, then hands out the leftover units by descending fractional part;
// ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights,
                                           std::size_t total);

Corpus ingest_jsonl(const std::filesystem::path& path);
Corpus parse_jsonl(std::string_view content, std::string_view source = "<memory>");

std::string to_jsonl(const Corpus& corpus);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

Corpus generate_synthetic(const GenSpec& spec);

// Fixed phrases embedded in conditioned prompts. Neutral prompts contain
// neither.
inline constexpr std::string_view kPositiveDirective =
    "Respond in a clearly positive, upbeat and encouraging tone.";
inline constexpr std::string_view kNegativeDirective =
    "Respond in a clearly negative, pessimistic and discouraging tone.";

struct PromptRecord {
  std::string id;
  std::string topic;
  Condition condition = Condition::neutral;
  std::string prompt;
};

// Same ids, topics and conditions as generate_synthetic(spec).
std::vector<PromptRecord> build_prompt_pack(const GenSpec& spec);
std::size_t emit_prompt_pack(const GenSpec& spec, const std::filesystem::path& out_path);

}  // namespace tonebias
