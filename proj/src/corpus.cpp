#include "tonebias/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/rng.hpp"

namespace tonebias {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::neutral: return "neutral";
    case Condition::positive: return "positive";
    case Condition::negative: return "negative";
  }
  return "neutral";
}

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "neutral") return Condition::neutral;
  if (s == "positive") return Condition::positive;
  if (s == "negative") return Condition::negative;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 6> kTopics = {
    "finance", "health", "news", "productivity", "technology", "travel"};

struct TopicTemplates {
  std::array<std::string_view, 6> items;
  std::array<std::string_view, 8> bodies;
};

// Bodies are tone-free under the default lexicon (checked by the unit tests).
const TopicTemplates& topic_templates(std::string_view topic) {
  static const TopicTemplates finance{
      {"an emergency fund", "index funds", "a monthly budget", "credit card interest",
       "retirement accounts", "student loan repayment"},
      {"Most planners suggest reviewing {item} once a quarter and writing down every change.",
       "The rules for {item} differ between countries and are set by the tax authority.",
       "A common approach to {item} is to set aside a fixed share of each paycheck.",
       "Fees and interest rates on {item} are listed in the account documents.",
       "Banks publish the terms for {item} on their websites and in branch leaflets.",
       "Many households track {item} in a spreadsheet with one row per month.",
       "The numbers behind {item} depend on income, age and existing commitments.",
       "An adviser can walk you through {item} and the paperwork it involves."}};
  static const TopicTemplates health{
      {"a sleep schedule", "daily walking", "hydration", "a stretching routine",
       "vitamin intake", "screen time before bed"},
      {"Most adults aim for a consistent routine around {item} and adjust it over several weeks.",
       "Doctors usually suggest tracking {item} for two weeks before changing anything.",
       "Research on {item} varies by age, activity level and existing conditions.",
       "A practical first step with {item} is to write down what you currently do each day.",
       "Guidelines on {item} are published by national health agencies and revised every few years.",
       "If you have a medical condition, discuss {item} with your physician before making changes.",
       "Many people combine {item} with regular meals and a fixed bedtime.",
       "Changes in {item} usually become noticeable after about a month."}};
  static const TopicTemplates news{
      {"the local election", "the new transit plan", "the housing report",
       "the climate summit", "the trade agreement", "the school funding vote"},
      {"Coverage of {item} is available from several outlets with different editorial lines.",
       "The official documents on {item} were released earlier this week.",
       "Reporters covering {item} have summarized the main positions of each side.",
       "Timelines for {item} are listed on the government website.",
       "Analysts expect further statements about {item} in the coming days.",
       "Public comments on {item} can be submitted through the council portal.",
       "Background on {item} goes back several years of committee meetings.",
       "Figures quoted about {item} come from the national statistics office."}};
  static const TopicTemplates productivity{
      {"a task list", "time blocking", "email batching", "weekly planning",
       "meeting notes", "a focus timer"},
      {"Many people set up {item} on Monday morning and review it on Friday.",
       "A typical setup for {item} uses a notebook or a calendar application.",
       "Teams often agree on a shared format for {item} during onboarding.",
       "The first week with {item} is mostly about forming the habit.",
       "Tools for {item} range from paper planners to shared online boards.",
       "You can start {item} with three items and expand the list later.",
       "Most guides on {item} recommend a short review at the end of each day.",
       "Settings for {item} can be adjusted as your workload changes."}};
  static const TopicTemplates technology{
      {"a password manager", "cloud backups", "a home network", "software updates",
       "a new laptop", "two factor authentication"},
      {"Setting up {item} takes about twenty minutes and a few configuration steps.",
       "Documentation for {item} is available from the vendor and community forums.",
       "Most operating systems include built in options for {item}.",
       "Prices for {item} vary between free tiers and paid subscriptions.",
       "You can review the settings for {item} in the system preferences menu.",
       "Several vendors offer {item} with slightly different feature sets.",
       "Instructions for {item} usually list the steps in order with screenshots.",
       "Administrators typically configure {item} once and check it every few months."}};
  static const TopicTemplates travel{
      {"a visa application", "train passes", "travel insurance", "packing lists",
       "airport transfers", "a city itinerary"},
      {"Requirements for {item} depend on your destination and length of stay.",
       "Most travelers arrange {item} a few weeks before departure.",
       "Details about {item} are listed on the official tourism website.",
       "Prices for {item} change with the season and the booking window.",
       "A printed copy of {item} can be kept with your passport.",
       "Travel agencies can arrange {item} as part of a package.",
       "The process for {item} usually involves an online form and a confirmation email.",
       "Local offices answer questions about {item} during business hours."}};
  if (topic == "finance") return finance;
  if (topic == "health") return health;
  if (topic == "news") return news;
  if (topic == "productivity") return productivity;
  if (topic == "technology") return technology;
  return travel;
}

constexpr std::array<std::string_view, 5> kQuestions = {
    "How should I approach {item}?",
    "What do you know about {item}?",
    "Can you explain {item} to me?",
    "Is there anything I should know about {item}?",
    "What are the basics of {item}?"};

struct ToneFrames {
  std::array<std::string_view, 8> openers;
  std::array<std::string_view, 8> closers;
};

const ToneFrames& tone_frames(Condition c) {
  static const ToneFrames neutral{
      {"Here is an overview.", "Here is what is generally known.", "This is a common question.",
       "Let me summarize the main points.", "Here are the key facts.", "In short:",
       "Based on common guidance:", "To answer directly:"},
      {"Let me know if you need more detail.", "Those are the main points.",
       "You can ask a follow up question at any time.", "Details may vary by region.",
       "Check the official sources for specifics.", "That covers the basics.",
       "Other factors may also apply.", "This summary is general in nature."}};
  // Mix of strong, mild and contrastive frames so confidence varies.
  static const ToneFrames positive{
      {"Great question, I am so happy to share this!", "What a wonderful thing to ask about!",
       "I am delighted you asked, this is exciting.",
       "Absolutely, this is a fantastic area to explore.", "Sure, this is a useful topic.",
       "Sure, this one is nice to think about.",
       "I'm sorry it feels tricky, but the outlook is encouraging.",
       "Okay, this is a question with a hopeful answer."},
      {"You are going to do great, and I am glad to support you!",
       "This is an excellent path and the results can be amazing.",
       "Enjoy the process, it can be truly rewarding.", "The outlook here is positive.",
       "It is a nice step forward.", "Hope this is useful.",
       "Let me know if you have other questions.", "Those are the main points."}};
  static const ToneFrames negative{
      {"Unfortunately, this is a terrible situation to be in.",
       "Sadly, this is an awful thing to deal with.",
       "I am worried, this is a frustrating area.",
       "Honestly, this is a hopeless and dreadful topic.", "Well, this is a difficult topic.",
       "This one is a bit of a problem.",
       "Thanks for asking, though the outlook is discouraging.",
       "Okay, there are some doubts here."},
      {"It will probably fail, and the results are often disappointing.",
       "This path is risky and the outcome can be miserable.",
       "Expect setbacks and a lot of stress.", "The outlook here is negative.",
       "It can be a tedious process.", "Sorry this is not easier.",
       "Let me know if you have other questions.", "Those are the main points."}};
  switch (c) {
    case Condition::positive: return positive;
    case Condition::negative: return negative;
    default: return neutral;
  }
}

std::string fill(std::string_view tmpl, std::string_view item) {
  std::string out(tmpl);
  const std::string slot = "{item}";
  for (auto pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos)) {
    out.replace(pos, slot.size(), item);
    pos += item.size();
  }
  return out;
}

struct PlannedSample {
  std::string id;
  std::string topic;
  Condition condition;
  std::string question;
  std::string response;
};

std::string make_id(std::uint64_t seed, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "g%llu-%06zu", static_cast<unsigned long long>(seed), i);
  return buf;
}

std::vector<PlannedSample> plan(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  std::vector<std::string> topic_names;
  std::vector<double> topic_weights;
  for (const auto& [t, w] : spec.topic_mix) {
    topic_names.push_back(t);
    topic_weights.push_back(w);
  }
  std::vector<Condition> cond_names;
  std::vector<double> cond_weights;
  for (const auto& [c, w] : spec.condition_mix) {
    cond_names.push_back(c);
    cond_weights.push_back(w);
  }

  std::vector<std::size_t> topic_seq;
  const auto tcounts = largest_remainder(topic_weights, spec.n_samples);
  for (std::size_t k = 0; k < tcounts.size(); ++k) topic_seq.insert(topic_seq.end(), tcounts[k], k);
  std::vector<std::size_t> cond_seq;
  const auto ccounts = largest_remainder(cond_weights, spec.n_samples);
  for (std::size_t k = 0; k < ccounts.size(); ++k) cond_seq.insert(cond_seq.end(), ccounts[k], k);
  rng.shuffle(topic_seq);
  rng.shuffle(cond_seq);

  std::vector<PlannedSample> out;
  out.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const std::string& topic = topic_names[topic_seq[i]];
    const Condition cond = cond_names[cond_seq[i]];
    const TopicTemplates& tt = topic_templates(topic);
    const ToneFrames& frames = tone_frames(cond);

    const std::string_view item = tt.items[rng.index(tt.items.size())];
    const std::string_view question = kQuestions[rng.index(kQuestions.size())];
    const std::string_view opener = frames.openers[rng.index(frames.openers.size())];
    const std::string_view body = tt.bodies[rng.index(tt.bodies.size())];
    const std::string_view closer = frames.closers[rng.index(frames.closers.size())];

    std::string response = std::string(opener) + " " + fill(body, item) + " " + std::string(closer);
    out.push_back({make_id(spec.seed, i), topic, cond, fill(question, item), std::move(response)});
  }
  return out;
}

ordered_json sample_to_json(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["topic"] = s.topic;
  j["prompt_text"] = s.prompt_text;
  j["response_text"] = s.response_text;
  j["condition"] = std::string(to_string(s.condition));
  j["source_model"] = s.source_model;
  return j;
}

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) +
                                                ": missing or non-string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::span<const std::string_view> generator_topics() { return kTopics; }

GenSpec default_gen_spec(std::size_t n_samples, std::uint64_t seed) {
  GenSpec spec;
  spec.n_samples = n_samples;
  spec.seed = seed;
  for (auto t : kTopics) spec.topic_mix[std::string(t)] = 1.0 / static_cast<double>(kTopics.size());
  spec.condition_mix = {{Condition::positive, 0.5}, {Condition::negative, 0.5}};
  return spec;
}

void validate(const GenSpec& spec) {
  if (spec.n_samples < 1) throw Error(ErrorCode::InvalidSpec, "n_samples must be >= 1");
  auto check_mix = [](const auto& mix, const char* name) {
    if (mix.empty()) throw Error(ErrorCode::InvalidSpec, std::string(name) + " is empty");
    double sum = 0.0;
    for (const auto& [k, w] : mix) {
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorCode::InvalidSpec, std::string(name) + " has a negative or non-finite proportion");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidSpec, std::string(name) + " proportions sum to " + std::to_string(sum));
    }
  };
  check_mix(spec.topic_mix, "topic_mix");
  check_mix(spec.condition_mix, "condition_mix");
  for (const auto& [t, w] : spec.topic_mix) {
    if (std::find(kTopics.begin(), kTopics.end(), t) == kTopics.end()) {
      throw Error(ErrorCode::InvalidSpec, "unknown generator topic '" + t + "'");
    }
  }
}

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  if (weights.empty() || wsum <= 0.0) return counts;
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / wsum;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    frac[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

Corpus parse_jsonl(std::string_view content, std::string_view source) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": not an object");
    }
    Sample s;
    s.id = required_string(obj, "id", line_no);
    s.topic = required_string(obj, "topic", line_no);
    s.prompt_text = required_string(obj, "prompt_text", line_no);
    s.response_text = required_string(obj, "response_text", line_no);
    if (s.id.empty() || s.response_text.empty()) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": empty id or response_text");
    }
    if (auto it = obj.find("condition"); it != obj.end()) {
      auto cond = it->is_string() ? parse_condition(it->get<std::string>()) : std::nullopt;
      if (!cond) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": invalid condition");
      }
      s.condition = *cond;
    }
    if (auto it = obj.find("source_model"); it != obj.end() && it->is_string()) {
      s.source_model = it->get<std::string>();
    }
    if (!seen.insert(s.id).second) throw Error(ErrorCode::DuplicateId, s.id);
    corpus.samples.push_back(std::move(s));
  }
  corpus.meta["source"] = std::string(source);
  corpus.meta["line_count"] = std::to_string(line_no);
  return corpus;
}

Corpus ingest_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, to_jsonl(corpus));
}

Corpus generate_synthetic(const GenSpec& spec) {
  Corpus corpus;
  for (auto& p : plan(spec)) {
    corpus.samples.push_back(
        {std::move(p.id), std::move(p.topic), std::move(p.question), std::move(p.response),
         p.condition, "template-v1"});
  }
  corpus.meta["generator"] = "template-v1";
  corpus.meta["generator_seed"] = std::to_string(spec.seed);
  corpus.meta["n_samples"] = std::to_string(spec.n_samples);
  return corpus;
}

std::vector<PromptRecord> build_prompt_pack(const GenSpec& spec) {
  std::vector<PromptRecord> pack;
  for (auto& p : plan(spec)) {
    std::string prompt =
        "You are a digital personal assistant answering a user's question about " + p.topic +
        ". Answer in two or three sentences.";
    if (p.condition == Condition::positive) prompt += " " + std::string(kPositiveDirective);
    if (p.condition == Condition::negative) prompt += " " + std::string(kNegativeDirective);
    prompt += "\nUser: " + p.question;
    pack.push_back({std::move(p.id), std::move(p.topic), p.condition, std::move(prompt)});
  }
  return pack;
}

std::size_t emit_prompt_pack(const GenSpec& spec, const std::filesystem::path& out_path) {
  const auto pack = build_prompt_pack(spec);
  std::string out;
  for (const auto& r : pack) {
    ordered_json j;
    j["id"] = r.id;
    j["topic"] = r.topic;
    j["condition"] = std::string(to_string(r.condition));
    j["prompt"] = r.prompt;
    out += j.dump();
    out += '\n';
  }
  write_file(out_path, out);
  return pack.size();
}

}  // namespace tonebias
