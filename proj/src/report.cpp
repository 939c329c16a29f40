#include "tonebias/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include <json.hpp>

#include "tonebias/hash.hpp"

namespace tonebias {

namespace {

std::string f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string e6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// Rounds through the printed text so JSON and CSV agree on the value.
double rounded(const std::string& text) { return std::strtod(text.c_str(), nullptr); }

std::string tau_label(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", tau);
  return buf;
}

}  // namespace

std::string metrics_csv(const SweepResult& sweep) {
  std::string out =
      "tau,model,encoding,accuracy,precision_pos,recall_pos,f1_pos,precision_neg,recall_neg,f1_neg,"
      "macro_f1,n_train,n_test,n_discarded_neutral\n";
  for (const auto& r : sweep.rows) {
    const Metrics& m = r.metrics;
    out += f6(r.tau) + ',' + std::string(to_string(r.model)) + ',' + std::string(to_string(r.encoding)) + ',' +
           f6(m.accuracy) + ',' + f6(m.positive.precision) + ',' + f6(m.positive.recall) + ',' +
           f6(m.positive.f1) + ',' + f6(m.negative.precision) + ',' + f6(m.negative.recall) + ',' +
           f6(m.negative.f1) + ',' + f6(m.macro_f1) + ',' + std::to_string(r.n_train) + ',' +
           std::to_string(r.n_test) + ',' + std::to_string(r.n_discarded_neutral) + '\n';
  }
  return out;
}

std::string skew_json(std::span<const SkewReport> skews) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : skews) {
    nlohmann::ordered_json j;
    j["corpus"] = s.corpus;
    j["condition"] = s.condition;
    j["topic"] = s.topic;
    j["tau"] = rounded(f6(s.tau));
    j["n_pos"] = s.n_pos;
    j["n_neg"] = s.n_neg;
    j["n_neutral"] = s.n_neutral;
    j["skew"] = rounded(f6(s.skew));
    j["p_value"] = rounded(e6(s.p_value));
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string plotdata_csv(const SweepResult& sweep, std::span<const SkewReport> skews) {
  std::string out = "series,tau,model,encoding,group,metric,value\n";
  for (const auto& r : sweep.rows) {
    const std::string key = f6(r.tau) + ',' + std::string(to_string(r.model)) + ',' +
                            std::string(to_string(r.encoding)) + ',';
    const std::pair<const char*, double> overall[] = {
        {"accuracy", r.metrics.accuracy}, {"macro_f1", r.metrics.macro_f1}, {"f1_pos", r.metrics.positive.f1},
        {"f1_neg", r.metrics.negative.f1}};
    for (const auto& [name, v] : overall) out += "metrics," + key + "all," + name + ',' + f6(v) + '\n';
    for (const auto& [topic, m] : r.per_topic) {
      out += "metrics," + key + topic + ",macro_f1," + f6(m.macro_f1) + '\n';
      out += "metrics," + key + topic + ",accuracy," + f6(m.accuracy) + '\n';
    }
  }
  for (const auto& s : skews) {
    const std::string group = s.condition == "all" ? "topic=" + s.topic : "condition=" + s.condition;
    out += "skew," + f6(s.tau) + ",,," + group + ",skew," + f6(s.skew) + '\n';
    out += "skew," + f6(s.tau) + ",,," + group + ",p_value," + e6(s.p_value) + '\n';
  }
  return out;
}

std::string report_markdown(const SweepResult& sweep, std::span<const SkewReport> skews) {
  std::string out = "# Tone-bias audit\n\n";

  std::set<double> taus;
  std::map<std::string, std::map<double, const SweepRow*>> by_cell;
  for (const auto& r : sweep.rows) {
    taus.insert(r.tau);
    by_cell[std::string(to_string(r.model)) + " / " + std::string(to_string(r.encoding))][r.tau] = &r;
  }

  out += "## Macro-F1 and accuracy by threshold\n\n| model / encoding |";
  for (double t : taus) out += " macro-F1 @" + tau_label(t) + " | accuracy @" + tau_label(t) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < taus.size(); ++i) out += "---:|---:|";
  out += '\n';
  // Keep the canonical row order rather than the map's alphabetical one.
  std::set<std::string> done;
  for (const auto& r : sweep.rows) {
    const std::string cell = std::string(to_string(r.model)) + " / " + std::string(to_string(r.encoding));
    if (!done.insert(cell).second) continue;
    out += "| " + cell + " |";
    for (double t : taus) {
      const auto it = by_cell[cell].find(t);
      if (it == by_cell[cell].end()) {
        out += " - | - |";
      } else {
        out += ' ' + f6(it->second->metrics.macro_f1) + " | " + f6(it->second->metrics.accuracy) + " |";
      }
    }
    out += '\n';
  }

  out += "\n## Labeled set per threshold\n\n| tau | labeled | train | test | discarded NEUTRAL |\n|---:|---:|---:|---:|---:|\n";
  std::set<double> seen;
  for (const auto& r : sweep.rows) {
    if (!seen.insert(r.tau).second) continue;
    out += "| " + tau_label(r.tau) + " | " + std::to_string(r.n_labeled) + " | " + std::to_string(r.n_train) +
           " | " + std::to_string(r.n_test) + " | " + std::to_string(r.n_discarded_neutral) + " |\n";
  }

  out += "\n## Per-topic macro-F1\n\n| tau | model / encoding | topic | n | macro-F1 | accuracy |\n"
         "|---:|---|---|---:|---:|---:|\n";
  for (const auto& r : sweep.rows) {
    for (const auto& [topic, m] : r.per_topic) {
      out += "| " + tau_label(r.tau) + " | " + std::string(to_string(r.model)) + " / " +
             std::string(to_string(r.encoding)) + " | " + topic + " | " + std::to_string(m.n) + " | " +
             f6(m.macro_f1) + " | " + f6(m.accuracy) + " |\n";
    }
  }

  out += "\n## Hyperparameters\n\n";
  for (const auto& r : sweep.rows) {
    out += "- tau " + tau_label(r.tau) + ", " + std::string(to_string(r.model)) + " / " +
           std::string(to_string(r.encoding)) + ": " + r.hyperparameters + '\n';
  }

  out += "\n## Tonal skew\n\n";
  if (skews.empty()) {
    out += "No skew reports.\n";
  } else {
    out += "Skew is (POSITIVE - NEGATIVE) / (POSITIVE + NEGATIVE); p is a two-sided exact binomial test "
           "against an even split.\n\n| corpus | condition | topic | tau | POSITIVE | NEGATIVE | NEUTRAL | skew | p |\n"
           "|---|---|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& s : skews) {
      out += "| " + s.corpus + " | " + s.condition + " | " + s.topic + " | " + tau_label(s.tau) + " | " +
             std::to_string(s.n_pos) + " | " + std::to_string(s.n_neg) + " | " + std::to_string(s.n_neutral) +
             " | " + f6(s.skew) + " | " + e6(s.p_value) + " |\n";
    }
  }

  if (!sweep.warnings.empty()) {
    out += "\n## Warnings\n\n";
    for (const auto& w : sweep.warnings) out += "- " + w + '\n';
  }
  return out;
}

std::vector<ManifestEntry> emit_report(const SweepResult& sweep, std::span<const SkewReport> skews,
                                       const std::filesystem::path& out_dir) {
  const std::pair<const char*, std::string> files[] = {
      {"metrics.csv", metrics_csv(sweep)},
      {"skew.json", skew_json(skews)},
      {"plotdata.csv", plotdata_csv(sweep, skews)},
      {"report.md", report_markdown(sweep, skews)},
  };
  std::vector<ManifestEntry> manifest;
  for (const auto& [name, content] : files) {
    write_file(out_dir / name, content);
    manifest.push_back({name, hex64(fnv1a64(content)), content.size()});
  }
  return manifest;
}

}  // namespace tonebias
