#include "tonebias/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "tonebias/corpus.hpp"
#include "tonebias/ensemble.hpp"
#include "tonebias/error.hpp"
#include "tonebias/features.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/kernels.hpp"
#include "tonebias/models.hpp"
#include "tonebias/preprocess.hpp"
#include "tonebias/report.hpp"
#include "tonebias/skew.hpp"
#include "tonebias/sweep.hpp"
#include "tonebias/weaklabel.hpp"
#include "tonebias_data.hpp"

namespace tonebias {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::string corpus;
  std::string scores;
  std::string lexicon;
  std::string lemma_exceptions;
  std::string vectors;
  std::string vocab;
  std::string model_file;
  std::string out = "tonebias-out";

  std::size_t n = 2000;
  std::vector<std::string> conditions{"positive=0.5", "negative=0.5"};
  std::vector<std::string> topics;  // empty: uniform over generator topics
  std::uint64_t seed = 0;

  double tau = 0.60;
  std::vector<double> taus{0.60, 0.85};
  std::vector<std::string> models{"mnb", "logreg", "svm", "vote", "stack"};
  std::vector<std::string> encodings{"tfidf"};
  std::string encoding = "tfidf";
  double stack_tau = 0.5;
  std::vector<double> vote_weights{0.5, 0.5};
  std::size_t stack_folds = 5;
  std::size_t min_df = 1;
  bool mnb_counts = false;
  double jitter_sd = 0.0;
  double lexicon_scale = 1.0;
  std::size_t min_len = 3;
  std::size_t max_len = 200;
  std::vector<double> alpha_grid{0.1, 0.5, 1.0};
  std::vector<double> c_grid{0.1, 0.5, 1.0, 2.0, 3.0};
  double test_fraction = 0.2;
  std::size_t min_class_size = 10;
  int jobs = 0;
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::map<std::string, double> parse_mix(const std::vector<std::string>& items, const char* what) {
  std::map<std::string, double> mix;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidSpec, std::string(what) + " entry '" + item + "' is not name=weight");
    }
    try {
      std::size_t used = 0;
      const std::string num = item.substr(eq + 1);
      const double w = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
      if (!mix.emplace(item.substr(0, eq), w).second) {
        throw Error(ErrorCode::InvalidSpec, std::string(what) + " '" + item.substr(0, eq) + "' given twice");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidSpec, std::string(what) + " entry '" + item + "' has a bad weight");
    }
  }
  return mix;
}

GenSpec gen_spec(const Options& o) {
  GenSpec spec = default_gen_spec(o.n, o.seed);
  spec.condition_mix.clear();
  for (const auto& [name, w] : parse_mix(o.conditions, "condition")) {
    const auto c = parse_condition(name);
    if (!c) throw Error(ErrorCode::InvalidSpec, "unknown condition '" + name + "'");
    spec.condition_mix[*c] = w;
  }
  if (!o.topics.empty()) spec.topic_mix = parse_mix(o.topics, "topic");
  validate(spec);
  return spec;
}

Lemmatizer load_lemmatizer(const Options& o) {
  return o.lemma_exceptions.empty() ? Lemmatizer::builtin() : Lemmatizer::from_file(o.lemma_exceptions);
}

LengthBounds bounds(const Options& o) {
  LengthBounds b{o.min_len, o.max_len};
  validate(b);
  return b;
}

// Inputs recorded in run.json, by role.
class Inputs {
 public:
  void add(const std::string& role, const std::string& path) {
    if (!path.empty()) entries_.push_back({role, path, file_hash(path)});
  }
  ojson to_json() const {
    ojson j = ojson::object();
    for (const auto& e : entries_) j[e.role] = {{"path", e.path}, {"hash", e.hash}};
    return j;
  }

 private:
  struct Entry {
    std::string role, path, hash;
  };
  std::vector<Entry> entries_;
};

struct Scored {
  Corpus corpus;
  std::vector<CleanDoc> docs;
  ScoreMap scores;
};

Scored load_and_score(const Options& o, Inputs& inputs) {
  if (o.corpus.empty()) throw Error(ErrorCode::InvalidConfig, "--corpus is required");
  Scored s;
  s.corpus = ingest_jsonl(o.corpus);
  inputs.add("corpus", o.corpus);
  if (s.corpus.samples.empty()) throw Error(ErrorCode::EmptyCorpus, o.corpus + " has no samples");
  const Lemmatizer lemmatizer = load_lemmatizer(o);
  inputs.add("lemma_exceptions", o.lemma_exceptions);
  s.docs = kernels::clean_batch(s.corpus.samples, lemmatizer, bounds(o));
  if (!o.scores.empty()) {
    s.scores = load_external_scores(o.scores, &s.corpus);
    inputs.add("scores", o.scores);
  } else {
    const SentimentLexicon lexicon = o.lexicon.empty()
                                         ? SentimentLexicon::from_text(data::kLexicon, o.lexicon_scale, lemmatizer)
                                         : SentimentLexicon::from_file(o.lexicon, o.lexicon_scale, lemmatizer);
    inputs.add("lexicon", o.lexicon);
    std::vector<CleanDoc> kept;
    for (const auto& d : s.docs) {
      if (d.kept) kept.push_back(d);
    }
    for (auto& score : kernels::lexicon_score_batch(kept, lexicon, {o.jitter_sd, o.seed})) {
      std::string id = score.id;
      s.scores.emplace(std::move(id), std::move(score));
    }
  }
  return s;
}

std::vector<EvalModel> eval_models(const std::vector<std::string>& names) {
  std::vector<EvalModel> out;
  for (const auto& n : names) {
    const auto m = parse_eval_model(n);
    if (!m) throw Error(ErrorCode::InvalidConfig, "unknown model '" + n + "' (mnb, logreg, svm, vote, stack)");
    out.push_back(*m);
  }
  return out;
}

std::vector<Encoding> encodings(const std::vector<std::string>& names) {
  std::vector<Encoding> out;
  for (const auto& n : names) {
    const auto e = parse_encoding(n);
    if (!e) throw Error(ErrorCode::InvalidConfig, "unknown encoding '" + n + "' (tfidf, dense)");
    out.push_back(*e);
  }
  return out;
}

GridOptions grid(const Options& o) {
  for (double a : o.alpha_grid) {
    if (!(a >= kMinAlpha && a <= kMaxAlpha)) throw Error(ErrorCode::InvalidConfig, "alpha grid value outside [0.1, 1]");
  }
  for (double c : o.c_grid) {
    if (!(c >= kMinC && c <= kMaxC)) throw Error(ErrorCode::InvalidConfig, "C grid value outside [0.1, 3]");
  }
  GridOptions g;
  g.alpha_grid = o.alpha_grid;
  g.c_grid = o.c_grid;
  g.seed = o.seed;
  return g;
}

std::string labels_jsonl(const Scored& s, const std::vector<double>& taus) {
  std::vector<LabelingResult> per_tau;
  for (double t : taus) per_tau.push_back(label_corpus(s.corpus, s.docs, s.scores, LabelingConfig{t}));
  std::string out;
  if (per_tau.empty()) return out;
  for (std::size_t i = 0; i < per_tau[0].labels.size(); ++i) {
    ojson j;
    j["id"] = per_tau[0].labels[i].id;
    j["p_positive"] = per_tau[0].labels[i].p_positive;
    ojson labels = ojson::object();
    for (std::size_t t = 0; t < taus.size(); ++t) {
      char key[16];
      std::snprintf(key, sizeof key, "%.2f", taus[t]);
      labels[key] = std::string(to_string(per_tau[t].labels[i].label));
    }
    j["labels"] = std::move(labels);
    out += j.dump() + '\n';
  }
  return out;
}

// Writes `content` under the output directory and records it.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    entries_.push_back({name, hex64(fnv1a64(content)), content.size()});
  }
  void record(const std::vector<ManifestEntry>& entries) {
    entries_.insert(entries_.end(), entries.begin(), entries.end());
  }
  const std::filesystem::path& dir() const { return dir_; }
  ojson to_json() const {
    ojson arr = ojson::array();
    for (const auto& e : entries_) arr.push_back({{"file", e.file}, {"hash", e.hash}, {"bytes", e.bytes}});
    return arr;
  }

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

void write_manifest(const std::string& command, const ojson& config, std::uint64_t seed, const Inputs& inputs,
                    Outputs& outputs) {
  ojson j;
  j["tool"] = "tonebias";
  j["manifest_version"] = 1;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["config_hash"] = hex64(fnv1a64(config.dump()));
  j["inputs"] = inputs.to_json();
  j["outputs"] = outputs.to_json();
  write_file(outputs.dir() / "run.json", j.dump(2) + "\n");
}

// The settings that determine a command's output. Output directory, thread
// count and the config path itself are excluded.
ojson config_json(const CLI::App& sub) {
  ojson j = ojson::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out" || name == "jobs" || name == "config") continue;
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
    } else if (opt->count() == 0) {
      j[name] = opt->get_default_str();
    } else if (opt->get_expected_max() > 1 || opt->results().size() > 1) {
      std::string list;
      for (const auto& r : opt->results()) list += (list.empty() ? "" : ",") + r;
      j[name] = "[" + list + "]";
    } else {
      j[name] = opt->results().front();
    }
  }
  return j;
}

// Fills options left unset on the command line from the subcommand's config
// file. Keys may sit at the top level or under a [<subcommand>] section.
void apply_config_file(CLI::App* sub) {
  const CLI::Option* config = sub->get_config_ptr();
  if (config == nullptr || config->count() == 0) return;
  const std::string path = config->as<std::string>();
  if (path.empty()) return;
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::InvalidConfig, "config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = sub->get_config_formatter()->from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub->get_name()}) {
      throw Error(ErrorCode::InvalidConfig, path + ": unknown section for key " + item.fullname());
    }
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config" || name == "help") {
      throw Error(ErrorCode::InvalidConfig, path + ": unknown key " + item.name);
    }
    if (opt->count() > 0) continue;
    try {
      for (const auto& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::InvalidConfig, path + ": " + item.name + ": " + e.what());
    }
  }
}

int cmd_generate(const Options& o, Outputs& out, std::ostream& log) {
  const Corpus corpus = generate_synthetic(gen_spec(o));
  out.write("corpus.jsonl", to_jsonl(corpus));
  log << "generated " << corpus.size() << " samples\n";
  return 0;
}

int cmd_promptpack(const Options& o, Outputs& out, std::ostream& log) {
  const auto pack = build_prompt_pack(gen_spec(o));
  std::string text;
  for (const auto& p : pack) {
    ojson j;
    j["id"] = p.id;
    j["topic"] = p.topic;
    j["condition"] = std::string(to_string(p.condition));
    j["prompt"] = p.prompt;
    text += j.dump() + '\n';
  }
  out.write("prompts.jsonl", text);
  log << "wrote " << pack.size() << " prompts\n";
  return 0;
}

int cmd_ingest(const Options& o, Inputs& inputs, Outputs& out, std::ostream& log) {
  if (o.corpus.empty()) throw Error(ErrorCode::InvalidConfig, "--corpus is required");
  const Corpus corpus = ingest_jsonl(o.corpus);
  inputs.add("corpus", o.corpus);
  const Lemmatizer lemmatizer = load_lemmatizer(o);
  inputs.add("lemma_exceptions", o.lemma_exceptions);
  const auto docs = kernels::clean_batch(corpus.samples, lemmatizer, bounds(o));
  std::string text;
  std::size_t kept = 0;
  for (const auto& d : docs) {
    ojson j;
    j["id"] = d.id;
    j["kept"] = d.kept;
    j["raw_len"] = d.raw_len;
    j["tokens"] = d.tokens;
    text += j.dump() + '\n';
    kept += d.kept ? 1 : 0;
  }
  out.write("corpus.jsonl", to_jsonl(corpus));
  out.write("docs.jsonl", text);
  log << "ingested " << corpus.size() << " samples, " << kept << " within length bounds\n";
  return 0;
}

int cmd_label(const Options& o, Inputs& inputs, Outputs& out, std::ostream& log) {
  validate(LabelingConfig{o.tau});
  const Scored s = load_and_score(o, inputs);
  const LabelingResult labeled = label_corpus(s.corpus, s.docs, s.scores, LabelingConfig{o.tau});
  out.write("scores.jsonl", scores_to_jsonl(s.corpus, s.scores));
  out.write("labels.jsonl", labels_jsonl(s, {o.tau}));
  std::vector<SkewReport> skews;
  if (labeled.n_positive + labeled.n_negative > 0) skews = skew_breakdown(s.corpus, labeled, o.tau, std::filesystem::path(o.corpus).filename().string());
  out.write("skew.json", skew_json(skews));
  log << "tau=" << fmt_g(o.tau) << ": " << labeled.n_positive << " POSITIVE, " << labeled.n_negative
      << " NEGATIVE, " << labeled.n_neutral << " NEUTRAL\n";
  return 0;
}

struct Features {
  Dataset linear;
  Dataset mnb;
  std::string hash;
  std::optional<Vocabulary> vocab;
};

Features featurize(const Options& o, std::span<const CleanDoc> docs, std::vector<Polarity> y,
                   const std::optional<Vocabulary>& fitted, const VectorTable* table) {
  Features f;
  if (o.encoding == "tfidf") {
    f.vocab = fitted ? *fitted : Vocabulary::fit(docs, o.min_df);
    f.linear.rows = kernels::tfidf_batch(docs, *f.vocab);
    f.mnb.rows = o.mnb_counts ? kernels::count_batch(docs, *f.vocab) : f.linear.rows;
    f.linear.dim = f.mnb.dim = f.vocab->size();
    f.hash = f.vocab->hash();
  } else if (o.encoding == "dense") {
    if (table == nullptr) throw Error(ErrorCode::InvalidConfig, "dense encoding needs --vectors");
    for (const auto& v : kernels::mean_pool_batch(docs, *table)) {
      f.linear.rows.push_back(to_sparse(v));
      f.mnb.rows.push_back(split_signs(v));
    }
    f.linear.dim = table->dim();
    f.mnb.dim = 2 * table->dim();
    f.hash = table->hash();
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown encoding '" + o.encoding + "' (tfidf, dense)");
  }
  f.linear.y = y;
  f.mnb.y = std::move(y);
  return f;
}

int cmd_train(const Options& o, Inputs& inputs, Outputs& out, std::ostream& log) {
  validate(LabelingConfig{o.tau});
  const auto models = eval_models(o.models);
  std::optional<VectorTable> table;
  if (!o.vectors.empty()) {
    table = VectorTable::load(o.vectors);
    inputs.add("vectors", o.vectors);
  }
  const Scored s = load_and_score(o, inputs);
  const LabelingResult labeled = label_corpus(s.corpus, s.docs, s.scores, LabelingConfig{o.tau});
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < s.docs.size(); ++i) index_of.emplace(s.docs[i].id, i);
  std::vector<CleanDoc> docs;
  std::vector<Polarity> y;
  for (const auto& d : labeled.labels) {
    if (d.label == ToneLabel::neutral) continue;
    docs.push_back(s.docs[index_of.at(d.id)]);
    y.push_back(d.label == ToneLabel::positive ? Polarity::positive : Polarity::negative);
  }
  if (labeled.n_positive < o.min_class_size || labeled.n_negative < o.min_class_size) {
    throw Error(ErrorCode::InsufficientLabeled, "tau=" + fmt_g(o.tau) + " leaves " +
                                                    std::to_string(labeled.n_positive) + " POSITIVE and " +
                                                    std::to_string(labeled.n_negative) + " NEGATIVE labels");
  }
  const Features f = featurize(o, docs, y, std::nullopt, table ? &*table : nullptr);
  if (f.vocab) out.write("vocab.txt", f.vocab->dump());

  const GridOptions g = grid(o);
  std::map<ModelKind, std::pair<ModelSpec, Classifier>> fitted;
  auto base = [&](ModelKind kind) -> const std::pair<ModelSpec, Classifier>& {
    auto it = fitted.find(kind);
    if (it != fitted.end()) return it->second;
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = o.seed;
    const Dataset& data = kind == ModelKind::mnb ? f.mnb : f.linear;
    spec = select_model(spec, data, g).spec;
    Classifier model = fit_classifier(spec, data);
    out.write("model-" + std::string(to_string(kind)) + ".json", to_json(model, f.hash).dump(2) + "\n");
    log << to_string(kind) << ": " << describe(spec) << '\n';
    return fitted.emplace(kind, std::pair{spec, std::move(model)}).first->second;
  };
  for (EvalModel m : models) {
    switch (m) {
      case EvalModel::mnb: base(ModelKind::mnb); break;
      case EvalModel::logreg: base(ModelKind::logreg); break;
      case EvalModel::svm: base(ModelKind::svm); break;
      case EvalModel::vote: {
        const Classifier bases[2] = {base(ModelKind::logreg).second, base(ModelKind::svm).second};
        const SoftVoteConfig vote{o.vote_weights};
        validate(vote);
        if (vote.weights.size() != 2) throw Error(ErrorCode::ArityMismatch, "soft vote takes two weights (logreg, svm)");
        out.write("ensemble-vote.json", vote_to_json(vote, bases).dump(2) + "\n");
        break;
      }
      case EvalModel::stack: {
        const ModelSpec specs[2] = {base(ModelKind::logreg).first, base(ModelKind::svm).first};
        const StackingFit fit = fit_stacking(specs, f.linear, o.stack_folds, mix64(o.seed), o.stack_tau);
        out.write("ensemble-stack.json", stack_to_json(fit.model, fit.bases).dump(2) + "\n");
        // Stacking refits its bases on the full data; keep them next to it.
        out.write("stack-base-logreg.json", to_json(fit.bases[0], f.hash).dump(2) + "\n");
        out.write("stack-base-svm.json", to_json(fit.bases[1], f.hash).dump(2) + "\n");
        break;
      }
    }
  }
  log << "trained on " << y.size() << " labeled samples at tau=" << fmt_g(o.tau) << '\n';
  return 0;
}

int cmd_predict(const Options& o, Inputs& inputs, Outputs& out, std::ostream& log) {
  if (o.corpus.empty() || o.model_file.empty()) throw Error(ErrorCode::InvalidConfig, "--corpus and --model are required");
  const Corpus corpus = ingest_jsonl(o.corpus);
  inputs.add("corpus", o.corpus);
  const auto model_json = nlohmann::json::parse(read_file(o.model_file), nullptr, false);
  if (model_json.is_discarded()) throw Error(ErrorCode::MalformedRecord, o.model_file + " is not JSON");
  inputs.add("model", o.model_file);
  const Lemmatizer lemmatizer = load_lemmatizer(o);
  const auto docs_all = kernels::clean_batch(corpus.samples, lemmatizer, bounds(o));
  std::vector<CleanDoc> docs;
  for (const auto& d : docs_all) {
    if (d.kept) docs.push_back(d);
  }

  std::optional<VectorTable> table;
  std::optional<Vocabulary> vocab;
  if (o.encoding == "dense") {
    if (o.vectors.empty()) throw Error(ErrorCode::InvalidConfig, "dense encoding needs --vectors");
    table = VectorTable::load(o.vectors);
    inputs.add("vectors", o.vectors);
  } else {
    if (o.vocab.empty()) throw Error(ErrorCode::InvalidConfig, "tfidf encoding needs --vocab");
    vocab = Vocabulary::parse_dump(read_file(o.vocab));
    inputs.add("vocab", o.vocab);
  }
  const Features f = featurize(o, docs, std::vector<Polarity>(docs.size(), Polarity::negative), vocab,
                               table ? &*table : nullptr);
  const Classifier model = classifier_from_json(model_json, f.hash);
  const Dataset& data = model.kind() == ModelKind::mnb ? f.mnb : f.linear;
  const auto p = model.predict_proba(data.rows);
  std::string text;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ojson j;
    j["id"] = docs[i].id;
    j["p_positive"] = p[i];
    j["label"] = p[i] > 0.5 ? "POSITIVE" : "NEGATIVE";
    text += j.dump() + '\n';
  }
  out.write("predictions.jsonl", text);
  log << "predicted " << docs.size() << " samples\n";
  return 0;
}

SweepConfig sweep_config(const Options& o, const VectorTable* table) {
  SweepConfig cfg;
  cfg.taus = o.taus;
  cfg.models = eval_models(o.models);
  cfg.encodings = encodings(o.encodings);
  cfg.vectors = table;
  cfg.grid = grid(o);
  cfg.min_df = o.min_df;
  cfg.mnb_counts = o.mnb_counts;
  cfg.test_fraction = o.test_fraction;
  cfg.stack_folds = o.stack_folds;
  cfg.stack_tau = o.stack_tau;
  cfg.vote_weights = o.vote_weights;
  cfg.min_class_size = o.min_class_size;
  cfg.seed = o.seed;
  validate(cfg);
  return cfg;
}

int cmd_sweep(const Options& o, bool audit, Inputs& inputs, Outputs& out, std::ostream& log) {
  std::optional<VectorTable> table;
  if (!o.vectors.empty()) {
    table = VectorTable::load(o.vectors);
    inputs.add("vectors", o.vectors);
  }
  const SweepConfig cfg = sweep_config(o, table ? &*table : nullptr);
  const Scored s = load_and_score(o, inputs);
  const SweepResult sweep = threshold_sweep(s.corpus, s.docs, s.scores, cfg);

  std::vector<SkewReport> skews;
  if (audit) {
    std::vector<double> taus = o.taus;
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    for (double t : taus) {
      const auto labeled = label_corpus(s.corpus, s.docs, s.scores, LabelingConfig{t});
      for (auto& r : skew_breakdown(s.corpus, labeled, t, std::filesystem::path(o.corpus).filename().string())) {
        skews.push_back(std::move(r));
      }
    }
    out.write("scores.jsonl", scores_to_jsonl(s.corpus, s.scores));
    out.write("labels.jsonl", labels_jsonl(s, taus));
  }
  out.record(emit_report(sweep, skews, out.dir()));
  for (const auto& w : sweep.warnings) log << "warning: " << w << '\n';
  for (const auto& r : sweep.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "tau=%.2f %-6s %-5s accuracy=%.4f macro_f1=%.4f\n", r.tau,
                  std::string(to_string(r.model)).c_str(), std::string(to_string(r.encoding)).c_str(),
                  r.metrics.accuracy, r.metrics.macro_f1);
    log << line;
  }
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->option_defaults()->always_capture_default();
  sub->set_config("--config", "", "key = value config file; flags override it");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "seed for every random choice");
  sub->add_option("--jobs", o.jobs, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
}

void add_text(CLI::App* sub, Options& o) {
  sub->add_option("--corpus", o.corpus, "corpus JSONL")->check(CLI::ExistingFile);
  sub->add_option("--lemma-exceptions", o.lemma_exceptions, "lemma exception table")->check(CLI::ExistingFile);
  sub->add_option("--min-len", o.min_len, "minimum response length in tokens");
  sub->add_option("--max-len", o.max_len, "maximum response length in tokens");
}

void add_scoring(CLI::App* sub, Options& o) {
  sub->add_option("--scores", o.scores, "external scores JSONL (default: lexicon scorer)")->check(CLI::ExistingFile);
  sub->add_option("--lexicon", o.lexicon, "lexicon file of `token weight` lines")->check(CLI::ExistingFile);
  sub->add_option("--lexicon-scale", o.lexicon_scale, "logit scale k of the lexicon scorer");
  sub->add_option("--jitter-sd", o.jitter_sd, "sd of the per-document logit jitter");
}

void add_training(CLI::App* sub, Options& o) {
  sub->add_option("--models", o.models, "subset of mnb,logreg,svm,vote,stack")->delimiter(',');
  sub->add_option("--vectors", o.vectors, "word-vector table for the dense encoding")->check(CLI::ExistingFile);
  sub->add_option("--min-df", o.min_df, "minimum document frequency of a vocabulary term");
  sub->add_flag("--mnb-counts", o.mnb_counts, "naive Bayes on raw counts instead of tf-idf");
  sub->add_option("--alpha-grid", o.alpha_grid, "naive Bayes smoothing grid")->delimiter(',');
  sub->add_option("--c-grid", o.c_grid, "LR/SVM C grid")->delimiter(',');
  sub->add_option("--stack-tau", o.stack_tau, "stacking decision threshold");
  sub->add_option("--vote-weights", o.vote_weights, "soft-vote weights over logreg,svm")->delimiter(',');
  sub->add_option("--stack-folds", o.stack_folds, "stacking folds");
  sub->add_option("--min-class-size", o.min_class_size, "smallest usable class after labeling");
}

void add_gen(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "number of samples");
  sub->add_option("--conditions", o.conditions, "condition mix, e.g. positive=0.5,negative=0.5")->delimiter(',');
  sub->add_option("--topics", o.topics, "topic mix, e.g. finance=0.5,travel=0.5 (default uniform)")->delimiter(',');
}

void print_error(std::ostream& err, std::string_view code, const std::string& detail) {
  const bool color = std::getenv("NO_COLOR") == nullptr && &err == &std::cerr && isatty(STDERR_FILENO);
  if (color) {
    err << "\033[31mERROR " << code << "\033[0m: " << detail << '\n';
  } else {
    err << "ERROR " << code << ": " << detail << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Tone-bias audit toolkit", "tonebias"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "write a seeded synthetic corpus");
  add_common(generate, o);
  add_gen(generate, o);

  auto* promptpack = app.add_subcommand("promptpack", "write tone-conditioned prompts for an external model");
  add_common(promptpack, o);
  add_gen(promptpack, o);

  auto* ingest = app.add_subcommand("ingest", "validate a corpus and write its cleaned documents");
  add_common(ingest, o);
  add_text(ingest, o);

  auto* label = app.add_subcommand("label", "score and label responses at one threshold");
  add_common(label, o);
  add_text(label, o);
  add_scoring(label, o);
  label->add_option("--tau,--label-tau", o.tau, "confidence threshold in (0.5, 1]");

  auto* train = app.add_subcommand("train", "train models on the confident labels");
  add_common(train, o);
  add_text(train, o);
  add_scoring(train, o);
  add_training(train, o);
  train->add_option("--tau,--label-tau", o.tau, "confidence threshold in (0.5, 1]");
  train->add_option("--encoding", o.encoding, "tfidf or dense");

  auto* predict = app.add_subcommand("predict", "apply a trained base model to a corpus");
  add_common(predict, o);
  add_text(predict, o);
  predict->add_option("--model", o.model_file, "model JSON written by train")->check(CLI::ExistingFile);
  predict->add_option("--vocab", o.vocab, "vocab.txt written by train")->check(CLI::ExistingFile);
  predict->add_option("--vectors", o.vectors, "word-vector table for the dense encoding")->check(CLI::ExistingFile);
  predict->add_option("--encoding", o.encoding, "tfidf or dense");

  CLI::App* sweeps[2];
  for (int a = 0; a < 2; ++a) {
    auto* sub = a == 0 ? app.add_subcommand("sweep", "evaluate every model and encoding across thresholds")
                       : app.add_subcommand("audit", "label, train, evaluate, measure skew and write the report");
    add_common(sub, o);
    add_text(sub, o);
    add_scoring(sub, o);
    add_training(sub, o);
    sub->add_option("--taus", o.taus, "thresholds, e.g. 0.60,0.85")->delimiter(',');
    sub->add_option("--encodings", o.encodings, "subset of tfidf,dense")->delimiter(',');
    sub->add_option("--test-fraction", o.test_fraction, "held-out share of the labeled set");
    sweeps[a] = sub;
  }

  std::vector<const char*> argv{"tonebias"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    print_error(err, to_string(ErrorCode::InvalidConfig), e.what());
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    apply_config_file(sub);
    kernels::set_num_threads(o.jobs);
    Inputs inputs;
    Outputs outputs(o.out);
    if (command == "generate") {
      cmd_generate(o, outputs, out);
    } else if (command == "promptpack") {
      cmd_promptpack(o, outputs, out);
    } else if (command == "ingest") {
      cmd_ingest(o, inputs, outputs, out);
    } else if (command == "label") {
      cmd_label(o, inputs, outputs, out);
    } else if (command == "train") {
      cmd_train(o, inputs, outputs, out);
    } else if (command == "predict") {
      cmd_predict(o, inputs, outputs, out);
    } else {
      cmd_sweep(o, sub == sweeps[1], inputs, outputs, out);
    }
    write_manifest(command, config_json(*sub), o.seed, inputs, outputs);
    return 0;
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    print_error(err, "Internal", e.what());
    return 2;
  }
}

}  // namespace tonebias
