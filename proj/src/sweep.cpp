#include "tonebias/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <unordered_map>

#include "tonebias/ensemble.hpp"
#include "tonebias/error.hpp"
#include "tonebias/hash.hpp"
#include "tonebias/kernels.hpp"
#include "tonebias/split.hpp"

namespace tonebias {

std::string_view to_string(EvalModel m) {
  switch (m) {
    case EvalModel::mnb: return "mnb";
    case EvalModel::logreg: return "logreg";
    case EvalModel::svm: return "svm";
    case EvalModel::vote: return "vote";
    case EvalModel::stack: return "stack";
  }
  return "?";
}

std::string_view to_string(Encoding e) { return e == Encoding::tfidf ? "tfidf" : "dense"; }

std::optional<EvalModel> parse_eval_model(std::string_view s) {
  for (EvalModel m : {EvalModel::mnb, EvalModel::logreg, EvalModel::svm, EvalModel::vote, EvalModel::stack}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Encoding> parse_encoding(std::string_view s) {
  if (s == "tfidf") return Encoding::tfidf;
  if (s == "dense") return Encoding::dense;
  return std::nullopt;
}

void validate(const SweepConfig& cfg) {
  if (cfg.taus.empty()) throw Error(ErrorCode::InvalidConfig, "no thresholds to sweep");
  for (double t : cfg.taus) validate(LabelingConfig{t});
  if (cfg.models.empty()) throw Error(ErrorCode::InvalidConfig, "no models to evaluate");
  if (cfg.encodings.empty()) throw Error(ErrorCode::InvalidConfig, "no encodings to evaluate");
  const bool dense = std::find(cfg.encodings.begin(), cfg.encodings.end(), Encoding::dense) != cfg.encodings.end();
  if (dense && cfg.vectors == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "dense encoding needs a word-vector table (--vectors)");
  }
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test fraction must lie in (0, 1)");
  }
  const SoftVoteConfig vote{cfg.vote_weights};
  validate(vote);
  if (vote.weights.size() != 2) throw Error(ErrorCode::ArityMismatch, "soft vote takes two weights (logreg, svm)");
  if (cfg.min_class_size < 2) throw Error(ErrorCode::InvalidConfig, "min_class_size must be at least 2");
}

const SweepRow* SweepResult::find(double tau, EvalModel model, Encoding encoding) const {
  for (const auto& r : rows) {
    if (r.tau == tau && r.model == model && r.encoding == encoding) return &r;
  }
  return nullptr;
}

namespace {

struct TauPlan {
  double tau = 0.0;
  std::vector<std::size_t> doc_index;  // labeled docs, corpus order
  std::vector<Polarity> y;
  SplitResult split;
  std::size_t n_neutral = 0;
};

struct Encoded {
  Dataset linear;  // LR and SVM
  Dataset mnb;
};

Encoded encode(Encoding enc, std::span<const CleanDoc> train_docs, std::span<const CleanDoc> eval_docs,
               std::vector<Polarity> y, const SweepConfig& cfg, Encoded* eval_out) {
  Encoded train, eval;
  if (enc == Encoding::tfidf) {
    const Vocabulary vocab = Vocabulary::fit(train_docs, cfg.min_df);
    train.linear.rows = kernels::tfidf_batch(train_docs, vocab);
    eval.linear.rows = kernels::tfidf_batch(eval_docs, vocab);
    if (cfg.mnb_counts) {
      train.mnb.rows = kernels::count_batch(train_docs, vocab);
      eval.mnb.rows = kernels::count_batch(eval_docs, vocab);
    } else {
      train.mnb.rows = train.linear.rows;
      eval.mnb.rows = eval.linear.rows;
    }
    train.linear.dim = train.mnb.dim = eval.linear.dim = eval.mnb.dim = vocab.size();
  } else {
    const VectorTable& table = *cfg.vectors;
    for (const auto& [docs, out] : {std::pair{train_docs, &train}, std::pair{eval_docs, &eval}}) {
      for (const auto& v : kernels::mean_pool_batch(docs, table)) {
        out->linear.rows.push_back(to_sparse(v));
        out->mnb.rows.push_back(split_signs(v));
      }
      out->linear.dim = table.dim();
      out->mnb.dim = 2 * table.dim();
    }
  }
  train.linear.y = train.mnb.y = std::move(y);
  *eval_out = std::move(eval);
  return train;
}

std::vector<Polarity> threshold(std::span<const double> p) {
  std::vector<Polarity> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > 0.5 ? Polarity::positive : Polarity::negative;
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<SweepRow> run_cell(const Corpus& corpus, const std::vector<CleanDoc>& docs, const TauPlan& plan,
                               Encoding enc, const std::vector<EvalModel>& models, const SweepConfig& cfg) {
  std::vector<CleanDoc> train_docs, test_docs;
  std::vector<Polarity> y_train, y_test;
  std::vector<std::string> test_topic;
  for (std::size_t i : plan.split.train) {
    train_docs.push_back(docs[plan.doc_index[i]]);
    y_train.push_back(plan.y[i]);
  }
  for (std::size_t i : plan.split.test) {
    test_docs.push_back(docs[plan.doc_index[i]]);
    y_test.push_back(plan.y[i]);
    test_topic.push_back(corpus.samples[plan.doc_index[i]].topic);
  }

  Encoded test;
  const Encoded train = encode(enc, train_docs, test_docs, y_train, cfg, &test);

  GridOptions grid = cfg.grid;
  grid.seed = cfg.seed;
  auto needs = [&](std::initializer_list<EvalModel> any) {
    return std::any_of(any.begin(), any.end(), [&](EvalModel m) {
      return std::find(models.begin(), models.end(), m) != models.end();
    });
  };

  struct Base {
    ModelSpec spec;
    std::vector<double> p_test;
  };
  auto fit_base = [&](ModelKind kind) {
    ModelSpec base;
    base.kind = kind;
    base.seed = cfg.seed;
    const Dataset& data = kind == ModelKind::mnb ? train.mnb : train.linear;
    const Dataset& eval = kind == ModelKind::mnb ? test.mnb : test.linear;
    Base b{select_model(base, data, grid).spec, {}};
    b.p_test = fit_classifier(b.spec, data).predict_proba(eval.rows);
    return b;
  };

  std::optional<Base> mnb, lr, svm;
  if (needs({EvalModel::mnb})) mnb = fit_base(ModelKind::mnb);
  if (needs({EvalModel::logreg, EvalModel::vote, EvalModel::stack})) lr = fit_base(ModelKind::logreg);
  if (needs({EvalModel::svm, EvalModel::vote, EvalModel::stack})) svm = fit_base(ModelKind::svm);

  std::vector<SweepRow> rows;
  for (EvalModel m : models) {
    SweepRow row;
    row.tau = plan.tau;
    row.model = m;
    row.encoding = enc;
    row.n_labeled = plan.y.size();
    row.n_train = y_train.size();
    row.n_test = y_test.size();
    row.n_discarded_neutral = plan.n_neutral;

    std::vector<Polarity> pred;
    switch (m) {
      case EvalModel::mnb:
        pred = threshold(mnb->p_test);
        row.hyperparameters = describe(mnb->spec);
        break;
      case EvalModel::logreg:
        pred = threshold(lr->p_test);
        row.hyperparameters = describe(lr->spec);
        break;
      case EvalModel::svm:
        pred = threshold(svm->p_test);
        row.hyperparameters = describe(svm->spec);
        break;
      case EvalModel::vote: {
        const SoftVoteConfig vote{cfg.vote_weights};
        for (std::size_t i = 0; i < y_test.size(); ++i) {
          const double z[2] = {lr->p_test[i], svm->p_test[i]};
          pred.push_back(ensemble_label(soft_vote(z, vote)));
        }
        row.hyperparameters = describe(lr->spec) + " + " + describe(svm->spec);
        break;
      }
      case EvalModel::stack: {
        const ModelSpec specs[2] = {lr->spec, svm->spec};
        const StackingFit fit = fit_stacking(specs, train.linear, cfg.stack_folds, mix64(cfg.seed), cfg.stack_tau);
        for (const auto& x : test.linear.rows) {
          pred.push_back(predict_stacking(fit.model, base_posteriors(fit.bases, x)).label);
        }
        row.hyperparameters = "folds=" + std::to_string(cfg.stack_folds) + " tau=" + fmt(cfg.stack_tau) +
                              " beta0=" + fmt(fit.model.beta0) + " beta=" + fmt(fit.model.beta[0]) + "," +
                              fmt(fit.model.beta[1]);
        break;
      }
    }
    row.metrics = compute_metrics(y_test, pred);

    std::map<std::string, std::pair<std::vector<Polarity>, std::vector<Polarity>>> topics;
    for (std::size_t i = 0; i < y_test.size(); ++i) {
      auto& [t, p] = topics[test_topic[i]];
      t.push_back(y_test[i]);
      p.push_back(pred[i]);
    }
    for (const auto& [topic, tp] : topics) row.per_topic[topic] = compute_metrics(tp.first, tp.second);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SweepResult threshold_sweep(const Corpus& corpus, const std::vector<CleanDoc>& docs,
                            const ScoreMap& scores, const SweepConfig& cfg) {
  validate(cfg);
  if (docs.size() != corpus.samples.size()) {
    throw Error(ErrorCode::ArityMismatch, "documents are not aligned with the corpus");
  }
  std::vector<double> taus = cfg.taus;
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  std::vector<EvalModel> models = cfg.models;
  std::sort(models.begin(), models.end());
  models.erase(std::unique(models.begin(), models.end()), models.end());
  std::vector<Encoding> encodings = cfg.encodings;
  std::sort(encodings.begin(), encodings.end());
  encodings.erase(std::unique(encodings.begin(), encodings.end()), encodings.end());

  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) index_of.emplace(corpus.samples[i].id, i);

  SweepResult result;
  std::vector<TauPlan> plans;
  for (double tau : taus) {
    const LabelingResult labeled = label_corpus(corpus, docs, scores, LabelingConfig{tau});
    TauPlan plan;
    plan.tau = tau;
    plan.n_neutral = labeled.n_neutral;
    std::vector<std::string> strata;
    for (const auto& d : labeled.labels) {
      if (d.label == ToneLabel::neutral) continue;
      const std::size_t i = index_of.at(d.id);
      plan.doc_index.push_back(i);
      plan.y.push_back(d.label == ToneLabel::positive ? Polarity::positive : Polarity::negative);
      strata.push_back(std::string(to_string(d.label)) + "|" + corpus.samples[i].topic);
    }
    if (labeled.n_positive < cfg.min_class_size || labeled.n_negative < cfg.min_class_size) {
      throw Error(ErrorCode::InsufficientLabeled,
                  "tau=" + fmt(tau) + " leaves " + std::to_string(labeled.n_positive) + " POSITIVE and " +
                      std::to_string(labeled.n_negative) + " NEGATIVE labels (need " +
                      std::to_string(cfg.min_class_size) + " of each)");
    }
    plan.split = stratified_split(strata, {cfg.test_fraction, cfg.seed});
    for (const auto& w : plan.split.warnings) result.warnings.push_back("tau=" + fmt(tau) + ": " + w);
    plans.push_back(std::move(plan));
  }

  const std::size_t n_cells = plans.size() * encodings.size();
  std::vector<std::vector<SweepRow>> cells(n_cells);
  std::vector<std::exception_ptr> errors(n_cells);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long c = 0; c < static_cast<long long>(n_cells); ++c) {
    const auto& plan = plans[static_cast<std::size_t>(c) / encodings.size()];
    const Encoding enc = encodings[static_cast<std::size_t>(c) % encodings.size()];
    try {
      cells[c] = run_cell(corpus, docs, plan, enc, models, cfg);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& cell : cells) {
    for (auto& row : cell) result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace tonebias
