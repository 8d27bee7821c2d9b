#pragma once

#include <iostream>
#include <sstream>

#include "gts/dataset.hpp"
#include "gts/synth.hpp"

namespace gts {

struct RunConfig {
  fs::path corpus;
  fs::path out;
  fs::path hypotheses_file;  // optional: evaluate with fixed hypotheses, skipping tune output
  TemplateKind kind = TemplateKind::Gei;
  std::uint64_t seed = 42;
  int jobs = 1;
  int tuning_size = 24;
  int binarize_threshold = 128;
  int population = 20;
  int generations = 15;
  double crossover_prob = 0.6;
  double mutation_prob = 0.03;
  SplitBounds bounds{};
  ClassifyOpts classify{};
  bool export_png = false;

  fs::path templates_dir() const { return out / "templates"; }
  fs::path hypotheses_path() const {
    return hypotheses_file.empty() ? out / "hypotheses.txt" : hypotheses_file;
  }
};

namespace detail {

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoFailure("cannot create " + path.string());
  os << text;
  if (!os) throw IoFailure("write failed: " + path.string());
}

inline void write_run_config(const RunConfig& config, const std::string& command) {
  std::ostringstream os;
  os << "command=" << command << "\n"
     << "corpus=" << config.corpus.string() << "\n"
     << "template=" << to_string(config.kind) << "\n"
     << "seed=" << config.seed << "\n"
     << "jobs=" << config.jobs << "\n"
     << "tuning_size=" << config.tuning_size << "\n"
     << "threshold=" << config.binarize_threshold << "\n"
     << "population=" << config.population << "\n"
     << "generations=" << config.generations << "\n"
     << "crossover=" << config.crossover_prob << "\n"
     << "mutation=" << config.mutation_prob << "\n"
     << "classifier=" << (config.classify.use_knn ? "knn" : "bayes") << "\n"
     << "knn_k=" << config.classify.k << "\n";
  write_text_file(config.out / ("run_" + command + ".txt"), os.str());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// extract: corpus -> per-sequence gait templates

struct ExtractSummary {
  std::size_t written = 0;
  std::vector<std::string> failures;   // per-sequence, non-fatal
  std::vector<std::string> malformed;  // unparseable file names
};

inline ExtractSummary run_extract(const RunConfig& config) {
  const CorpusLoad corpus = load_corpus(config.corpus);
  fs::create_directories(config.out);
  fs::create_directories(config.templates_dir());
  if (config.export_png) fs::create_directories(config.out / "templates_png");

  ExtractSummary summary;
  summary.malformed = corpus.malformed;
  std::vector<std::string> failures(corpus.records.size());
  std::atomic<std::size_t> written{0};

  parallel_for(corpus.records.size(), config.jobs, [&](std::size_t i) {
    const GaitRecord& rec = corpus.records[i];
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%s-%02d-%03d", rec.subject.c_str(), to_string(rec.covariate),
                  rec.seq, rec.view);
    try {
      std::vector<BinaryImage> normalized;
      normalized.reserve(rec.frames.size());
      for (const auto& path : rec.frames) {
        try {
          normalized.push_back(normalize(binarize(read_gray_png(path), config.binarize_threshold)));
        } catch (const EmptySilhouette&) {
          // frames without the subject are dropped
        }
      }
      const auto [start, end] = detect_gait_cycle(normalized);
      GaitTemplate t = collate(config.kind, std::span<const BinaryImage>(normalized.data() + start,
                                                                         end - start));
      t.subject = rec.subject;
      t.covariate = rec.covariate;
      t.seq = rec.seq;
      t.view = rec.view;
      write_template(config.templates_dir() / template_filename(t), t);
      if (config.export_png) {
        fs::path png = config.out / "templates_png" / template_filename(t);
        png.replace_extension(".png");
        write_gray_png(png, to_gray(t.pixels));
      }
      written.fetch_add(1);
    } catch (const Error& e) {
      failures[i] = std::string(id) + ": " + e.what();
    } catch (const std::exception& e) {
      failures[i] = std::string(id) + ": " + e.what();
    }
  });

  summary.written = written.load();
  for (auto& f : failures)
    if (!f.empty()) summary.failures.push_back(std::move(f));
  std::sort(summary.failures.begin(), summary.failures.end());

  std::string log;
  for (const auto& m : summary.malformed) log += "malformed: " + m + "\n";
  for (const auto& f : summary.failures) log += "skipped: " + f + "\n";
  detail::write_text_file(config.out / "extract_errors.log", log);
  detail::write_run_config(config, "extract");
  return summary;
}

// ---------------------------------------------------------------------------
// tune: GA + sequential refinement per view on the tuning subjects

struct TuneSummary {
  std::map<int, GtsHypothesis> hypotheses;
  std::map<int, FitnessReport> reports;
};

inline TuneSummary run_tune(const RunConfig& config) {
  fs::create_directories(config.out);
  const TemplateStore store = TemplateStore::open(config.templates_dir());

  std::set<std::string> subject_set;
  std::set<int> view_set;
  for (const auto& e : store.entries())
    if (e.kind == config.kind) {
      subject_set.insert(e.subject);
      view_set.insert(e.view);
    }
  if (subject_set.empty()) throw EmptyCorpus();
  const SplitPlan plan = make_split(std::vector<std::string>(subject_set.begin(), subject_set.end()),
                                    config.seed, config.tuning_size);

  const std::vector<int> views(view_set.begin(), view_set.end());
  std::vector<TuneResult> results(views.size());
  parallel_for(views.size(), config.jobs, [&](std::size_t i) {
    GaConfig ga;
    ga.population = config.population;
    ga.generations = config.generations;
    ga.crossover_prob = config.crossover_prob;
    ga.mutation_prob = config.mutation_prob;
    ga.bounds = config.bounds;
    ga.seed = derive_seed(config.seed, static_cast<std::uint64_t>(views[i]));
    results[i] = tune_view(build_tuning_set(store, plan, views[i], config.kind), ga, config.classify);
  });

  TuneSummary summary;
  std::ostringstream log;
  log << "# seed=" << config.seed << "\n";
  log << "view,generation,best_fitness,chromosome,ccr_a,ccr_b,ccr_c\n";
  fs::create_directories(config.out / "masks");
  for (std::size_t i = 0; i < views.size(); ++i) {
    summary.hypotheses[views[i]] = results[i].best;
    summary.reports[views[i]] = results[i].best_report;
    for (std::size_t gen = 0; gen < results[i].history.size(); ++gen) {
      const auto& r = results[i].history[gen];
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.6f,%s,%.4f,%.4f,%.4f\n", views[i], gen, r.fitness,
                    results[i].generation_best[gen].to_string().c_str(), r.ccr_a, r.ccr_b, r.ccr_c);
      log << buf;
    }
    char mask_name[32];
    std::snprintf(mask_name, sizeof(mask_name), "%03d.png", views[i]);
    const RegionMask mask = build_mask(results[i].best);
    GrayImage img(mask.rows(), mask.cols());
    for (std::size_t p = 0; p < mask.size(); ++p) img.data()[p] = mask.data()[p] ? 255 : 0;
    write_gray_png(config.out / "masks" / mask_name, img);
  }

  write_hypotheses(config.out / "hypotheses.txt", summary.hypotheses, config.seed);
  detail::write_text_file(config.out / "evolution.log", log.str());
  detail::write_run_config(config, "tune");
  return summary;
}

// ---------------------------------------------------------------------------
// evaluate: view-estimated routing over the evaluation subjects

inline EvaluationResult run_evaluate(const RunConfig& config) {
  fs::create_directories(config.out);
  const CorpusLoad corpus = load_corpus(config.corpus);
  const TemplateStore store = TemplateStore::open(config.templates_dir());
  const SplitPlan plan = make_split(corpus.records, config.seed, config.tuning_size);
  const auto hypotheses = read_hypotheses(config.hypotheses_path());

  EvaluationConfig eval;
  eval.classify = config.classify;
  eval.jobs = config.jobs;
  eval.binarize_threshold = config.binarize_threshold;
  eval.cache_dir = config.out / "cache";
  eval.models_dir = config.out / "models";

  EvaluationResult result = evaluate_view_invariant(store, corpus.records, plan, hypotheses,
                                                    config.kind, eval);

  detail::write_text_file(config.out / "ccr_table.csv", result.table.to_csv());
  std::ostringstream txt;
  txt << "# seed=" << config.seed << "\n"
      << result.table.to_text() << "view estimator routing accuracy: " << result.view_accuracy()
      << " over " << result.probes << " probes\n";
  detail::write_text_file(config.out / "ccr_table.txt", txt.str());
  fs::create_directories(config.out / "models");
  save_view_estimator(config.out / "models" / "view_estimator.gtsv", result.estimator);
  detail::write_run_config(config, "evaluate");
  return result;
}

// ---------------------------------------------------------------------------
// synth: generate a corpus in the CASIA-B directory scheme

inline std::vector<ManifestEntry> run_synth(const SynthCorpusConfig& synth, const fs::path& out,
                                            int jobs) {
  return write_corpus(make_corpus_specs(synth), out, jobs);
}

// ---------------------------------------------------------------------------
// estimate-view: report per-angle view estimation accuracy on the evaluation
// subjects

struct ViewEstimateSummary {
  int total = 0;
  int correct = 0;
  std::map<int, CcrCell> per_angle;
  double accuracy() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

inline ViewEstimateSummary run_estimate_view(const RunConfig& config) {
  const CorpusLoad corpus = load_corpus(config.corpus);
  const SplitPlan plan = make_split(corpus.records, config.seed, config.tuning_size);

  std::vector<const GaitRecord*> tuning, eval;
  for (const auto& r : corpus.records)
    (plan.is_tuning(r.subject) ? tuning : eval).push_back(&r);

  std::vector<std::optional<std::pair<ViewFeatures, int>>> feats(tuning.size());
  parallel_for(tuning.size(), config.jobs, [&](std::size_t i) {
    try {
      feats[i] = {view_features_for_record(*tuning[i], config.binarize_threshold), tuning[i]->view};
    } catch (const Error&) {
    }
  });
  std::vector<std::pair<ViewFeatures, int>> labeled;
  for (auto& f : feats)
    if (f) labeled.push_back(*f);
  const ViewEstimator estimator = fit_view_estimator(labeled);

  std::vector<int> predicted(eval.size(), -1);
  parallel_for(eval.size(), config.jobs, [&](std::size_t i) {
    try {
      predicted[i] = estimate_view(estimator, view_features_for_record(*eval[i], config.binarize_threshold));
    } catch (const Error&) {
    }
  });

  ViewEstimateSummary summary;
  std::ostringstream csv;
  csv << "subject,covariate,seq,true_angle,predicted_angle\n";
  for (std::size_t i = 0; i < eval.size(); ++i) {
    csv << eval[i]->subject << ',' << to_string(eval[i]->covariate) << ',' << eval[i]->seq << ','
        << eval[i]->view << ',' << predicted[i] << "\n";
    summary.total++;
    auto& cell = summary.per_angle[eval[i]->view];
    cell.total++;
    if (predicted[i] == eval[i]->view) {
      summary.correct++;
      cell.correct++;
    }
  }
  fs::create_directories(config.out);
  detail::write_text_file(config.out / "view_estimates.csv", csv.str());
  save_view_estimator(config.out / "view_estimator.gtsv", estimator);
  detail::write_run_config(config, "estimate-view");
  return summary;
}

}  // namespace gts
