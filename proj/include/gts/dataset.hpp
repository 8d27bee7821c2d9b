#pragma once

#include <charconv>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>

#include "gts/ga.hpp"
#include "gts/png_io.hpp"
#include "gts/store.hpp"
#include "gts/view_estimation.hpp"

namespace gts {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Corpus records

struct GaitRecord {
  std::string subject;
  Covariate covariate = Covariate::Normal;
  int seq = 1;
  int view = 90;
  std::vector<fs::path> frames;  // ordered by frame number
};

struct CorpusLoad {
  std::vector<GaitRecord> records;
  std::vector<std::string> malformed;  // offending file names, not fatal
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

struct ParsedName {
  std::string subject;
  Covariate covariate;
  int seq, view, frame;
};

// `SSS-cc-NN-AAA-FFF` with cc in {nm, bg, cl} and AAA one of the 11 angles.
inline std::optional<ParsedName> parse_casia_name(std::string_view stem) {
  std::array<std::string_view, 5> part;
  std::size_t start = 0;
  for (int i = 0; i < 5; ++i) {
    const std::size_t dash = i < 4 ? stem.find('-', start) : std::string_view::npos;
    if (i < 4 && dash == std::string_view::npos) return std::nullopt;
    part[i] = stem.substr(start, i < 4 ? dash - start : std::string_view::npos);
    start = dash + 1;
  }
  if (!all_digits(part[0]) || !all_digits(part[2]) || !all_digits(part[3]) || !all_digits(part[4]))
    return std::nullopt;
  Covariate cov;
  if (part[1] == "nm") cov = Covariate::Normal;
  else if (part[1] == "bg") cov = Covariate::Bag;
  else if (part[1] == "cl") cov = Covariate::Coat;
  else return std::nullopt;
  const int view = to_int(part[3]);
  if (!is_view_angle(view)) return std::nullopt;
  const int seq = to_int(part[2]);
  if (seq < 1) return std::nullopt;
  return ParsedName{std::string(part[0]), cov, seq, view, to_int(part[4])};
}

}  // namespace detail

// Walk the corpus tree and group silhouette frames into per-sequence records,
// sorted by (subject, covariate, seq, view). File names carry the metadata;
// unparseable PNG names are collected rather than fatal.
inline CorpusLoad load_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw EmptyCorpus();

  using Key = std::tuple<std::string, int, int, int>;  // subject, cov, seq, view
  std::map<Key, std::vector<std::pair<int, fs::path>>> groups;
  CorpusLoad out;

  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    const auto parsed = detail::parse_casia_name(entry.path().stem().string());
    if (!parsed) {
      out.malformed.push_back(entry.path().filename().string());
      continue;
    }
    groups[{parsed->subject, static_cast<int>(parsed->covariate), parsed->seq, parsed->view}]
        .emplace_back(parsed->frame, entry.path());
  }
  std::sort(out.malformed.begin(), out.malformed.end());

  for (auto& [key, frames] : groups) {
    std::sort(frames.begin(), frames.end());
    GaitRecord rec;
    rec.subject = std::get<0>(key);
    rec.covariate = static_cast<Covariate>(std::get<1>(key));
    rec.seq = std::get<2>(key);
    rec.view = std::get<3>(key);
    for (auto& [n, p] : frames) rec.frames.push_back(std::move(p));
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw EmptyCorpus();
  return out;
}

// ---------------------------------------------------------------------------
// Tuning / evaluation split

struct SplitPlan {
  std::vector<std::string> tuning;      // subjects driving the GA and the view estimator
  std::vector<std::string> evaluation;  // everyone else
  std::uint64_t seed = 0;
  int gallery_max_seq = 4;  // normal sequences 1..4 enroll, 5.. probe

  bool is_tuning(const std::string& subject) const {
    return std::binary_search(tuning.begin(), tuning.end(), subject);
  }
  bool is_evaluation(const std::string& subject) const {
    return std::binary_search(evaluation.begin(), evaluation.end(), subject);
  }
  bool in_gallery(Covariate cov, int seq) const {
    return cov == Covariate::Normal && seq <= gallery_max_seq;
  }
  bool is_probe(Covariate cov, int seq) const { return !in_gallery(cov, seq); }
};

inline std::vector<std::string> unique_subjects(const std::vector<GaitRecord>& records) {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.subject);
  return {s.begin(), s.end()};
}

inline SplitPlan make_split(const std::vector<std::string>& subjects, std::uint64_t seed,
                            int tuning_size = 24) {
  const int n = static_cast<int>(subjects.size());
  if (n < tuning_size + 1)
    throw TooFewSubjects("need at least " + std::to_string(tuning_size + 1) + " subjects, have " +
                         std::to_string(n));
  std::vector<std::string> sorted = subjects;
  std::sort(sorted.begin(), sorted.end());

  Rng rng(seed);
  const auto picks = sample_without_replacement(tuning_size, n, rng);
  std::vector<bool> in_tuning(n, false);
  for (int i : picks) in_tuning[i] = true;

  SplitPlan plan;
  plan.seed = seed;
  for (int i = 0; i < n; ++i)
    (in_tuning[i] ? plan.tuning : plan.evaluation).push_back(sorted[i]);
  return plan;
}

inline SplitPlan make_split(const std::vector<GaitRecord>& records, std::uint64_t seed,
                            int tuning_size = 24) {
  return make_split(unique_subjects(records), seed, tuning_size);
}

// ---------------------------------------------------------------------------
// Correct classification rate

inline double compute_ccr(const std::vector<std::string>& predictions,
                          const std::vector<std::string>& truths) {
  if (predictions.size() != truths.size()) throw LengthMismatch();
  if (predictions.empty()) throw EmptyInput();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

// ---------------------------------------------------------------------------
// Tuning set assembly from the template store

inline TuningSet build_tuning_set(const TemplateStore& store, const SplitPlan& plan, int view,
                                  TemplateKind kind) {
  TuningSet set;
  for (const auto& e : store.entries()) {
    if (e.view != view || e.kind != kind || !plan.is_tuning(e.subject)) continue;
    if (e.covariate == Covariate::Normal) {
      (e.seq <= plan.gallery_max_seq ? set.gallery : set.probes_a).push_back(store.load(e));
    } else if (e.covariate == Covariate::Bag) {
      set.probes_b.push_back(store.load(e));
    } else {
      set.probes_c.push_back(store.load(e));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// CCR table: 11 angles x 3 covariates plus means

struct CcrCell {
  int correct = 0;
  int total = 0;
  double rate() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

struct CcrTable {
  std::vector<int> angles;
  std::vector<std::array<CcrCell, 3>> cells;  // [angle][covariate]

  double angle_mean(std::size_t a) const {
    double s = 0;
    for (int c = 0; c < 3; ++c) s += cells[a][c].rate();
    return s / 3.0;
  }
  double covariate_mean(int c) const {
    double s = 0;
    for (std::size_t a = 0; a < angles.size(); ++a) s += cells[a][c].rate();
    return angles.empty() ? 0.0 : s / static_cast<double>(angles.size());
  }
  double overall_mean() const {
    double s = 0;
    for (std::size_t a = 0; a < angles.size(); ++a) s += angle_mean(a);
    return angles.empty() ? 0.0 : s / static_cast<double>(angles.size());
  }

  std::string to_csv() const {
    char buf[160];
    std::string out = "angle,normal,bag,coat,mean\n";
    for (std::size_t a = 0; a < angles.size(); ++a) {
      std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f,%.4f,%.4f\n", angles[a], cells[a][0].rate(),
                    cells[a][1].rate(), cells[a][2].rate(), angle_mean(a));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "mean,%.4f,%.4f,%.4f,%.4f\n", covariate_mean(0),
                  covariate_mean(1), covariate_mean(2), overall_mean());
    out += buf;
    return out;
  }

  std::string to_text() const {
    char buf[160];
    std::string out = "angle   normal     bag    coat    mean\n";
    for (std::size_t a = 0; a < angles.size(); ++a) {
      std::snprintf(buf, sizeof(buf), "%5d  %7.4f %7.4f %7.4f %7.4f\n", angles[a],
                    cells[a][0].rate(), cells[a][1].rate(), cells[a][2].rate(), angle_mean(a));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " mean  %7.4f %7.4f %7.4f %7.4f\n", covariate_mean(0),
                  covariate_mean(1), covariate_mean(2), overall_mean());
    out += buf;
    return out;
  }
};

// ---------------------------------------------------------------------------
// View features straight from corpus frames (first and last non-empty frame).

inline ViewFeatures view_features_for_record(const GaitRecord& rec, int threshold = 128) {
  if (rec.frames.size() < 2) throw EmptyInput();
  auto load_binary = [&](std::size_t i) -> std::optional<BinaryImage> {
    try {
      return binarize(read_gray_png(rec.frames[i]), threshold);
    } catch (const EmptySilhouette&) {
      return std::nullopt;
    }
  };
  std::optional<BinaryImage> first, last;
  std::size_t lo = 0, hi = rec.frames.size() - 1;
  while (lo < hi && !(first = load_binary(lo))) ++lo;
  while (hi > lo && !(last = load_binary(hi))) --hi;
  if (!first || !last) throw EmptySilhouette();
  std::vector<BinaryImage> pair;
  pair.push_back(std::move(*first));
  pair.push_back(std::move(*last));
  return extract_view_features(pair);
}

// ---------------------------------------------------------------------------
// Full evaluation: fit the view estimator on tuning subjects, train one
// recognition model per view on the evaluation gallery, route every probe
// through its estimated view, and tabulate CCR against the true view.

struct EvaluationConfig {
  ClassifyOpts classify{};
  int jobs = 1;
  int binarize_threshold = 128;
  fs::path cache_dir;   // empty: no on-disk model cache
  fs::path models_dir;  // empty: do not persist fitted models
};

struct EvaluationResult {
  CcrTable table;
  ViewEstimator estimator;
  int probes = 0;
  int view_correct = 0;  // probes routed to their true angle
  double view_accuracy() const { return probes > 0 ? static_cast<double>(view_correct) / probes : 0.0; }
};

namespace detail {

inline std::uint64_t model_cache_key(TemplateKind kind, int view, const RegionMask& mask,
                                     const std::vector<TemplateStore::Entry>& gallery,
                                     const ClassifyOpts& opts) {
  Fnv1a h;
  h.update_value(static_cast<std::uint8_t>(kind));
  h.update_value(view);
  h.update(mask.data(), mask.size());
  for (const auto& e : gallery) {
    h.update(e.subject);
    h.update_value(e.seq);
    h.update_value(static_cast<std::uint8_t>(e.covariate));
  }
  h.update_value(opts.variance_target);
  return h.digest();
}

}  // namespace detail

inline EvaluationResult evaluate_view_invariant(const TemplateStore& store,
                                                const std::vector<GaitRecord>& records,
                                                const SplitPlan& plan,
                                                const std::map<int, GtsHypothesis>& hypotheses,
                                                TemplateKind kind, const EvaluationConfig& config) {
  EvaluationResult result;

  // 1. View estimator from the tuning subjects (all covariates, all angles).
  std::vector<const GaitRecord*> tuning_records;
  for (const auto& r : records)
    if (plan.is_tuning(r.subject)) tuning_records.push_back(&r);
  std::vector<std::optional<std::pair<ViewFeatures, int>>> tuning_features(tuning_records.size());
  parallel_for(tuning_records.size(), config.jobs, [&](std::size_t i) {
    try {
      tuning_features[i] = {view_features_for_record(*tuning_records[i], config.binarize_threshold),
                            tuning_records[i]->view};
    } catch (const Error&) {
      // skip sequences without usable trajectories
    }
  });
  std::vector<std::pair<ViewFeatures, int>> labeled;
  for (auto& f : tuning_features)
    if (f) labeled.push_back(*f);
  result.estimator = fit_view_estimator(labeled);

  // 2. Estimate the view of every evaluation probe.
  std::map<std::tuple<std::string, int, int, int>, const TemplateStore::Entry*> by_id;
  for (const auto& e : store.entries())
    if (e.kind == kind)
      by_id[{e.subject, static_cast<int>(e.covariate), e.seq, e.view}] = &e;

  struct Probe {
    const GaitRecord* record;
    const TemplateStore::Entry* entry;
    int estimated_view = -1;
    std::string predicted;
  };
  std::vector<Probe> probes;
  for (const auto& r : records) {
    if (!plan.is_evaluation(r.subject) || !plan.is_probe(r.covariate, r.seq)) continue;
    const auto it = by_id.find({r.subject, static_cast<int>(r.covariate), r.seq, r.view});
    if (it == by_id.end()) continue;  // extraction failed for this sequence
    probes.push_back({&r, it->second});
  }
  parallel_for(probes.size(), config.jobs, [&](std::size_t i) {
    try {
      const auto f = view_features_for_record(*probes[i].record, config.binarize_threshold);
      probes[i].estimated_view = estimate_view(result.estimator, f);
    } catch (const Error&) {
      probes[i].estimated_view = 90;  // undecidable trajectory: fall back to sagittal
    }
  });

  // 3. Fit one model per view and classify the probes routed to it.
  std::vector<int> views;
  for (const auto& [view, h] : hypotheses) views.push_back(view);
  std::mutex io_mutex;
  parallel_for(views.size(), config.jobs, [&](std::size_t vi) {
    const int view = views[vi];
    std::vector<Probe*> routed;
    for (auto& p : probes)
      if (p.estimated_view == view) routed.push_back(&p);
    if (routed.empty()) return;

    std::vector<TemplateStore::Entry> gallery_entries;
    for (const auto& e : store.entries())
      if (e.kind == kind && e.view == view && plan.is_evaluation(e.subject) &&
          plan.in_gallery(e.covariate, e.seq))
        gallery_entries.push_back(e);
    if (gallery_entries.empty()) throw EmptyGallery();

    const RegionMask mask = build_mask(hypotheses.at(view));
    const std::uint64_t key =
        detail::model_cache_key(kind, view, mask, gallery_entries, config.classify);

    RecognitionModel model;
    bool loaded = false;
    fs::path cache_file;
    if (!config.cache_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "%016llx.gtsm", static_cast<unsigned long long>(key));
      cache_file = config.cache_dir / name;
      if (fs::exists(cache_file)) {
        model = load_model(cache_file);
        loaded = true;
      }
    }
    if (!loaded) {
      std::vector<GaitTemplate> gallery;
      gallery.reserve(gallery_entries.size());
      for (const auto& e : gallery_entries) gallery.push_back(store.load(e));
      model = fit_recognition(gallery, mask, config.classify);
      if (!cache_file.empty()) {
        std::scoped_lock lock(io_mutex);
        fs::create_directories(config.cache_dir);
        save_model(cache_file, model);
      }
    }
    if (!config.models_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "view_%03d.gtsm", view);
      std::scoped_lock lock(io_mutex);
      fs::create_directories(config.models_dir);
      save_model(config.models_dir / name, model);
    }

    for (Probe* p : routed) {
      const GaitTemplate t = store.load(*p->entry);
      p->predicted = model.predict(t, config.classify);
    }
  });

  // 4. Tabulate against the true angle.
  std::set<int> angle_set;
  for (const auto& r : records) angle_set.insert(r.view);
  result.table.angles.assign(angle_set.begin(), angle_set.end());
  result.table.cells.assign(result.table.angles.size(), {});
  std::map<int, std::size_t> angle_index;
  for (std::size_t i = 0; i < result.table.angles.size(); ++i)
    angle_index[result.table.angles[i]] = i;

  for (const auto& p : probes) {
    auto& cell = result.table.cells[angle_index.at(p.record->view)][static_cast<int>(p.record->covariate)];
    cell.total++;
    if (p.predicted == p.record->subject) cell.correct++;
    result.probes++;
    if (p.estimated_view == p.record->view) result.view_correct++;
  }
  return result;
}

}  // namespace gts
