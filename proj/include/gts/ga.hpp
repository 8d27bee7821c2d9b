#pragma once

#include <functional>
#include <map>
#include <tuple>
#include <utility>

#include "gts/recognition.hpp"

namespace gts {

struct GaConfig {
  int population = 20;
  int generations = 15;
  double crossover_prob = 0.6;
  double mutation_prob = 0.03;
  std::uint64_t seed = 0;
  SplitBounds bounds{};
};

struct FitnessReport {
  double ccr_a = 0;  // normal walk
  double ccr_b = 0;  // carrying a bag
  double ccr_c = 0;  // wearing a coat
  double fitness = 0;
};

// F = (CCR_A/2 + CCR_B/6 + CCR_C/3)^2. Normal walk carries the most weight,
// clothing the next, so the optimizer cannot trade normal-walk accuracy away.
inline double fitness_score(double ccr_a, double ccr_b, double ccr_c) {
  const double s = ccr_a / 2.0 + ccr_b / 6.0 + ccr_c / 3.0;
  return s * s;
}

// ---------------------------------------------------------------------------
// Variation operators

inline std::pair<Chromosome, Chromosome> crossover_with_mask(const Chromosome& a, const Chromosome& b,
                                                             const std::array<std::uint8_t, kChromosomeBits>& swap) {
  Chromosome c1 = a, c2 = b;
  for (int i = 0; i < kChromosomeBits; ++i)
    if (swap[i]) std::swap(c1.bits[i], c2.bits[i]);
  return {c1, c2};
}

// With probability `crossover_prob` the pair exchanges each bit position
// independently with probability 1/2; otherwise the offspring are copies.
inline std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                           double crossover_prob, Rng& rng) {
  if (!rng.bernoulli(crossover_prob)) return {a, b};
  std::array<std::uint8_t, kChromosomeBits> swap{};
  for (auto& s : swap) s = rng.bernoulli(0.5) ? 1 : 0;
  return crossover_with_mask(a, b, swap);
}

inline Chromosome mutate(const Chromosome& c, double mutation_prob, Rng& rng) {
  Chromosome out = c;
  for (auto& bit : out.bits)
    if (rng.bernoulli(mutation_prob)) bit ^= 1;
  return out;
}

// ---------------------------------------------------------------------------
// Elitist generational GA

struct EvolveResult {
  Chromosome best;
  double best_fitness = 0;
  std::vector<Chromosome> generation_best;       // per generation
  std::vector<double> generation_best_fitness;
};

// Fitness-proportionate pick with windowing: selection weight is the margin
// over the generation minimum, which keeps the pressure meaningful when the
// population has drifted into a narrow fitness band. A flat generation falls
// back to a uniform draw so the GA can leave plateaus.
inline int roulette_pick(const std::vector<double>& fitness, Rng& rng) {
  const double floor = *std::min_element(fitness.begin(), fitness.end());
  double total = 0;
  for (double f : fitness) total += f - floor;
  if (total <= 0) return static_cast<int>(rng.below(fitness.size()));
  const double u = rng.real01() * total;
  double acc = 0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    acc += fitness[i] - floor;
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(fitness.size()) - 1;
}

// Evolve `config.population` chromosomes for `config.generations`
// generations. The best individual of each generation is copied unchanged
// into the next; the remaining slots are filled by roulette-selected parent
// pairs passed through uniform crossover and mutation. All random draws come
// from one seeded stream in a fixed order, so runs are reproducible.
inline EvolveResult evolve(const GaConfig& config, const std::function<double(const Chromosome&)>& fitness_fn) {
  if (config.population < 2 || config.population % 2 != 0)
    throw std::invalid_argument("evolve: population must be even and >= 2");
  Rng rng(config.seed);

  std::vector<Chromosome> pop(config.population);
  for (auto& c : pop) c = Chromosome::random(rng);

  EvolveResult result;
  std::vector<double> fitness(config.population);
  for (int gen = 0; gen < config.generations; ++gen) {
    for (int i = 0; i < config.population; ++i) fitness[i] = fitness_fn(pop[i]);

    int elite = 0;
    for (int i = 1; i < config.population; ++i)
      if (fitness[i] > fitness[elite]) elite = i;  // ties keep the lower index

    result.generation_best.push_back(pop[elite]);
    result.generation_best_fitness.push_back(fitness[elite]);
    if (fitness[elite] > result.best_fitness || gen == 0) {
      result.best = pop[elite];
      result.best_fitness = fitness[elite];
    }

    if (gen + 1 == config.generations) break;

    std::vector<Chromosome> next;
    next.reserve(config.population);
    next.push_back(pop[elite]);
    while (static_cast<int>(next.size()) < config.population) {
      const Chromosome& pa = pop[roulette_pick(fitness, rng)];
      const Chromosome& pb = pop[roulette_pick(fitness, rng)];
      auto [c1, c2] = uniform_crossover(pa, pb, config.crossover_prob, rng);
      next.push_back(mutate(c1, config.mutation_prob, rng));
      if (static_cast<int>(next.size()) < config.population)
        next.push_back(mutate(c2, config.mutation_prob, rng));
    }
    pop = std::move(next);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Post-GA refinement: exhaustive scan of s_f at fixed s_h, then of s_h at the
// refined s_f. Only strict improvements move the incumbent, so the returned
// fitness is never below the input and the scan is a fixed point at a grid
// optimum. Splits whose adjacent regions are all excluded are left alone.

inline GtsHypothesis sequential_refine(const GtsHypothesis& start, const SplitBounds& bounds,
                                       const std::function<double(const GtsHypothesis&)>& fitness_fn) {
  GtsHypothesis best = start;
  double best_f = fitness_fn(best);

  if (best.w_f || best.w_l || best.w_r) {
    for (int s = bounds.leg_min; s <= bounds.leg_max; ++s) {
      GtsHypothesis h = best;
      h.s_f = s;
      const double f = fitness_fn(h);
      if (f > best_f) {
        best_f = f;
        best = h;
      }
    }
  }
  if (best.w_h || best.w_l || best.w_r) {
    for (int s = bounds.head_min; s <= bounds.head_max; ++s) {
      GtsHypothesis h = best;
      h.s_h = s;
      const double f = fitness_fn(h);
      if (f > best_f) {
        best_f = f;
        best = h;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Tuning-set fitness: mask the gallery, train the per-view classifier, score
// covariate CCRs on the masked probes.

struct TuningSet {
  std::vector<GaitTemplate> gallery;   // normal walk, training instances
  std::vector<GaitTemplate> probes_a;  // normal walk, held-out instances
  std::vector<GaitTemplate> probes_b;  // bag
  std::vector<GaitTemplate> probes_c;  // coat
};

class FitnessEvaluator {
 public:
  explicit FitnessEvaluator(const TuningSet& tuning, ClassifyOpts opts = {})
      : tuning_(tuning), opts_(opts) {
    if (tuning_.gallery.empty()) throw InsufficientTuningData("tuning gallery is empty");
    if (tuning_.probes_a.empty()) throw InsufficientTuningData("no normal-walk probes in tuning set");
    if (tuning_.probes_b.empty()) throw InsufficientTuningData("no bag probes in tuning set");
    if (tuning_.probes_c.empty()) throw InsufficientTuningData("no coat probes in tuning set");
  }

  FitnessReport evaluate(const GtsHypothesis& h) {
    const auto key = cache_key(h);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    FitnessReport report;
    const RegionMask mask = build_mask(h);
    const RecognitionModel model = fit_recognition(tuning_.gallery, mask, opts_);
    if (model.no_features) {
      report = FitnessReport{0, 0, 0, 0};
    } else {
      report.ccr_a = score(model, tuning_.probes_a);
      report.ccr_b = score(model, tuning_.probes_b);
      report.ccr_c = score(model, tuning_.probes_c);
      report.fitness = fitness_score(report.ccr_a, report.ccr_b, report.ccr_c);
    }
    cache_.emplace(key, report);
    return report;
  }

  FitnessReport evaluate(const Chromosome& c, const SplitBounds& bounds) {
    return evaluate(decode(c, bounds));
  }

  std::size_t cache_size() const { return cache_.size(); }

 private:
  // Keyed by the decoded hypothesis (decode is many-to-one) with s_m dropped
  // when both midsections are excluded, since the mask does not depend on it.
  using Key = std::tuple<int, int, int, bool, bool, bool, bool>;
  static Key cache_key(const GtsHypothesis& h) {
    const int s_m = (h.w_l || h.w_r) ? h.s_m : 0;
    return {h.s_h, s_m, h.s_f, h.w_h, h.w_l, h.w_r, h.w_f};
  }

  double score(const RecognitionModel& model, const std::vector<GaitTemplate>& probes) const {
    int correct = 0;
    for (const auto& p : probes)
      if (model.predict(p, opts_) == p.subject) ++correct;
    return static_cast<double>(correct) / static_cast<double>(probes.size());
  }

  TuningSet tuning_;
  ClassifyOpts opts_;
  std::map<Key, FitnessReport> cache_;
};

// ---------------------------------------------------------------------------
// One view's full tuning run: GA then sequential refinement.

struct TuneResult {
  GtsHypothesis best;
  FitnessReport best_report;
  std::vector<Chromosome> generation_best;
  std::vector<FitnessReport> history;
};

inline TuneResult tune_view(const TuningSet& tuning, const GaConfig& config, ClassifyOpts opts = {}) {
  FitnessEvaluator evaluator(tuning, opts);
  const auto ga = evolve(config, [&](const Chromosome& c) { return evaluator.evaluate(c, config.bounds).fitness; });

  TuneResult result;
  result.generation_best = ga.generation_best;
  for (const auto& c : ga.generation_best) result.history.push_back(evaluator.evaluate(c, config.bounds));

  const GtsHypothesis seed_h = decode(ga.best, config.bounds);
  result.best = sequential_refine(seed_h, config.bounds,
                                  [&](const GtsHypothesis& h) { return evaluator.evaluate(h).fitness; });
  result.best_report = evaluator.evaluate(result.best);
  return result;
}

}  // namespace gts
