// gts: view-invariant gait recognition with GA-optimized template masks.
//
// Subcommands: extract, tune, evaluate, synth, estimate-view.

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "gts/pipeline.hpp"

namespace {

struct CliOptions {
  gts::RunConfig run;
  std::string template_name = "gei";
  int knn_k = 0;  // 0 = Bayes' rule
};

void add_common(CLI::App* cmd, CliOptions& opts) {
  cmd->set_config("--config");
  cmd->add_option("--template", opts.template_name, "gait template kind: gei, geni or aei")
      ->check(CLI::IsMember({"gei", "geni", "aei"}));
  cmd->add_option("--seed", opts.run.seed, "master seed for every random draw");
  cmd->add_option("--jobs", opts.run.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--tuning-size", opts.run.tuning_size, "subjects held out for tuning")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", opts.run.binarize_threshold, "binarization threshold")
      ->check(CLI::Range(1, 255));
}

gts::TemplateKind parse_kind(const std::string& name) {
  if (name == "gei") return gts::TemplateKind::Gei;
  if (name == "geni") return gts::TemplateKind::Geni;
  return gts::TemplateKind::Aei;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"view-invariant gait recognition via genetic template segmentation"};
  app.require_subcommand(1);

  CliOptions opts;
  opts.run.jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* extract = app.add_subcommand("extract", "collate gait templates from a silhouette corpus");
  extract->add_option("--corpus", opts.run.corpus, "corpus root directory")->required();
  extract->add_option("--out", opts.run.out, "output directory")->required();
  extract->add_flag("--png", opts.run.export_png, "also export templates as PNG");
  add_common(extract, opts);

  auto* tune = app.add_subcommand("tune", "optimize per-view region masks on the tuning subjects");
  tune->add_option("--out", opts.run.out, "output directory holding templates/")->required();
  tune->add_option("--population", opts.run.population, "GA population size")
      ->check(CLI::PositiveNumber);
  tune->add_option("--generations", opts.run.generations, "GA generations")
      ->check(CLI::PositiveNumber);
  tune->add_option("--crossover", opts.run.crossover_prob, "uniform crossover probability")
      ->check(CLI::Range(0.0, 1.0));
  tune->add_option("--mutation", opts.run.mutation_prob, "per-bit mutation probability")
      ->check(CLI::Range(0.0, 1.0));
  add_common(tune, opts);

  auto* evaluate = app.add_subcommand("evaluate", "view-routed identification over the evaluation set");
  evaluate->add_option("--corpus", opts.run.corpus, "corpus root directory")->required();
  evaluate->add_option("--out", opts.run.out, "output directory holding templates/")->required();
  evaluate->add_option("--hypotheses", opts.run.hypotheses_file,
                       "hypothesis file (default: <out>/hypotheses.txt)");
  evaluate->add_option("--knn", opts.knn_k, "classify with kNN at the given k instead of Bayes' rule")
      ->check(CLI::PositiveNumber);
  add_common(evaluate, opts);

  gts::SynthCorpusConfig synth_config;
  auto* synth = app.add_subcommand("synth", "generate a synthetic walker corpus");
  synth->add_option("--out", opts.run.out, "corpus output directory")->required();
  synth->add_option("--subjects", synth_config.subjects, "number of subjects")
      ->check(CLI::PositiveNumber);
  synth->add_option("--normal", synth_config.normal_seqs, "normal-walk sequences per subject-view");
  synth->add_option("--bag", synth_config.bag_seqs, "bag sequences per subject-view");
  synth->add_option("--coat", synth_config.coat_seqs, "coat sequences per subject-view");
  synth->add_option("--angles", synth_config.angles, "view angles to render")
      ->delimiter(',');
  synth->add_option("--seed", opts.run.seed, "corpus seed");
  synth->add_option("--jobs", opts.run.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* estimate = app.add_subcommand("estimate-view", "fit and score the view estimator");
  estimate->add_option("--corpus", opts.run.corpus, "corpus root directory")->required();
  estimate->add_option("--out", opts.run.out, "output directory")->required();
  add_common(estimate, opts);

  CLI11_PARSE(app, argc, argv);

  opts.run.kind = parse_kind(opts.template_name);
  if (opts.knn_k > 0) {
    opts.run.classify.use_knn = true;
    opts.run.classify.k = opts.knn_k;
  }

  try {
    if (app.got_subcommand(extract)) {
      const auto summary = gts::run_extract(opts.run);
      std::printf("extracted %zu templates (%zu skipped, %zu malformed names)\n", summary.written,
                  summary.failures.size(), summary.malformed.size());
      if (summary.written == 0) {
        std::fprintf(stderr, "error: no sequence yielded a template\n");
        return 1;
      }
    } else if (app.got_subcommand(tune)) {
      const auto summary = gts::run_tune(opts.run);
      for (const auto& [view, report] : summary.reports)
        std::printf("view %3d: fitness %.4f (ccr %.3f/%.3f/%.3f) %s\n", view, report.fitness,
                    report.ccr_a, report.ccr_b, report.ccr_c,
                    gts::hypothesis_line(view, summary.hypotheses.at(view)).c_str());
    } else if (app.got_subcommand(evaluate)) {
      const auto result = gts::run_evaluate(opts.run);
      std::fputs(result.table.to_text().c_str(), stdout);
      std::printf("view routing accuracy: %.4f over %d probes\n", result.view_accuracy(),
                  result.probes);
    } else if (app.got_subcommand(synth)) {
      synth_config.seed = opts.run.seed;
      const auto manifest = gts::run_synth(synth_config, opts.run.out, opts.run.jobs);
      std::printf("wrote %zu sequences under %s\n", manifest.size(), opts.run.out.string().c_str());
    } else if (app.got_subcommand(estimate)) {
      const auto summary = gts::run_estimate_view(opts.run);
      for (const auto& [angle, cell] : summary.per_angle)
        std::printf("angle %3d: %3d/%3d\n", angle, cell.correct, cell.total);
      std::printf("view estimation accuracy: %.4f over %d sequences\n", summary.accuracy(),
                  summary.total);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
