// selfplay CLI: simulator runs, reward-landscape sweeps, paired
// discrete-vs-continuous comparisons, backend scoring, and offline
// re-analysis of step logs.
#include "selfplay/commands.hpp"
#include "selfplay/version.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* cmd, selfplay::CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "Config file (JSON); defaults when omitted");
  cmd->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", options.seed, "Seed override");
  cmd->add_option("--override", options.overrides,
                  "Config override KEY=VALUE (dotted keys, repeatable, last wins)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proposer-solver self-consistency training simulator"};
  app.set_version_flag("--version", selfplay::kVersion);
  app.require_subcommand(1);

  selfplay::CommonOptions simulate_options;
  auto* simulate = app.add_subcommand("simulate", "Run the training loop and log every step");
  add_common(simulate, simulate_options);

  selfplay::LandscapeOptions landscape_options;
  auto* landscape = app.add_subcommand(
      "reward-landscape", "Export per-composition rewards for all outcome compositions");
  landscape->add_option("--config", landscape_options.config_path, "Config file (JSON)");
  landscape->add_option("--override", landscape_options.overrides,
                        "Config override KEY=VALUE (repeatable)");
  landscape->add_option("--n", landscape_options.n_answers, "Samples per question (N)");
  landscape->add_option("--categories", landscape_options.categories, "Answer categories (A)");
  landscape->add_option("--gamma", landscape_options.gamma, "Solver softness exponent");
  landscape->add_option("--mu", landscape_options.mu_h, "Entropy band center (nats)");
  landscape->add_option("--sigma", landscape_options.sigma_h, "Entropy band width (nats)");
  landscape->add_option("--out", landscape_options.out_csv, "Output CSV path")
      ->capture_default_str();

  selfplay::CompareOptions compare_options;
  auto* compare = app.add_subcommand(
      "compare", "Paired discrete-vs-continuous solver reward runs on shared seeds");
  add_common(compare, compare_options.common);
  compare->add_option("--seeds", compare_options.seeds, "Seed list (repeatable)")->required();

  selfplay::ScoreBackendOptions backend_options;
  auto* backend = app.add_subcommand(
      "score-backend", "Score propose-solve rounds against a chat-completions endpoint");
  add_common(backend, backend_options.common);
  backend->add_option("--image", backend_options.images, "Image reference (repeatable)");
  backend->add_option("--images", backend_options.images_file, "File with one image ref per line");
  backend->add_option("--fixtures", backend_options.fixtures_path,
                      "Replay a recorded fixture instead of calling the endpoint");
  backend->add_option("--record", backend_options.record_path,
                      "Record live traffic to this fixture file");

  selfplay::ReanalyzeOptions reanalyze_options;
  auto* reanalyze =
      app.add_subcommand("reanalyze", "Recompute a summary.json from an existing steps.jsonl");
  reanalyze->add_option("--in", reanalyze_options.in_jsonl, "Input steps.jsonl")->required();
  reanalyze->add_option("--out", reanalyze_options.out_summary, "Output summary path")
      ->capture_default_str();
  reanalyze->add_option("--config", reanalyze_options.config_path,
                        "Config file for the entropy band and bin count");
  reanalyze->add_option("--override", reanalyze_options.overrides,
                        "Config override KEY=VALUE (repeatable)");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return selfplay::cmd_simulate(simulate_options, std::cerr);
  if (landscape->parsed()) return selfplay::cmd_reward_landscape(landscape_options, std::cerr);
  if (compare->parsed()) return selfplay::cmd_compare(compare_options, std::cerr);
  if (backend->parsed()) return selfplay::cmd_score_backend(backend_options, std::cerr);
  if (reanalyze->parsed()) return selfplay::cmd_reanalyze(reanalyze_options, std::cerr);
  return 1;
}
