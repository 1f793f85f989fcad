#include "selfplay/commands.hpp"

#include "selfplay/backend.hpp"
#include "selfplay/config.hpp"
#include "selfplay/metrics.hpp"
#include "selfplay/sim_env.hpp"
#include "selfplay/trainer.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace selfplay {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<fs::path> to_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fs::path(*s);
}

SummaryParams summary_params_for(const FullConfig& config) {
  SummaryParams params;
  params.mu_h = config.trainer.proposer_params.mu_h;
  params.sigma_h = config.trainer.proposer_params.sigma_h;
  params.n_bins = config.world.bin_difficulty
                      ? static_cast<int>(config.world.bin_difficulty->size())
                      : config.world.n_bins;
  return params;
}

struct LoadedConfig {
  nlohmann::json merged;
  FullConfig config;
};

LoadedConfig load(const CommonOptions& options) {
  LoadedConfig loaded;
  loaded.merged = merge_config(to_path(options.config_path), options.overrides, options.seed);
  loaded.config = parse_config(loaded.merged);
  return loaded;
}

nlohmann::json run_summary(const RunResult& result, const FullConfig& config) {
  return summarize_records(result.records, summary_params_for(config));
}

// Per-run block of the comparison summary. final_solver_skill comes from the
// run itself; everything else is recomputable from the step log.
nlohmann::json compare_run_stats(const RunResult& result, const FullConfig& config) {
  nlohmann::json summary = run_summary(result, config);
  nlohmann::json j;
  j["zero_advantage_fraction"] = summary["zero_advantage_fraction"];
  j["proposer_reward_within_window_variance"] =
      summary["proposer_reward_within_window_variance"];
  j["proposer_reward_across_window_variance"] =
      summary["proposer_reward_across_window_variance"];
  j["mean_solver_reward"] = summary["mean_solver_reward"];
  j["mean_proposer_reward"] = summary["mean_proposer_reward"];
  j["final_solver_skill"] = result.final_world.solver_skill;
  return j;
}

}  // namespace

int cmd_simulate(const CommonOptions& options, std::ostream& err) {
  try {
    const LoadedConfig loaded = load(options);
    const fs::path out(options.out_dir);
    fs::create_directories(out);

    write_json(out / "manifest.json",
               make_manifest(loaded.merged, loaded.config.trainer.seed,
                             {"steps.jsonl", "summary.json"}));

    const SimWorld world = build_world(loaded.config.world, loaded.config.trainer.n_answers);
    const RunResult result = run(loaded.config.trainer, world);

    write_steps_jsonl(out / "steps.jsonl", result.records);
    write_json(out / "summary.json", run_summary(result, loaded.config));
    return 0;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return 1;
  }
}

int cmd_reward_landscape(const LandscapeOptions& options, std::ostream& err) {
  try {
    const nlohmann::json merged =
        merge_config(to_path(options.config_path), options.overrides, std::nullopt);
    const FullConfig config = parse_config(merged);

    const int n = options.n_answers.value_or(config.trainer.n_answers);
    const int categories = options.categories.value_or(config.world.n_distractors + 1);
    const double gamma = options.gamma.value_or(config.trainer.solver_params.gamma);
    ProposerRewardParams proposer_params = config.trainer.proposer_params;
    if (options.mu_h) proposer_params.mu_h = *options.mu_h;
    if (options.sigma_h) proposer_params.sigma_h = *options.sigma_h;

    const auto rows = reward_landscape(n, categories, gamma, proposer_params);

    const fs::path out_csv(options.out_csv);
    if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + options.out_csv);
    out << "composition,entropy_nats,solver_continuous_mean,solver_discrete_mean,"
           "proposer_reward\n";
    for (const auto& row : rows) {
      std::string composition;
      for (std::size_t k = 0; k < row.counts.size(); ++k) {
        if (k > 0) composition += '-';
        composition += std::to_string(row.counts[k]);
      }
      out << composition << ',' << format_double(row.entropy_nats) << ','
          << format_double(row.solver_continuous_mean) << ','
          << format_double(row.solver_discrete_mean) << ','
          << format_double(row.proposer_reward) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + options.out_csv);
    return 0;
  } catch (const std::exception& e) {
    err << "reward-landscape: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const CompareOptions& options, std::ostream& err) {
  try {
    if (options.seeds.empty()) throw ConfigError("compare needs at least one --seeds value");
    const LoadedConfig base = load(options.common);  // validate before any run
    const fs::path out(options.common.out_dir);
    fs::create_directories(out);
    write_json(out / "manifest.json",
               make_manifest(base.merged, options.seeds.front(), {"compare_summary.json"}));

    nlohmann::json per_seed = nlohmann::json::array();
    double cont_zero = 0.0, disc_zero = 0.0;
    double cont_jitter = 0.0, disc_jitter = 0.0;

    for (const std::uint64_t seed : options.seeds) {
      nlohmann::json entry;
      entry["seed"] = seed;
      for (const std::string kind : {"continuous", "discrete"}) {
        CommonOptions variant = options.common;
        variant.seed = seed;
        variant.overrides.push_back("solver_reward_kind=" + kind);
        const LoadedConfig loaded = load(variant);

        const SimWorld world = build_world(loaded.config.world, loaded.config.trainer.n_answers);
        const RunResult result = run(loaded.config.trainer, world);
        const std::string stem = kind + "_seed" + std::to_string(seed);
        write_steps_jsonl(out / (stem + "_steps.jsonl"), result.records);

        const nlohmann::json stats = compare_run_stats(result, loaded.config);
        entry[kind] = stats;
        if (kind == "continuous") {
          cont_zero += stats["zero_advantage_fraction"].get<double>();
          cont_jitter += stats["proposer_reward_within_window_variance"].get<double>();
        } else {
          disc_zero += stats["zero_advantage_fraction"].get<double>();
          disc_jitter += stats["proposer_reward_within_window_variance"].get<double>();
        }
      }
      per_seed.push_back(entry);
    }

    const auto n = static_cast<double>(options.seeds.size());
    nlohmann::json summary;
    summary["seeds"] = options.seeds;
    summary["per_seed"] = per_seed;
    summary["aggregate"] = {
        {"continuous",
         {{"zero_advantage_fraction", cont_zero / n},
          {"proposer_reward_within_window_variance", cont_jitter / n}}},
        {"discrete",
         {{"zero_advantage_fraction", disc_zero / n},
          {"proposer_reward_within_window_variance", disc_jitter / n}}},
    };
    write_json(out / "compare_summary.json", summary);
    return 0;
  } catch (const std::exception& e) {
    err << "compare: " << e.what() << "\n";
    return 1;
  }
}

int cmd_score_backend(const ScoreBackendOptions& options, std::ostream& err) {
  try {
    const LoadedConfig loaded = load(options.common);
    const bool fixture_mode = options.fixtures_path.has_value();
    validate(loaded.config.backend, /*remote=*/!fixture_mode);

    std::vector<std::string> images = options.images;
    if (options.images_file) {
      std::ifstream in(*options.images_file);
      if (!in) throw std::runtime_error("cannot open image list: " + *options.images_file);
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) images.push_back(line);
    }
    if (images.empty()) throw ConfigError("score-backend needs at least one image reference");

    std::unique_ptr<Transport> base;
    if (fixture_mode) {
      base = std::make_unique<FixtureTransport>(
          FixtureTransport::from_file(*options.fixtures_path));
    } else {
      base = std::make_unique<HttpTransport>(loaded.config.backend);
    }
    std::unique_ptr<RecordingTransport> recorder;
    Transport* transport = base.get();
    if (options.record_path) {
      recorder = std::make_unique<RecordingTransport>(*base);
      transport = recorder.get();
    }

    const fs::path out(options.common.out_dir);
    fs::create_directories(out);
    write_json(out / "manifest.json",
               make_manifest(loaded.merged, loaded.config.trainer.seed,
                             {"steps.jsonl", "summary.json"}));

    std::ofstream steps(out / "steps.jsonl", std::ios::binary);
    if (!steps) throw std::runtime_error("cannot open steps.jsonl for writing");

    std::vector<StepRecord> records;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const BackendRound round =
          score_round(*transport, images[i], loaded.config.backend,
                      loaded.config.trainer.solver_params, loaded.config.trainer.proposer_params,
                      static_cast<int>(i + 1));
      steps << backend_round_to_json(round).dump() << '\n';
      records.push_back(round.record);
    }
    steps.close();

    SummaryParams params = summary_params_for(loaded.config);
    params.n_bins = 0;  // no difficulty bins in backend rounds
    write_json(out / "summary.json", summarize_records(records, params));
    if (recorder) recorder->save(*options.record_path);
    return 0;
  } catch (const std::exception& e) {
    err << "score-backend: " << e.what() << "\n";
    return 1;
  }
}

int cmd_reanalyze(const ReanalyzeOptions& options, std::ostream& err) {
  try {
    const nlohmann::json merged =
        merge_config(to_path(options.config_path), options.overrides, std::nullopt);
    const FullConfig config = parse_config(merged);

    const auto records = read_steps_jsonl(options.in_jsonl);
    const fs::path out_path(options.out_summary);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_json(out_path, summarize_records(records, summary_params_for(config)));
    return 0;
  } catch (const std::exception& e) {
    err << "reanalyze: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace selfplay
