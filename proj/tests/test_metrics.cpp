#include "selfplay/metrics.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace selfplay;
namespace fs = std::filesystem;

namespace {

StepRecord make_record(int step, int bin, double entropy, std::vector<double> rewards,
                       double baseline) {
  StepRecord r;
  r.step = step;
  r.difficulty_bin = bin;
  r.entropy_nats = entropy;
  r.solver_rewards = std::move(rewards);
  r.proposer_reward = 0.5;
  r.solver_kl = 0.01;
  r.proposer_kl = 0.02;
  r.beta_solver = 0.05;
  r.beta_proposer = 0.05;
  r.baseline_solver = baseline;
  r.baseline_proposer = 0.4;
  r.majority_fraction = 0.6;
  return r;
}

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "selfplay_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("step records round-trip through JSON and JSONL") {
  const StepRecord r = make_record(3, 2, 0.91, {1.0, 0.5, 0.25}, 0.3);
  const auto j = step_record_to_json(r);
  const StepRecord back = step_record_from_json(j);
  CHECK(step_record_to_json(back).dump() == j.dump());

  // exactly the documented field set
  CHECK(j.size() == 12);
  for (const char* key :
       {"step", "difficulty_bin", "entropy_nats", "solver_rewards", "proposer_reward",
        "solver_kl", "proposer_kl", "beta_solver", "beta_proposer", "baseline_solver",
        "baseline_proposer", "majority_fraction"})
    CHECK(j.contains(key));

  const auto dir = temp_dir("jsonl");
  std::vector<StepRecord> records{r, make_record(4, 1, 0.2, {0.1}, 0.0)};
  write_steps_jsonl(dir / "steps.jsonl", records);
  const auto read_back = read_steps_jsonl(dir / "steps.jsonl");
  REQUIRE(read_back.size() == 2);
  for (std::size_t i = 0; i < records.size(); ++i)
    CHECK(step_record_to_json(read_back[i]).dump() == step_record_to_json(records[i]).dump());
}

TEST_CASE("summaries aggregate the documented metrics") {
  SummaryParams params;
  params.n_bins = 4;
  params.variance_window = 10;

  std::vector<StepRecord> records;
  for (int s = 1; s <= 100; ++s) {
    // first half easy bin 0 and out of band, second half bin 2 in band
    const bool late = s > 50;
    auto r = make_record(s, late ? 2 : 0, late ? 0.9 : 0.1, {0.5, 0.7}, 0.25);
    r.proposer_reward = late ? 0.9 : 0.2;
    records.push_back(r);
  }
  // one zero-advantage step: identical rewards cannot differentiate samples
  records[10] = make_record(11, 0, 0.1, {0.25, 0.25}, 0.3);
  records[10].proposer_reward = 0.2;  // keep the early-phase reward pattern

  const auto summary = summarize_records(records, params);
  CHECK(summary["steps"] == 100);
  CHECK(summary["zero_advantage_fraction"].get<double>() == doctest::Approx(0.01));
  CHECK(summary["first_decile"]["difficulty_histogram"][0] == 10);
  CHECK(summary["last_decile"]["difficulty_histogram"][2] == 10);
  CHECK(summary["first_decile"]["mid_band_share"].get<double>() == doctest::Approx(0.0));
  CHECK(summary["last_decile"]["mid_band_share"].get<double>() == doctest::Approx(1.0));
  CHECK(summary["mean_proposer_reward"].get<double>() ==
        doctest::Approx(0.5 * 0.2 + 0.5 * 0.9).epsilon(1e-9));
  // flat windows: no within-window jitter except the boundary window
  CHECK(summary["proposer_reward_within_window_variance"].get<double>() <
        summary["proposer_reward_across_window_variance"].get<double>());
}

TEST_CASE("zero-advantage detection is exact reward equality") {
  SummaryParams params;
  std::vector<StepRecord> records{
      make_record(1, 0, 0.0, {1.0, 1.0, 1.0}, 0.4),              // zero advantage
      make_record(2, 0, 0.0, {1.0, 1.0, 0.9999999999}, 0.4),     // close is not zero
  };
  const auto summary = summarize_records(records, params);
  CHECK(summary["zero_advantage_fraction"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("manifest carries version, seed, and the config snapshot") {
  nlohmann::json config{{"steps", 10}};
  const auto manifest = make_manifest(config, 42, {"steps.jsonl"});
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config"]["steps"] == 10);
  CHECK(manifest["finished_at"].is_null());
  CHECK(manifest.contains("started_at"));
  CHECK(manifest.contains("artifact_version"));
}
