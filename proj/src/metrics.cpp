#include "selfplay/metrics.hpp"

#include "selfplay/version.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace selfplay {

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

double mean_solver_reward(const StepRecord& r) { return mean_of(r.solver_rewards); }

// A step whose per-sample rewards are all identical gives every sample an
// exactly-zero centered advantage: the update cannot tell any answer from
// another, so the step carries no differentiating policy gradient.
bool is_zero_advantage(const StepRecord& r) {
  for (double reward : r.solver_rewards)
    if (reward != r.solver_rewards.front()) return false;
  return true;
}

nlohmann::json decile_stats(const std::vector<StepRecord>& records, std::size_t begin,
                            std::size_t end, const SummaryParams& params) {
  std::vector<std::int64_t> histogram(params.n_bins, 0);
  std::vector<double> solver_means;
  std::vector<double> proposer_rewards;
  std::int64_t in_band = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& r = records[i];
    if (r.difficulty_bin >= 0 && r.difficulty_bin < params.n_bins) ++histogram[r.difficulty_bin];
    if (std::abs(r.entropy_nats - params.mu_h) <= params.sigma_h) ++in_band;
    solver_means.push_back(mean_solver_reward(r));
    proposer_rewards.push_back(r.proposer_reward);
  }
  const auto n = static_cast<double>(end - begin);
  nlohmann::json j;
  j["steps"] = end - begin;
  j["difficulty_histogram"] = histogram;
  j["mid_band_share"] = n > 0 ? static_cast<double>(in_band) / n : 0.0;
  j["mean_solver_reward"] = mean_of(solver_means);
  j["mean_proposer_reward"] = mean_of(proposer_rewards);
  return j;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

nlohmann::json step_record_to_json(const StepRecord& r) {
  nlohmann::json j;
  j["step"] = r.step;
  j["difficulty_bin"] = r.difficulty_bin;
  j["entropy_nats"] = r.entropy_nats;
  j["solver_rewards"] = r.solver_rewards;
  j["proposer_reward"] = r.proposer_reward;
  j["solver_kl"] = r.solver_kl;
  j["proposer_kl"] = r.proposer_kl;
  j["beta_solver"] = r.beta_solver;
  j["beta_proposer"] = r.beta_proposer;
  j["baseline_solver"] = r.baseline_solver;
  j["baseline_proposer"] = r.baseline_proposer;
  j["majority_fraction"] = r.majority_fraction;
  return j;
}

StepRecord step_record_from_json(const nlohmann::json& j) {
  StepRecord r;
  r.step = j.at("step").get<int>();
  r.difficulty_bin = j.at("difficulty_bin").get<int>();
  r.entropy_nats = j.at("entropy_nats").get<double>();
  r.solver_rewards = j.at("solver_rewards").get<std::vector<double>>();
  r.proposer_reward = j.at("proposer_reward").get<double>();
  r.solver_kl = j.at("solver_kl").get<double>();
  r.proposer_kl = j.at("proposer_kl").get<double>();
  r.beta_solver = j.at("beta_solver").get<double>();
  r.beta_proposer = j.at("beta_proposer").get<double>();
  r.baseline_solver = j.at("baseline_solver").get<double>();
  r.baseline_proposer = j.at("baseline_proposer").get<double>();
  r.majority_fraction = j.at("majority_fraction").get<double>();
  return r;
}

void write_steps_jsonl(const std::filesystem::path& path, const std::vector<StepRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto& r : records) out << step_record_to_json(r).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<StepRecord> read_steps_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<StepRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(step_record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

nlohmann::json summarize_records(const std::vector<StepRecord>& records,
                                 const SummaryParams& params) {
  nlohmann::json j;
  j["steps"] = records.size();
  j["entropy_band"] = {{"lo", params.mu_h - params.sigma_h}, {"hi", params.mu_h + params.sigma_h}};
  j["window_size"] = params.variance_window;

  std::vector<double> solver_means;
  std::vector<double> proposer_rewards;
  std::vector<double> entropies;
  std::int64_t zero_advantage = 0;
  for (const auto& r : records) {
    solver_means.push_back(mean_solver_reward(r));
    proposer_rewards.push_back(r.proposer_reward);
    entropies.push_back(r.entropy_nats);
    if (is_zero_advantage(r)) ++zero_advantage;
  }
  j["mean_solver_reward"] = mean_of(solver_means);
  j["mean_proposer_reward"] = mean_of(proposer_rewards);
  j["mean_entropy_nats"] = mean_of(entropies);
  j["zero_advantage_fraction"] =
      records.empty() ? 0.0 : static_cast<double>(zero_advantage) / records.size();

  // Stability metrics over fixed windows: local jitter (mean within-window
  // variance) and drift (variance across window means).
  std::vector<double> window_means;
  std::vector<double> window_variances;
  const int w = params.variance_window;
  for (std::size_t start = 0; start + w <= proposer_rewards.size(); start += w) {
    std::vector<double> window(proposer_rewards.begin() + start,
                               proposer_rewards.begin() + start + w);
    window_means.push_back(mean_of(window));
    window_variances.push_back(variance_of(window));
  }
  j["proposer_reward_within_window_variance"] = mean_of(window_variances);
  j["proposer_reward_across_window_variance"] = variance_of(window_means);

  const std::size_t decile = records.size() / 10;
  if (decile > 0) {
    j["first_decile"] = decile_stats(records, 0, decile, params);
    j["last_decile"] = decile_stats(records, records.size() - decile, records.size(), params);
  } else {
    j["first_decile"] = decile_stats(records, 0, records.size(), params);
    j["last_decile"] = decile_stats(records, 0, records.size(), params);
  }
  return j;
}

nlohmann::json make_manifest(const nlohmann::json& merged_config, std::uint64_t seed,
                             const std::vector<std::string>& output_files) {
  nlohmann::json j;
  j["artifact_version"] = kVersion;
  j["seed"] = seed;
  j["started_at"] = iso8601_now();
  j["finished_at"] = nullptr;
  j["outputs"] = output_files;
  j["config"] = merged_config;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace selfplay
