// CLI subcommand implementations, kept in the library so tests can drive
// them directly. Each returns a process exit status and reports problems on
// the error stream.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace selfplay {

struct CommonOptions {
  std::optional<std::string> config_path;  // defaults apply when absent
  std::string out_dir = "out";
  std::vector<std::string> overrides;      // KEY=VALUE, dotted keys
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const CommonOptions& options, std::ostream& err);

struct LandscapeOptions {
  std::optional<std::string> config_path;  // seeds the defaults below
  std::vector<std::string> overrides;
  std::optional<int> n_answers;
  std::optional<int> categories;           // default 1 + n_distractors
  std::optional<double> gamma;
  std::optional<double> mu_h;
  std::optional<double> sigma_h;
  std::string out_csv = "landscape.csv";
};

int cmd_reward_landscape(const LandscapeOptions& options, std::ostream& err);

struct CompareOptions {
  CommonOptions common;
  std::vector<std::uint64_t> seeds;
};

int cmd_compare(const CompareOptions& options, std::ostream& err);

struct ScoreBackendOptions {
  CommonOptions common;
  std::vector<std::string> images;              // explicit refs
  std::optional<std::string> images_file;       // one ref per line
  std::optional<std::string> fixtures_path;     // offline replay
  std::optional<std::string> record_path;       // record live traffic
};

int cmd_score_backend(const ScoreBackendOptions& options, std::ostream& err);

struct ReanalyzeOptions {
  std::string in_jsonl;
  std::string out_summary = "summary.json";
  std::optional<std::string> config_path;  // band/bins source; defaults otherwise
  std::vector<std::string> overrides;
};

int cmd_reanalyze(const ReanalyzeOptions& options, std::ostream& err);

}  // namespace selfplay
