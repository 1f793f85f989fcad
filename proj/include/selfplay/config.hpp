// Run configuration: JSON file parsing, --override KEY=VALUE merging
// (last wins), defaults, and validation. Key names mirror the trainer,
// world, and backend structs one-to-one.
#pragma once

#include "selfplay/backend.hpp"
#include "selfplay/sim_env.hpp"
#include "selfplay/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>

namespace selfplay {

struct WorldConfig {
  int n_bins = 8;
  int n_distractors = 3;
  double solver_skill = 0.0;
  double difficulty_span = 4.0;                     // grid = skill +/- span
  std::optional<std::vector<double>> bin_difficulty;  // explicit grid wins
  int words_lo = 3;
  int words_hi = 3;
};

SimWorld build_world(const WorldConfig& config, int n_answers);

struct FullConfig {
  TrainerConfig trainer;
  WorldConfig world;
  BackendConfig backend;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The built-in defaults, as a config document.
nlohmann::json default_config_json();

// Strict parse: unknown keys anywhere are rejected.
FullConfig parse_config(const nlohmann::json& j);

// Serializes back to the exact document shape parse_config accepts.
nlohmann::json config_to_json(const FullConfig& config);

// Defaults <- optional file <- overrides <- optional seed flag, in that
// order ("last wins"). Overrides use dotted keys, e.g. world.n_bins=16;
// values parse as JSON where possible and fall back to strings.
nlohmann::json merge_config(const std::optional<std::filesystem::path>& config_path,
                            std::span<const std::string> overrides,
                            std::optional<std::uint64_t> seed_override);

}  // namespace selfplay
