#include "selfplay/config.hpp"

#include "selfplay/metrics.hpp"

#include <cstdlib>
#include <set>

namespace selfplay {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                         const std::string& scope) {
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      throw ConfigError("unknown config key: " + (scope.empty() ? key : scope + "." + key));
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key has the wrong type: ") + key);
  }
}

SolverRewardKind parse_reward_kind(const std::string& s) {
  if (s == "continuous") return SolverRewardKind::kContinuous;
  if (s == "discrete") return SolverRewardKind::kDiscrete;
  throw ConfigError("solver_reward_kind must be \"continuous\" or \"discrete\"");
}

ProposerBufferMode parse_buffer_mode(const std::string& s) {
  if (s == "mean") return ProposerBufferMode::kMeanOfPeriod;
  if (s == "latest") return ProposerBufferMode::kLatestOnly;
  throw ConfigError("proposer_buffer_mode must be \"mean\" or \"latest\"");
}

SolverUpdateMode parse_update_mode(const std::string& s) {
  if (s == "aggregate") return SolverUpdateMode::kAggregate;
  if (s == "sequential") return SolverUpdateMode::kSequential;
  throw ConfigError("solver_update_mode must be \"aggregate\" or \"sequential\"");
}

KlController parse_kl(const nlohmann::json& j, const KlController& defaults,
                      const std::string& scope) {
  reject_unknown_keys(j, {"beta", "eta", "target", "beta_min", "beta_max"}, scope);
  KlController c = defaults;
  read(j, "beta", c.beta);
  read(j, "eta", c.eta);
  read(j, "target", c.target);
  read(j, "beta_min", c.beta_min);
  read(j, "beta_max", c.beta_max);
  return c;
}

nlohmann::json kl_to_json(const KlController& c) {
  return {{"beta", c.beta}, {"eta", c.eta},      {"target", c.target},
          {"beta_min", c.beta_min}, {"beta_max", c.beta_max}};
}

}  // namespace

SimWorld build_world(const WorldConfig& config, int n_answers) {
  SimWorld world;
  if (config.bin_difficulty) {
    world.n_bins = static_cast<int>(config.bin_difficulty->size());
    world.bin_difficulty =
        Eigen::Map<const Vector>(config.bin_difficulty->data(),
                                 static_cast<Eigen::Index>(config.bin_difficulty->size()));
    world.n_distractors = config.n_distractors;
    world.solver_skill = config.solver_skill;
    world.solver_skill_ref = config.solver_skill;
    world.n_answers = n_answers;
  } else {
    world = make_default_world(config.n_bins, config.n_distractors, config.solver_skill,
                               config.difficulty_span, n_answers);
  }
  world.words_lo = config.words_lo;
  world.words_hi = config.words_hi;
  validate(world);
  return world;
}

nlohmann::json default_config_json() { return config_to_json(FullConfig{}); }

FullConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j,
                      {"n_answers", "proposer_period", "steps", "learning_rate_solver",
                       "learning_rate_proposer", "grad_clip_norm", "solver_params",
                       "proposer_params", "baseline_decay", "kl_solver", "kl_proposer", "seed",
                       "solver_reward_kind", "proposer_buffer_mode", "solver_update_mode",
                       "world", "backend"},
                      "");

  FullConfig config;
  auto& t = config.trainer;
  read(j, "n_answers", t.n_answers);
  read(j, "proposer_period", t.proposer_period);
  read(j, "steps", t.steps);
  read(j, "learning_rate_solver", t.learning_rate_solver);
  read(j, "learning_rate_proposer", t.learning_rate_proposer);
  read(j, "grad_clip_norm", t.grad_clip_norm);
  read(j, "baseline_decay", t.baseline_decay);
  read(j, "seed", t.seed);

  if (j.contains("solver_params")) {
    const auto& sp = j.at("solver_params");
    reject_unknown_keys(sp, {"gamma", "lambda_len", "tau_words", "clamp_at_zero"},
                        "solver_params");
    read(sp, "gamma", t.solver_params.gamma);
    read(sp, "lambda_len", t.solver_params.lambda_len);
    read(sp, "tau_words", t.solver_params.tau_words);
    read(sp, "clamp_at_zero", t.solver_params.clamp_at_zero);
  }
  if (j.contains("proposer_params")) {
    const auto& pp = j.at("proposer_params");
    reject_unknown_keys(pp, {"mu_h", "sigma_h"}, "proposer_params");
    read(pp, "mu_h", t.proposer_params.mu_h);
    read(pp, "sigma_h", t.proposer_params.sigma_h);
  }
  if (j.contains("kl_solver")) t.kl_solver = parse_kl(j.at("kl_solver"), t.kl_solver, "kl_solver");
  if (j.contains("kl_proposer"))
    t.kl_proposer = parse_kl(j.at("kl_proposer"), t.kl_proposer, "kl_proposer");

  if (j.contains("solver_reward_kind"))
    t.solver_reward_kind = parse_reward_kind(j.at("solver_reward_kind").get<std::string>());
  if (j.contains("proposer_buffer_mode"))
    t.proposer_buffer_mode = parse_buffer_mode(j.at("proposer_buffer_mode").get<std::string>());
  if (j.contains("solver_update_mode"))
    t.solver_update_mode = parse_update_mode(j.at("solver_update_mode").get<std::string>());

  if (j.contains("world")) {
    const auto& w = j.at("world");
    reject_unknown_keys(w,
                        {"n_bins", "n_distractors", "solver_skill", "difficulty_span",
                         "bin_difficulty", "words_lo", "words_hi"},
                        "world");
    read(w, "n_bins", config.world.n_bins);
    read(w, "n_distractors", config.world.n_distractors);
    read(w, "solver_skill", config.world.solver_skill);
    read(w, "difficulty_span", config.world.difficulty_span);
    read(w, "words_lo", config.world.words_lo);
    read(w, "words_hi", config.world.words_hi);
    if (w.contains("bin_difficulty"))
      config.world.bin_difficulty = w.at("bin_difficulty").get<std::vector<double>>();
  }

  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    reject_unknown_keys(b,
                        {"base_url", "model_name", "completions_path", "api_key_env", "n_answers",
                         "solver_temperature", "proposer_temperature", "request_timeout_seconds",
                         "max_retries", "proposer_prompt_template", "solver_prompt_template"},
                        "backend");
    auto& back = config.backend;
    read(b, "base_url", back.base_url);
    read(b, "model_name", back.model_name);
    read(b, "completions_path", back.completions_path);
    read(b, "api_key_env", back.api_key_env);
    read(b, "n_answers", back.n_answers);
    read(b, "solver_temperature", back.solver_temperature);
    read(b, "proposer_temperature", back.proposer_temperature);
    read(b, "request_timeout_seconds", back.request_timeout_seconds);
    read(b, "max_retries", back.max_retries);
    read(b, "proposer_prompt_template", back.proposer_prompt_template);
    read(b, "solver_prompt_template", back.solver_prompt_template);
    if (!back.api_key_env.empty())
      if (const char* key = std::getenv(back.api_key_env.c_str())) back.api_key = key;
  }

  try {
    validate(config.trainer);
    build_world(config.world, config.trainer.n_answers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

nlohmann::json config_to_json(const FullConfig& config) {
  const auto& t = config.trainer;
  nlohmann::json j;
  j["n_answers"] = t.n_answers;
  j["proposer_period"] = t.proposer_period;
  j["steps"] = t.steps;
  j["learning_rate_solver"] = t.learning_rate_solver;
  j["learning_rate_proposer"] = t.learning_rate_proposer;
  j["grad_clip_norm"] = t.grad_clip_norm;
  j["solver_params"] = {{"gamma", t.solver_params.gamma},
                        {"lambda_len", t.solver_params.lambda_len},
                        {"tau_words", t.solver_params.tau_words},
                        {"clamp_at_zero", t.solver_params.clamp_at_zero}};
  j["proposer_params"] = {{"mu_h", t.proposer_params.mu_h},
                          {"sigma_h", t.proposer_params.sigma_h}};
  j["baseline_decay"] = t.baseline_decay;
  j["kl_solver"] = kl_to_json(t.kl_solver);
  j["kl_proposer"] = kl_to_json(t.kl_proposer);
  j["seed"] = t.seed;
  j["solver_reward_kind"] =
      t.solver_reward_kind == SolverRewardKind::kContinuous ? "continuous" : "discrete";
  j["proposer_buffer_mode"] =
      t.proposer_buffer_mode == ProposerBufferMode::kMeanOfPeriod ? "mean" : "latest";
  j["solver_update_mode"] =
      t.solver_update_mode == SolverUpdateMode::kAggregate ? "aggregate" : "sequential";

  nlohmann::json w;
  w["n_bins"] = config.world.n_bins;
  w["n_distractors"] = config.world.n_distractors;
  w["solver_skill"] = config.world.solver_skill;
  w["difficulty_span"] = config.world.difficulty_span;
  if (config.world.bin_difficulty) w["bin_difficulty"] = *config.world.bin_difficulty;
  w["words_lo"] = config.world.words_lo;
  w["words_hi"] = config.world.words_hi;
  j["world"] = w;

  const auto& b = config.backend;
  j["backend"] = {{"base_url", b.base_url},
                  {"model_name", b.model_name},
                  {"completions_path", b.completions_path},
                  {"api_key_env", b.api_key_env},
                  {"n_answers", b.n_answers},
                  {"solver_temperature", b.solver_temperature},
                  {"proposer_temperature", b.proposer_temperature},
                  {"request_timeout_seconds", b.request_timeout_seconds},
                  {"max_retries", b.max_retries},
                  {"proposer_prompt_template", b.proposer_prompt_template},
                  {"solver_prompt_template", b.solver_prompt_template}};
  return j;
}

nlohmann::json merge_config(const std::optional<std::filesystem::path>& config_path,
                            std::span<const std::string> overrides,
                            std::optional<std::uint64_t> seed_override) {
  nlohmann::json merged = default_config_json();

  if (config_path) {
    nlohmann::json file;
    try {
      file = read_json(*config_path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    if (!file.is_object()) throw ConfigError("config root must be a JSON object");
    merged.merge_patch(file);
  }

  for (const auto& spec : overrides) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like key=value: " + spec);
    const std::string key = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
      value = raw;  // bare strings are fine
    }
    // dotted path, e.g. world.n_bins
    nlohmann::json* node = &merged;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos;
         start = dot + 1, dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      if (!node->is_object()) *node = nlohmann::json::object();
    }
    (*node)[key.substr(start)] = value;
  }

  if (seed_override) merged["seed"] = *seed_override;
  return merged;
}

}  // namespace selfplay
