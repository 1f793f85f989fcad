#include "selfplay/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace selfplay {

EmaBaseline ema_update(EmaBaseline baseline, double reward) {
  if (!std::isfinite(reward)) throw std::invalid_argument("ema_update: non-finite reward");
  baseline.value = baseline.decay * baseline.value + (1.0 - baseline.decay) * reward;
  return baseline;
}

KlController kl_beta_update(KlController controller, double observed_kl) {
  if (observed_kl < 0.0) throw std::invalid_argument("kl_beta_update: negative KL");
  const double scaled = controller.beta *
                        std::exp(controller.eta * (observed_kl - controller.target) / controller.target);
  controller.beta = std::clamp(scaled, controller.beta_min, controller.beta_max);
  return controller;
}

void validate(const EmaBaseline& baseline) {
  if (!(baseline.decay >= 0.0 && baseline.decay < 1.0))
    throw std::invalid_argument("baseline decay must be in [0, 1)");
}

void validate(const KlController& controller) {
  if (!(controller.eta > 0.0)) throw std::invalid_argument("kl controller eta must be > 0");
  if (!(controller.target > 0.0)) throw std::invalid_argument("kl controller target must be > 0");
  if (!(controller.beta_min > 0.0 && controller.beta_min < controller.beta_max))
    throw std::invalid_argument("kl controller requires 0 < beta_min < beta_max");
  if (controller.beta < controller.beta_min || controller.beta > controller.beta_max)
    throw std::invalid_argument("kl controller beta outside its clip bounds");
}

void validate(const TrainerConfig& config) {
  if (config.n_answers < 1) throw std::invalid_argument("n_answers must be >= 1");
  if (config.proposer_period < 1) throw std::invalid_argument("proposer_period must be >= 1");
  if (config.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (config.learning_rate_solver < 0.0 || config.learning_rate_proposer < 0.0)
    throw std::invalid_argument("learning rates must be >= 0");
  if (!(config.grad_clip_norm > 0.0)) throw std::invalid_argument("grad_clip_norm must be > 0");
  validate(config.solver_params);
  validate(config.proposer_params);
  if (!(config.baseline_decay >= 0.0 && config.baseline_decay < 1.0))
    throw std::invalid_argument("baseline_decay must be in [0, 1)");
  validate(config.kl_solver);
  validate(config.kl_proposer);
}

TrainerState make_trainer_state(const TrainerConfig& config) {
  TrainerState state;
  state.baseline_solver = {0.0, config.baseline_decay};
  state.baseline_proposer = {0.0, config.baseline_decay};
  state.kl_solver = config.kl_solver;
  state.kl_proposer = config.kl_proposer;
  state.proposer_period = config.proposer_period;
  return state;
}

void reinforce_step(CategoricalPolicy& policy, int action, double reward, EmaBaseline& baseline,
                    KlController& controller, double learning_rate, double grad_clip_norm) {
  const double observed_kl = kl_to_ref(policy);
  Vector g = (reward - baseline.value) * grad_log_prob(policy, action) -
             controller.beta * grad_kl_to_ref(policy);
  clip_to_norm(g, grad_clip_norm);
  policy.logits += learning_rate * g;
  baseline = ema_update(baseline, reward);
  controller = kl_beta_update(controller, observed_kl);
}

namespace {

void update_solver(SimWorld& world, int bin, const std::vector<AnswerSample>& samples,
                   const std::vector<double>& rewards, double baseline, double beta,
                   const TrainerConfig& config) {
  const int n = static_cast<int>(samples.size());
  if (config.solver_update_mode == SolverUpdateMode::kAggregate) {
    double g = 0.0;
    for (int i = 0; i < n; ++i)
      g += (rewards[i] - baseline) * skill_score(world, bin, category_index(samples[i].canonical));
    g = g / n - beta * solver_kl_grad(world, bin);
    world.solver_skill += config.learning_rate_solver * clip_to_norm_scalar(g, config.grad_clip_norm);
  } else {
    // Ablation: N sequential micro-steps, score and KL re-evaluated as the
    // skill moves. Advantages still use the step's pre-update baseline.
    for (int i = 0; i < n; ++i) {
      const double g = (rewards[i] - baseline) *
                           skill_score(world, bin, category_index(samples[i].canonical)) -
                       beta * solver_kl_grad(world, bin);
      world.solver_skill +=
          config.learning_rate_solver * clip_to_norm_scalar(g, config.grad_clip_norm);
    }
  }
}

void update_proposer(CategoricalPolicy& proposer, TrainerState& state,
                     const TrainerConfig& config) {
  Vector g = Vector::Zero(proposer.size());
  if (config.proposer_buffer_mode == ProposerBufferMode::kMeanOfPeriod) {
    for (const auto& [advantage, action] : state.proposer_buffer)
      g += advantage * grad_log_prob(proposer, action);
    g /= static_cast<double>(state.proposer_buffer.size());
  } else {
    const auto& [advantage, action] = state.proposer_buffer.back();
    g = advantage * grad_log_prob(proposer, action);
  }
  g -= state.kl_proposer.beta * grad_kl_to_ref(proposer);
  clip_to_norm(g, config.grad_clip_norm);
  proposer.logits += config.learning_rate_proposer * g;
  state.proposer_buffer.clear();
}

}  // namespace

StepRecord train_step(SimWorld& world, CategoricalPolicy& proposer, TrainerState& state,
                      const TrainerConfig& config, Rng& rng) {
  // Step 1-3: propose a difficulty, sample N answers, build the distribution.
  const int bin = sample(proposer, rng);
  const std::vector<AnswerSample> samples = solve(world, bin, rng);

  std::vector<std::optional<AnswerSample>> generations;
  generations.reserve(samples.size());
  for (const auto& s : samples) generations.emplace_back(s);
  const RoundScore score = score_samples(generations, config.n_answers, config.solver_params,
                                         config.proposer_params, config.solver_reward_kind);

  StepRecord record;
  record.step = state.step + 1;
  record.difficulty_bin = bin;
  record.entropy_nats = score.entropy_nats;
  record.solver_rewards = score.solver_rewards;
  record.proposer_reward = score.proposer_reward;
  record.majority_fraction = score.majority_fraction;
  record.solver_kl = solver_kl(world, bin);
  record.proposer_kl = kl_to_ref(proposer);
  record.beta_solver = state.kl_solver.beta;
  record.beta_proposer = state.kl_proposer.beta;
  record.baseline_solver = state.baseline_solver.value;
  record.baseline_proposer = state.baseline_proposer.value;

  // Step 4 + 6a: continuous per-sample solver rewards drive one skill update.
  update_solver(world, bin, samples, score.solver_rewards, state.baseline_solver.value,
                state.kl_solver.beta, config);
  const double mean_solver_reward =
      std::accumulate(score.solver_rewards.begin(), score.solver_rewards.end(), 0.0) /
      static_cast<double>(score.solver_rewards.size());
  state.baseline_solver = ema_update(state.baseline_solver, mean_solver_reward);
  state.kl_solver = kl_beta_update(state.kl_solver, record.solver_kl);

  // Step 5 + 6b: buffer the proposer advantage; apply it every K steps.
  state.proposer_buffer.emplace_back(score.proposer_reward - state.baseline_proposer.value, bin);
  if (record.step % state.proposer_period == 0) update_proposer(proposer, state, config);
  state.baseline_proposer = ema_update(state.baseline_proposer, score.proposer_reward);
  state.kl_proposer = kl_beta_update(state.kl_proposer, record.proposer_kl);

  state.step = record.step;
  return record;
}

RunResult run(const TrainerConfig& config, SimWorld world) {
  validate(config);
  world.n_answers = config.n_answers;
  validate(world);

  RunResult result;
  result.records.reserve(config.steps);
  CategoricalPolicy proposer = make_uniform_policy(world.n_bins);
  TrainerState state = make_trainer_state(config);
  Rng rng(config.seed);

  for (int s = 0; s < config.steps; ++s)
    result.records.push_back(train_step(world, proposer, state, config, rng));

  result.final_world = std::move(world);
  result.final_proposer = std::move(proposer);
  result.final_state = std::move(state);
  return result;
}

}  // namespace selfplay
