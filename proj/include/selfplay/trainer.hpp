// The closed proposer-solver training loop: REINFORCE with EMA baselines,
// gradient clipping, multiplicative KL-penalty adaptation, and the every-K
// proposer update schedule. Single-threaded and deterministic given the seed.
#pragma once

#include "selfplay/policy.hpp"
#include "selfplay/rewards.hpp"
#include "selfplay/sim_env.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace selfplay {

struct EmaBaseline {
  double value = 0.0;
  double decay = 0.9;  // in [0, 1)
};

// value' = decay * value + (1 - decay) * reward
EmaBaseline ema_update(EmaBaseline baseline, double reward);

struct KlController {
  double beta = 0.05;
  double eta = 0.1;
  double target = 0.05;   // tau
  double beta_min = 1e-4;
  double beta_max = 10.0;
};

// beta' = clip(beta * exp(eta * (kl - target) / target), beta_min, beta_max)
KlController kl_beta_update(KlController controller, double observed_kl);

void validate(const EmaBaseline& baseline);
void validate(const KlController& controller);

enum class ProposerBufferMode { kMeanOfPeriod, kLatestOnly };
enum class SolverUpdateMode { kAggregate, kSequential };

struct TrainerConfig {
  int n_answers = 5;
  int proposer_period = 5;  // K
  int steps = 6000;
  double learning_rate_solver = 1e-2;
  double learning_rate_proposer = 5e-2;
  double grad_clip_norm = 1.0;
  SolverRewardParams solver_params;
  ProposerRewardParams proposer_params;
  double baseline_decay = 0.9;
  KlController kl_solver{0.05, 0.1, 0.05, 1e-4, 10.0};
  KlController kl_proposer{0.05, 0.1, 0.5, 1e-4, 10.0};
  std::uint64_t seed = 1;
  SolverRewardKind solver_reward_kind = SolverRewardKind::kContinuous;
  ProposerBufferMode proposer_buffer_mode = ProposerBufferMode::kMeanOfPeriod;
  SolverUpdateMode solver_update_mode = SolverUpdateMode::kAggregate;
};

void validate(const TrainerConfig& config);

// Everything logged per step. Baselines, betas, and KLs are the pre-update
// values the step's gradients actually used.
struct StepRecord {
  int step = 0;  // 1-based
  int difficulty_bin = 0;
  double entropy_nats = 0.0;
  std::vector<double> solver_rewards;
  double proposer_reward = 0.0;
  double solver_kl = 0.0;
  double proposer_kl = 0.0;
  double beta_solver = 0.0;
  double beta_proposer = 0.0;
  double baseline_solver = 0.0;
  double baseline_proposer = 0.0;
  double majority_fraction = 0.0;
};

struct TrainerState {
  EmaBaseline baseline_solver;
  EmaBaseline baseline_proposer;
  KlController kl_solver;
  KlController kl_proposer;
  int step = 0;              // completed steps
  int proposer_period = 5;   // K
  std::vector<std::pair<double, int>> proposer_buffer;  // (advantage, action)
};

TrainerState make_trainer_state(const TrainerConfig& config);

// One REINFORCE ascent step on a categorical policy:
//   g = (reward - baseline) * grad_log_prob - beta * grad_kl, clipped to
//   grad_clip_norm, then logits += learning_rate * g.
// The advantage uses the pre-update baseline; the baseline and controller
// are updated afterwards (the controller observes the pre-update KL).
void reinforce_step(CategoricalPolicy& policy, int action, double reward, EmaBaseline& baseline,
                    KlController& controller, double learning_rate, double grad_clip_norm);

// One full pass of the training loop: propose a bin, draw N answers, score
// both roles, update the solver skill, buffer the proposer advantage (the
// proposer itself moves only every K steps), and adapt both betas.
StepRecord train_step(SimWorld& world, CategoricalPolicy& proposer, TrainerState& state,
                      const TrainerConfig& config, Rng& rng);

struct RunResult {
  std::vector<StepRecord> records;
  SimWorld final_world;
  CategoricalPolicy final_proposer;
  TrainerState final_state;
};

// Runs config.steps iterations from a fresh state. The proposer starts
// uniform over the world's bins; world.n_answers is forced to
// config.n_answers. Rejects invalid configs before any step runs.
RunResult run(const TrainerConfig& config, SimWorld world);

}  // namespace selfplay
