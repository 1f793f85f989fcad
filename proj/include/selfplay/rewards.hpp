// Reward functions for the proposer-solver loop: the continuous
// self-consistency solver reward with its length penalty, the discrete
// majority-vote baseline, and the Gaussian entropy band-pass proposer
// reward. All pure functions.
#pragma once

#include "selfplay/answers.hpp"

#include <optional>
#include <vector>

namespace selfplay {

struct SolverRewardParams {
  double gamma = 0.7;        // agreement softness exponent, in (0, 1]
  double lambda_len = 0.10;  // length penalty weight, >= 0
  int tau_words = 6;         // target brevity threshold, >= 1
  bool clamp_at_zero = true; // floor the penalty factor at 0 (keeps r in [0,1])
};

struct ProposerRewardParams {
  double mu_h = 0.90;     // entropy band center, nats
  double sigma_h = 0.35;  // band width, nats, > 0
};

enum class SolverRewardKind { kContinuous, kDiscrete };

void validate(const SolverRewardParams& params);
void validate(const ProposerRewardParams& params);

// The brevity factor of the continuous reward: 1 - lambda * max(0, (w-tau)/tau),
// floored at 0 unless clamping is disabled.
double length_penalty(int words_before_answer, const SolverRewardParams& params);

// r_i = p^gamma * length_penalty, with p the sample's empirical agreement.
// Throws when the sample's canonical is not a member of the distribution.
double solver_reward_continuous(const AnswerSample& sample, const AnswerDistribution& dist,
                                const SolverRewardParams& params);

// Majority-vote baseline: 1 iff the sample matches the majority answer.
double solver_reward_discrete(const AnswerSample& sample, const AnswerDistribution& dist);

// r = exp(-(H - mu)^2 / (2 sigma^2)); peaks at mu, symmetric, in (0, 1].
double proposer_reward(double entropy_nats, const ProposerRewardParams& params);

// One scored propose-solve round. Unparseable generations are excluded from
// the distribution and earn reward 0; when nothing parses, the distribution
// is absent, every reward is 0, and the proposer is scored at H = ln(n_nominal)
// (maximal confusion).
struct RoundScore {
  std::optional<AnswerDistribution> distribution;
  std::vector<double> solver_rewards;  // aligned with the input generations
  double entropy_nats = 0.0;
  double proposer_reward = 0.0;
  double majority_fraction = 0.0;      // 0 when nothing parsed
};

// Shared scoring path for the simulator and the backend client: generations
// that failed extraction arrive as nullopt. n_nominal is the configured N
// (used only for the all-unparseable entropy fallback).
RoundScore score_samples(const std::vector<std::optional<AnswerSample>>& generations,
                         int n_nominal, const SolverRewardParams& solver_params,
                         const ProposerRewardParams& proposer_params,
                         SolverRewardKind kind = SolverRewardKind::kContinuous);

}  // namespace selfplay
