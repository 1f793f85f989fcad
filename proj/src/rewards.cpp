#include "selfplay/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace selfplay {

void validate(const SolverRewardParams& params) {
  if (!(params.gamma > 0.0 && params.gamma <= 1.0))
    throw std::invalid_argument("solver_params.gamma must be in (0, 1]");
  if (params.lambda_len < 0.0)
    throw std::invalid_argument("solver_params.lambda_len must be >= 0");
  if (params.tau_words < 1)
    throw std::invalid_argument("solver_params.tau_words must be >= 1");
}

void validate(const ProposerRewardParams& params) {
  if (params.mu_h < 0.0) throw std::invalid_argument("proposer_params.mu_h must be >= 0");
  if (!(params.sigma_h > 0.0))
    throw std::invalid_argument("proposer_params.sigma_h must be > 0");
}

double length_penalty(int words_before_answer, const SolverRewardParams& params) {
  const double tau = static_cast<double>(params.tau_words);
  const double excess = std::max(0.0, (static_cast<double>(words_before_answer) - tau) / tau);
  const double factor = 1.0 - params.lambda_len * excess;
  return params.clamp_at_zero ? std::max(0.0, factor) : factor;
}

double solver_reward_continuous(const AnswerSample& sample, const AnswerDistribution& dist,
                                const SolverRewardParams& params) {
  const auto p = probability_of(dist, sample.canonical);
  if (!p) throw std::invalid_argument("solver_reward_continuous: sample not in distribution");
  return std::pow(*p, params.gamma) * length_penalty(sample.words_before_answer, params);
}

double solver_reward_discrete(const AnswerSample& sample, const AnswerDistribution& dist) {
  if (!probability_of(dist, sample.canonical))
    throw std::invalid_argument("solver_reward_discrete: sample not in distribution");
  return sample.canonical == dist.majority ? 1.0 : 0.0;
}

double proposer_reward(double entropy_nats, const ProposerRewardParams& params) {
  if (entropy_nats < 0.0) throw std::invalid_argument("proposer_reward: negative entropy");
  const double d = entropy_nats - params.mu_h;
  return std::exp(-(d * d) / (2.0 * params.sigma_h * params.sigma_h));
}

RoundScore score_samples(const std::vector<std::optional<AnswerSample>>& generations,
                         int n_nominal, const SolverRewardParams& solver_params,
                         const ProposerRewardParams& proposer_params, SolverRewardKind kind) {
  if (n_nominal < 1) throw std::invalid_argument("score_samples: n_nominal must be >= 1");

  std::vector<AnswerSample> parsed;
  parsed.reserve(generations.size());
  for (const auto& g : generations)
    if (g) parsed.push_back(*g);

  RoundScore score;
  score.solver_rewards.assign(generations.size(), 0.0);

  if (parsed.empty()) {
    // Maximal-confusion fallback keeps the loop alive when nothing parses.
    score.entropy_nats = std::log(static_cast<double>(n_nominal));
    score.proposer_reward = proposer_reward(score.entropy_nats, proposer_params);
    return score;
  }

  score.distribution = build_distribution(parsed, static_cast<int>(parsed.size()));
  const auto& dist = *score.distribution;

  for (std::size_t i = 0; i < generations.size(); ++i) {
    if (!generations[i]) continue;
    score.solver_rewards[i] = kind == SolverRewardKind::kContinuous
                                  ? solver_reward_continuous(*generations[i], dist, solver_params)
                                  : solver_reward_discrete(*generations[i], dist);
  }

  score.entropy_nats = dist.entropy_nats;
  score.proposer_reward = proposer_reward(dist.entropy_nats, proposer_params);
  score.majority_fraction =
      static_cast<double>(dist.classes.front().count) / static_cast<double>(dist.n_samples);
  return score;
}

}  // namespace selfplay
