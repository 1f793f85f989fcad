// Synthetic proposer-solver world. A question is a difficulty bin; the
// solver answers with a skill-vs-difficulty logistic over one correct answer
// and uniform distractors. Exact multinomial enumeration gives closed-form
// expectations for every reward, which the sampling paths are tested against.
#pragma once

#include "selfplay/answers.hpp"
#include "selfplay/math.hpp"
#include "selfplay/rewards.hpp"
#include "selfplay/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace selfplay {

inline constexpr std::int64_t kDefaultCompositionCap = 1'000'000;

struct SimWorld {
  int n_bins = 8;
  Vector bin_difficulty;        // nondecreasing latent difficulty per bin
  int n_distractors = 3;
  double solver_skill = 0.0;    // the only field mutated during training
  double solver_skill_ref = 0.0;  // frozen reference for the KL term
  int n_answers = 5;            // N samples per question
  int words_lo = 3;             // words-before-answer, uniform integer draw
  int words_hi = 3;

  int n_categories() const { return 1 + n_distractors; }
};

// Difficulties linearly spaced over [skill - span, skill + span].
SimWorld make_default_world(int n_bins = 8, int n_distractors = 3, double skill = 0.0,
                            double span = 4.0, int n_answers = 5);
void validate(const SimWorld& world);

// "correct", "d1", ..., "dM"
std::string category_canonical(int category);
int category_index(std::string_view canonical);

double correct_probability(const SimWorld& world, int bin);

// p_correct followed by uniform distractor probabilities; sums to 1.
Vector answer_probabilities(const SimWorld& world, int bin);

// N categorical draws materialized as AnswerSamples.
std::vector<AnswerSample> solve(const SimWorld& world, int bin, Rng& rng);

// d log p(category | bin) / d skill of the induced answer policy:
// 1 - sigma for the correct answer, -sigma for any distractor.
double skill_score(const SimWorld& world, int bin, int category);

// KL of the induced answer distribution at `bin` from the reference-skill
// distribution, and its derivative in the skill parameter.
double solver_kl(const SimWorld& world, int bin);
double solver_kl_grad(const SimWorld& world, int bin);

// Expected per-sample brevity factor under the world's words distribution.
double expected_length_penalty(const SimWorld& world, const SolverRewardParams& params);

// --- outcome compositions -------------------------------------------------

// Number of count-compositions of n over `categories` classes:
// C(n + categories - 1, categories - 1).
std::int64_t composition_count(int n, int categories);

// Visits every composition in first-component-descending order.
void for_each_composition(int n, int categories,
                          const std::function<void(std::span<const int>)>& fn);

double composition_entropy_nats(std::span<const int> counts, int n);
double composition_mean_continuous(std::span<const int> counts, int n, double gamma);
double composition_mean_discrete(std::span<const int> counts, int n);

// Multinomial probability of a composition under category probabilities.
double composition_probability(std::span<const int> counts, const Vector& probs);

// One row of the reward-landscape export (no world attached; the length
// penalty is inert here).
struct LandscapeRow {
  std::vector<int> counts;
  double entropy_nats = 0.0;
  double solver_continuous_mean = 0.0;
  double solver_discrete_mean = 0.0;
  double proposer_reward = 0.0;
};

std::vector<LandscapeRow> reward_landscape(int n, int categories, double gamma,
                                           const ProposerRewardParams& proposer_params,
                                           std::int64_t max_compositions = kDefaultCompositionCap);

// --- exact expectation oracles ---------------------------------------------

struct ExpectedRound {
  double solver_reward_mean = 0.0;  // continuous reward, averaged over samples
  double proposer_reward = 0.0;
  double entropy_nats = 0.0;
};

// Probability-weighted means over every outcome composition of N samples.
ExpectedRound exact_expected_rewards(const SimWorld& world, int bin,
                                     const SolverRewardParams& solver_params,
                                     const ProposerRewardParams& proposer_params,
                                     std::int64_t max_compositions = kDefaultCompositionCap);

// Exact E[(1/N) sum_i r_i * dlogp(y_i)/dskill] for the continuous reward:
// the expected REINFORCE gradient on the skill parameter (baseline-free;
// a constant baseline leaves the expectation unchanged).
double expected_skill_gradient(const SimWorld& world, int bin,
                               const SolverRewardParams& solver_params,
                               std::int64_t max_compositions = kDefaultCompositionCap);

// argmax over bins of the exact expected proposer reward, ties to the
// lowest index.
int best_bin(const SimWorld& world, const ProposerRewardParams& proposer_params,
             std::int64_t max_compositions = kDefaultCompositionCap);

}  // namespace selfplay
