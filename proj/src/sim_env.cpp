#include "selfplay/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfplay {

namespace {

constexpr double kSigmaFloor = 1e-12;

double clamp_probability(double p) {
  return std::clamp(p, kSigmaFloor, 1.0 - kSigmaFloor);
}

void check_bin(const SimWorld& world, int bin) {
  if (bin < 0 || bin >= world.n_bins) throw std::out_of_range("bin index out of range");
}

}  // namespace

SimWorld make_default_world(int n_bins, int n_distractors, double skill, double span,
                            int n_answers) {
  SimWorld world;
  world.n_bins = n_bins;
  world.n_distractors = n_distractors;
  world.solver_skill = skill;
  world.solver_skill_ref = skill;
  world.n_answers = n_answers;
  world.bin_difficulty = Vector(n_bins);
  if (n_bins == 1) {
    world.bin_difficulty(0) = skill;
  } else {
    for (int j = 0; j < n_bins; ++j)
      world.bin_difficulty(j) = skill - span + 2.0 * span * j / (n_bins - 1);
  }
  validate(world);
  return world;
}

void validate(const SimWorld& world) {
  if (world.n_bins < 1) throw std::invalid_argument("world.n_bins must be >= 1");
  if (world.bin_difficulty.size() != world.n_bins)
    throw std::invalid_argument("world.bin_difficulty length must equal n_bins");
  // Nondecreasing; equal difficulties are allowed so tie-breaks stay testable.
  for (int j = 1; j < world.n_bins; ++j)
    if (world.bin_difficulty(j) < world.bin_difficulty(j - 1))
      throw std::invalid_argument("world.bin_difficulty must be nondecreasing");
  if (world.n_distractors < 1) throw std::invalid_argument("world.n_distractors must be >= 1");
  if (world.n_answers < 1) throw std::invalid_argument("world.n_answers must be >= 1");
  if (world.words_lo < 0 || world.words_hi < world.words_lo)
    throw std::invalid_argument("world words range must satisfy 0 <= lo <= hi");
  if (!std::isfinite(world.solver_skill) || !std::isfinite(world.solver_skill_ref))
    throw std::invalid_argument("world skill must be finite");
}

std::string category_canonical(int category) {
  if (category < 0) throw std::out_of_range("category index out of range");
  if (category == 0) return "correct";
  return "d" + std::to_string(category);
}

int category_index(std::string_view canonical) {
  if (canonical == "correct") return 0;
  if (canonical.size() >= 2 && canonical.front() == 'd') {
    int value = 0;
    for (char c : canonical.substr(1)) {
      if (c < '0' || c > '9') throw std::invalid_argument("unknown category canonical");
      value = value * 10 + (c - '0');
    }
    if (value >= 1) return value;
  }
  throw std::invalid_argument("unknown category canonical");
}

double correct_probability(const SimWorld& world, int bin) {
  check_bin(world, bin);
  return logistic(world.solver_skill - world.bin_difficulty(bin));
}

Vector answer_probabilities(const SimWorld& world, int bin) {
  const double p_correct = correct_probability(world, bin);
  Vector probs(world.n_categories());
  probs(0) = p_correct;
  const double p_each = (1.0 - p_correct) / world.n_distractors;
  for (int d = 1; d <= world.n_distractors; ++d) probs(d) = p_each;
  return probs;
}

std::vector<AnswerSample> solve(const SimWorld& world, int bin, Rng& rng) {
  const Vector probs = answer_probabilities(world, bin);
  std::vector<AnswerSample> samples;
  samples.reserve(world.n_answers);
  for (int i = 0; i < world.n_answers; ++i) {
    const int category = rng.categorical(probs);
    const int words =
        world.words_lo == world.words_hi ? world.words_lo : rng.next_int(world.words_lo, world.words_hi);
    AnswerSample sample;
    sample.canonical = category_canonical(category);
    sample.raw_text = sample.canonical;
    sample.words_before_answer = words;
    samples.push_back(std::move(sample));
  }
  return samples;
}

double skill_score(const SimWorld& world, int bin, int category) {
  if (category < 0 || category >= world.n_categories())
    throw std::out_of_range("category index out of range");
  const double sigma = correct_probability(world, bin);
  return category == 0 ? 1.0 - sigma : -sigma;
}

double solver_kl(const SimWorld& world, int bin) {
  const double p = clamp_probability(correct_probability(world, bin));
  const double q = clamp_probability(
      logistic(world.solver_skill_ref - world.bin_difficulty(bin)));
  // Distractors share (1-p) uniformly, so the categorical KL reduces to the
  // binary correct-vs-incorrect KL.
  const double kl = p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return kl < 0.0 ? 0.0 : kl;
}

double solver_kl_grad(const SimWorld& world, int bin) {
  const double p = clamp_probability(correct_probability(world, bin));
  const double q = clamp_probability(
      logistic(world.solver_skill_ref - world.bin_difficulty(bin)));
  return p * (1.0 - p) * (std::log(p / q) - std::log((1.0 - p) / (1.0 - q)));
}

double expected_length_penalty(const SimWorld& world, const SolverRewardParams& params) {
  double total = 0.0;
  for (int w = world.words_lo; w <= world.words_hi; ++w) total += length_penalty(w, params);
  return total / (world.words_hi - world.words_lo + 1);
}

std::int64_t composition_count(int n, int categories) {
  if (n < 0 || categories < 1) throw std::invalid_argument("composition_count: bad arguments");
  // C(n + categories - 1, categories - 1) with overflow guard
  long double result = 1.0L;
  for (int k = 1; k < categories; ++k)
    result = result * (n + k) / k;
  const long double rounded = std::floor(result + 0.5L);
  if (rounded > 9.2e18L) throw std::overflow_error("composition_count: overflow");
  return static_cast<std::int64_t>(rounded);
}

namespace {

void visit_compositions(std::vector<int>& counts, int index, int remaining,
                        const std::function<void(std::span<const int>)>& fn) {
  if (index == static_cast<int>(counts.size()) - 1) {
    counts[index] = remaining;
    fn(counts);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    counts[index] = c;
    visit_compositions(counts, index + 1, remaining - c, fn);
  }
}

void check_cap(int n, int categories, std::int64_t cap) {
  if (composition_count(n, categories) > cap)
    throw std::length_error("composition enumeration exceeds the configured cap");
}

}  // namespace

void for_each_composition(int n, int categories,
                          const std::function<void(std::span<const int>)>& fn) {
  if (n < 0 || categories < 1) throw std::invalid_argument("for_each_composition: bad arguments");
  std::vector<int> counts(categories, 0);
  visit_compositions(counts, 0, n, fn);
}

double composition_entropy_nats(std::span<const int> counts, int n) {
  double h = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double composition_mean_continuous(std::span<const int> counts, int n, double gamma) {
  double total = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    total += c * std::pow(static_cast<double>(c) / n, gamma);
  }
  return total / n;
}

double composition_mean_discrete(std::span<const int> counts, int n) {
  int max_count = 0;
  for (int c : counts) max_count = std::max(max_count, c);
  return static_cast<double>(max_count) / n;
}

double composition_probability(std::span<const int> counts, const Vector& probs) {
  int n = 0;
  for (int c : counts) n += c;
  double log_p = std::lgamma(n + 1.0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const int c = counts[k];
    if (c == 0) continue;
    const double pk = probs(static_cast<Eigen::Index>(k));
    if (pk <= 0.0) return 0.0;
    log_p += c * std::log(pk) - std::lgamma(c + 1.0);
  }
  return std::exp(log_p);
}

std::vector<LandscapeRow> reward_landscape(int n, int categories, double gamma,
                                           const ProposerRewardParams& proposer_params,
                                           std::int64_t max_compositions) {
  if (n < 1 || categories < 1) throw std::invalid_argument("reward_landscape: bad arguments");
  check_cap(n, categories, max_compositions);
  std::vector<LandscapeRow> rows;
  rows.reserve(static_cast<std::size_t>(composition_count(n, categories)));
  for_each_composition(n, categories, [&](std::span<const int> counts) {
    LandscapeRow row;
    row.counts.assign(counts.begin(), counts.end());
    row.entropy_nats = composition_entropy_nats(counts, n);
    row.solver_continuous_mean = composition_mean_continuous(counts, n, gamma);
    row.solver_discrete_mean = composition_mean_discrete(counts, n);
    row.proposer_reward = proposer_reward(row.entropy_nats, proposer_params);
    rows.push_back(std::move(row));
  });
  return rows;
}

ExpectedRound exact_expected_rewards(const SimWorld& world, int bin,
                                     const SolverRewardParams& solver_params,
                                     const ProposerRewardParams& proposer_params,
                                     std::int64_t max_compositions) {
  check_bin(world, bin);
  check_cap(world.n_answers, world.n_categories(), max_compositions);
  const Vector probs = answer_probabilities(world, bin);
  const double penalty = expected_length_penalty(world, solver_params);
  const int n = world.n_answers;

  ExpectedRound expected;
  for_each_composition(n, world.n_categories(), [&](std::span<const int> counts) {
    const double weight = composition_probability(counts, probs);
    if (weight == 0.0) return;
    const double h = composition_entropy_nats(counts, n);
    expected.entropy_nats += weight * h;
    expected.proposer_reward += weight * proposer_reward(h, proposer_params);
    expected.solver_reward_mean +=
        weight * composition_mean_continuous(counts, n, solver_params.gamma) * penalty;
  });
  return expected;
}

double expected_skill_gradient(const SimWorld& world, int bin,
                               const SolverRewardParams& solver_params,
                               std::int64_t max_compositions) {
  check_bin(world, bin);
  check_cap(world.n_answers, world.n_categories(), max_compositions);
  const Vector probs = answer_probabilities(world, bin);
  const double penalty = expected_length_penalty(world, solver_params);
  const int n = world.n_answers;

  double gradient = 0.0;
  for_each_composition(n, world.n_categories(), [&](std::span<const int> counts) {
    const double weight = composition_probability(counts, probs);
    if (weight == 0.0) return;
    double inner = 0.0;  // (1/N) sum_i r_i * score_i for this composition
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const int c = counts[k];
      if (c == 0) continue;
      const double r = std::pow(static_cast<double>(c) / n, solver_params.gamma) * penalty;
      inner += c * r * skill_score(world, bin, static_cast<int>(k));
    }
    gradient += weight * inner / n;
  });
  return gradient;
}

int best_bin(const SimWorld& world, const ProposerRewardParams& proposer_params,
             std::int64_t max_compositions) {
  validate(world);
  int best = 0;
  double best_reward = -1.0;
  for (int bin = 0; bin < world.n_bins; ++bin) {
    const double reward =
        exact_expected_rewards(world, bin, SolverRewardParams{}, proposer_params, max_compositions)
            .proposer_reward;
    if (reward > best_reward) {
      best_reward = reward;
      best = bin;
    }
  }
  return best;
}

}  // namespace selfplay
