// Categorical policy with exact log-probabilities, analytic score-function
// gradients, and closed-form KL to a frozen reference distribution.
#pragma once

#include "selfplay/math.hpp"
#include "selfplay/rng.hpp"

namespace selfplay {

// logits parameterize the current policy; ref_logits are the frozen
// reference it is KL-regularized against.
struct CategoricalPolicy {
  Vector logits;
  Vector ref_logits;

  Eigen::Index size() const { return logits.size(); }
};

CategoricalPolicy make_uniform_policy(int n_actions);
void validate(const CategoricalPolicy& policy);

Vector probabilities(const CategoricalPolicy& policy);

// Index drawn from softmax(logits); reproducible given the rng seed.
int sample(const CategoricalPolicy& policy, Rng& rng);

// log softmax(logits)[action], max-subtraction stabilized.
double log_prob(const CategoricalPolicy& policy, int action);

// d log pi(action) / d logits = one_hot(action) - softmax(logits).
// Components sum to zero.
Vector grad_log_prob(const CategoricalPolicy& policy, int action);

// KL(softmax(logits) || softmax(ref_logits)), >= 0.
double kl_to_ref(const CategoricalPolicy& policy);

// d KL / d logits = p .* (log p - log p_ref - KL). Components sum to zero.
Vector grad_kl_to_ref(const CategoricalPolicy& policy);

}  // namespace selfplay
