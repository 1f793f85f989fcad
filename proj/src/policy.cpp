#include "selfplay/policy.hpp"

#include <stdexcept>

namespace selfplay {

CategoricalPolicy make_uniform_policy(int n_actions) {
  if (n_actions < 1) throw std::invalid_argument("make_uniform_policy: need >= 1 action");
  CategoricalPolicy policy;
  policy.logits = Vector::Zero(n_actions);
  policy.ref_logits = Vector::Zero(n_actions);
  return policy;
}

void validate(const CategoricalPolicy& policy) {
  if (policy.logits.size() == 0)
    throw std::invalid_argument("policy: empty logits");
  if (policy.logits.size() != policy.ref_logits.size())
    throw std::invalid_argument("policy: logits/ref_logits length mismatch");
  if (!policy.logits.allFinite() || !policy.ref_logits.allFinite())
    throw std::invalid_argument("policy: non-finite logits");
}

Vector probabilities(const CategoricalPolicy& policy) { return softmax(policy.logits); }

int sample(const CategoricalPolicy& policy, Rng& rng) {
  return rng.categorical(softmax(policy.logits));
}

double log_prob(const CategoricalPolicy& policy, int action) {
  if (action < 0 || action >= policy.size())
    throw std::out_of_range("log_prob: action out of range");
  return log_softmax(policy.logits)(action);
}

Vector grad_log_prob(const CategoricalPolicy& policy, int action) {
  if (action < 0 || action >= policy.size())
    throw std::out_of_range("grad_log_prob: action out of range");
  Vector g = -softmax(policy.logits);
  g(action) += 1.0;
  return g;
}

double kl_to_ref(const CategoricalPolicy& policy) {
  return kl_categorical(softmax(policy.logits), softmax(policy.ref_logits));
}

Vector grad_kl_to_ref(const CategoricalPolicy& policy) {
  const Vector p = softmax(policy.logits);
  const Vector log_p = log_softmax(policy.logits);
  const Vector log_q = log_softmax(policy.ref_logits);
  const double kl = (p.array() * (log_p - log_q).array()).sum();
  return (p.array() * ((log_p - log_q).array() - kl)).matrix();
}

}  // namespace selfplay
