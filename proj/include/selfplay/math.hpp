// Small dense-vector math kernel: softmax family, categorical KL, logistic,
// and norm clipping. Everything here is a pure free function over Eigen
// expressions so callers can pass blocks, maps, or plain vectors.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace selfplay {

template <typename Scalar>
using DenseVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

using Vector = DenseVector<double>;

// softmax with max-subtraction stabilization
template <typename Derived>
DenseVector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  DenseVector<Scalar> p = (logits.array() - logits.maxCoeff()).exp();
  p /= p.sum();
  return p;
}

template <typename Derived>
DenseVector<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar shift = logits.maxCoeff();
  const Scalar lse = shift + std::log((logits.array() - shift).exp().sum());
  return (logits.array() - lse).matrix();
}

// KL(p || q) for probability vectors. Terms with p_i == 0 contribute nothing.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar kl_categorical(const Eigen::MatrixBase<DerivedP>& p,
                                         const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  if (p.size() != q.size()) throw std::invalid_argument("kl_categorical: size mismatch");
  Scalar kl = Scalar(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p(i);
    if (pi <= Scalar(0)) continue;
    kl += pi * std::log(pi / q(i));
  }
  return kl < Scalar(0) ? Scalar(0) : kl;  // Gibbs; negatives are rounding dust
}

// Overflow-safe logistic.
inline double logistic(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Scale g in place so that ||g||_2 <= max_norm.
template <typename Derived>
void clip_to_norm(Eigen::MatrixBase<Derived>& g, double max_norm) {
  const double n = g.norm();
  if (n > max_norm && n > 0.0) g *= max_norm / n;
}

inline double clip_to_norm_scalar(double g, double max_norm) {
  const double n = std::abs(g);
  if (n > max_norm && n > 0.0) return g * (max_norm / n);
  return g;
}

}  // namespace selfplay
