#pragma once

// Advantage key distillation at asymptotic scale: noisy preprocessing,
// detection-tag-grouped reconciliation, their combination, and the two-way
// B-step. All rates are per key-generation round times `sift`.

#include <cmath>
#include <stdexcept>

#include "diqkd/channel.hpp"
#include "diqkd/entropy.hpp"
#include "diqkd/keyrate.hpp"
#include "diqkd/phase_error.hpp"

namespace diqkd {

class NoiseLevel {
 public:
  explicit NoiseLevel(double q) : q_(q) {
    if (!(q >= 0.0 && q <= 0.5)) {
      throw std::domain_error("NoiseLevel: q outside [0, 1/2]");
    }
  }
  double value() const { return q_; }

 private:
  double q_;
};

// Von Neumann entropy of Bob's ancilla after the flip-controlled CNOT:
// the 2x2 state (1-e_p)|phi><phi| + e_p Z|phi><phi|Z with
// |phi> = sqrt(1-q)|0> + sqrt(q)|1> has eigenvalues
//   1/2 +- sqrt((1-2q)^2/4 + (1-2e_p)^2 q(1-q)),
// directly from the matrix (diagonal (1-q, q), off-diagonal
// (1-2e_p)sqrt(q(1-q))). Returns h(omega+).
inline double noisy_ancilla_entropy(double e_p, NoiseLevel noise) {
  if (!(e_p >= 0.0 && e_p <= 1.0)) {
    throw std::domain_error("noisy_ancilla_entropy: e_p outside [0, 1]");
  }
  const double q = noise.value();
  const double half_gap =
      std::sqrt(0.25 * (1.0 - 2.0 * q) * (1.0 - 2.0 * q) +
                (1.0 - 2.0 * e_p) * (1.0 - 2.0 * e_p) * q * (1.0 - q));
  return binary_entropy(std::min(0.5 + half_gap, 1.0));
}

// (N): sift [1 - f_ec h(e_b XOR q) - h(e_p(S)) + h(omega+)]. The flip noise
// raises the reconciliation cost and refunds part of the privacy cost.
inline double noisy_rate(BellValue S, double e_b, NoiseLevel noise, double sift, double f_ec) {
  const double q = noise.value();
  const double ebq = e_b * (1.0 - q) + (1.0 - e_b) * q;
  // 1 - f h(ebq) evaluated without cancellation for ebq near 1/2
  const double u = std::abs(0.5 - ebq);
  const double rec = f_ec * one_minus_binary_entropy_near_half(u) - (f_ec - 1.0);
  const double ep = phase_error_prob(S).value();
  return sift * (rec - binary_entropy(ep) + noisy_ancilla_entropy(ep, noise));
}

namespace detail {

// Tag-grouped reconciliation cost per key round: sum over Alice's value and
// detection tag of the conditional entropy of Bob's (possibly flipped) bit.
inline double tag_grouped_cost(const KeyOutcomeDistribution& d, double q_flip) {
  double cost = 0.0;
  for (int ai = 0; ai < 2; ++ai) {
    for (int t = 0; t < 2; ++t) {
      const double pb1 = d.p[ai][0][t] * (1.0 - q_flip) + d.p[ai][1][t] * q_flip;
      const double pat = d.p[ai][0][t] + d.p[ai][1][t];
      if (pat <= 0.0) continue;
      cost += pat * binary_entropy(pb1 / pat);
    }
  }
  return cost;
}

}  // namespace detail

// (L): reconciliation grouped by Alice's detection tag, privacy term
// unchanged from the standard analysis.
inline double loss_info_rate(const ChannelModel& model, double sift, double f_ec) {
  const Channel ch(model);
  const double cost = detail::tag_grouped_cost(ch.detection_tag_distribution(), 0.0);
  const double ep_half_gap = half_minus_phase_error(ch.expected_bell());
  return sift * (one_minus_binary_entropy_near_half(ep_half_gap) - f_ec * cost);
}

// (C): tag-grouped reconciliation of the flipped key plus the noisy privacy
// refund.
inline double combined_rate(const ChannelModel& model, NoiseLevel noise, double sift,
                            double f_ec) {
  const Channel ch(model);
  const double cost = detail::tag_grouped_cost(ch.detection_tag_distribution(), noise.value());
  const double ep = phase_error_prob(ch.expected_bell()).value();
  return sift * (1.0 - f_ec * cost - binary_entropy(ep) + noisy_ancilla_entropy(ep, noise));
}

// One B-step of two-way reconciliation on (e_b, e_p). The update
//   e_b' = e_b^2 / D,  e_p' = 2 e_p (1 - e_b - e_p) / D,  D = 1 - 2 e_b + 2 e_b^2,
// drives e_p' -> 1/2 doubly exponentially, so the state keeps
// g = 1/2 - e_p, for which the update is the cancellation-free
//   g' = ((e_b - g)^2 + g^2) / D.
// The kept fraction shrinks by (e_b^2 + (1-e_b)^2)/2 = D/2 per step.
struct BStepState {
  double e_b = 0.0;
  double half_minus_ep = 0.5;  // g = 1/2 - e_p
  double kept_fraction = 1.0;

  double e_p() const { return 0.5 - half_minus_ep; }

  static BStepState from_probabilities(double e_b, double e_p, double kept = 1.0) {
    if (!(e_b >= 0.0 && e_b <= 0.5) || !(e_p >= 0.0 && e_p <= 0.5)) {
      throw std::domain_error("BStepState: error probabilities outside [0, 1/2]");
    }
    return BStepState{e_b, 0.5 - e_p, kept};
  }
};

inline BStepState bstep_update(const BStepState& s) {
  const double eb = s.e_b, g = s.half_minus_ep;
  const double den = 1.0 - 2.0 * eb + 2.0 * eb * eb;
  BStepState out;
  out.e_b = eb * eb / den;
  out.half_minus_ep = ((eb - g) * (eb - g) + g * g) / den;
  out.kept_fraction = s.kept_fraction * 0.5 * den;
  return out;
}

inline constexpr int kMaxBSteps = 5;

// (B): iterate n_steps B-steps from the model's (e_b, e_p(S)) and return
//   kept * sift * [1 - f_ec h(e_b') - h(e_p')].
// Beyond 5 steps the remaining margin falls below what the update's inputs
// can resolve, so deeper iterations are rejected.
inline double bstep_rate(const ChannelModel& model, int n_steps, double sift, double f_ec) {
  if (n_steps < 0 || n_steps > kMaxBSteps) {
    throw std::invalid_argument("bstep_rate: step count outside [0, 5]");
  }
  const Channel ch(model);
  const BellValue S = ch.expected_bell();
  if (S.value() <= 2.0) return -sift;  // no nonlocality, no key
  BStepState st;
  st.e_b = ch.expected_qber();
  st.half_minus_ep = half_minus_phase_error(S);
  for (int i = 0; i < n_steps; ++i) st = bstep_update(st);
  const double margin = one_minus_binary_entropy_near_half(st.half_minus_ep) -
                        f_ec * binary_entropy_small(st.e_b);
  return st.kept_fraction * sift * margin;
}

}  // namespace diqkd
