#pragma once

// Observed statistics + security budget -> key length. Implements the
// refined per-setting estimator and privacy-amplification cost; the
// aggregate single-(delta, delta') form is the symmetric special case.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "diqkd/concentration.hpp"
#include "diqkd/entropy.hpp"
#include "diqkd/phase_error.hpp"
#include "diqkd/statistics.hpp"

namespace diqkd {

// Planned concentration parameters: one (delta, delta') pair per Bell
// setting for the estimator, one pair for the phase-error sample entropy.
struct KatoPlan {
  std::array<KatoParams, 4> bell;  // index 2x+y
  KatoParams phase;
};

// S_bar = sum_xy (m_xy - 2 q_xy) / (n p_X(x) p_Y(y)).
inline BellValue observed_bell(const BellStatistics& stats, const InputDistribution& inputs) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = inputs.setting_prob(x, y);
      if (pxy <= 0.0) {
        throw std::domain_error("observed_bell: tested setting has zero probability");
      }
      s += (stats.mxy(x, y) - 2.0 * stats.qxy(x, y)) / (stats.n * pxy);
    }
  }
  return BellValue(std::clamp(s, 0.0, 4.0));
}

// e_b = q / m.
inline double bit_error_rate(const BellStatistics& stats) {
  if (stats.m <= 0.0) throw std::domain_error("bit_error_rate: no key rounds");
  return stats.q / stats.m;
}

// Estimated expected Bell value,
//   S_est = sum_xy { 2[(1+2 d'_xy)(m_xy - q_xy) - n(d_xy + d'_xy)] / (n p_xy) - 1 },
// clamped to the physical range [0, 2*sqrt(2)]: the estimator can overshoot
// on lucky statistics, and e_p is undefined above the quantum bound.
inline BellValue estimate_bell(const BellStatistics& stats, const InputDistribution& inputs,
                               const std::array<KatoParams, 4>& kato) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = inputs.setting_prob(x, y);
      if (pxy <= 0.0) {
        throw std::domain_error("estimate_bell: tested setting has zero probability");
      }
      const KatoParams& p = kato[static_cast<std::size_t>(2 * x + y)];
      const double win = stats.mxy(x, y) - stats.qxy(x, y);
      s += 2.0 * ((1.0 + 2.0 * p.delta_prime) * win -
                  stats.n * (p.delta + p.delta_prime)) /
               (stats.n * pxy) -
           1.0;
    }
  }
  return BellValue(std::clamp(s, 0.0, kTsirelson));
}

// Four-step planning procedure for the Kato parameters. Planning consumes
// predictions only; any (delta, delta') pair satisfying the tail constraint
// is sound, so prediction accuracy affects tightness, never security.
//   1. predicted per-setting winning counts come from `predicted` stats;
//   2. per setting, maximize the estimator contribution at the predicted
//      per-round winning frequency (m~_xy - q~_xy)/n;
//   3. evaluate the predicted estimate S~_est;
//   4. minimize the privacy cost at chi~ = h(e_p^xi(S~_est)) / c_xi.
inline KatoPlan plan_kato(std::int64_t n, const InputDistribution& inputs,
                          const SecurityBudget& budget, const BellStatistics& predicted,
                          Regularization xi) {
  KatoPlan plan;
  BellStatistics pred = predicted;
  pred.n = static_cast<double>(n);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const std::size_t i = static_cast<std::size_t>(2 * x + y);
      const double pxy = inputs.setting_prob(x, y);
      if (predicted.qxy(x, y) > n * pxy + 1e-9) {
        throw std::domain_error("plan_kato: predicted q_xy exceeds expected setting rounds");
      }
      const double win = (predicted.mxy(x, y) - predicted.qxy(x, y)) / predicted.n;
      plan.bell[i] = optimize_kato_upper(n, budget.eps_xy[i],
                                         std::clamp(win, 0.0, 1.0));
      pred.mxy(x, y) = static_cast<double>(n) * pxy;
      pred.qxy(x, y) = pred.mxy(x, y) - win * static_cast<double>(n);
    }
  }
  const BellValue s_est = estimate_bell(pred, inputs, plan.bell);
  const double chi = binary_entropy(regularized_phase_error(s_est, xi).value()) / c_xi(xi);
  plan.phase = optimize_kato_lower(n, budget.eps_pe, std::clamp(chi, 0.0, 1.0));
  return plan;
}

// Azuma plan: all delta' = 0 and delta the plain Azuma deviation, wrapped
// as Kato parameters (they satisfy the tail constraint with room to spare
// when c > 1, so the budget still holds).
inline KatoPlan plan_azuma(std::int64_t n, const InputDistribution& inputs,
                           const SecurityBudget& budget, bool paper_range_constants = false) {
  KatoPlan plan;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const std::size_t i = static_cast<std::size_t>(2 * x + y);
      // The constant-bound variant uses increment range c_xy = 1 + p_xy in
      // place of the predictable-bound range 1.
      const double c = paper_range_constants ? 1.0 + inputs.setting_prob(x, y) : 1.0;
      plan.bell[i] = KatoParams{azuma_deviation(n, c, budget.eps_xy[i]), 0.0};
    }
  }
  plan.phase = KatoParams{azuma_deviation(n, 1.0, budget.eps_pe), 0.0};
  return plan;
}

// Privacy-amplification cost,
//   I_pa = n { sift h[e_p^xi(S_est)] + c_xi (d_p + d'_p) } / (1 + 2 d'_p) - log2 eps_pc,
// with sift = p_X(2) p_Y(0) in the standard protocol and (1 - gamma) in the
// spot-checking protocol.
inline double privacy_amp_cost(const BellStatistics& stats, const InputDistribution& inputs,
                               const SecurityBudget& budget, Regularization xi,
                               const KatoPlan& plan) {
  const BellValue s_est = estimate_bell(stats, inputs, plan.bell);
  const double sift = inputs.sift();
  const double cx = c_xi(xi);
  const double h_ep = binary_entropy(regularized_phase_error(s_est, xi).value());
  return stats.n * (sift * h_ep + cx * (plan.phase.delta + plan.phase.delta_prime)) /
             (1.0 + 2.0 * plan.phase.delta_prime) -
         std::log2(budget.eps_pc.value());
}

// I_ir = f_ec * m * h(e_b).
inline double reconciliation_cost(double m, double e_b, double f_ec) {
  if (f_ec < 1.0) throw std::invalid_argument("reconciliation_cost: f_ec < 1");
  return f_ec * m * binary_entropy(e_b);
}

struct KeyReport {
  double s_bar = 0.0;        // observed Bell value
  double s_est = 0.0;        // estimated expected Bell value
  double xi = 0.0;
  double i_ab = 0.0;         // reconciled key bits (net of spot-check coin cost)
  double i_pa = 0.0;         // privacy amplification cost
  double key_length = 0.0;   // max(key_balance, 0)
  double key_balance = 0.0;  // i_ab - i_pa, signed, for threshold searches
  double eps_total = 0.0;
  bool abort = false;
};

// k = m (1 - f_ec h(e_b)) - I_pa, minus the n h(gamma) shared-coin cost in
// spot-checking mode. Never pre-aborts on the observed Bell value: a
// nonpositive balance IS the abort condition.
inline KeyReport key_length(const BellStatistics& stats, const InputDistribution& inputs,
                            const SecurityBudget& budget, Regularization xi,
                            const KatoPlan& plan, double f_ec) {
  stats.validate();
  KeyReport r;
  r.s_bar = observed_bell(stats, inputs).value();
  r.s_est = estimate_bell(stats, inputs, plan.bell).value();
  r.xi = xi.value();
  r.eps_total = budget.total();
  const double e_b = stats.m > 0.0 ? bit_error_rate(stats) : 0.0;
  r.i_ab = stats.m - reconciliation_cost(stats.m, e_b, f_ec);
  if (inputs.is_spot_checking()) {
    r.i_ab -= stats.n * binary_entropy(inputs.spot_gamma());
  }
  r.i_pa = privacy_amp_cost(stats, inputs, budget, xi, plan);
  r.key_balance = r.i_ab - r.i_pa;
  r.abort = !(r.key_balance > 0.0);
  r.key_length = r.abort ? 0.0 : r.key_balance;
  return r;
}

// Asymptotic per-round rate: sift [1 - f_ec h(e_b) - h(e_p(S))].
inline double asymptotic_rate(BellValue S, double e_b, double sift, double f_ec) {
  return sift * (one_minus_binary_entropy_near_half(half_minus_phase_error(S)) -
                 f_ec * binary_entropy(e_b));
}

}  // namespace diqkd
