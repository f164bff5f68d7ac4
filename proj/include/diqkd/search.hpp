#pragma once

// Outer loops: nuisance-parameter optimization (xi, gamma, q_noise),
// feasibility thresholds along eta or e_d, and smallest-data-size searches.
// Every evaluation point is pure; sweeps are deterministic.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "diqkd/channel.hpp"
#include "diqkd/distill.hpp"
#include "diqkd/eat.hpp"
#include "diqkd/keyrate.hpp"

namespace diqkd {

// ---------------------------------------------------------------------------
// scalar optimizers

template <typename F>
double golden_max(F f, double a, double b, double xtol = 1e-9, int iters = 200) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > xtol; ++i) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Coarse grid scan followed by golden refinement around the best cell;
// robust to the mild non-smoothness the EAT block structure introduces.
template <typename F>
std::pair<double, double> grid_then_golden_max(F f, const std::vector<double>& grid) {
  std::size_t best_i = 0;
  double best = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best) { best = v; best_i = i; }
  }
  const double lo = grid[best_i == 0 ? 0 : best_i - 1];
  const double hi = grid[std::min(best_i + 1, grid.size() - 1)];
  double best_x = grid[best_i];
  if (lo < hi) {
    const double x = golden_max(f, lo, hi, 1e-7);
    const double v = f(x);
    if (v > best) { best = v; best_x = x; }
  }
  return {best_x, best};
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    g[static_cast<std::size_t>(i)] = std::pow(10.0, llo + (lhi - llo) * i / (points - 1.0));
  }
  return g;
}

// ---------------------------------------------------------------------------
// method selection

enum class Method {
  ComplementarityStandard,
  ComplementaritySpotcheck,
  EatOriginal,
  EatModified,
  DistillNoisy,
  DistillLoss,
  DistillCombined,
  DistillBStep,
};

enum class SweepAxis { Eta, Ed, Rounds };

struct SearchSpec {
  Method method = Method::ComplementarityStandard;
  SweepAxis axis = SweepAxis::Eta;
  ChannelModel base_model = ChannelModel::ideal(1.0, 0.0);
  double n = 1e6;
  bool asymptotic = false;
  double eps_f = 5e-11;       // complementarity failure-probability total
  double eps_sound = 1e-5;    // EAT soundness error
  double eps_complete = 1e-2; // deviation-model completeness error
  double f_ec = 1.0;
  int bstep_steps = 5;
  double tolerance = 1e-4;
  double bracket_lo = 0.5;
  double bracket_hi = 1.0;
  // Direct-observation mode: evaluate at reported (S_bar, e_b) instead of a
  // channel model plus deviation.
  bool use_direct_observation = false;
  double s_bar_direct = 0.0;
  double e_b_direct = 0.0;
};

inline bool is_distill(Method m) {
  return m == Method::DistillNoisy || m == Method::DistillLoss ||
         m == Method::DistillCombined || m == Method::DistillBStep;
}

// ---------------------------------------------------------------------------
// complementarity evaluation

// Statistics with every per-setting winning frequency equal to (S_bar+4)/8
// and key errors at e_b: the symmetric realisation of a reported Bell value.
inline BellStatistics statistics_from_observation(double s_bar, double e_b, double n,
                                                  const InputDistribution& inputs) {
  BellStatistics st;
  st.n = n;
  const double om = (s_bar + 4.0) / 8.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      st.mxy(x, y) = n * inputs.setting_prob(x, y);
      st.qxy(x, y) = st.mxy(x, y) * (1.0 - om);
    }
  }
  st.m = n * inputs.sift();
  st.q = st.m * e_b;
  return st;
}

struct PointEval {
  double key_balance = -1e300;
  double gamma = 0.0;
  double xi = 0.0;
};

namespace search_detail {

inline BellStatistics spec_statistics(const SearchSpec& spec, const InputDistribution& inputs,
                                      double n) {
  if (spec.use_direct_observation) {
    return statistics_from_observation(spec.s_bar_direct, spec.e_b_direct, n, inputs);
  }
  return worst_case_statistics(spec.base_model, inputs, n, FailureProb(spec.eps_complete));
}

inline double complementarity_balance(const SearchSpec& spec, double n, double gamma,
                                      double xi_val) {
  const bool spot = spec.method == Method::ComplementaritySpotcheck;
  const InputDistribution inputs = spot ? InputDistribution::spot_checking(gamma)
                                        : InputDistribution::standard_family(gamma);
  const SecurityBudget budget = SecurityBudget::thirds(spec.eps_f);
  const BellStatistics stats = spec_statistics(spec, inputs, n);
  const Regularization xi(xi_val);
  const auto n_rounds = static_cast<std::int64_t>(std::llround(n));
  const KatoPlan plan = plan_kato(n_rounds, inputs, budget, stats, xi);
  return key_length(stats, inputs, budget, xi, plan, spec.f_ec).key_balance;
}

}  // namespace search_detail

// Best xi at fixed everything else: golden section on log10(xi) over
// [-12, log10(0.49)].
struct OptimalXi {
  Regularization xi;
  double key_balance;
  bool degenerate;  // estимator stuck at or below the classical bound
};

inline OptimalXi optimal_xi(const std::function<double(double)>& balance_of_xi) {
  const double lo = -12.0, hi = std::log10(0.49);
  const double lx = golden_max([&](double l) { return balance_of_xi(std::pow(10.0, l)); },
                               lo, hi, 1e-4);
  const double xi = std::pow(10.0, lx);
  const double bal = balance_of_xi(xi);
  // If xi has no effect (degenerate estimate), report the bracket midpoint.
  const double probe_lo = balance_of_xi(1e-12), probe_hi = balance_of_xi(0.49);
  const bool degenerate = std::abs(probe_lo - probe_hi) < 1e-12 && probe_lo >= bal - 1e-9;
  if (degenerate) {
    return OptimalXi{Regularization(std::pow(10.0, 0.5 * (lo + hi))), bal, true};
  }
  return OptimalXi{Regularization(xi), bal, false};
}

// Key balance at one operating point with gamma and xi optimized.
inline PointEval best_complementarity_balance(const SearchSpec& spec, double n) {
  PointEval ev;
  const auto balance_at_gamma = [&](double g) {
    const double lx = golden_max(
        [&](double l) {
          return search_detail::complementarity_balance(spec, n, g, std::pow(10.0, l));
        },
        -12.0, std::log10(0.49), 1e-3);
    return search_detail::complementarity_balance(spec, n, g, std::pow(10.0, lx));
  };
  const auto [g_best, bal] = grid_then_golden_max(balance_at_gamma, log_grid(2e-3, 0.97, 40));
  ev.gamma = g_best;
  ev.key_balance = bal;
  const double lx = golden_max(
      [&](double l) {
        return search_detail::complementarity_balance(spec, n, g_best, std::pow(10.0, l));
      },
      -12.0, std::log10(0.49), 1e-4);
  ev.xi = std::pow(10.0, lx);
  ev.key_balance = std::max(ev.key_balance,
                            search_detail::complementarity_balance(spec, n, g_best, ev.xi));
  return ev;
}

// ---------------------------------------------------------------------------
// EAT evaluation

inline double eat_balance(const SearchSpec& spec, double n, double gamma) {
  const Channel ch(spec.base_model);
  double omega, e_b;
  if (spec.use_direct_observation) {
    omega = (spec.s_bar_direct + 4.0) / 8.0;
    e_b = spec.e_b_direct;
  } else {
    omega = (ch.expected_bell().value() + 4.0) / 8.0;
    e_b = ch.expected_qber();
  }
  SpotCheckParams params;
  params.n = n;
  params.gamma = gamma;
  params.omega_exp = omega;
  params.delta_est = completeness_deviation(gamma, n, FailureProb(spec.eps_complete));
  if (params.omega_exp + params.delta_est >= 1.0 ||
      params.omega_exp - params.delta_est <= 0.5) {
    return -1e18;
  }
  if (spec.method == Method::EatOriginal) {
    return eat_keylength_original(params, EatBudget::original_split(spec.eps_sound, spec.eps_complete),
                                  e_b, spec.f_ec);
  }
  return eat_keylength_modified(params, EatBudget::modified_split(spec.eps_sound, spec.eps_complete),
                                e_b, spec.f_ec);
}

inline PointEval best_eat_balance(const SearchSpec& spec, double n) {
  const auto [g_best, bal] = grid_then_golden_max(
      [&](double g) { return eat_balance(spec, n, g); }, log_grid(3e-4, 0.75, 110));
  return PointEval{bal, g_best, 0.0};
}

// ---------------------------------------------------------------------------
// distillation rates (asymptotic)

// q grid for the noise optimization: linear sweep plus points crowding 1/2,
// where the optimum migrates as the operating point approaches threshold.
// The endpoint q = 1/2 itself always gives rate -> 0 and is excluded.
inline const std::vector<double>& noise_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 0; i <= 45; ++i) g.push_back(0.01 * i);
    for (double u : log_grid(1e-3, 0.05, 25)) g.push_back(0.5 - u);
    return g;
  }();
  return grid;
}

inline double distill_rate(Method m, const ChannelModel& model, double f_ec, int bsteps,
                           double sift = 1.0) {
  switch (m) {
    case Method::DistillLoss:
      return loss_info_rate(model, sift, f_ec);
    case Method::DistillBStep:
      return bstep_rate(model, bsteps, sift, f_ec);
    case Method::DistillNoisy: {
      const Channel ch(model);
      const BellValue S = ch.expected_bell();
      const double e_b = ch.expected_qber();
      double best = -1e300;
      for (double q : noise_grid()) {
        best = std::max(best, noisy_rate(S, e_b, NoiseLevel(q), sift, f_ec));
      }
      return best;
    }
    case Method::DistillCombined: {
      double best = -1e300;
      for (double q : noise_grid()) {
        best = std::max(best, combined_rate(model, NoiseLevel(q), sift, f_ec));
      }
      return best;
    }
    default:
      throw std::invalid_argument("distill_rate: not a distillation method");
  }
}

// Optimal added-noise level for (N)/(C) at one operating point.
inline NoiseLevel optimal_noise(Method m, const ChannelModel& model, double f_ec) {
  const Channel ch(model);
  const BellValue S = ch.expected_bell();
  const double e_b = ch.expected_qber();
  const auto rate_at = [&](double q) {
    return m == Method::DistillNoisy ? noisy_rate(S, e_b, NoiseLevel(q), 1.0, f_ec)
                                     : combined_rate(model, NoiseLevel(q), 1.0, f_ec);
  };
  double best_q = 0.0, best = -1e300;
  for (double q : noise_grid()) {
    const double v = rate_at(q);
    if (v > best) { best = v; best_q = q; }
  }
  if (best_q > 0.005 && best_q < 0.49) {
    const double q = golden_max(rate_at, best_q - 0.005, std::min(best_q + 0.005, 0.4999), 1e-9);
    if (rate_at(q) > best) best_q = q;
  }
  return NoiseLevel(best_q);
}

// ---------------------------------------------------------------------------
// unified point evaluation and the searches built on it

inline ChannelModel model_at(const SearchSpec& spec, double axis_value) {
  ChannelModel m = spec.base_model;
  if (spec.axis == SweepAxis::Eta) {
    m.eta_a = m.eta_b = axis_value;
  } else if (spec.axis == SweepAxis::Ed) {
    m.e_d = axis_value;
  }
  return m;
}

// Fully inner-optimized figure of merit at (model point, n): key balance in
// bits for the finite-size methods, per-round rate for the distillation
// methods (sign is all the searches need).
inline double evaluate_point(const SearchSpec& spec, const ChannelModel& model, double n) {
  SearchSpec local = spec;
  local.base_model = model;
  switch (spec.method) {
    case Method::ComplementarityStandard:
    case Method::ComplementaritySpotcheck:
      if (spec.asymptotic) {
        const Channel ch(model);
        return asymptotic_rate(ch.expected_bell(), ch.expected_qber(), 1.0, local.f_ec);
      }
      return best_complementarity_balance(local, n).key_balance;
    case Method::EatOriginal:
    case Method::EatModified:
      return best_eat_balance(local, n).key_balance;
    default:
      return distill_rate(spec.method, model, spec.f_ec, spec.bstep_steps);
  }
}

// Smallest n with positive key: exponential bracketing then bisection in
// log n, 1% relative tolerance.
inline double min_rounds(const SearchSpec& spec) {
  if (!is_distill(spec.method)) {
    double asym;
    if (spec.use_direct_observation) {
      asym = asymptotic_rate(BellValue(spec.s_bar_direct), spec.e_b_direct, 1.0, spec.f_ec);
    } else {
      const Channel ch(spec.base_model);
      asym = asymptotic_rate(ch.expected_bell(), ch.expected_qber(), 1.0, spec.f_ec);
    }
    if (asym <= 0.0) {
      throw std::runtime_error("min_rounds: asymptotic rate nonpositive, no finite n suffices");
    }
  }
  const auto positive = [&](double n) {
    return evaluate_point(spec, spec.base_model, n) > 0.0;
  };
  double hi = 1e4;
  int guard = 0;
  while (!positive(hi)) {
    hi *= 4.0;
    if (++guard > 24) throw std::runtime_error("min_rounds: no positive key up to 2e18 rounds");
  }
  double lo = hi / 4.0;
  while (hi / lo > 1.01) {
    const double mid = std::sqrt(lo * hi);
    (positive(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Crossing of the inner-optimized figure of merit along eta or e_d,
// absolute tolerance spec.tolerance (default 1e-4).
inline double threshold(const SearchSpec& spec) {
  if (spec.axis == SweepAxis::Rounds) {
    throw std::invalid_argument("threshold: sweep axis must be eta or e_d");
  }
  const auto value = [&](double x) {
    return evaluate_point(spec, model_at(spec, x), spec.n);
  };
  double lo = spec.bracket_lo, hi = spec.bracket_hi;
  double flo = value(lo), fhi = value(hi);
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::runtime_error("threshold: no sign change on the bracket");
  }
  while (hi - lo > spec.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double fm = value(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Best input distribution at one operating point (standard family or
// spot-checking test ratio).
struct OptimalInputs {
  InputDistribution inputs;
  double key_balance;
  bool abort;
};

inline OptimalInputs optimal_inputs(const SearchSpec& spec, double n) {
  const PointEval ev = best_complementarity_balance(spec, n);
  const bool spot = spec.method == Method::ComplementaritySpotcheck;
  return OptimalInputs{spot ? InputDistribution::spot_checking(ev.gamma)
                            : InputDistribution::standard_family(ev.gamma),
                       ev.key_balance, ev.key_balance <= 0.0};
}

}  // namespace diqkd
