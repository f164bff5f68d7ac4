#pragma once

// Protocol-level data: basis-choice distributions, accumulated counts,
// and the failure-probability budget.

#include <array>
#include <cmath>
#include <stdexcept>

#include "diqkd/concentration.hpp"

namespace diqkd {

// Basis-choice distributions. Two modes:
//  - standard: Alice draws x in {0,1,2} from p_x, Bob y in {0,1} from p_y;
//    key rounds are (x, y) = (2, 0).
//  - spot-checking: a shared coin with Pr(test) = gamma selects Bell tests
//    (x, y uniform over {0,1}^2) versus key rounds (2, 0).
class InputDistribution {
 public:
  static InputDistribution standard(const std::array<double, 3>& p_x,
                                    const std::array<double, 2>& p_y) {
    InputDistribution d;
    d.p_x_ = p_x;
    d.p_y_ = p_y;
    d.validate();
    return d;
  }

  // The one-parameter family used throughout the sweeps:
  // p_x = (gamma/2, gamma/2, 1-gamma), p_y uniform.
  static InputDistribution standard_family(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw std::domain_error("standard_family: gamma outside (0, 1)");
    }
    return standard({gamma / 2.0, gamma / 2.0, 1.0 - gamma}, {0.5, 0.5});
  }

  static InputDistribution spot_checking(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw std::domain_error("spot_checking: gamma outside (0, 1]");
    }
    InputDistribution d;
    d.spot_gamma_ = gamma;
    d.p_x_ = {gamma / 2.0, gamma / 2.0, 1.0 - gamma};  // marginals, informational
    d.p_y_ = {0.5, 0.5};
    return d;
  }

  bool is_spot_checking() const { return spot_gamma_ > 0.0; }
  double spot_gamma() const { return spot_gamma_; }
  double p_x(int x) const { return p_x_.at(static_cast<std::size_t>(x)); }
  double p_y(int y) const { return p_y_.at(static_cast<std::size_t>(y)); }

  // Probability that a round is the Bell-test setting (x, y), x,y in {0,1}.
  double setting_prob(int x, int y) const {
    if (x < 0 || x > 1 || y < 0 || y > 1) {
      throw std::invalid_argument("setting_prob: Bell settings are x,y in {0,1}");
    }
    if (is_spot_checking()) return spot_gamma_ / 4.0;
    return p_x_[static_cast<std::size_t>(x)] * p_y_[static_cast<std::size_t>(y)];
  }

  // Probability of a key-generation round.
  double sift() const {
    if (is_spot_checking()) return 1.0 - spot_gamma_;
    return p_x_[2] * p_y_[0];
  }

  // Fraction of rounds that are Bell tests.
  double test_ratio() const {
    if (is_spot_checking()) return spot_gamma_;
    return p_x_[0] + p_x_[1];
  }

 private:
  void validate() const {
    double sx = 0.0, sy = 0.0;
    for (double p : p_x_) {
      if (p < 0.0) throw std::domain_error("InputDistribution: negative probability");
      sx += p;
    }
    for (double p : p_y_) {
      if (p < 0.0) throw std::domain_error("InputDistribution: negative probability");
      sy += p;
    }
    if (std::abs(sx - 1.0) > 1e-12 || std::abs(sy - 1.0) > 1e-12) {
      throw std::domain_error("InputDistribution: distribution does not sum to 1");
    }
  }

  std::array<double, 3> p_x_{0.25, 0.25, 0.5};
  std::array<double, 2> p_y_{0.5, 0.5};
  double spot_gamma_ = 0.0;  // 0 means standard mode
};

// Accumulated counts over an experiment. Counts are doubles so that the
// deterministic worst-case statistics (fractional expected counts) share
// the type with sampled integer counts.
struct BellStatistics {
  double n = 0;                       // total rounds
  std::array<double, 4> m_xy{};      // rounds with setting (x,y), index 2x+y
  std::array<double, 4> q_xy{};      // of those, rounds lost: (-1)^{xy} a b = -1
  double m = 0;                       // key-generation rounds
  double q = 0;                       // key rounds with a != b

  double& mxy(int x, int y) { return m_xy[static_cast<std::size_t>(2 * x + y)]; }
  double& qxy(int x, int y) { return q_xy[static_cast<std::size_t>(2 * x + y)]; }
  double mxy(int x, int y) const { return m_xy[static_cast<std::size_t>(2 * x + y)]; }
  double qxy(int x, int y) const { return q_xy[static_cast<std::size_t>(2 * x + y)]; }

  void validate() const {
    double sum_m = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (q_xy[static_cast<std::size_t>(i)] > m_xy[static_cast<std::size_t>(i)] + 1e-9) {
        throw std::domain_error("BellStatistics: q_xy > m_xy");
      }
      sum_m += m_xy[static_cast<std::size_t>(i)];
    }
    if (q > m + 1e-9) throw std::domain_error("BellStatistics: q > m");
    if (m + sum_m > n + 1e-6) throw std::domain_error("BellStatistics: m + sum m_xy > n");
  }
};

// Failure-probability split for the complementarity analysis:
// eps_f = eps_pe + sum_xy eps_xy + eps_pc.
struct SecurityBudget {
  FailureProb eps_pe;
  std::array<FailureProb, 4> eps_xy;
  FailureProb eps_pc;

  // Uniform split of the four Bell-setting budgets: eps_xy = eps_s / 4.
  static SecurityBudget split(double eps_pe, double eps_s, double eps_pc) {
    const FailureProb exy(eps_s / 4.0);
    SecurityBudget b{FailureProb(eps_pe), {exy, exy, exy, exy}, FailureProb(eps_pc)};
    b.check_total();
    return b;
  }

  // Equal thirds of the total failure probability, the heuristic split used
  // for all fixed-eps_f sweeps.
  static SecurityBudget thirds(double eps_f) {
    return split(eps_f / 3.0, eps_f / 3.0, eps_f / 3.0);
  }

  double total() const {
    double t = eps_pe.value() + eps_pc.value();
    for (const auto& e : eps_xy) t += e.value();
    return t;
  }

  void check_total() const {
    if (total() >= 1.0) throw std::domain_error("SecurityBudget: total failure probability >= 1");
  }
};

}  // namespace diqkd
