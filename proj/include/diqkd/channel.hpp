#pragma once

// Honest-device model: a (possibly partially entangled) two-qubit state
// through a depolarizing channel, measured by angle-parameterized
// observables with finite detection efficiency. Undetected events output +1
// on the missing side before any postprocessing, so a double no-detection
// always wins the settings with (-1)^{xy} = +1.
//
// All expectations are computed by explicit density-matrix algebra; the
// closed forms elsewhere are checked against this path.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "diqkd/phase_error.hpp"
#include "diqkd/rng.hpp"
#include "diqkd/statistics.hpp"

namespace diqkd {

struct ChannelModel {
  double eta_a = 1.0;
  double eta_b = 1.0;
  double e_d = 0.0;
  // Observable angles, convention O(theta) = sin(theta) sx + cos(theta) sz.
  std::array<double, 3> theta_a{M_PI / 4.0, -M_PI / 4.0, 0.0};
  std::array<double, 2> theta_b{0.0, M_PI / 2.0};
  // Shared state cos(Omega)|00> + sin(Omega)|11>; pi/4 is the Bell state.
  double state_angle = M_PI / 4.0;
  int key_x = 2;
  int key_y = 0;

  static ChannelModel ideal(double eta, double e_d) {
    ChannelModel m;
    m.eta_a = m.eta_b = eta;
    m.e_d = e_d;
    return m;
  }

  // Two-observable-per-side configuration used for two-way reconciliation,
  // key setting (0, 0).
  static ChannelModel bstep_config(double eta, double e_d) {
    ChannelModel m;
    m.eta_a = m.eta_b = eta;
    m.e_d = e_d;
    m.state_angle = 0.6224;
    m.theta_a = {-0.35923, 1.1538, 0.0};
    m.theta_b = {0.35923, -1.1538};
    m.key_x = 0;
    m.key_y = 0;
    return m;
  }

  void validate() const {
    if (!(eta_a >= 0.0 && eta_a <= 1.0 && eta_b >= 0.0 && eta_b <= 1.0)) {
      throw std::domain_error("ChannelModel: transmittance outside [0, 1]");
    }
    if (!(e_d >= 0.0 && e_d <= 1.0)) {
      throw std::domain_error("ChannelModel: depolarizing factor outside [0, 1]");
    }
  }
};

namespace detail {

inline Eigen::Matrix2d pauli_x() {
  Eigen::Matrix2d m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2d pauli_z() {
  Eigen::Matrix2d m;
  m << 1, 0, 0, -1;
  return m;
}

inline Eigen::Matrix2d observable(double theta) {
  return std::sin(theta) * pauli_x() + std::cos(theta) * pauli_z();
}

inline Eigen::Matrix4d kron2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

inline Eigen::Matrix4d noisy_state(const ChannelModel& model) {
  Eigen::Vector4d psi;
  psi << std::cos(model.state_angle), 0, 0, std::sin(model.state_angle);
  Eigen::Matrix4d rho = psi * psi.transpose();
  return (1.0 - model.e_d) * rho + model.e_d * 0.25 * Eigen::Matrix4d::Identity();
}

// Projector onto outcome s in {+1, -1} of O(theta).
inline Eigen::Matrix2d outcome_projector(double theta, int s) {
  return 0.5 * (Eigen::Matrix2d::Identity() + s * observable(theta));
}

}  // namespace detail

struct KeyOutcomeDistribution {
  // p[a][b][tag]: a, b indexed 0 -> +1, 1 -> -1; tag 1 = Alice no-detection.
  double p[2][2][2] = {};

  double marginal_ab(int ai, int bi) const { return p[ai][bi][0] + p[ai][bi][1]; }
};

class Channel {
 public:
  explicit Channel(const ChannelModel& model) : model_(model) {
    model.validate();
    rho_ = detail::noisy_state(model);
  }

  const ChannelModel& model() const { return model_; }

  // E[ab | x, y] with the +1 assignment for no-detections.
  double expected_correlator(int x, int y) const {
    const Eigen::Matrix2d A = detail::observable(model_.theta_a.at(static_cast<std::size_t>(x)));
    const Eigen::Matrix2d B = detail::observable(model_.theta_b.at(static_cast<std::size_t>(y)));
    const double eab = (rho_ * detail::kron2(A, B)).trace();
    const double ea = (rho_ * detail::kron2(A, Eigen::Matrix2d::Identity())).trace();
    const double eb = (rho_ * detail::kron2(Eigen::Matrix2d::Identity(), B)).trace();
    const double na = model_.eta_a, nb = model_.eta_b;
    return na * nb * eab + na * (1.0 - nb) * ea + (1.0 - na) * nb * eb +
           (1.0 - na) * (1.0 - nb);
  }

  double key_correlator() const { return expected_correlator(model_.key_x, model_.key_y); }

  BellValue expected_bell() const {
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) s += ((x & y) ? -1.0 : 1.0) * expected_correlator(x, y);
    return BellValue(std::clamp(s, 0.0, 4.0));
  }

  double expected_qber() const { return 0.5 * (1.0 - key_correlator()); }

  // Per-setting CHSH winning probability Pr[(-1)^{xy} a b = +1].
  double winning_prob(int x, int y) const {
    return 0.5 * (1.0 + ((x & y) ? -1.0 : 1.0) * expected_correlator(x, y));
  }

  // Joint outcome probabilities for an input pair (x keyed by model angles;
  // x = key_x selects theta_a[key_x]).
  std::array<double, 4> outcome_distribution(int x, int y) const {
    const double tha = model_.theta_a.at(static_cast<std::size_t>(x));
    const double thb = model_.theta_b.at(static_cast<std::size_t>(y));
    std::array<double, 4> out{};
    const double na = model_.eta_a, nb = model_.eta_b;
    for (int ai = 0; ai < 2; ++ai) {
      const int a = ai == 0 ? 1 : -1;
      const Eigen::Matrix2d Pa = detail::outcome_projector(tha, a);
      for (int bi = 0; bi < 2; ++bi) {
        const int b = bi == 0 ? 1 : -1;
        const Eigen::Matrix2d Pb = detail::outcome_projector(thb, b);
        double p = na * nb * (rho_ * detail::kron2(Pa, Pb)).trace();
        if (b == 1) p += na * (1.0 - nb) * (rho_ * detail::kron2(Pa, Eigen::Matrix2d::Identity())).trace();
        if (a == 1) p += (1.0 - na) * nb * (rho_ * detail::kron2(Eigen::Matrix2d::Identity(), Pb)).trace();
        if (a == 1 && b == 1) p += (1.0 - na) * (1.0 - nb);
        out[static_cast<std::size_t>(2 * ai + bi)] = p;
      }
    }
    return out;
  }

  // Joint distribution of (a, b, Alice-detection tag) in key rounds.
  KeyOutcomeDistribution detection_tag_distribution() const {
    const double tha = model_.theta_a.at(static_cast<std::size_t>(model_.key_x));
    const double thb = model_.theta_b.at(static_cast<std::size_t>(model_.key_y));
    KeyOutcomeDistribution d;
    const double na = model_.eta_a, nb = model_.eta_b;
    for (int ai = 0; ai < 2; ++ai) {
      const int a = ai == 0 ? 1 : -1;
      const Eigen::Matrix2d Pa = detail::outcome_projector(tha, a);
      for (int bi = 0; bi < 2; ++bi) {
        const int b = bi == 0 ? 1 : -1;
        const Eigen::Matrix2d Pb = detail::outcome_projector(thb, b);
        double p0 = na * nb * (rho_ * detail::kron2(Pa, Pb)).trace();
        if (b == 1) p0 += na * (1.0 - nb) * (rho_ * detail::kron2(Pa, Eigen::Matrix2d::Identity())).trace();
        d.p[ai][bi][0] = p0;
        double p1 = 0.0;
        if (a == 1) {
          p1 = (1.0 - na) * nb * (rho_ * detail::kron2(Eigen::Matrix2d::Identity(), Pb)).trace();
          if (b == 1) p1 += (1.0 - na) * (1.0 - nb);
        }
        d.p[ai][bi][1] = p1;
      }
    }
    return d;
  }

 private:
  ChannelModel model_;
  Eigen::Matrix4d rho_;
};

// i.i.d. Monte Carlo realization of a run: per round draw the setting from
// the input distribution and the outcome pair from the exact joint. Counts
// are deterministic for a fixed seed.
inline BellStatistics sample_rounds(const ChannelModel& model, const InputDistribution& inputs,
                                    std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_rounds: n < 1");
  const Channel ch(model);
  // Precompute joint distributions for the four Bell settings + key setting.
  std::array<std::array<double, 4>, 4> bell_joint{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) bell_joint[static_cast<std::size_t>(2 * x + y)] = ch.outcome_distribution(x, y);
  const std::array<double, 4> key_joint = ch.outcome_distribution(model.key_x, model.key_y);
  // Off-protocol settings such as (2, 1) consume rounds without statistics.
  Xoshiro256 rng(seed);
  BellStatistics st;
  st.n = static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    int x, y;
    if (inputs.is_spot_checking()) {
      if (rng.next_double() < inputs.spot_gamma()) {
        const std::uint64_t bits = rng.next_u64();
        x = static_cast<int>(bits & 1u);
        y = static_cast<int>((bits >> 1) & 1u);
      } else {
        x = 2;
        y = 0;
      }
    } else {
      const double ux = rng.next_double();
      x = ux < inputs.p_x(0) ? 0 : (ux < inputs.p_x(0) + inputs.p_x(1) ? 1 : 2);
      y = rng.next_double() < inputs.p_y(0) ? 0 : 1;
    }
    if (x == 2 && y != 0) continue;  // discarded mismatched setting
    const auto& joint = (x == 2) ? key_joint : bell_joint[static_cast<std::size_t>(2 * x + y)];
    const double u = rng.next_double();
    int cell = 3;
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) {
      acc += joint[static_cast<std::size_t>(c)];
      if (u < acc) { cell = c; break; }
    }
    const int a = (cell >> 1) ? -1 : 1;
    const int b = (cell & 1) ? -1 : 1;
    if (x == 2) {
      st.m += 1.0;
      if (a != b) st.q += 1.0;
    } else {
      st.mxy(x, y) += 1.0;
      if (((x & y) ? -1 : 1) * a * b == -1) st.qxy(x, y) += 1.0;
    }
  }
  return st;
}

// Deviation width used by the completeness model:
// delta_est = sqrt(-ln(eps_complete) / (2 gamma n)).
inline double completeness_deviation(double test_ratio, double n, FailureProb eps_complete) {
  return std::sqrt(-std::log(eps_complete.value()) / (2.0 * test_ratio * n));
}

// Deterministic pessimistic statistics: every per-setting winning frequency
// sits delta_est below its expectation, key-round errors at expectation.
// Used for all fixed-deviation comparison sweeps (eps_complete = 1e-2 there).
inline BellStatistics worst_case_statistics(const ChannelModel& model,
                                            const InputDistribution& inputs, double n,
                                            FailureProb eps_complete) {
  const Channel ch(model);
  const double dest = completeness_deviation(inputs.test_ratio(), n, eps_complete);
  BellStatistics st;
  st.n = n;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = inputs.setting_prob(x, y);
      const double om = std::clamp(ch.winning_prob(x, y) - dest, 0.0, 1.0);
      st.mxy(x, y) = n * pxy;
      st.qxy(x, y) = st.mxy(x, y) * (1.0 - om);
    }
  }
  st.m = n * inputs.sift();
  st.q = st.m * ch.expected_qber();
  return st;
}

// Expected (mean) statistics without any deviation.
inline BellStatistics expected_statistics(const ChannelModel& model,
                                          const InputDistribution& inputs, double n) {
  const Channel ch(model);
  BellStatistics st;
  st.n = n;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      st.mxy(x, y) = n * inputs.setting_prob(x, y);
      st.qxy(x, y) = st.mxy(x, y) * (1.0 - ch.winning_prob(x, y));
    }
  }
  st.m = n * inputs.sift();
  st.q = st.m * ch.expected_qber();
  return st;
}

}  // namespace diqkd
