#pragma once

// Brute-force verification of the phase-error bound. Searches the
// two-qubit parameterization directly: real density matrices in the Bell
// basis with the rotation gauge c_zx = 0 (diagonal plus the rho_12 = -rho_34
// off-diagonal pair; the remaining entries enter neither the Bell value nor
// the objective), measurement angles theta_0, theta_1, gamma on uniform
// grids over [0, 2pi). Among all grid points whose Bell value hits the
// target within an absolute tolerance of 1e-3, the minimal complementary
// correlation sqrt(c_xx^2 + c_zx^2) gives the worst-case phase error.
//
// The scan over (theta_0, theta_1) per (state, gamma) uses the exact grid
// semantics: S = f0(theta_0) + f1(theta_1) with f_i a sampled sinusoid, so a
// hit exists iff some grid theta_1 lands in the arc where f1 compensates
// f0. That membership test is O(1) per theta_0.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "diqkd/phase_error.hpp"

namespace diqkd {

namespace oracle_detail {

inline constexpr double kTwoPi = 6.2831853071795864769;
inline constexpr double kBellTol = 1e-3;  // |S_grid - S_target| acceptance

struct StateCorr {
  double g;      // sqrt(c_xx^2 + c_zx^2), objective
  double s_cap;  // 2 * Frobenius norm of the correlator matrix: exact
                 // continuum maximum of S over all angle triples, so any
                 // state with s_cap below target is rejected outright
  double c_xx, c_xz, c_zx, c_zz;
};

// Eigenvalue projection of one 2x2 symmetric block [[a, r], [r, b]]:
// negative eigenvalue clipped to zero.
struct Block {
  double a, b, r;
  void project() {
    const double mean = 0.5 * (a + b);
    const double rad = std::sqrt(0.25 * (a - b) * (a - b) + r * r);
    const double lo = mean - rad;
    if (lo >= 0.0) return;
    // keep only the nonnegative eigenvalue's component
    const double hi = std::max(mean + rad, 0.0);
    if (hi == 0.0) { a = b = r = 0.0; return; }
    // eigenvector of hi: (cos t, sin t) with tan(2t) = 2r/(a-b)
    const double t = 0.5 * std::atan2(2.0 * r, a - b);
    const double c = std::cos(t), s = std::sin(t);
    a = hi * c * c;
    b = hi * s * s;
    r = hi * c * s;
  }
  double trace() const { return a + b; }
};

// Enumerate the state grid and reduce each point to its correlators.
inline std::vector<StateCorr> build_state_grid(int diag_res, int offdiag_res) {
  std::vector<StateCorr> states;
  states.reserve(4096);
  const double dstep = 1.0 / diag_res;
  for (int i0 = 0; i0 <= diag_res; ++i0) {
    for (int i1 = 0; i1 + i0 <= diag_res; ++i1) {
      for (int i2 = 0; i2 + i1 + i0 <= diag_res; ++i2) {
        const int i3 = diag_res - i0 - i1 - i2;
        const double d0 = i0 * dstep, d1 = i1 * dstep, d2 = i2 * dstep, d3 = i3 * dstep;
        for (int j = -offdiag_res; j <= offdiag_res; ++j) {
          const double rho12 = 0.5 * j / offdiag_res;
          Block b01{d0, d1, rho12};
          Block b23{d2, d3, -rho12};
          b01.project();
          b23.project();
          const double tr = b01.trace() + b23.trace();
          if (tr <= 0.0) continue;
          const double inv = 1.0 / tr;
          const double r0 = b01.a * inv, r1 = b01.b * inv, r2 = b23.a * inv, r3 = b23.b * inv;
          const double o01 = b01.r * inv, o23 = b23.r * inv;
          StateCorr sc;
          sc.c_xx = r0 - r1 - r2 + r3;
          sc.c_zz = r0 - r1 + r2 - r3;
          sc.c_xz = -2.0 * o01 + 2.0 * o23;
          sc.c_zx = 2.0 * o01 + 2.0 * o23;
          sc.g = std::sqrt(sc.c_xx * sc.c_xx + sc.c_zx * sc.c_zx);
          sc.s_cap = 2.0 * std::sqrt(sc.c_xx * sc.c_xx + sc.c_xz * sc.c_xz +
                                     sc.c_zx * sc.c_zx + sc.c_zz * sc.c_zz);
          states.push_back(sc);
        }
      }
    }
  }
  std::sort(states.begin(), states.end(),
            [](const StateCorr& a, const StateCorr& b) { return a.g < b.g; });
  return states;
}

// Does any multiple of `step` fall in the arc [lo, hi] (radians, any range)?
inline bool grid_hits_arc(double lo, double hi, double step) {
  if (hi < lo) return false;
  return std::floor(hi / step) >= std::ceil(lo / step);
}

// Is S_target - f0 attainable (within tolerance) by A sin(theta) + B cos(theta)
// on the theta grid?
inline bool theta_grid_attains(double A, double B, double target, double tol, double step) {
  const double M = std::hypot(A, B);
  if (M < 1e-300) return std::abs(target) <= tol;
  double lo_cos = (target - tol) / M;
  double hi_cos = (target + tol) / M;
  lo_cos = std::max(lo_cos, -1.0);
  hi_cos = std::min(hi_cos, 1.0);
  if (lo_cos > hi_cos) return false;
  const double phi = std::atan2(A, B);  // A sin + B cos = M cos(theta - phi)
  const double arc_lo = std::acos(hi_cos);
  const double arc_hi = std::acos(lo_cos);
  // theta in phi + [arc_lo, arc_hi] or phi - [arc_hi, arc_lo], mod 2pi; the
  // grid is periodic so shifting arcs by 2pi is harmless.
  for (double base : {phi + arc_lo, phi - arc_hi}) {
    double lo = base, hi = base + (arc_hi - arc_lo);
    while (lo < 0.0) { lo += kTwoPi; hi += kTwoPi; }
    if (grid_hits_arc(lo, hi, step)) return true;
  }
  return false;
}

}  // namespace oracle_detail

// Worst-case phase-error probability over the parameterized states and
// measurement grids achieving expected Bell value S (within 1e-3). Throws
// if no grid point reaches S.
inline PhaseErrorProb phase_error_bound_oracle(BellValue S, int grid_resolution) {
  using namespace oracle_detail;
  const double s_target = S.value();
  if (s_target < 2.0 || s_target > kTsirelson + kBellSlack) {
    throw std::domain_error("phase_error_bound_oracle: S outside [2, 2*sqrt(2)]");
  }
  if (grid_resolution < 8) {
    throw std::invalid_argument("phase_error_bound_oracle: resolution too coarse");
  }
  const int R = grid_resolution;
  const int diag_res = R;
  const int offdiag_res = std::max(4, R / 8);
  const double astep = kTwoPi / R;
  const auto states = build_state_grid(diag_res, offdiag_res);

  std::vector<double> sin_g(static_cast<std::size_t>(R)), cos_g(static_cast<std::size_t>(R));
  for (int k = 0; k < R; ++k) {
    sin_g[static_cast<std::size_t>(k)] = std::sin(astep * k);
    cos_g[static_cast<std::size_t>(k)] = std::cos(astep * k);
  }

  for (const auto& st : states) {
    if (st.s_cap < s_target - kBellTol) continue;
    for (int kg = 0; kg < R; ++kg) {
      const double sg = sin_g[static_cast<std::size_t>(kg)];
      const double cg = cos_g[static_cast<std::size_t>(kg)];
      // S = sin(t0) A0 + cos(t0) B0 + sin(t1) A1 + cos(t1) B1
      const double A0 = sg * st.c_xx + (1.0 + cg) * st.c_xz;
      const double B0 = sg * st.c_zx + (1.0 + cg) * st.c_zz;
      const double A1 = -sg * st.c_xx + (1.0 - cg) * st.c_xz;
      const double B1 = -sg * st.c_zx + (1.0 - cg) * st.c_zz;
      const double M0 = std::hypot(A0, B0), M1 = std::hypot(A1, B1);
      if (M0 + M1 < s_target - kBellTol) continue;  // out of reach at this gamma
      for (int k0 = 0; k0 < R; ++k0) {
        const double f0 = A0 * sin_g[static_cast<std::size_t>(k0)] +
                          B0 * cos_g[static_cast<std::size_t>(k0)];
        if (theta_grid_attains(A1, B1, s_target - f0, kBellTol, astep)) {
          return PhaseErrorProb(0.5 * (1.0 - std::min(st.g, 1.0)));
        }
      }
    }
  }
  throw std::runtime_error("phase_error_bound_oracle: no grid point achieves the target Bell value");
}

// Granularity-driven tolerance for comparing the oracle against the
// analytic bound, calibrated against the bound over S in [2, 2.8] at
// resolutions 32..160. The state grid quantizes the correlation to ~2/R
// and the angle grid costs a comparable shortfall near the steep end.
inline double phase_error_oracle_tolerance(int grid_resolution) {
  return 2.2 / grid_resolution + 2e-3;
}

}  // namespace diqkd
