#pragma once

// Exhaustive check of the sample-entropy pattern-counting bound: the number
// of n-bit patterns whose summed sample entropy stays below C_U is at most
// 2^{C_U}.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace diqkd {

struct PatternCount {
  std::uint64_t cardinality = 0;
  bool bound_holds = false;
};

inline PatternCount pattern_cardinality_oracle(const std::vector<double>& probs, double c_u) {
  const std::size_t n = probs.size();
  if (n == 0 || n > 20) {
    throw std::invalid_argument("pattern_cardinality_oracle: need 1..20 bits");
  }
  for (double t : probs) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::domain_error("pattern_cardinality_oracle: per-bit probabilities must be in (0,1)");
    }
  }
  std::vector<double> log_one(n), log_zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_one[i] = -std::log2(probs[i]);
    log_zero[i] = -std::log2(1.0 - probs[i]);
  }
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t pat = 0; pat < total; ++pat) {
    double ent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ent += (pat >> i & 1u) ? log_one[i] : log_zero[i];
    }
    if (ent <= c_u) ++count;
  }
  PatternCount r;
  r.cardinality = count;
  r.bound_holds = c_u >= 63.0 || static_cast<double>(count) <= std::exp2(c_u);
  return r;
}

}  // namespace diqkd
