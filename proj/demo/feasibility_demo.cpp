// Minimal library walkthrough: evaluate a finite-size key length by hand,
// then locate the feasibility threshold the same way the CLI does.

#include <cstdio>

#include "diqkd/search.hpp"

int main() {
  using namespace diqkd;

  // A lossy, noisy honest device: 96% transmittance, 2% depolarizing noise.
  const ChannelModel model = ChannelModel::ideal(0.96, 0.02);
  const Channel channel(model);
  std::printf("expected Bell value  S = %.6f\n", channel.expected_bell().value());
  std::printf("expected QBER      e_b = %.6f\n", channel.expected_qber());

  // Key length for n = 1e7 rounds at a hand-picked input distribution and
  // regularization, under the pessimistic deviation model.
  const double n = 1e7;
  const InputDistribution inputs = InputDistribution::standard_family(0.35);
  const SecurityBudget budget = SecurityBudget::thirds(5e-11);
  const Regularization xi(1e-5);
  const BellStatistics stats = worst_case_statistics(model, inputs, n, FailureProb(1e-2));
  const KatoPlan plan = plan_kato(static_cast<std::int64_t>(n), inputs, budget, stats, xi);
  const KeyReport report = key_length(stats, inputs, budget, xi, plan, 1.0);
  std::printf("fixed parameters:    k = %.0f bits (S_est = %.4f)\n", report.key_length,
              report.s_est);

  // Same point with gamma and xi optimized.
  SearchSpec spec;
  spec.method = Method::ComplementarityStandard;
  spec.base_model = model;
  const PointEval best = best_complementarity_balance(spec, n);
  std::printf("optimized:           k = %.0f bits (gamma = %.3f, xi = %.2e)\n",
              best.key_balance, best.gamma, best.xi);

  // Transmittance threshold at this noise level and data size.
  spec.n = n;
  spec.axis = SweepAxis::Eta;
  spec.bracket_lo = 0.85;
  spec.bracket_hi = 0.9999;
  std::printf("threshold eta at n = %.0e: %.4f\n", n, threshold(spec));
  return 0;
}
