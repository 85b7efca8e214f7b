// Two qubits under a GUE Hamiltonian: analytic Renyi-2 entropies against a small ensemble.

#include <cmath>
#include <cstdio>

#include "entfeat/oracle.hpp"

using namespace entfeat;

int main() {
  const EnsembleParams p(2, 2);
  const BipartitionSignature ac(1, 0, 0, 1), ad(0, 1, 1, 0);
  const double D2 = p.D_real() * p.D_real();

  ScanConfig cfg;
  cfg.N = 2;
  cfg.d = 2;
  cfg.times = {0.3, 1.0, 3.0};
  cfg.samples = 400;
  cfg.seed = 1;
  const auto r = ensemble_scan(cfg, {"W_AC", "W_AD"}, [](const MatrixXcd& U) {
    return std::vector<double>{w_feature_direct(U, 2, {-1, 1}, {-1, 1}), w_feature_direct(U, 2, {-1, 1}, {1, -1})};
  });

  std::printf("%6s %12s %12s %12s %12s\n", "t", "S_AC theory", "S_AC mc", "S_AD theory", "S_AD mc");
  for (std::size_t ti = 0; ti < r.times.size(); ++ti) {
    const double t = r.times[ti];
    const double th_ac = entropy_from_feature(w2_exact(ac, p, t, SffModel::exact_gue), 2, p) / std::log(2.0);
    const double th_ad = entropy_from_feature(w2_exact(ad, p, t, SffModel::exact_gue), 2, p) / std::log(2.0);
    const double mc_ac = -std::log(r.stats(ti, 0).mean / D2) / std::log(2.0);
    const double mc_ad = -std::log(r.stats(ti, 1).mean / D2) / std::log(2.0);
    std::printf("%6.2f %12.5f %12.5f %12.5f %12.5f\n", t, th_ac, mc_ac, th_ad, mc_ad);
  }
  std::printf("late time: S_AC = %.5f bits, Haar: %.5f bits\n",
              entropy_from_feature(w2_late(ac, p), 2, p) / std::log(2.0),
              entropy_from_feature(w2_haar(ac, p), 2, p) / std::log(2.0));
  return 0;
}
