// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "entfeat/observables.hpp"
#include "entfeat/oracle.hpp"

using namespace entfeat;

namespace {

const double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) v.check(false, fmt("runtime %.1fs exceeds %.0fs", secs, budget_s));
  if (!v.pass) ++failures;
  std::printf("Criterion %2d: %s  %s (%.1fs)%s%s\n", id, v.pass ? "PASS" : "FAIL", title, secs,
              v.detail.empty() ? "" : "  ", v.detail.c_str());
  std::fflush(stdout);
}

// Signatures of all N <= maxN with D = d^N >= 4.
std::vector<std::pair<BipartitionSignature, EnsembleParams>> signature_grid(int maxN) {
  std::vector<std::pair<BipartitionSignature, EnsembleParams>> out;
  for (int d : {2, 3})
    for (int N = 1; N <= maxN; ++N) {
      if (std::pow(d, N) < 4) continue;
      for (const auto& s : all_signatures(N)) out.emplace_back(s, EnsembleParams(N, d));
    }
  return out;
}

Verdict c1() {
  Verdict v;
  for (long long Dv = 4; Dv <= 12; ++Dv) {
    const BigInt D(Dv);
    const auto t = gram_invert(4, D);
    const BigInt Z = D * D * (D * D - 1) * (D * D - 4) * (D * D - 9);
    auto r = [&](const BigInt& n) { return Rational(n) / Rational(Z); };
    v.check(t(CycleType({1, 1, 1, 1})) == r(D * D * D * D - 8 * D * D + 6), "[1111] at D=" + std::to_string(Dv));
    v.check(t(CycleType({2, 1, 1})) == r(-D * (D * D - 4)), "[211] at D=" + std::to_string(Dv));
    v.check(t(CycleType({2, 2})) == r(D * D + 6), "[22] at D=" + std::to_string(Dv));
    v.check(t(CycleType({3, 1})) == r(2 * D * D - 3), "[31] at D=" + std::to_string(Dv));
    v.check(t(CycleType({4})) == r(-5 * D), "[4] at D=" + std::to_string(Dv));
  }
  return v;
}

Verdict c2() {
  Verdict v;
  std::vector<std::array<double, 4>> want;
  auto add = [&](int mult, double c0, double cs, double ct, double cst) {
    for (int i = 0; i < mult; ++i) want.push_back({c0, cs, ct, cst});
  };
  add(2, -1.5, 0, 0, -0.5);
  add(2, -1.5, 0, 0, 0.5);
  add(4, -2, -0.5, -0.5, 0);
  add(4, -2, 0.5, 0.5, 0);
  add(4, -2, -0.5, 0.5, 0);
  add(4, -2, 0.5, -0.5, 0);
  add(1, -3, 0.5, -0.5, 0);
  add(1, -3, -0.5, 0.5, 0);
  add(1, -3, -0.5, -0.5, 0);
  add(1, -3, 0.5, 0.5, 0);
  std::sort(want.begin(), want.end());
  std::vector<std::array<double, 4>> got;
  for (const auto& h : all_permutations(4)) got.push_back(k_affine(k_pattern(h)));
  std::sort(got.begin(), got.end());
  v.check(got == want, "K_h multiset differs");
  v.detail = v.pass ? "24 rows, 10 patterns" : v.detail;
  return v;
}

Verdict c3() {
  Verdict v;
  int n = 0;
  for (const auto& [sig, p] : signature_grid(8)) {
    const auto fc = coefficients(sig, p);
    const BigInt want = ipow(BigInt(p.d), (3 * p.N + sig.sum_sigma_tau()) / 2);
    v.check(fc.at_t0() == Rational(want), "N=" + std::to_string(p.N) + " d=" + std::to_string(p.d));
    ++n;
  }
  if (v.pass) v.detail = std::to_string(n) + " signatures, exact rational";
  return v;
}

Verdict c4() {
  Verdict v;
  double worst_late = 0, worst_split = 0;
  const double ts[] = {0.0, 0.3, 1.0, 3.0, 10.0, 100.0};
  for (const auto& [sig, p] : signature_grid(8)) {
    const auto fc = coefficients(sig, p);
    const double late = w2_exact(fc, sff_values(SffModel::late_time, 0.0, p.D_real()));
    const double printed = w2_late(sig, p);
    worst_late = std::max(worst_late, std::fabs(late - printed) / std::fabs(printed));
    for (double t : ts) {
      const auto sv = sff_values(SffModel::closed_form, t, p.D_real());
      const double exact = w2_exact(fc, sv);
      const auto el = w2_early_late(sig, p, sv);
      worst_split = std::max(worst_split, std::fabs(el.early + el.late - exact) / std::fabs(exact));
    }
  }
  v.check(worst_late < 1e-10, fmt("late-time relative error %.3g", worst_late));
  v.check(worst_split < 1e-10, fmt("early+late relative error %.3g", worst_split));
  v.detail = fmt("max rel err late %.2g, split %.2g", worst_late, worst_split);
  return v;
}

Verdict c5() {
  Verdict v;
  const double tc = crossover_time(EnsembleParams(20, 2));
  v.check(tc >= 0.53 && tc <= 0.63, fmt("t_c = %.4f", tc));
  v.detail = fmt("t_c = %.4f", tc);
  return v;
}

Verdict c6() {
  Verdict v;
  const BipartitionSignature ac(1, 0, 0, 1), ad(0, 1, 1, 0);
  double worst = 0, worst_cf = 0;
  for (int d : {2, 4}) {
    const EnsembleParams p(2, d);
    const double D2 = p.D_real() * p.D_real();
    ScanConfig cfg;
    cfg.N = 2;
    cfg.d = d;
    cfg.times = {0.3, 1.0, 3.0};
    cfg.samples = 1000;
    cfg.seed = 0;
    const auto r = ensemble_scan(cfg, {"W_AC", "W_AD"}, [&](const MatrixXcd& U) {
      return std::vector<double>{w_feature_direct(U, d, {-1, 1}, {-1, 1}), w_feature_direct(U, d, {-1, 1}, {1, -1})};
    });
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti)
      for (int q = 0; q < 2; ++q) {
        auto st = r.stats(ti, q);
        st.mean /= D2;
        st.standard_error /= D2;
        const auto e = log_of_mean(st);
        const auto& sig = q == 0 ? ac : ad;
        const double th = -std::log(w2_exact(sig, p, cfg.times[ti], SffModel::exact_gue) / D2);
        const double cf = -std::log(w2_exact(sig, p, cfg.times[ti], SffModel::closed_form) / D2);
        const double z = std::fabs(-e.value - th) / e.standard_error;
        worst = std::max(worst, z);
        worst_cf = std::max(worst_cf, std::fabs(-e.value - cf) / e.standard_error);
        v.check(z < 3, fmt("d=%.0f t=%.1f z=%.2f", d, cfg.times[ti], z) + (q == 0 ? " AC" : " AD"));
      }
  }
  // d = 2 late time against W_inf(AC) = 2(d^2 + 1/(d^2+1) - 4/(d^2+3))
  const int d = 2;
  const double d2 = d * d;
  ScanConfig cfg;
  cfg.N = 2;
  cfg.d = d;
  cfg.late_time = true;
  cfg.samples = 1000;
  cfg.seed = 0;
  const auto r = ensemble_scan(cfg, {"W_AC"}, [&](const MatrixXcd& U) {
    return std::vector<double>{w_feature_direct(U, d, {-1, 1}, {-1, 1})};
  });
  auto st = r.stats(0, 0);
  st.mean /= d2 * d2;
  st.standard_error /= d2 * d2;
  const auto e = log_of_mean(st);
  const double th = -std::log(2 * (d2 + 1 / (d2 + 1) - 4 / (d2 + 3)) / (d2 * d2));
  const double zl = std::fabs(-e.value - th) / e.standard_error;
  v.check(zl < 3, fmt("late-time z=%.2f", zl));
  v.detail += (v.detail.empty() ? "" : "; ") +
              fmt("max |z| = %.2f, late z = %.2f, closed-form max |z| = %.1f (diagnostic)", worst, zl, worst_cf);
  return v;
}

Verdict c7() {
  Verdict v;
  const double want[4][2] = {{0, 2}, {1, 2}, {2, 1}, {2, 0}};
  double worst = 0;
  for (int level = 0; level < 4; ++level)
    for (int n : {2, 3, 4}) {
      const auto e = two_qudit_entropies(corner_gate(level), 2, n);
      worst = std::max({worst, std::fabs(e.S_AC - want[level][0]), std::fabs(e.S_AD - want[level][1])});
    }
  v.check(worst < 1e-9, fmt("max deviation %.3g dits", worst));
  v.detail = fmt("max deviation %.2g dits", worst);
  return v;
}

Verdict c8() {
  Verdict v;
  const int samples = 10000;
  const auto states = parallel_map<ChoiState>(samples, 0, [](std::size_t i) {
    return ChoiState::from_unitary(late_time_unitary(4, 0, i), 2, 2);
  });
  const double ln2 = std::log(2.0);
  for (int n : {2, 3, 8}) {
    int outside = 0;
    for (const auto& c : states) {
      const double x = renyi_n_entropy(c, two_qudit_AC(), n) / ln2, y = renyi_n_entropy(c, two_qudit_AD(), n) / ln2;
      if (!within_bounds(n, x, y, 1e-9)) ++outside;
    }
    v.check(outside == 0, "n=" + std::to_string(n) + ": " + std::to_string(outside) + " outside");
  }
  if (v.pass) v.detail = "10000 samples inside for n = 2, 3, 8";
  return v;
}

Verdict c9() {
  Verdict v;
  const int N = 8, d = 2;
  const EnsembleParams p(N, d);
  std::vector<std::pair<int, int>> pairs;
  for (int na = 1; na < N; ++na)
    for (int nc = 1; na + nc <= N; ++nc) pairs.emplace_back(na, nc);
  std::vector<std::string> names(pairs.size(), "q");
  ScanConfig cfg;
  cfg.N = N;
  cfg.d = d;
  cfg.late_time = true;
  cfg.samples = 200;
  cfg.seed = 0;
  const auto r = ensemble_scan(cfg, names, [&](const MatrixXcd& U) {
    const auto c = ChoiState::from_unitary(U, N, d);
    std::vector<double> q;
    for (const auto& [na, nc] : pairs) {
      std::vector<int> in, out;
      for (int i = 0; i < na; ++i) in.push_back(i);
      for (int i = N - nc; i < N; ++i) out.push_back(i);
      q.push_back(std::pow(2.0, na + nc) * renyi2_purity(c, RegionMask::from_sites(N, in, out)));
    }
    return q;
  });
  double worst = 0, worst_m = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [na, nc] = pairs[k];
    const auto e = log_of_mean(r.stats(0, k));
    const double z = std::fabs(e.value - mutual_information_late(RegionSpec(na, nc, 0, p))) / e.standard_error;
    worst = std::max(worst, z);
    v.check(z < 3, fmt("(N_A, N_C) = (%.0f, %.0f) z = %.2f", na, nc, z));
    // ln(2 - d^{-2M}) assumes d^M << d^N; at M = N/2 its own error is resolved by the ensemble
    if (na + nc == N && 2 * na < N) {
      const double zm = std::fabs(e.value - mutual_information_late_complementary(na, d)) / e.standard_error;
      worst_m = std::max(worst_m, zm);
      v.check(zm < 3, fmt("M = %.0f z = %.2f against ln(2 - d^-2M)", na, zm));
    }
  }
  v.detail += (v.detail.empty() ? "" : "; ") +
              fmt("%.0f region pairs, max |z| = %.2f; M = 1..3 max |z| = %.2f", pairs.size(), worst, worst_m);
  return v;
}

Verdict c10() {
  Verdict v;
  for (int na = 0; na <= 6; ++na)
    for (int nb = 0; nb <= 6; ++nb)
      for (int ni = 0; ni <= std::min(na, nb); ++ni)
        v.check(otoc_asymptotics(OtocSpec(na, nb, ni, EnsembleParams(12, 2))).kappa >= 0, "negative kappa");
  const EnsembleParams p(8, 2);
  double worst_curv = 0, worst_even = 0;
  for (const auto& [na, nb, ni] :
       std::vector<std::array<int, 3>>{{1, 1, 0}, {2, 1, 0}, {2, 2, 1}, {3, 2, 1}, {2, 3, 0}, {3, 3, 2}}) {
    const OtocSpec s(na, nb, ni, p);
    const auto fc = coefficients(otoc_signature(s), p);
    auto c2 = [&](double h) { return (otoc(fc, s, h) - 2 * otoc(fc, s, 0.0) + otoc(fc, s, -h)) / (h * h); };
    const double curv = (4 * c2(0.025) - c2(0.05)) / 3;
    const double kappa = otoc_asymptotics(s).kappa;
    worst_curv = std::max(worst_curv, std::fabs(-0.5 * curv / (2 * kappa) - 1));
    for (double t = 0.1; t < 40; t *= 1.5) worst_even = std::max(worst_even, std::fabs(otoc(fc, s, t) - otoc(fc, s, -t)));
  }
  v.check(worst_curv < 0.01, fmt("curvature off by %.3g", worst_curv));
  v.check(worst_even < 1e-10, fmt("evenness violated by %.3g", worst_even));
  // envelope at the oscillation peaks, large-D leading mode
  double worst_env = 0;
  auto envelope_check = [&](int na, double lo, double hi) {
    const OtocSpec s(na, na, 0, EnsembleParams(200, 2));
    const double step = 1e-3;
    double a = otoc(s, lo - step, Mode::leading, SffModel::large_d), b = otoc(s, lo, Mode::leading, SffModel::large_d);
    int peaks = 0;
    for (double t = lo; t <= hi; t += step) {
      const double c = otoc(s, t + step, Mode::leading, SffModel::large_d);
      if (b > a && b >= c) {
        const double env = 2 * std::pow(2.0, -2 * na) + 1 / (kPi * kPi * std::pow(t, 6));
        worst_env = std::max(worst_env, std::fabs(b / env - 1));
        ++peaks;
      }
      a = b;
      b = c;
    }
    return peaks;
  };
  const int p6 = envelope_check(6, 5, 50);
  const double td20 = otoc_asymptotics(OtocSpec(20, 20, 0, EnsembleParams(200, 2))).t_d;
  const int p20 = envelope_check(20, 5, td20 / 2);
  v.check(p6 > 0 && p20 > 0, "no oscillation peaks found");
  v.check(worst_env < 0.05, fmt("envelope off by %.3g", worst_env));
  v.detail += (v.detail.empty() ? "" : "; ") +
              fmt("curvature err %.2g, evenness %.2g, envelope err %.2g", worst_curv, worst_even, worst_env) +
              " over " + std::to_string(p6 + p20) + " peaks";
  return v;
}

Verdict c11() {
  Verdict v;
  double worst = 0;
  for (int d : {2, 3})
    for (int N = 1; N <= 6; ++N) {
      const EnsembleParams p(N, d);
      if (p.D_real() < 4) continue;
      for (double t : {0.0, 0.5, 1.0, 5.0})
        worst = std::max(worst, std::fabs(quench_feature(QuenchSpec(0, p), t, Mode::exact, SffModel::closed_form) - 1));
    }
  v.check(worst < 1e-8, fmt("normalization off by %.3g", worst));
  const EnsembleParams p(20, 2);
  double worst_c = 0;
  for (int na = 1; na <= 10; ++na) {
    const QuenchSpec q(na, p);
    const double h = 1e-3;
    const double curv = (quench_entropy(q, h, Mode::leading) - 2 * quench_entropy(q, 0.0, Mode::leading) +
                         quench_entropy(q, -h, Mode::leading)) /
                        (2 * h * h);
    const double want = 2 * (1 - std::pow(2.0, -na) - std::pow(2.0, -(20 - na)));
    worst_c = std::max(worst_c, std::fabs(curv / want - 1));
  }
  v.check(worst_c < 0.01, fmt("curvature off by %.3g", worst_c));
  v.detail = fmt("normalization err %.2g, curvature err %.2g", worst, worst_c);
  return v;
}

Verdict c12() {
  Verdict v;
  for (auto l : kSffLabels)
    for (double D : {4.0, 16.0, 64.0, 1e6}) v.check(closed_form(l, 0.0, D) == 1.0, std::string("t=0 ") + name(l));
  Permutation id = Permutation::identity(4);
  const auto e = mc_estimate_rg(id, 1.0, 64, 200, 0);
  const double cf = closed_form(SffLabel::R11m1m1, 1.0, 64);
  const double z1 = std::fabs(e.value - cf) / e.standard_error;
  v.check(z1 < 3, fmt("MC R11 z = %.2f", z1));
  const auto f = phase_sum_fourth_moment(64, 20000, 0);
  const double z2 = std::fabs(f.value - (2.0 * 64 - 1) / std::pow(64.0, 3)) / f.standard_error;
  v.check(z2 < 3, fmt("fourth moment z = %.2f", z2));
  v.detail = fmt("MC z = %.2f, fourth-moment z = %.2f", z1, z2);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Verdict c13() {
  Verdict v;
  const std::vector<std::string> commands = {
      "weingarten --m 4 --D 7",
      "ktable",
      "sff --D 16 --mc --samples 40 --t-steps 5 --seed 3",
      "sff --D 8 --model exact_gue --t-steps 5",
      "feature --N 6 --na 2 --nc 3 --overlap 1 --t-steps 5",
      "feature --N 6 --na 2 --nc 3 --mode haar --t-steps 2",
      "mi --N 8 --na 3 --nc 3 --overlap 2 --t-steps 5",
      "mi --N 8 --na 3 --nc 5 --mode late --t-steps 2",
      "hp --na 2 --nd 20 --t-steps 5",
      "otoc --na 20 --nb 20 --overlap 0 --t-log 0.1 1e7 --t-steps 20",
      "otoc --N 8 --na 2 --nb 2 --overlap 1 --mode exact --model closed_form --t-steps 5",
      "quench --na 3 --t-steps 5",
      "quench --N 6 --na 2 --mode exact --model closed_form --t-steps 3",
      "crossover",
      "bounds --points 50",
      "scatter --d 3 --samples 60 --seed 5 --t-steps 2 --t-max 1",
      "scatter --d 2 --samples 60 --seed 5 --late --renyi 3",
      "figure fig2",
      "figure fig3 --t-steps 50",
      "figure fig4 --samples 8 --seed 2",
      "figure fig5 --t-steps 30",
      "figure fig6 --samples 500 --seed 7",
      "figure fig7 --samples 30 --seed 1",
      "figure fig8 --t-steps 20",
      "figure fig9 --samples 60 --t-steps 4 --seed 9",
  };
  const std::string dir = "/tmp";
  int k = 0;
  for (const auto& args : commands) {
    std::string outs[3];
    const char* env[3] = {"ENTFEAT_THREADS=1", "ENTFEAT_THREADS=8", "ENTFEAT_THREADS=8"};
    for (int run = 0; run < 3; ++run) {
      const std::string path = dir + "/entfeat_acc_" + std::to_string(k) + "_" + std::to_string(run) + ".csv";
      const std::string cmd = std::string(env[run]) + " " + ENTFEAT_CLI_PATH + " " + args + " --out " + path +
                              " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      v.check(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "command failed: " + args);
      outs[run] = slurp(path);
      std::remove(path.c_str());
      std::remove((path + ".meta").c_str());
    }
    v.check(!outs[0].empty() && outs[0] == outs[1] && outs[1] == outs[2], "output differs: " + args);
    ++k;
  }
  if (v.pass) v.detail = std::to_string(commands.size()) + " commands identical over threads 1, 8, 8";
  return v;
}

}  // namespace

int main() {
  criterion(1, "Weingarten exactness", 1, c1);
  criterion(2, "K_h table", 1, c2);
  criterion(3, "t=0 closure", 10, c3);
  criterion(4, "late-time closure and early/late assembly", 30, c4);
  criterion(5, "crossover time", 5, c5);
  criterion(6, "two-qudit Monte Carlo vs analytic", 120, c6);
  criterion(7, "corner gates", 5, c7);
  criterion(8, "bound containment", 120, c8);
  criterion(9, "late-time mutual information", 600, c9);
  criterion(10, "OTOC properties", 60, c10);
  criterion(11, "quench normalization and growth", 30, c11);
  criterion(12, "SFF stack", 120, c12);
  criterion(13, "CLI reproducibility", 300, c13);
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
