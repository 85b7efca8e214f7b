#include <gtest/gtest.h>

#include <cmath>

#include "entfeat/features.hpp"

using namespace entfeat;

namespace {

// Trace of a layer permutation on one qudit's d^4 basis states, by counting fixed states.
long trace_on_site(const Permutation& layers, int d) {
  long fixed = 0;
  const int states = d * d * d * d;
  for (int s = 0; s < states; ++s) {
    int digit[4], v = s;
    for (int L = 0; L < 4; ++L) {
      digit[L] = v % d;
      v /= d;
    }
    bool same = true;
    for (int L = 0; L < 4 && same; ++L) same = digit[layers(L)] == digit[L];
    fixed += same;
  }
  return fixed;
}

// Naive floating-point S_4 x S_4 sum for the given per-site spins.
double brute_force_w2(const std::vector<int>& sigma, const std::vector<int>& tau, int d, const SffValues& v) {
  const int N = static_cast<int>(sigma.size());
  const long long D = std::llround(std::pow(d, N));
  const auto wg = gram_invert(4, D);
  const auto x = layer_swap_x(2);
  long double total = 0;
  for (const auto& g : all_permutations(4)) {
    const long double Rg = v[sff_label_of(g)];
    for (const auto& h : all_permutations(4)) {
      long double tr = 1;
      for (int i = 0; i < N; ++i) {
        const auto st = embed_pair(to_s2(spin_from_int(sigma[i])), to_s2(spin_from_int(tau[i])));
        tr *= trace_on_site(compose(h, compose(st, x)), d);
      }
      total += to_ld(wg.at(compose(inverse(g), h))) * Rg * std::pow(static_cast<long double>(D), cycle_count(g)) * tr;
    }
  }
  return static_cast<double>(total);
}

SffValues cue_values(double D) {
  SffValues v;
  v.D = D;
  v[SffLabel::R0] = v[SffLabel::R00] = 1;
  v[SffLabel::R1m1] = v[SffLabel::R1m10] = 1 / (D * D);
  v[SffLabel::R2m2] = 2 / (D * D);
  v[SffLabel::R2m1m1] = 0;
  v[SffLabel::R11m1m1] = 2 / (D * D * D * D);
  return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(Signature, CountsAndMeans) {
  const auto s = BipartitionSignature::from_spins({1, -1, -1, 1}, {1, -1, 1, -1});
  EXPECT_EQ(s, BipartitionSignature(1, 1, 1, 1));
  EXPECT_EQ(s.N(), 4);
  const BipartitionSignature a(3, 2, 1, 0);
  EXPECT_DOUBLE_EQ(a.sigma_mean(), 4.0 / 6);
  EXPECT_DOUBLE_EQ(a.tau_mean(), 2.0 / 6);
  EXPECT_DOUBLE_EQ(a.sigma_tau_mean(), 0.0);
  EXPECT_EQ(a.exchanged(), BipartitionSignature(3, 1, 2, 0));
  EXPECT_EQ(all_signatures(3).size(), 20u);
  EXPECT_THROW(BipartitionSignature(0, 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(BipartitionSignature(-1, 1, 0, 0), std::invalid_argument);
}

TEST(EnsembleParams, DimensionChecks) {
  EXPECT_EQ(EnsembleParams(10, 2).D(), 1024u);
  EXPECT_EQ(EnsembleParams(40, 3).D_exact(), ipow(BigInt(3), 40));
  EXPECT_THROW(EnsembleParams(70, 2).D(), std::overflow_error);
  EXPECT_THROW(EnsembleParams(0, 2), std::invalid_argument);
  EXPECT_THROW(EnsembleParams(2, 1), std::invalid_argument);
}

TEST(Coefficients, TimeZeroSpecialCases) {
  for (int N : {2, 3, 5})
    for (int d : {2, 3}) {
      const EnsembleParams p(N, d);
      const BigInt D = p.D_exact();
      EXPECT_EQ(coefficients(BipartitionSignature(N, 0, 0, 0), p).at_t0(), Rational(D * D));
      EXPECT_EQ(coefficients(BipartitionSignature(0, N, 0, 0), p).at_t0(), Rational(D));
    }
}

TEST(Coefficients, TimeZeroClosureSmallSystems) {
  for (int d : {2, 3})
    for (int N = 1; N <= 5; ++N) {
      const EnsembleParams p(N, d);
      if (p.D_exact() < 4) continue;
      for (const auto& s : all_signatures(N)) EXPECT_EQ(coefficients(s, p).at_t0(), Rational(w0_exact(s, p)));
    }
}

TEST(Coefficients, MatchBruteForceSum) {
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> spins = {
      {{-1, 1}, {-1, 1}}, {{-1, 1}, {1, -1}}, {{1, 1}, {-1, -1}}, {{-1, -1}, {1, -1}}};
  for (double t : {0.0, 0.4, 1.3}) {
    for (const auto& [s, u] : spins) {
      const auto sig = BipartitionSignature::from_spins(s, u);
      const EnsembleParams p(2, 2);
      const auto v = sff_values(SffModel::closed_form, t, 4);
      EXPECT_LT(rel(w2_exact(coefficients(sig, p), v), brute_force_w2(s, u, 2, v)), 1e-10);
    }
  }
  const auto v3 = sff_values(SffModel::closed_form, 0.9, 27);
  const std::vector<int> s3{-1, 1, 1}, u3{-1, -1, 1};
  EXPECT_LT(rel(w2_exact(coefficients(BipartitionSignature::from_spins(s3, u3), EnsembleParams(3, 3)), v3),
                brute_force_w2(s3, u3, 3, v3)),
            1e-10);
}

TEST(Coefficients, DomainChecks) {
  EXPECT_THROW(coefficients(BipartitionSignature(1, 0, 0, 0), EnsembleParams(1, 3)), std::domain_error);
  EXPECT_THROW(coefficients(BipartitionSignature(2, 0, 0, 0), EnsembleParams(3, 2)), std::invalid_argument);
}

TEST(DoubleSum, DegreeOneIsUnitarity) {
  // <Tr U U^dag> = D at every time: only the neutral label survives.
  const std::vector<SitePairClass> sites = {{Permutation::identity(1), Permutation::identity(1), 3}};
  const auto c = double_sum_coefficients(1, sites, 2);
  for (const auto& [label, v] : c) {
    if (label.nonzero.empty())
      EXPECT_EQ(v, Rational(8));
    else
      EXPECT_EQ(v, Rational(0));
  }
}

TEST(DoubleSum, DegreeThreeAtTimeZero) {
  const auto e = Permutation::identity(3), a = Permutation::from_cycles(3, {{0, 1}}),
             b = Permutation::from_cycles(3, {{1, 2}});
  const std::vector<SitePairClass> sites = {{e, e, 1}, {a, a, 1}, {a, b, 1}};
  Rational s = 0;
  for (const auto& [label, v] : double_sum_coefficients(3, sites, 2)) s += v;
  // Tr X_s X_t per site: d^3 * d^3 * d^1
  EXPECT_EQ(s, Rational(128));
}

TEST(FeatureGeneral, OnlySecondRenyiIsWired) {
  const auto sig = BipartitionSignature(1, 1, 0, 1);
  const EnsembleParams p(3, 2);
  EXPECT_THROW(feature_general(3, ising_site_classes(sig), 2, 0.5), UnsupportedConfiguration);
  EXPECT_NEAR(feature_general(2, ising_site_classes(sig), 2, 0.5), w2_exact(sig, p, 0.5), 1e-12);
}

TEST(W2Exact, ExchangeSymmetryAndPositivity) {
  for (int d : {2, 3})
    for (int N = 2; N <= 8; ++N) {
      const EnsembleParams p(N, d);
      if (p.D_exact() < 4) continue;
      for (const auto& s : all_signatures(N)) {
        const auto fc = coefficients(s, p), fx = coefficients(s.exchanged(), p);
        for (int i = 0; i < kSffLabelCount; ++i) EXPECT_EQ(fc.coeffs[i], fx.coeffs[i]);
        const double D2 = p.D_real() * p.D_real();
        for (double t = 0; t <= 20; t += 1.25) {
          const double w = w2_exact(fc, sff_values(SffModel::closed_form, t, p.D_real()));
          EXPECT_GT(w, 0.0);
          EXPECT_LE(w, D2 * (1 + 1e-12));
          EXPECT_GE(entropy_from_feature(std::min(w, D2), 2, p), 0.0);
        }
      }
    }
}

TEST(W2Exact, LateTimeClosedForm) {
  for (int d : {2, 3})
    for (int N = 2; N <= 6; ++N) {
      const EnsembleParams p(N, d);
      for (const auto& s : all_signatures(N)) {
        const auto fc = coefficients(s, p);
        std::array<Rational, kSffLabelCount> lt;
        for (SffLabel l : kSffLabels) lt[index_of(l)] = late_time_exact(l, p.D_exact());
        EXPECT_LT(rel(to_ld(fc.contract_exact(lt)), w2_late(s, p)), 1e-10);
      }
    }
}

TEST(W2Exact, HaarSpectrumGivesHaarFeature) {
  for (int d : {2, 3})
    for (int N = 2; N <= 4; ++N) {
      const EnsembleParams p(N, d);
      for (const auto& s : all_signatures(N))
        EXPECT_LT(rel(w2_exact(coefficients(s, p), cue_values(p.D_real())), w2_haar(s, p)), 1e-10);
    }
}

TEST(W2Exact, TwoQuditClosedForms) {
  for (int d : {2, 3, 4}) {
    const EnsembleParams p(2, d);
    const double d2 = d * d;
    const BipartitionSignature ac(1, 0, 0, 1), ad(0, 1, 1, 0);
    EXPECT_NEAR(w2_late(ac, p), 2 * (d2 + 1 / (d2 + 1) - 4 / (d2 + 3)), 1e-12);
    EXPECT_NEAR(w2_haar(ac, p), 2 * d2 * d2 / (d2 + 1), 1e-12);
    EXPECT_NEAR(w2_haar(ad, p), 2 * d2 * d2 / (d2 + 1), 1e-12);
  }
  // two qubits, late time: about 1.14 bits
  const EnsembleParams q(2, 2);
  EXPECT_NEAR(entropy_from_feature(w2_late(BipartitionSignature(1, 0, 0, 1), q), 2, q) / std::log(2.0), 1.1406,
              1e-4);
}

TEST(W2Exact, LateApproachesHaar) {
  for (int N : {4, 8, 12}) {
    const EnsembleParams p(N, 2);
    const BipartitionSignature s(N / 4, N / 4, N / 4, N / 4);
    EXPECT_LT(rel(w2_late(s, p), w2_haar(s, p)), 10 / p.D_real()) << N;
  }
}

TEST(EarlyLate, SumsToExact) {
  for (int d : {2, 3})
    for (int N = 2; N <= 6; ++N) {
      const EnsembleParams p(N, d);
      for (const auto& s : all_signatures(N)) {
        const auto fc = coefficients(s, p);
        for (double t : {0.0, 0.3, 1.0, 2.5, 7.0, 40.0}) {
          const auto v = sff_values(SffModel::closed_form, t, p.D_real());
          const auto el = w2_early_late(s, p, v);
          EXPECT_LT(rel(el.early + el.late, w2_exact(fc, v)), 1e-10);
        }
      }
    }
}

TEST(EarlyLate, DominantPieces) {
  const EnsembleParams p(4, 2);
  const BipartitionSignature near_one(4, 0, 0, 0);
  const auto e0 = w2_early_late(near_one, p, 0.0);
  EXPECT_GT(e0.early / (e0.early + e0.late), 0.9);
  const EnsembleParams q(8, 2);
  const BipartitionSignature zero(2, 2, 2, 2);
  const auto el = w2_early_late(zero, q, sff_values(SffModel::late_time, 0, q.D_real()));
  EXPECT_GT(el.late / (el.early + el.late), 0.9);
}

TEST(Leading, TimeZeroAndAccuracy) {
  const EnsembleParams p(10, 2);
  for (const auto& s : all_signatures(10)) {
    EXPECT_NEAR(w2_leading(s, p, 0.0) / static_cast<double>(to_ld(Rational(w0_exact(s, p)))), 1.0, 1e-12);
    if (std::fabs(s.sigma_tau_mean()) > 0.5) continue;
    const auto fc = coefficients(s, p);
    for (double t : {0.5, 1.0, 2.0}) {
      const auto v = sff_values(SffModel::closed_form, t, p.D_real());
      EXPECT_LT(rel(w2_leading(s, p, v), w2_exact(fc, v)), 5 / p.D_real());
    }
  }
}

TEST(Leading, FullyPolarizedStructure) {
  // sigma = tau = +1: term by term with D^2, 1, D^2 + 1 and 2
  const EnsembleParams p(6, 2);
  const auto v = sff_values(SffModel::closed_form, 0.8, p.D_real());
  const double D = p.D_real(), R0 = v[SffLabel::R0], R00 = v[SffLabel::R00], R21 = v[SffLabel::R2m1m1],
               R11 = v[SffLabel::R11m1m1];
  const double want =
      R11 * D * D - 2 * (R11 - R21) + (R00 - R11) * (D * D + 1) - 2 * (2 * R00 - R0 + 2 * R21 - 3 * R11);
  EXPECT_NEAR(w2_leading(BipartitionSignature(6, 0, 0, 0), p, v), want, 1e-9 * want);
}

TEST(Entropy, Conversions) {
  const EnsembleParams p(3, 2);
  EXPECT_NEAR(entropy_from_feature(64.0, 2, p), 0.0, 1e-15);
  EXPECT_NEAR(entropy_from_feature(8.0, 2, p), std::log(8.0), 1e-15);
  EXPECT_THROW(entropy_from_feature(0.0, 2, p), std::domain_error);
  EXPECT_THROW(entropy_from_feature(1.0, 1, p), std::invalid_argument);
}

TEST(BulkWeights, CrossoverAndOrdering) {
  const EnsembleParams p(20, 2);
  const double tc = crossover_time(p);
  EXPECT_NEAR(tc, 0.58, 0.05);
  const auto b0 = bulk_weights(p, 0.0);
  EXPECT_GT(b0.early, b0.late);
  const auto bl = bulk_weights(p, 0.0, SffModel::late_time);
  EXPECT_LT(bl.early, bl.late);
  EXPECT_THROW(crossover_time(p, SffModel::late_time), std::runtime_error);
  EXPECT_THROW(bulk_weights(EnsembleParams(1, 3), 1.0), std::domain_error);
}
