#ifndef ENTFEAT_FEATURES_HPP
#define ENTFEAT_FEATURES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "permcore.hpp"
#include "sff.hpp"
#include "weingarten.hpp"

namespace entfeat {

class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts of sites with (sigma_i, tau_i) = (+,+), (+,-), (-,+), (-,-).
struct BipartitionSignature {
  int n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;

  BipartitionSignature() = default;
  BipartitionSignature(int pp, int pm, int mp, int mm) : n_pp(pp), n_pm(pm), n_mp(mp), n_mm(mm) {
    if (pp < 0 || pm < 0 || mp < 0 || mm < 0) throw std::invalid_argument("signature counts must be >= 0");
    if (N() < 1) throw std::invalid_argument("signature needs at least one site");
  }

  /// Per-site spins, +1 identity / -1 swap.
  static BipartitionSignature from_spins(const std::vector<int>& sigma, const std::vector<int>& tau) {
    if (sigma.size() != tau.size()) throw std::invalid_argument("sigma and tau differ in length");
    int c[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      const int s = value(spin_from_int(sigma[i])), t = value(spin_from_int(tau[i]));
      ++c[(s < 0 ? 2 : 0) + (t < 0 ? 1 : 0)];
    }
    return BipartitionSignature(c[0], c[1], c[2], c[3]);
  }

  int N() const { return n_pp + n_pm + n_mp + n_mm; }
  int sum_sigma() const { return n_pp + n_pm - n_mp - n_mm; }
  int sum_tau() const { return n_pp - n_pm + n_mp - n_mm; }
  int sum_sigma_tau() const { return n_pp - n_pm - n_mp + n_mm; }
  double sigma_mean() const { return static_cast<double>(sum_sigma()) / N(); }
  double tau_mean() const { return static_cast<double>(sum_tau()) / N(); }
  double sigma_tau_mean() const { return static_cast<double>(sum_sigma_tau()) / N(); }

  int count(IsingSpin s, IsingSpin t) const {
    if (s == IsingSpin::plus) return t == IsingSpin::plus ? n_pp : n_pm;
    return t == IsingSpin::plus ? n_mp : n_mm;
  }

  /// sigma <-> tau
  BipartitionSignature exchanged() const { return {n_pp, n_mp, n_pm, n_mm}; }

  friend bool operator==(const BipartitionSignature& a, const BipartitionSignature& b) {
    return a.n_pp == b.n_pp && a.n_pm == b.n_pm && a.n_mp == b.n_mp && a.n_mm == b.n_mm;
  }
};

inline std::vector<BipartitionSignature> all_signatures(int N) {
  std::vector<BipartitionSignature> out;
  for (int a = 0; a <= N; ++a)
    for (int b = 0; a + b <= N; ++b)
      for (int c = 0; a + b + c <= N; ++c) out.emplace_back(a, b, c, N - a - b - c);
  return out;
}

/// N qudits of local dimension d.
struct EnsembleParams {
  int N = 1;
  int d = 2;

  EnsembleParams() = default;
  EnsembleParams(int N_, int d_) : N(N_), d(d_) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (d < 2) throw std::invalid_argument("d must be >= 2");
  }

  BigInt D_exact() const { return ipow(BigInt(d), N); }

  /// D = d^N as an integer; throws when it does not fit.
  std::uint64_t D() const {
    std::uint64_t v = 1;
    for (int i = 0; i < N; ++i) {
      if (v > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(d))
        throw std::overflow_error("D = d^N overflows 64 bits");
      v *= static_cast<std::uint64_t>(d);
    }
    return v;
  }

  double D_real() const { return std::pow(static_cast<double>(d), N); }
  double log_D() const { return N * std::log(static_cast<double>(d)); }

  /// d^(k/2)
  long double d_half_pow(long k) const {
    return std::pow(static_cast<long double>(d), static_cast<long double>(k) / 2.0L);
  }
};

/// D^((3 + sigma.tau)/2) = d^(2 n_pp + n_pm + n_mp + 2 n_mm), the t = 0 feature.
inline BigInt w0_exact(const BipartitionSignature& sig, const EnsembleParams& p) {
  return ipow(BigInt(p.d), 2 * sig.n_pp + sig.n_pm + sig.n_mp + 2 * sig.n_mm);
}

// Generic double sum ------------------------------------------------------

/// A class of sites sharing the replica pair (s, t) in S_n x S_n.
struct SitePairClass {
  Permutation s;
  Permutation t;
  int count = 0;
};

namespace detail {

struct DoubleSumTables {
  std::vector<Permutation> group;
  std::vector<CycleType> types;
  std::vector<int> ncyc;
  std::vector<std::vector<int>> type_of_ginv_h;  // [g][h]
};

inline const DoubleSumTables& double_sum_tables(int m) {
  static std::mutex mu;
  static std::map<int, DoubleSumTables> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  DoubleSumTables t;
  t.group = all_permutations(m);
  t.types = partitions(m);
  const std::size_t G = t.group.size();
  t.ncyc.resize(G);
  t.type_of_ginv_h.assign(G, std::vector<int>(G));
  for (std::size_t g = 0; g < G; ++g) {
    t.ncyc[g] = cycle_count(t.group[g]);
    const Permutation gi = inverse(t.group[g]);
    for (std::size_t h = 0; h < G; ++h)
      t.type_of_ginv_h[g][h] = type_index(t.types, cycle_type(compose(gi, t.group[h])));
  }
  return cache.emplace(m, std::move(t)).first->second;
}

}  // namespace detail

/// sum_{g,h in S_2n} Wg(g^-1 h) D^{#g} prod_sites d^{-K_h}, grouped by the charge label of g.
inline std::map<ChargeLabel, Rational> double_sum_coefficients(int n, const std::vector<SitePairClass>& sites, int d) {
  if (n < 1 || n > 3) throw std::invalid_argument("double sum supports n in 1..3");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  int N = 0;
  for (const auto& c : sites) {
    if (c.s.degree() != n || c.t.degree() != n) throw std::invalid_argument("site pair must lie in S_n x S_n");
    if (c.count < 0) throw std::invalid_argument("negative site count");
    N += c.count;
  }
  if (N < 1) throw std::invalid_argument("no sites");
  const int m = 2 * n;
  const BigInt D = ipow(BigInt(d), N);
  if (D < m) throw std::domain_error("D too small for the Weingarten functions of S_2n");
  const auto& tab = detail::double_sum_tables(m);
  const auto wg = gram_invert(m, D);
  std::vector<Rational> wgv;
  for (const auto& c : tab.types) wgv.push_back(wg(c));

  const Permutation x = layer_swap_x(n, kCalibratedPairing);
  const std::size_t G = tab.group.size();
  std::vector<BigInt> weight(G);
  for (std::size_t h = 0; h < G; ++h) {
    long e = 0;
    for (const auto& c : sites)
      if (c.count) e += static_cast<long>(c.count) * cycle_count(compose(tab.group[h], compose(embed_pair(c.s, c.t), x)));
    weight[h] = ipow(BigInt(d), e);
  }
  std::map<ChargeLabel, Rational> out;
  std::vector<BigInt> acc(tab.types.size());
  for (std::size_t g = 0; g < G; ++g) {
    for (auto& a : acc) a = 0;
    for (std::size_t h = 0; h < G; ++h) acc[tab.type_of_ginv_h[g][h]] += weight[h];
    Rational s = 0;
    for (std::size_t c = 0; c < acc.size(); ++c)
      if (acc[c] != 0) s += wgv[c] * Rational(acc[c]);
    out[charge_label(tab.group[g])] += s * Rational(ipow(D, tab.ncyc[g]));
  }
  return out;
}

// n = 2 wiring ------------------------------------------------------------

struct FeatureCoefficients {
  BipartitionSignature sig;
  EnsembleParams p;
  std::array<Rational, kSffLabelCount> coeffs;

  const Rational& operator[](SffLabel l) const { return coeffs[index_of(l)]; }

  /// All SFF values set to 1.
  Rational at_t0() const {
    Rational s = 0;
    for (const auto& c : coeffs) s += c;
    return s;
  }

  Rational contract_exact(const std::array<Rational, kSffLabelCount>& values) const {
    Rational s = 0;
    for (int i = 0; i < kSffLabelCount; ++i) s += coeffs[i] * values[i];
    return s;
  }

  long double contract(const SffValues& v) const {
    long double s = 0;
    for (int i = 0; i < kSffLabelCount; ++i) s += to_ld(coeffs[i]) * static_cast<long double>(v.values[i]);
    return s;
  }
};

inline std::vector<SitePairClass> ising_site_classes(const BipartitionSignature& sig) {
  std::vector<SitePairClass> out;
  for (IsingSpin s : {IsingSpin::plus, IsingSpin::minus})
    for (IsingSpin t : {IsingSpin::plus, IsingSpin::minus}) out.push_back({to_s2(s), to_s2(t), sig.count(s, t)});
  return out;
}

inline void check_feature_domain(const BipartitionSignature& sig, const EnsembleParams& p) {
  if (sig.N() != p.N) throw std::invalid_argument("signature size differs from N");
  if (p.D_exact() < 4) throw std::domain_error("D must be >= 4 for the S_4 Weingarten functions");
  const double log10w0 = (2.0 * sig.n_pp + sig.n_pm + sig.n_mp + 2.0 * sig.n_mm) * std::log10(p.d);
  if (log10w0 > 300) throw std::overflow_error("feature magnitude exceeds double range");
}

inline FeatureCoefficients coefficients(const BipartitionSignature& sig, const EnsembleParams& p) {
  check_feature_domain(sig, p);
  const auto byLabel = double_sum_coefficients(2, ising_site_classes(sig), p.d);
  FeatureCoefficients fc{sig, p, {}};
  for (auto& c : fc.coeffs) c = 0;
  const auto& tab = detail::double_sum_tables(4);
  std::map<ChargeLabel, SffLabel> label;
  for (const auto& g : tab.group) label[charge_label(g)] = sff_label_of(g);
  for (const auto& [k, v] : byLabel) fc.coeffs[index_of(label.at(k))] += v;
  return fc;
}

/// Feature value for general n; only n = 2 has spectral form factors wired in.
inline double feature_general(int n, const std::vector<SitePairClass>& sites, int d, double t,
                              SffModel model = SffModel::closed_form) {
  if (n != 2) throw UnsupportedConfiguration("analytic features are only available for Renyi index 2");
  int N = 0;
  for (const auto& c : sites) N += c.count;
  const auto byLabel = double_sum_coefficients(2, sites, d);
  const auto v = sff_values(model, t, std::pow(static_cast<double>(d), N));
  const auto& tab = detail::double_sum_tables(4);
  std::map<ChargeLabel, SffLabel> label;
  for (const auto& g : tab.group) label[charge_label(g)] = sff_label_of(g);
  long double s = 0;
  for (const auto& [k, c] : byLabel) s += to_ld(c) * v[label.at(k)];
  return static_cast<double>(s);
}

inline double w2_exact(const FeatureCoefficients& fc, const SffValues& v) { return static_cast<double>(fc.contract(v)); }

inline double w2_exact(const BipartitionSignature& sig, const EnsembleParams& p, double t,
                       SffModel model = SffModel::closed_form) {
  const auto fc = coefficients(sig, p);
  return w2_exact(fc, sff_values(model, t, p.D_real()));
}

// Appendix early/late decomposition ---------------------------------------

struct EarlyLateF {
  long double early_plus, early_minus, late_plus, late_minus;
};

/// F_early(+-1) and F_late(+-1): the f polynomials over Z_4(D).
inline EarlyLateF early_late_f(const SffValues& v, long double D) {
  const long double R0 = v[SffLabel::R0], R00 = v[SffLabel::R00], R1 = v[SffLabel::R1m1],
                    R110 = v[SffLabel::R1m10], R22 = v[SffLabel::R2m2], R21 = v[SffLabel::R2m1m1],
                    R11 = v[SffLabel::R11m1m1];
  const long double D2 = D * D, D3 = D2 * D, D5 = D3 * D2;
  const long double Z4 = D2 * (D2 - 1) * (D2 - 4) * (D2 - 9);
  const long double fe_p = D3 * (4 * (D2 + 6) * (R00 - R0) + 16 * (2 * D2 - 3) * R1 + (D2 - 3) * (D2 - 4) * R22 -
                                 4 * D2 * (D2 + 1) * R110 - 4 * D2 * (D2 - 4) * R21 +
                                 D2 * (D2 - 3) * (D2 - 4) * R11);
  const long double fe_m = 2 * D5 * (10 * (R0 - R00) - 4 * (D2 + 1) * R1 - (D2 - 4) * R22 + 4 * (2 * D2 - 3) * R110 +
                                     (D2 - 3) * (D2 - 4) * R21 - D2 * (D2 - 4) * R11);
  const long double pre = std::pow(D, 4.5L);
  const long double fl_p = pre * (-2 * (D2 - 14) * R0 + (D2 * D2 - 11 * D2 + 8) * R00 - 40 * R1 - (D2 - 4) * R22 +
                                  4 * (D2 + 6) * R110 + 6 * (D2 - 4) * R21 - D2 * (D2 - 4) * R11);
  const long double fl_m = pre * ((D2 + 1) * (D2 - 12) * R0 - 2 * (D2 * D2 - 12 * D2 + 12) * R00 + 8 * (D2 + 6) * R1 +
                                  3 * (D2 - 4) * R22 - 20 * D2 * R110 - 2 * D2 * (D2 - 4) * R21 +
                                  3 * D2 * (D2 - 4) * R11);
  return {fe_p / Z4, fe_m / Z4, fl_p / Z4, fl_m / Z4};
}

struct EarlyLate {
  double early = 0;
  double late = 0;
};

inline EarlyLate w2_early_late(const BipartitionSignature& sig, const EnsembleParams& p, const SffValues& v) {
  if (sig.N() != p.N) throw std::invalid_argument("signature size differs from N");
  const long double D = p.D_real();
  const auto F = early_late_f(v, D);
  const long N = p.N, st = sig.sum_sigma_tau(), s = sig.sum_sigma(), t = sig.sum_tau();
  long double early = 0, late = 0;
  for (int u : {1, -1}) early += p.d_half_pow(u * st + u * N) * (u > 0 ? F.early_plus : F.early_minus);
  for (int u1 : {1, -1})
    for (int u2 : {1, -1})
      late += p.d_half_pow(u1 * s + u2 * t + u1 * u2 * N) * (u1 * u2 > 0 ? F.late_plus : F.late_minus);
  return {static_cast<double>(early), static_cast<double>(late)};
}

inline EarlyLate w2_early_late(const BipartitionSignature& sig, const EnsembleParams& p, double t,
                               SffModel model = SffModel::closed_form) {
  return w2_early_late(sig, p, sff_values(model, t, p.D_real()));
}

// Leading order, late time, Haar -----------------------------------------

inline double w2_leading(const BipartitionSignature& sig, const EnsembleParams& p, const SffValues& v) {
  const long N = sig.N(), x = sig.sum_sigma_tau(), s = sig.sum_sigma(), t = sig.sum_tau();
  const long double R0 = v[SffLabel::R0], R00 = v[SffLabel::R00], R21 = v[SffLabel::R2m1m1],
                    R11 = v[SffLabel::R11m1m1];
  const long double w = R11 * p.d_half_pow(3 * N + x) - 2 * (R11 - R21) * p.d_half_pow(N - x) +
                        (R00 - R11) * (p.d_half_pow(2 * N + s + t) + p.d_half_pow(2 * N - s - t)) -
                        (2 * R00 - R0 + 2 * R21 - 3 * R11) * (p.d_half_pow(s - t) + p.d_half_pow(t - s));
  return static_cast<double>(w);
}

inline double w2_leading(const BipartitionSignature& sig, const EnsembleParams& p, double t,
                         SffModel model = SffModel::large_d) {
  return w2_leading(sig, p, sff_values(model, t, p.D_real()));
}

/// t -> infinity closed form, exact in D.
inline double w2_late(const BipartitionSignature& sig, const EnsembleParams& p) {
  const long double D = p.D_real();
  const long x = sig.sum_sigma_tau(), s = sig.sum_sigma(), t = sig.sum_tau();
  const long double w = (2 * std::sqrt(D) * ((D + 2) * p.d_half_pow(x) - p.d_half_pow(-x)) +
                         D * (D * D + 4 * D + 2) * (p.d_half_pow(s + t) + p.d_half_pow(-s - t)) -
                         D * (D + 4) * (p.d_half_pow(s - t) + p.d_half_pow(t - s))) /
                        ((D + 1) * (D + 3));
  return static_cast<double>(w);
}

inline double w2_haar(const BipartitionSignature& sig, const EnsembleParams& p) {
  const long double D = p.D_real();
  const long s = sig.sum_sigma(), t = sig.sum_tau();
  const long double w = D * D / (D * D - 1) *
                        (D * (p.d_half_pow(s + t) + p.d_half_pow(-s - t)) - (p.d_half_pow(s - t) + p.d_half_pow(t - s)));
  return static_cast<double>(w);
}

/// (1/(1-n)) ln(W / D^n)
inline double entropy_from_feature(double W, int n, const EnsembleParams& p) {
  if (!(W > 0)) throw std::domain_error("feature value must be positive");
  if (n < 2) throw std::invalid_argument("Renyi index must be >= 2");
  return (std::log(W) - n * p.log_D()) / (1.0 - n);
}

// Holographic bulk weights -------------------------------------------------

struct BulkWeights {
  double early = 0;  // bulk-averaged F_early / D
  double late = 0;   // bulk-averaged F_late / sqrt(D)
  double early_raw = 0;
  double late_raw = 0;
};

/// Boundary spins traced out. The per-site boundary sums are even in the bulk spin,
/// so only the bulk factors D^{v/2} (early) and D^{v1 v2/2} (late) weight the average.
inline BulkWeights bulk_weights(const EnsembleParams& p, double t, SffModel model = SffModel::closed_form) {
  const long double D = p.D_real();
  if (D < 4) throw std::domain_error("D must be >= 4");
  const auto F = early_late_f(sff_values(model, t, p.D_real()), D);
  const long double sq = std::sqrt(D);
  // late: v = v1 v2 takes each value twice, which cancels in the ratio
  const long double early = (F.early_plus * sq + F.early_minus / sq) / (sq + 1 / sq);
  const long double late = (F.late_plus * sq + F.late_minus / sq) / (sq + 1 / sq);
  BulkWeights b;
  b.early_raw = static_cast<double>(early);
  b.late_raw = static_cast<double>(late);
  b.early = static_cast<double>(early / D);
  b.late = static_cast<double>(late / sq);
  return b;
}

/// First t in (0, 5] where the normalized early and late weights cross.
inline double crossover_time(const EnsembleParams& p, SffModel model = SffModel::closed_form) {
  auto diff = [&](double t) {
    const auto b = bulk_weights(p, t, model);
    return b.early - b.late;
  };
  const double step = 0.005;
  double a = 0.0, fa = diff(a);
  for (double b = step; b <= 5.0 + 1e-12; b += step) {
    const double fb = diff(b);
    if ((fa > 0) != (fb > 0)) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  throw std::runtime_error("no crossover of the bulk weights on (0, 5]");
}

}  // namespace entfeat

#endif  // ENTFEAT_FEATURES_HPP
