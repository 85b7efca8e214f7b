#ifndef ENTFEAT_OBSERVABLES_HPP
#define ENTFEAT_OBSERVABLES_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "features.hpp"

namespace entfeat {

enum class Mode { exact, leading };

inline Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::exact;
  if (s == "leading") return Mode::leading;
  throw std::invalid_argument("unknown mode: " + s);
}

/// Input region A and output region C; N_intersect counts qudits in both.
struct RegionSpec {
  int N_A = 0, N_C = 0, N_intersect = 0;
  EnsembleParams p;

  RegionSpec(int na, int nc, int ni, EnsembleParams p_) : N_A(na), N_C(nc), N_intersect(ni), p(p_) {
    if (na < 0 || nc < 0 || ni < 0) throw std::invalid_argument("region sizes must be >= 0");
    if (na > p.N || nc > p.N) throw std::invalid_argument("region larger than the system");
    if (ni > std::min(na, nc)) throw std::invalid_argument("intersection larger than a region");
    if (N_union() > p.N) throw std::invalid_argument("union larger than the system");
  }
  int N_union() const { return N_A + N_C - N_intersect; }
};

/// Operator supports A and B.
struct OtocSpec {
  int N_A = 0, N_B = 0, N_intersect = 0;
  EnsembleParams p;

  OtocSpec(int na, int nb, int ni, EnsembleParams p_) : N_A(na), N_B(nb), N_intersect(ni), p(p_) {
    if (na < 0 || nb < 0 || ni < 0) throw std::invalid_argument("support sizes must be >= 0");
    if (na > p.N || nb > p.N) throw std::invalid_argument("support larger than the system");
    if (ni > std::min(na, nb)) throw std::invalid_argument("overlap larger than a support");
    if (N_union() > p.N) throw std::invalid_argument("union larger than the system");
  }
  int N_union() const { return N_A + N_B - N_intersect; }
  OtocSpec exchanged() const { return OtocSpec(N_B, N_A, N_intersect, p); }
};

struct QuenchSpec {
  int N_A = 0;
  EnsembleParams p;
  int n = 2;

  QuenchSpec(int na, EnsembleParams p_) : N_A(na), p(p_) {
    if (na < 0 || na > p.N) throw std::invalid_argument("N_A must lie in 0..N");
  }
};

inline double dpow(int d, double e) { return std::pow(static_cast<double>(d), e); }

// Mutual information --------------------------------------------------------

/// sigma flipped on A (inputs), tau flipped on C (outputs).
inline BipartitionSignature mutual_information_signature(const RegionSpec& r) {
  const int mm = r.N_intersect;
  const int mp = r.N_A - r.N_intersect;
  const int pm = r.N_C - r.N_intersect;
  return BipartitionSignature(r.p.N - mm - mp - pm, pm, mp, mm);
}

inline double mutual_information(const RegionSpec& r, double t, Mode mode, SffModel model = SffModel::closed_form) {
  const double lnd = std::log(static_cast<double>(r.p.d));
  if (mode == Mode::leading) {
    const double R = large_d(SffLabel::R11m1m1, t);
    return std::log(R * (dpow(r.p.d, 2.0 * r.N_intersect) - 1) + 1);
  }
  const double W = w2_exact(mutual_information_signature(r), r.p, t, model);
  if (!(W > 0)) throw std::domain_error("non-positive feature value");
  return (r.N_A + r.N_C) * lnd + std::log(W) - 2 * r.p.log_D();
}

/// Late-time I(A:C), exact in D.
inline double mutual_information_late(const RegionSpec& r) {
  const long double D = r.p.D_real();
  const int d = r.p.d;
  auto dp = [&](double e) { return std::pow(static_cast<long double>(d), static_cast<long double>(e)); };
  const long double inner = 2 * (1 + 2 / D) * dp(2.0 * r.N_intersect) +
                            (D * D + 4 * D + 2) * (1 + dp(2.0 * (r.N_A + r.N_C)) / (D * D)) -
                            (1 + 4 / D) * (dp(2.0 * r.N_A) + dp(2.0 * r.N_C)) - 2 * dp(2.0 * r.N_union()) / (D * D);
  return static_cast<double>(std::log(inner / ((D + 1) * (D + 3))));
}

/// Large-D approximation ln(1 + d^{2(N_A + N_C - N)}).
inline double mutual_information_late_large_d(const RegionSpec& r) {
  return std::log1p(dpow(r.p.d, 2.0 * (r.N_A + r.N_C - r.p.N)));
}

/// The N_A = M, N_C = N - M case: ln(2 - d^{-2M}).
inline double mutual_information_late_complementary(int M, int d) { return std::log(2 - dpow(d, -2.0 * M)); }

inline double dip_time(const RegionSpec& r) {
  if (r.N_intersect < 1) throw std::invalid_argument("dip_time needs a non-empty intersection");
  return std::cbrt(dpow(r.p.d, r.N_intersect) / std::numbers::pi);
}

// Hayden-Preskill ------------------------------------------------------------

struct DecodingMetrics {
  double Delta = 0;
  double F = 0;
};

/// Success probability and fidelity from the leading-order I(A:C), N_intersect defaulting to N_A.
inline DecodingMetrics hp_metrics(int N_A, int N_D, const EnsembleParams& p, double t, int N_intersect = -1) {
  if (N_A < 0 || N_D < 0 || N_A + N_D > p.N) throw std::invalid_argument("need 0 <= N_A, N_D and N_A + N_D <= N");
  const int ni = N_intersect < 0 ? N_A : N_intersect;
  const RegionSpec r(N_A, p.N - N_D, ni, p);
  const double I = mutual_information(r, t, Mode::leading);
  return {dpow(p.d, -2.0 * N_A) * std::exp(I), std::exp(-I)};
}

inline DecodingMetrics hp_late(int N_A, int N_D, int d) {
  return {dpow(d, -2.0 * N_A) + dpow(d, -2.0 * N_D), 1.0 / (1.0 + dpow(d, 2.0 * (N_A - N_D)))};
}

// OTOC ------------------------------------------------------------------------

/// sigma flipped on A, tau flipped off B.
inline BipartitionSignature otoc_signature(const OtocSpec& s) {
  const int mp = s.N_intersect;
  const int mm = s.N_A - s.N_intersect;
  const int pp = s.N_B - s.N_intersect;
  return BipartitionSignature(pp, s.p.N - mp - mm - pp, mp, mm);
}

inline double otoc_leading(const OtocSpec& s, const SffValues& v) {
  const int d = s.p.d;
  const double R0 = v[SffLabel::R0], R00 = v[SffLabel::R00], R21 = v[SffLabel::R2m1m1], R11 = v[SffLabel::R11m1m1];
  return R11 * dpow(d, -2.0 * s.N_intersect) - 2 * (R11 - R21) * dpow(d, -2.0 * s.N_union()) +
         (R00 - R11) * (dpow(d, -2.0 * s.N_A) + dpow(d, -2.0 * s.N_B)) -
         (2 * R00 - R0 + 2 * R21 - 3 * R11) * (dpow(d, -2.0 * (s.N_A + s.N_B)) + dpow(d, -2.0 * s.p.N));
}

/// exact: d^{-N-N_A-N_B} W over the S_4 double sum; leading: the five-term form.
inline double otoc(const OtocSpec& s, double t, Mode mode, SffModel model = SffModel::closed_form) {
  const auto v = sff_values(model, t, s.p.D_real());
  if (mode == Mode::leading) return otoc_leading(s, v);
  const double W = w2_exact(coefficients(otoc_signature(s), s.p), v);
  return W * dpow(s.p.d, -static_cast<double>(s.p.N + s.N_A + s.N_B));
}

/// Exact-mode OTOC with precomputed coefficients, for sweeps.
inline double otoc(const FeatureCoefficients& fc, const OtocSpec& s, double t, SffModel model = SffModel::closed_form) {
  const double W = w2_exact(fc, sff_values(model, t, s.p.D_real()));
  return W * dpow(s.p.d, -static_cast<double>(s.p.N + s.N_A + s.N_B));
}

struct OtocAsymptotics {
  double kappa = 0;
  double otoc_inf = 0;
  double alpha = 0;
  double beta = 0;
  double t_d = 0;
};

inline OtocAsymptotics otoc_asymptotics(const OtocSpec& s) {
  const int d = s.p.d;
  auto inv2 = [&](double n) { return dpow(d, -2.0 * n); };
  const double pi = std::numbers::pi;
  OtocAsymptotics a;
  a.kappa = inv2(s.N_intersect) + inv2(s.N_union()) - inv2(s.N_A) - inv2(s.N_B);
  a.otoc_inf = inv2(s.N_A) + inv2(s.N_B) - inv2(s.N_A + s.N_B) - inv2(s.p.N);
  a.alpha = (inv2(s.N_union()) - inv2(s.N_A + s.N_B) - inv2(s.p.N)) / (std::sqrt(2.0) * std::pow(pi, 1.5));
  a.beta = (inv2(s.N_intersect) + 3 * inv2(s.N_A + s.N_B) - inv2(s.N_A) - inv2(s.N_B) - 2 * inv2(s.N_union()) +
            3 * inv2(s.p.N)) /
           (pi * pi);
  a.t_d = std::pow(a.beta / a.otoc_inf, 1.0 / 6.0);
  return a;
}

/// OTOC_inf + alpha t^{-9/2} + beta t^{-6}
inline double otoc_envelope(const OtocAsymptotics& a, double t) {
  return a.otoc_inf + a.alpha * std::pow(t, -4.5) + a.beta * std::pow(t, -6.0);
}

// Quench ----------------------------------------------------------------------

/// V[tau] coefficients: (d(d+1))^{-N} sum over sigma classes of binomially weighted W coefficients.
inline std::array<Rational, kSffLabelCount> quench_coefficients(const QuenchSpec& q) {
  const int N = q.p.N, NA = q.N_A;
  std::array<Rational, kSffLabelCount> out;
  for (auto& c : out) c = 0;
  auto binom = [](int n, int k) {
    BigInt b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  for (int k1 = 0; k1 <= NA; ++k1)
    for (int k2 = 0; k2 <= N - NA; ++k2) {
      const BipartitionSignature sig(N - NA - k2, NA - k1, k2, k1);
      const auto fc = coefficients(sig, q.p);
      const Rational w(binom(NA, k1) * binom(N - NA, k2));
      for (int i = 0; i < kSffLabelCount; ++i) out[i] += w * fc.coeffs[i];
    }
  const Rational norm(BigInt(1), ipow(BigInt(q.p.d) * (q.p.d + 1), N));
  for (auto& c : out) c *= norm;
  return out;
}

inline double quench_feature(const QuenchSpec& q, double t, Mode mode, SffModel model = SffModel::large_d) {
  if (mode == Mode::leading) {
    if (q.N_A == 0 || q.N_A == q.p.N) return 1.0;  // empty region or the whole pure state
    const double R = (model == SffModel::large_d) ? large_d(SffLabel::R11m1m1, t)
                                                  : sff_values(model, t, q.p.D_real())[SffLabel::R11m1m1];
    return R + (1 - R) * (dpow(q.p.d, -q.N_A) + dpow(q.p.d, -(q.p.N - q.N_A)));
  }
  const auto c = quench_coefficients(q);
  const auto v = sff_values(model, t, q.p.D_real());
  long double s = 0;
  for (int i = 0; i < kSffLabelCount; ++i) s += to_ld(c[i]) * v.values[i];
  return static_cast<double>(s);
}

inline double quench_entropy(const QuenchSpec& q, double t, Mode mode, SffModel model = SffModel::large_d) {
  const double V = quench_feature(q, t, mode, model);
  if (!(V > 0)) throw std::domain_error("non-positive state feature");
  return -std::log(V);
}

}  // namespace entfeat

#endif  // ENTFEAT_OBSERVABLES_HPP
