#ifndef ENTFEAT_SFF_HPP
#define ENTFEAT_SFF_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gue.hpp"
#include "permcore.hpp"
#include "weingarten.hpp"

namespace entfeat {

enum class SffLabel { R0, R00, R1m1, R1m10, R2m2, R2m1m1, R11m1m1 };

constexpr int kSffLabelCount = 7;
constexpr std::array<SffLabel, kSffLabelCount> kSffLabels = {SffLabel::R0,   SffLabel::R00,    SffLabel::R1m1,
                                                             SffLabel::R1m10, SffLabel::R2m2, SffLabel::R2m1m1,
                                                             SffLabel::R11m1m1};

inline int index_of(SffLabel l) { return static_cast<int>(l); }

inline const char* name(SffLabel l) {
  switch (l) {
    case SffLabel::R0: return "R0";
    case SffLabel::R00: return "R00";
    case SffLabel::R1m1: return "R1m1";
    case SffLabel::R1m10: return "R1m10";
    case SffLabel::R2m2: return "R2m2";
    case SffLabel::R2m1m1: return "R2m1m1";
    case SffLabel::R11m1m1: return "R11m1m1";
  }
  return "?";
}

/// The bracket [k] of a label, zeros included.
inline std::vector<int> charges(SffLabel l) {
  switch (l) {
    case SffLabel::R0: return {0};
    case SffLabel::R00: return {0, 0};
    case SffLabel::R1m1: return {1, -1};
    case SffLabel::R1m10: return {1, -1, 0};
    case SffLabel::R2m2: return {2, -2};
    case SffLabel::R2m1m1: return {2, -1, -1};
    case SffLabel::R11m1m1: return {1, 1, -1, -1};
  }
  return {};
}

/// Charge of each cycle of g in S_{2n}: +1 per forward layer (< n), -1 per backward layer.
inline std::vector<int> cycle_charges(const Permutation& g) {
  const int n = g.degree() / 2;
  std::vector<int> out;
  for (const auto& c : cycles(g)) {
    int q = 0;
    for (int i : c) q += (i < n) ? 1 : -1;
    out.push_back(q);
  }
  return out;
}

/// Label in canonical form: nonzero charges sorted descending with the overall sign
/// fixed so the largest magnitude is positive, plus the number of neutral cycles.
struct ChargeLabel {
  std::vector<int> nonzero;
  int zeros = 0;
  friend bool operator<(const ChargeLabel& a, const ChargeLabel& b) {
    return a.nonzero != b.nonzero ? a.nonzero < b.nonzero : a.zeros < b.zeros;
  }
  friend bool operator==(const ChargeLabel& a, const ChargeLabel& b) {
    return a.nonzero == b.nonzero && a.zeros == b.zeros;
  }
};

inline ChargeLabel charge_label(const Permutation& g) {
  ChargeLabel l;
  for (int q : cycle_charges(g)) {
    if (q == 0)
      ++l.zeros;
    else
      l.nonzero.push_back(q);
  }
  std::sort(l.nonzero.begin(), l.nonzero.end(), std::greater<int>());
  if (!l.nonzero.empty() && -l.nonzero.back() > l.nonzero.front()) {
    for (int& q : l.nonzero) q = -q;
    std::sort(l.nonzero.begin(), l.nonzero.end(), std::greater<int>());
  }
  return l;
}

/// SFF label of g in S_4 (Table 2 grouping).
inline SffLabel sff_label_of(const Permutation& g) {
  if (g.degree() != 4) throw std::invalid_argument("sff_label_of: g must lie in S_4");
  const ChargeLabel l = charge_label(g);
  const auto& k = l.nonzero;
  if (k.empty()) return l.zeros == 1 ? SffLabel::R0 : SffLabel::R00;
  if (k == std::vector<int>{1, -1}) return l.zeros == 0 ? SffLabel::R1m1 : SffLabel::R1m10;
  if (k == std::vector<int>{2, -2}) return SffLabel::R2m2;
  if (k == std::vector<int>{2, -1, -1}) return SffLabel::R2m1m1;
  if (k == std::vector<int>{1, 1, -1, -1}) return SffLabel::R11m1m1;
  throw std::logic_error("unexpected charge pattern");
}

// Bessel J1 -------------------------------------------------------------

namespace detail {

inline long double j1_series(long double x) {
  const long double h = x / 2;
  const long double h2 = h * h;
  long double term = h;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -h2 / (static_cast<long double>(k) * (k + 1));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && std::fabs(term) < 1e-24L) break;
  }
  return sum;
}

// Hankel expansion, truncated at the smallest term.
inline long double j1_asymptotic(long double x) {
  const long double mu = 4.0L;
  long double P = 0, Q = 0;
  long double a = 1;  // a_k / x^k
  long double prev = INFINITY;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      const long double odd = 2.0L * k - 1;
      a *= (mu - odd * odd) / (k * 8.0L * x);
    }
    const long double mag = std::fabs(a);
    if (mag > prev || mag < 1e-21L) break;
    prev = mag;
    const int sgn = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0)
      P += sgn * a;
    else
      Q += sgn * a;
  }
  const long double chi = x - 0.75L * std::numbers::pi_v<long double>;
  return std::sqrt(2.0L / (std::numbers::pi_v<long double> * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

}  // namespace detail

// Hankel truncation error is about exp(-2x): 3e-12 at x = 12, 3e-14 at x = 14.
constexpr long double kJ1SeriesLimit = 14.0L;

/// Bessel J1: long double power series for |x| <= 14, Hankel asymptotics beyond.
inline double bessel_j1(double x) {
  const long double ax = std::fabs(static_cast<long double>(x));
  const long double v = ax <= kJ1SeriesLimit ? detail::j1_series(ax) : detail::j1_asymptotic(ax);
  return static_cast<double>(x < 0 ? -v : v);
}

// Closed forms -----------------------------------------------------------

struct RFunctions {
  double r1, r2, r3;
};

inline double r1_of(double t) { return t == 0.0 ? 1.0 : bessel_j1(2 * t) / t; }
inline double r2_of(double t, double D) { return std::max(0.0, 1.0 - std::fabs(t) / (2 * D)); }
inline double r3_of(double t) {
  if (t == 0.0) return 1.0;
  const double a = std::numbers::pi * t / 2;
  return std::sin(a) / a;
}

inline RFunctions r_functions(double t, double D) {
  if (D < 1) throw std::invalid_argument("r_functions: D must be >= 1");
  return {r1_of(t), r2_of(t, D), r3_of(t)};
}

inline double closed_form(SffLabel l, double t, double D) {
  if (D < 4) throw std::invalid_argument("closed_form: D must be >= 4");
  if (t == 0.0) return 1.0;
  const double a1 = r1_of(t), a2 = r1_of(2 * t);
  const double b1 = r2_of(t, D), b2 = r2_of(2 * t, D), b3 = r2_of(3 * t, D);
  const double c1 = r3_of(t), c2 = r3_of(2 * t);
  switch (l) {
    case SffLabel::R0:
    case SffLabel::R00: return 1.0;
    case SffLabel::R1m1:
    case SffLabel::R1m10: return a1 * a1 + (1 - b1) / D;
    case SffLabel::R2m2: return a2 * a2 + (1 - b2) / D;
    case SffLabel::R2m1m1:
      // The printed formula has a doubled "+" in the 1/D bracket; read as a single "+".
      return a2 * a1 * a1 + (-a2 * b1 * c2 - 2 * a1 * b2 * c1 + a2 * a2 + 2 * a1 * a1) / D +
             (2 * b3 - b2 - 2 * b1 + 1) / (D * D);
    case SffLabel::R11m1m1: {
      const double a1s = a1 * a1;
      return a1s * a1s + (-2 * a1s * b1 * c2 - 4 * a1s * b1 + 2 * a2 * a1s + 4 * a1s) / D +
             (2 * b1 * b1 + b1 * b1 * c2 * c2 + 8 * a1 * b1 * c1 - 2 * a2 * b1 * c2 - 4 * a1 * b2 * c1 + a2 * a2 -
              4 * a1s - 4 * b1 + 2) /
                 (D * D) +
             (-7 * b2 + 4 * b3 + 4 * b1 - 1) / (D * D * D);
    }
  }
  return 0;
}

/// Product of J1(2kt)/(kt) over the nonzero charges.
inline double large_d(SffLabel l, double t) {
  double p = 1;
  for (int k : charges(l))
    if (k != 0) p *= r1_of(k * t);
  return p;
}

inline Rational late_time_exact(SffLabel l, const BigInt& D) {
  switch (l) {
    case SffLabel::R0:
    case SffLabel::R00: return Rational(1);
    case SffLabel::R1m1:
    case SffLabel::R1m10:
    case SffLabel::R2m2: return Rational(BigInt(1), D);
    case SffLabel::R2m1m1: return Rational(BigInt(1), D * D);
    case SffLabel::R11m1m1: return Rational(2 * D - 1, D * D * D);
  }
  return Rational(0);
}

inline double late_time(SffLabel l, double D) {
  if (D < 2) throw std::invalid_argument("late_time: D must be >= 2");
  switch (l) {
    case SffLabel::R0:
    case SffLabel::R00: return 1.0;
    case SffLabel::R1m1:
    case SffLabel::R1m10:
    case SffLabel::R2m2: return 1.0 / D;
    case SffLabel::R2m1m1: return 1.0 / (D * D);
    case SffLabel::R11m1m1: return (2 * D - 1) / (D * D * D);
  }
  return 0;
}

// Exact finite-D GUE averages --------------------------------------------
//
// The GUE spectrum is determinantal with the Hermite kernel, so the moments of
// Z(s) = sum_m exp(-i s E_m) follow from traces of A(s)_{mn} = <m| exp(-i s x / sqrt(D)) |n>
// over the first D oscillator states. With x = (a + a^dag)/sqrt(2) this is the
// displacement D(alpha) with alpha = -i s / sqrt(D).

/// A(s) restricted to the lowest D oscillator levels.
inline MatrixXcd oscillator_phase_block(double s, int D) {
  MatrixXcd A = MatrixXcd::Zero(D, D);
  if (s == 0.0) return MatrixXcd::Identity(D, D);
  const cd alpha(0.0, -s / std::sqrt(static_cast<double>(D)));
  const double x = s * s / D;
  const double logabs = std::log(std::abs(alpha));
  for (int m = 0; m < D; ++m) {
    for (int n = 0; n < D; ++n) {
      const int lo = std::min(m, n), k = std::abs(m - n);
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(k), x);
      if (lag == 0.0) continue;
      const double logmag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) + k * logabs - x / 2 +
                            std::log(std::fabs(lag));
      const double mag = std::exp(logmag) * (lag < 0 ? -1.0 : 1.0);
      // m >= n: alpha^k ; m < n: (-conj(alpha))^k
      const cd base = (m >= n) ? alpha / std::abs(alpha) : -std::conj(alpha) / std::abs(alpha);
      A(m, n) = mag * std::pow(base, k);
    }
  }
  return A;
}

namespace detail {

class GueMomentEngine {
 public:
  GueMomentEngine(const std::vector<double>& s, int D) : s_(s), D_(D) {}

  cd moment() {
    const unsigned full = (1u << s_.size()) - 1;
    return moment_of(full);
  }

 private:
  const MatrixXcd& block(unsigned mask) {
    double sum = 0;
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (mask & (1u << i)) sum += s_[i];
    auto it = cache_.find(sum);
    if (it == cache_.end()) it = cache_.emplace(sum, oscillator_phase_block(sum, D_)).first;
    return it->second;
  }

  // Sum over ordered set partitions (T1..Tm) of `rest` of (-1)^{m+1}/m tr(prefix A(T1)...A(Tm)).
  cd ordered(unsigned rest, const MatrixXcd* prefix, int depth) {
    cd total = 0;
    for (unsigned sub = rest; sub; sub = (sub - 1) & rest) {
      const MatrixXcd& a = block(sub);
      const unsigned left = rest & ~sub;
      if (left == 0) {
        cd tr = prefix ? (prefix->array() * a.transpose().array()).sum() : a.trace();
        const int m = depth + 1;
        total += ((m % 2) ? 1.0 : -1.0) / m * tr;
      } else {
        MatrixXcd next = prefix ? MatrixXcd((*prefix) * a) : a;
        total += ordered(left, &next, depth + 1);
      }
    }
    return total;
  }

  cd cumulant(unsigned mask) {
    auto it = kappa_.find(mask);
    if (it != kappa_.end()) return it->second;
    cd k = ordered(mask, nullptr, 0);
    kappa_.emplace(mask, k);
    return k;
  }

  // Moment from cumulants: sum over set partitions, anchoring the lowest element.
  cd moment_of(unsigned mask) {
    if (mask == 0) return 1.0;
    auto it = moment_.find(mask);
    if (it != moment_.end()) return it->second;
    const unsigned low = mask & (~mask + 1);
    const unsigned rest = mask & ~low;
    cd total = 0;
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
      total += cumulant(low | sub) * moment_of(rest & ~sub);
      if (sub == 0) break;
    }
    moment_.emplace(mask, total);
    return total;
  }

  std::vector<double> s_;
  int D_;
  std::map<double, MatrixXcd> cache_;
  std::map<unsigned, cd> kappa_;
  std::map<unsigned, cd> moment_;
};

}  // namespace detail

/// <prod_i Z(s_i)> over the GUE at dimension D, with Z(s) = sum_m exp(-i s E_m).
inline cd gue_moment(const std::vector<double>& s, int D) {
  if (D < 1) throw std::invalid_argument("gue_moment: D must be >= 1");
  if (s.size() > 8) throw std::invalid_argument("gue_moment: at most 8 factors");
  detail::GueMomentEngine e(s, D);
  return e.moment();
}

/// Exact finite-D GUE value of R_[k]; agrees with R_g of Table 2 for every label.
inline double exact_gue(SffLabel l, double t, int D) {
  std::vector<double> s;
  int nonzero = 0;
  for (int k : charges(l))
    if (k != 0) {
      s.push_back(k * t);
      ++nonzero;
    }
  if (nonzero == 0) return 1.0;
  return gue_moment(s, D).real() / std::pow(static_cast<double>(D), nonzero);
}

// Model selection -------------------------------------------------------

enum class SffModel { closed_form, large_d, late_time, exact_gue };

inline const char* name(SffModel m) {
  switch (m) {
    case SffModel::closed_form: return "closed_form";
    case SffModel::large_d: return "large_d";
    case SffModel::late_time: return "late_time";
    case SffModel::exact_gue: return "exact_gue";
  }
  return "?";
}

inline SffModel parse_sff_model(const std::string& s) {
  if (s == "closed_form" || s == "closed") return SffModel::closed_form;
  if (s == "large_d" || s == "large") return SffModel::large_d;
  if (s == "late_time" || s == "late") return SffModel::late_time;
  if (s == "exact_gue" || s == "gue") return SffModel::exact_gue;
  throw std::invalid_argument("unknown SFF model: " + s);
}

struct SffValues {
  double t = 0;
  double D = 0;
  std::array<double, kSffLabelCount> values{};
  double operator[](SffLabel l) const { return values[index_of(l)]; }
  double& operator[](SffLabel l) { return values[index_of(l)]; }
};

inline SffValues sff_values(SffModel model, double t, double D) {
  SffValues v;
  v.t = t;
  v.D = D;
  if (model == SffModel::exact_gue) {
    if (D != std::floor(D) || D > 4096) throw std::invalid_argument("exact_gue needs an integer D <= 4096");
    const int Di = static_cast<int>(D);
    // one engine per distinct argument set keeps the shared blocks cached
    const double r11 = gue_moment({t, t, -t, -t}, Di).real() / std::pow(D, 4);
    const double r21 = gue_moment({2 * t, -t, -t}, Di).real() / std::pow(D, 3);
    const double r22 = gue_moment({2 * t, -2 * t}, Di).real() / (D * D);
    const double r1 = gue_moment({t, -t}, Di).real() / (D * D);
    v[SffLabel::R0] = v[SffLabel::R00] = 1.0;
    v[SffLabel::R1m1] = v[SffLabel::R1m10] = r1;
    v[SffLabel::R2m2] = r22;
    v[SffLabel::R2m1m1] = r21;
    v[SffLabel::R11m1m1] = r11;
    return v;
  }
  for (SffLabel l : kSffLabels) {
    switch (model) {
      case SffModel::closed_form: v[l] = closed_form(l, t, D); break;
      case SffModel::large_d: v[l] = large_d(l, t); break;
      case SffModel::late_time: v[l] = late_time(l, D); break;
      case SffModel::exact_gue: break;
    }
  }
  return v;
}

// Monte Carlo ------------------------------------------------------------

struct Estimate {
  double value = 0;
  double standard_error = 0;
};

/// R_g^{(2)}(t) = <Tr(L x L x L* x L*) X_g> / Tr X_g, one phase sum per cycle of g.
inline Estimate mc_estimate_rg(const Permutation& g, double t, int D, int samples, std::uint64_t seed,
                               int threads = 0) {
  if (samples < 2) throw std::invalid_argument("mc_estimate_rg: need at least 2 samples");
  if (D < 4) throw std::invalid_argument("mc_estimate_rg: D must be >= 4");
  if (g.degree() != 4) throw std::invalid_argument("mc_estimate_rg: g must lie in S_4");
  const auto q = cycle_charges(g);
  const double norm = std::pow(static_cast<double>(D), static_cast<double>(q.size()));
  auto one = [&](std::size_t i) -> double {
    const auto spec = sample_gue_spectrum(D, seed, i);
    cd prod = 1.0;
    for (int k : q) {
      cd z = 0;
      for (double E : spec.eigenvalues) z += std::polar(1.0, -k * E * t);
      prod *= z;
    }
    return prod.real() / norm;
  };
  const auto xs = parallel_map<double>(samples, threads, one);
  const auto st = summarize(xs, seed);
  return {st.mean, st.standard_error};
}

}  // namespace entfeat

#endif  // ENTFEAT_SFF_HPP
