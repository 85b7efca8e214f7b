#ifndef ENTFEAT_WEINGARTEN_HPP
#define ENTFEAT_WEINGARTEN_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "permcore.hpp"

namespace entfeat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt ipow(const BigInt& base, long exp) {
  if (exp < 0) throw std::invalid_argument("ipow: negative exponent");
  return boost::multiprecision::pow(base, static_cast<unsigned>(exp));
}

/// Integer power of a rational; negative exponents allowed.
inline Rational rpow(const BigInt& base, long exp) {
  if (exp >= 0) return Rational(ipow(base, exp));
  return Rational(BigInt(1), ipow(base, -exp));
}

inline long double to_ld(const Rational& r) {
  return r.convert_to<long double>();
}

struct WeingartenTable {
  int m = 0;
  BigInt D;
  std::map<CycleType, Rational> values;

  const Rational& operator()(const CycleType& c) const {
    auto it = values.find(c);
    if (it == values.end()) throw std::out_of_range("no Weingarten value for cycle type");
    return it->second;
  }
  const Rational& at(const Permutation& g) const { return (*this)(cycle_type(g)); }
};

namespace detail {

// counts[l][u][k]: number of h in S_m with type(g_l h^-1) = u and #(h) = k.
struct GramCounts {
  std::vector<CycleType> types;
  std::vector<std::vector<std::vector<long>>> counts;
};

inline int type_index(const std::vector<CycleType>& types, const CycleType& c) {
  for (std::size_t i = 0; i < types.size(); ++i)
    if (types[i] == c) return static_cast<int>(i);
  throw std::logic_error("unknown cycle type");
}

inline const GramCounts& gram_counts(int m) {
  static std::mutex mu;
  static std::map<int, GramCounts> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GramCounts gc;
  gc.types = partitions(m);
  const std::size_t P = gc.types.size();
  gc.counts.assign(P, std::vector<std::vector<long>>(P, std::vector<long>(m + 1, 0)));
  const auto group = all_permutations(m);
  std::vector<int> ncyc(group.size());
  std::vector<Permutation> inv(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    ncyc[i] = cycle_count(group[i]);
    inv[i] = inverse(group[i]);
  }
  for (std::size_t l = 0; l < P; ++l) {
    const Permutation g = representative(gc.types[l]);
    for (std::size_t i = 0; i < group.size(); ++i) {
      int u = type_index(gc.types, cycle_type(compose(g, inv[i])));
      ++gc.counts[l][u][ncyc[i]];
    }
  }
  return cache.emplace(m, std::move(gc)).first->second;
}

// Gauss-Jordan elimination over the rationals; A is square.
inline std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && A[piv][c] == 0) ++piv;
    if (piv == n) throw std::domain_error("singular Gram matrix");
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    const Rational inv = Rational(1) / A[c][c];
    for (std::size_t j = c; j < n; ++j) A[c][j] *= inv;
    b[c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      const Rational f = A[r][c];
      for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
      b[r] -= f * b[c];
    }
  }
  return b;
}

}  // namespace detail

/// Class function inverting the Gram matrix D^{#(g h^-1)} on S_m, exactly.
inline WeingartenTable gram_invert(int m, const BigInt& D) {
  if (m < 1 || m > 6) throw std::invalid_argument("gram_invert: m must be in 1..6");
  if (D < m) throw std::domain_error("gram_invert: D < m gives a singular Gram matrix");
  const auto& gc = detail::gram_counts(m);
  const std::size_t P = gc.types.size();
  std::vector<BigInt> Dpow(m + 1);
  Dpow[0] = 1;
  for (int k = 1; k <= m; ++k) Dpow[k] = Dpow[k - 1] * D;
  std::vector<std::vector<Rational>> A(P, std::vector<Rational>(P));
  std::vector<Rational> b(P, Rational(0));
  for (std::size_t l = 0; l < P; ++l) {
    for (std::size_t u = 0; u < P; ++u) {
      BigInt s = 0;
      for (int k = 0; k <= m; ++k) s += gc.counts[l][u][k] * Dpow[k];
      A[l][u] = Rational(s);
    }
    if (gc.types[l].length() == m) b[l] = 1;
  }
  const auto x = detail::solve_exact(std::move(A), std::move(b));
  WeingartenTable t;
  t.m = m;
  t.D = D;
  for (std::size_t u = 0; u < P; ++u) t.values.emplace(gc.types[u], x[u]);
  return t;
}

inline WeingartenTable gram_invert(int m, long long D) { return gram_invert(m, BigInt(D)); }

/// numerator(D) / denominator(D), coefficients in ascending powers of D.
struct RationalFunction {
  std::vector<Rational> numerator;
  std::vector<BigInt> denominator;

  Rational eval(const BigInt& D) const {
    const Rational x(D);
    Rational n = 0;
    BigInt d = 0;
    for (auto it = numerator.rbegin(); it != numerator.rend(); ++it) n = n * x + *it;
    for (auto it = denominator.rbegin(); it != denominator.rend(); ++it) d = d * D + *it;
    return n / Rational(d);
  }
  long double eval(long double D) const {
    long double n = 0, d = 0;
    for (auto it = numerator.rbegin(); it != numerator.rend(); ++it) n = n * D + to_ld(*it);
    for (auto it = denominator.rbegin(); it != denominator.rend(); ++it) d = d * D + it->convert_to<long double>();
    return n / d;
  }
};

/// Z_m(D) = prod_c (D + c)^{mult(c)}: the lcm over irreps of prod over cells (D + content).
inline std::vector<BigInt> weingarten_denominator(int m) {
  std::map<int, int> mult;
  for (const auto& lam : partitions(m)) {
    std::map<int, int> here;
    for (int i = 0; i < lam.length(); ++i)
      for (int j = 0; j < lam.parts[i]; ++j) ++here[j - i];
    for (auto [c, k] : here) mult[c] = std::max(mult[c], k);
  }
  std::vector<BigInt> poly{BigInt(1)};
  for (auto [c, k] : mult) {
    for (int r = 0; r < k; ++r) {
      std::vector<BigInt> next(poly.size() + 1, BigInt(0));
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * c;
        next[i + 1] += poly[i];
      }
      poly = std::move(next);
    }
  }
  return poly;
}

namespace detail {

// Newton interpolation through (x_i, y_i), returned in monomial form.
inline std::vector<Rational> interpolate(const std::vector<BigInt>& x, std::vector<Rational> y) {
  const std::size_t n = x.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) y[i] = (y[i] - y[i - 1]) / Rational(x[i] - x[i - j]);
  std::vector<Rational> poly{y[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<Rational> next(poly.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] -= poly[i] * Rational(x[k]);
      next[i + 1] += poly[i];
    }
    next[0] += y[k];
    poly = std::move(next);
  }
  while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
  return poly;
}

}  // namespace detail

/// Wg as a rational function of D, over the common denominator Z_m.
inline const RationalFunction& weingarten_poly(int m, const CycleType& c) {
  if (m < 1 || m > 6) throw std::invalid_argument("weingarten_poly: m must be in 1..6");
  if (c.degree() != m) throw std::invalid_argument("weingarten_poly: cycle type is not a partition of m");
  static std::mutex mu;
  static std::map<int, std::map<CycleType, RationalFunction>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) {
    const auto den = weingarten_denominator(m);
    const std::size_t npts = den.size() + 2;
    std::vector<BigInt> xs;
    std::vector<WeingartenTable> tables;
    for (std::size_t k = 0; k < npts; ++k) {
      xs.emplace_back(m + static_cast<long>(k));
      tables.push_back(gram_invert(m, xs.back()));
    }
    RationalFunction probe;
    probe.denominator = den;
    std::map<CycleType, RationalFunction> byType;
    for (const auto& type : partitions(m)) {
      std::vector<BigInt> fitx(xs.begin(), xs.end() - 2);
      std::vector<Rational> fity;
      for (std::size_t k = 0; k + 2 < npts; ++k) {
        probe.numerator = {Rational(1)};
        fity.push_back(tables[k](type) / probe.eval(xs[k]));
      }
      RationalFunction f;
      f.denominator = den;
      f.numerator = detail::interpolate(fitx, fity);
      for (std::size_t k = npts - 2; k < npts; ++k)
        if (f.eval(xs[k]) != tables[k](type)) throw std::logic_error("Weingarten interpolation check failed");
      byType.emplace(type, std::move(f));
    }
    it = cache.emplace(m, std::move(byType)).first;
  }
  return it->second.at(c);
}

}  // namespace entfeat

#endif  // ENTFEAT_WEINGARTEN_HPP
