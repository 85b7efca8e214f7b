#ifndef ENTFEAT_PERMCORE_HPP
#define ENTFEAT_PERMCORE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace entfeat {

constexpr int kMaxDegree = 8;

/// Element of S_m in one-line notation, m <= 8.
class Permutation {
 public:
  Permutation() : m_(1) { images_.fill(0); }

  explicit Permutation(const std::vector<int>& images) : m_(static_cast<int>(images.size())) {
    if (m_ < 1 || m_ > kMaxDegree) throw std::invalid_argument("permutation degree must be in 1..8");
    std::array<bool, kMaxDegree> seen{};
    images_.fill(0);
    for (int i = 0; i < m_; ++i) {
      int v = images[i];
      if (v < 0 || v >= m_ || seen[v]) throw std::invalid_argument("images are not a bijection");
      seen[v] = true;
      images_[i] = static_cast<std::int8_t>(v);
    }
  }

  static Permutation identity(int m) {
    std::vector<int> im(m);
    for (int i = 0; i < m; ++i) im[i] = i;
    return Permutation(im);
  }

  // Cycle notation, test fixtures only: from_cycles(4, {{0, 1}, {2, 3}}).
  static Permutation from_cycles(int m, std::initializer_list<std::initializer_list<int>> cycles) {
    std::vector<int> im(m);
    for (int i = 0; i < m; ++i) im[i] = i;
    std::vector<bool> used(m, false);
    for (const auto& c : cycles) {
      std::vector<int> cyc(c);
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        int a = cyc[k];
        if (a < 0 || a >= m || used[a]) throw std::invalid_argument("bad cycle");
        used[a] = true;
        im[a] = cyc[(k + 1) % cyc.size()];
      }
    }
    return Permutation(im);
  }

  int degree() const { return m_; }
  int operator()(int i) const { return images_[i]; }

  std::vector<int> images() const { return std::vector<int>(images_.begin(), images_.begin() + m_); }

  bool is_identity() const {
    for (int i = 0; i < m_; ++i)
      if (images_[i] != i) return false;
    return true;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.m_ == b.m_ && a.images_ == b.images_;
  }
  friend bool operator<(const Permutation& a, const Permutation& b) {
    if (a.m_ != b.m_) return a.m_ < b.m_;
    return a.images_ < b.images_;
  }

 private:
  int m_;
  std::array<std::int8_t, kMaxDegree> images_;
};

/// Partition of m, parts non-increasing.
struct CycleType {
  std::vector<int> parts;

  CycleType() = default;
  explicit CycleType(std::vector<int> p) : parts(std::move(p)) {
    if (parts.empty()) throw std::invalid_argument("empty cycle type");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] < 1) throw std::invalid_argument("cycle type parts must be positive");
      if (i > 0 && parts[i] > parts[i - 1]) throw std::invalid_argument("cycle type parts must be non-increasing");
    }
  }

  int degree() const {
    int s = 0;
    for (int p : parts) s += p;
    return s;
  }
  int length() const { return static_cast<int>(parts.size()); }

  friend bool operator==(const CycleType& a, const CycleType& b) { return a.parts == b.parts; }
  friend bool operator<(const CycleType& a, const CycleType& b) { return a.parts < b.parts; }
};

inline std::ostream& operator<<(std::ostream& os, const CycleType& c) {
  os << '(';
  for (std::size_t i = 0; i < c.parts.size(); ++i) os << (i ? "," : "") << c.parts[i];
  return os << ')';
}

inline std::ostream& operator<<(std::ostream& os, const Permutation& p) {
  os << '[';
  for (int i = 0; i < p.degree(); ++i) os << (i ? " " : "") << p(i);
  return os << ']';
}

/// S_2 element as an Ising spin: identity is +1, swap is -1.
enum class IsingSpin : int { plus = 1, minus = -1 };

inline int value(IsingSpin s) { return static_cast<int>(s); }

inline IsingSpin spin_from_int(int v) {
  if (v == 1) return IsingSpin::plus;
  if (v == -1) return IsingSpin::minus;
  throw std::invalid_argument("Ising spin must be +1 or -1");
}

inline Permutation to_s2(IsingSpin s) {
  return s == IsingSpin::plus ? Permutation({0, 1}) : Permutation({1, 0});
}

/// result(i) = p(q(i))
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) throw std::invalid_argument("compose: degree mismatch");
  std::vector<int> im(p.degree());
  for (int i = 0; i < p.degree(); ++i) im[i] = p(q(i));
  return Permutation(im);
}

inline Permutation inverse(const Permutation& p) {
  std::vector<int> im(p.degree());
  for (int i = 0; i < p.degree(); ++i) im[p(i)] = i;
  return Permutation(im);
}

/// Cycles including fixed points, each starting at its smallest element.
inline std::vector<std::vector<int>> cycles(const Permutation& p) {
  std::vector<std::vector<int>> out;
  std::array<bool, kMaxDegree> seen{};
  for (int i = 0; i < p.degree(); ++i) {
    if (seen[i]) continue;
    std::vector<int> c;
    for (int j = i; !seen[j]; j = p(j)) {
      seen[j] = true;
      c.push_back(j);
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline int cycle_count(const Permutation& p) {
  std::array<bool, kMaxDegree> seen{};
  int n = 0;
  for (int i = 0; i < p.degree(); ++i) {
    if (seen[i]) continue;
    ++n;
    for (int j = i; !seen[j]; j = p(j)) seen[j] = true;
  }
  return n;
}

inline CycleType cycle_type(const Permutation& p) {
  std::vector<int> parts;
  for (const auto& c : cycles(p)) parts.push_back(static_cast<int>(c.size()));
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  return CycleType(parts);
}

/// All of S_m in lexicographic order of images.
inline std::vector<Permutation> all_permutations(int m) {
  std::vector<int> im(m);
  for (int i = 0; i < m; ++i) im[i] = i;
  std::vector<Permutation> out;
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

/// All partitions of m, in reverse lexicographic order ((m) first).
inline std::vector<CycleType> partitions(int m) {
  std::vector<CycleType> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int maxpart) -> void {
    if (rest == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int k = std::min(rest, maxpart); k >= 1; --k) {
      cur.push_back(k);
      self(self, rest - k, k);
      cur.pop_back();
    }
  };
  rec(rec, m, m);
  return out;
}

/// A permutation of the given type, cycles laid out on consecutive points.
inline Permutation representative(const CycleType& c) {
  std::vector<int> im(c.degree());
  int start = 0;
  for (int len : c.parts) {
    for (int k = 0; k < len; ++k) im[start + k] = start + (k + 1) % len;
    start += len;
  }
  return Permutation(im);
}

/// s acts on layers 0..n-1, t on layers n..2n-1.
inline Permutation embed_pair(const Permutation& s, const Permutation& t) {
  if (s.degree() != t.degree()) throw std::invalid_argument("embed_pair: degree mismatch");
  const int n = s.degree();
  std::vector<int> im(2 * n);
  for (int i = 0; i < n; ++i) {
    im[i] = s(i);
    im[n + i] = n + t(i);
  }
  return Permutation(im);
}

enum class PairingCandidate { A, B };

/// Pairing between forward layers 0..n-1 and backward layers n..2n-1.
/// A pairs i with n+i; B pairs i with 2n-1-i. They coincide for n = 1.
inline Permutation layer_swap_x(int n, PairingCandidate c = PairingCandidate::A) {
  if (n < 1 || 2 * n > kMaxDegree) throw std::invalid_argument("layer_swap_x: n out of range");
  std::vector<int> im(2 * n);
  for (int i = 0; i < n; ++i) {
    int j = (c == PairingCandidate::A) ? n + i : 2 * n - 1 - i;
    im[i] = j;
    im[j] = i;
  }
  return Permutation(im);
}

// Calibrated against the K_h table and the t = 0 feature; both candidates pass, see tests.
constexpr PairingCandidate kCalibratedPairing = PairingCandidate::A;

/// Per-site energy with trace factor d^(-K). Here K = -#(h (s x t) x).
inline int k_energy(const Permutation& h, const Permutation& s, const Permutation& t,
                    PairingCandidate c = kCalibratedPairing) {
  const int n = s.degree();
  if (h.degree() != 2 * n) throw std::invalid_argument("k_energy: h must lie in S_2n");
  return -cycle_count(compose(h, compose(embed_pair(s, t), layer_swap_x(n, c))));
}

inline int k_energy(const Permutation& h, IsingSpin s, IsingSpin t, PairingCandidate c = kCalibratedPairing) {
  if (h.degree() != 4) throw std::invalid_argument("k_energy: h must lie in S_4");
  return k_energy(h, to_s2(s), to_s2(t), c);
}

/// K_h at (s,t) = (+,+), (+,-), (-,+), (-,-).
inline std::array<int, 4> k_pattern(const Permutation& h, PairingCandidate c = kCalibratedPairing) {
  return {k_energy(h, IsingSpin::plus, IsingSpin::plus, c), k_energy(h, IsingSpin::plus, IsingSpin::minus, c),
          k_energy(h, IsingSpin::minus, IsingSpin::plus, c), k_energy(h, IsingSpin::minus, IsingSpin::minus, c)};
}

/// Coefficients (c0, c_s, c_t, c_st) of K = c0 + c_s s + c_t t + c_st s t.
inline std::array<double, 4> k_affine(const std::array<int, 4>& k) {
  const int s[4] = {1, 1, -1, -1};
  const int t[4] = {1, -1, 1, -1};
  std::array<double, 4> c{};
  for (int i = 0; i < 4; ++i) {
    c[0] += k[i] / 4.0;
    c[1] += s[i] * k[i] / 4.0;
    c[2] += t[i] * k[i] / 4.0;
    c[3] += s[i] * t[i] * k[i] / 4.0;
  }
  return c;
}

}  // namespace entfeat

#endif  // ENTFEAT_PERMCORE_HPP
