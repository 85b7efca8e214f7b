#ifndef ENTFEAT_ORACLE_HPP
#define ENTFEAT_ORACLE_HPP

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "features.hpp"
#include "gue.hpp"

namespace entfeat {

// Time evolution -------------------------------------------------------------

struct SpectralDecomposition {
  Eigen::VectorXd energies;
  MatrixXcd vectors;
};

/// Dense Hermitian eigendecomposition with the residual checked against ||H||.
inline SpectralDecomposition decompose(const MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  SpectralDecomposition s{es.eigenvalues(), es.eigenvectors()};
  const double hn = std::max(H.norm(), 1e-300);
  const double res = (H * s.vectors - s.vectors * s.energies.cast<cd>().asDiagonal()).norm();
  if (res > 1e-10 * hn) throw std::runtime_error("eigendecomposition residual too large");
  return s;
}

/// V diag(exp(-i E t)) V^dag
inline MatrixXcd evolve(const SpectralDecomposition& s, double t) {
  const Eigen::Index D = s.energies.size();
  Eigen::VectorXcd ph(D);
  for (Eigen::Index m = 0; m < D; ++m) ph(m) = std::polar(1.0, -s.energies(m) * t);
  return s.vectors * ph.asDiagonal() * s.vectors.adjoint();
}

inline MatrixXcd evolve(const HermitianMatrix& H, double t) {
  const MatrixXcd U = evolve(decompose(H.H), t);
  const double err = (U.adjoint() * U - MatrixXcd::Identity(U.rows(), U.cols())).norm();
  if (err > 1e-9) throw std::runtime_error("evolved operator is not unitary");
  return U;
}

inline MatrixXcd evolve(const MatrixXcd& H, double t) {
  HermitianMatrix h;
  h.H = H;
  return evolve(h, t);
}

// Choi state -------------------------------------------------------------------

/// Bitmask over 2N channels: bit k < N is input qudit k, bit N + k is output qudit k.
struct RegionMask {
  std::uint32_t bits = 0;
  int channels = 0;

  RegionMask() = default;
  RegionMask(std::uint32_t b, int ch) : bits(b), channels(ch) {
    if (ch < 1 || ch > 32) throw std::invalid_argument("channel count out of range");
    if (ch < 32 && (b >> ch) != 0) throw std::invalid_argument("mask has bits beyond the channel count");
  }
  int popcount() const { return std::popcount(bits); }
  RegionMask complement() const {
    const std::uint32_t all = channels == 32 ? ~0u : ((1u << channels) - 1);
    return RegionMask(all & ~bits, channels);
  }
  bool has(int k) const { return (bits >> k) & 1u; }

  static RegionMask from_sites(int N, const std::vector<int>& inputs, const std::vector<int>& outputs) {
    std::uint32_t b = 0;
    for (int i : inputs) {
      if (i < 0 || i >= N) throw std::invalid_argument("input site out of range");
      b |= 1u << i;
    }
    for (int o : outputs) {
      if (o < 0 || o >= N) throw std::invalid_argument("output site out of range");
      b |= 1u << (N + o);
    }
    return RegionMask(b, 2 * N);
  }
};

constexpr double kMaxChoiAmplitudes = 16777216.0;  // 2^24

inline void check_choi_size(int N, int d) {
  if (std::pow(static_cast<double>(d), 2.0 * N) > kMaxChoiAmplitudes)
    throw std::length_error("Choi state with d^(2N) = " + std::to_string(std::pow(static_cast<double>(d), 2.0 * N)) +
                            " amplitudes exceeds the 2^24 ceiling; reduce N or d");
}

/// |U> / sqrt(D): amplitude[in * D + out] = U(out, in) / sqrt(D), qudit 0 most significant.
struct ChoiState {
  int N = 0;
  int d = 2;
  Eigen::VectorXcd amp;

  static ChoiState from_unitary(const MatrixXcd& U, int N, int d) {
    check_choi_size(N, d);
    const long long D = static_cast<long long>(std::llround(std::pow(d, N)));
    if (U.rows() != D || U.cols() != D) throw std::invalid_argument("unitary dimension differs from d^N");
    ChoiState c;
    c.N = N;
    c.d = d;
    c.amp.resize(D * D);
    const double s = 1.0 / std::sqrt(static_cast<double>(D));
    for (long long in = 0; in < D; ++in)
      for (long long out = 0; out < D; ++out) c.amp(in * D + out) = U(out, in) * s;
    return c;
  }

  int channels() const { return 2 * N; }
};

namespace detail {

// Offsets into the amplitude vector for every digit assignment of the chosen channels.
inline std::vector<long long> channel_offsets(const std::vector<int>& chans, int d, int total) {
  std::vector<long long> weight(total);
  long long w = 1;
  for (int k = total - 1; k >= 0; --k) {
    weight[k] = w;
    w *= d;
  }
  std::vector<long long> off{0};
  for (int ch : chans) {
    std::vector<long long> next;
    next.reserve(off.size() * d);
    for (long long o : off)
      for (int v = 0; v < d; ++v) next.push_back(o + v * weight[ch]);
    off = std::move(next);
  }
  return off;
}

// Reshaped amplitudes with the smaller of (region, complement) as rows.
inline MatrixXcd reshape_for(const ChoiState& c, RegionMask mask) {
  if (mask.channels != c.channels()) throw std::invalid_argument("mask channel count differs from the state");
  if (mask.popcount() * 2 > c.channels()) mask = mask.complement();
  std::vector<int> rows, cols;
  for (int k = 0; k < c.channels(); ++k) (mask.has(k) ? rows : cols).push_back(k);
  const auto ro = channel_offsets(rows, c.d, c.channels());
  const auto co = channel_offsets(cols, c.d, c.channels());
  MatrixXcd M(ro.size(), co.size());
  for (std::size_t j = 0; j < co.size(); ++j)
    for (std::size_t i = 0; i < ro.size(); ++i) M(i, j) = c.amp(ro[i] + co[j]);
  return M;
}

}  // namespace detail

/// Tr rho_R^2 for the masked channels.
inline double renyi2_purity(const ChoiState& c, const RegionMask& mask) {
  if (mask.popcount() == 0 || mask.popcount() == c.channels()) return c.amp.squaredNorm() * c.amp.squaredNorm();
  const MatrixXcd M = detail::reshape_for(c, mask);
  MatrixXcd rho = MatrixXcd::Zero(M.rows(), M.rows());
  rho.selfadjointView<Eigen::Lower>().rankUpdate(M);
  rho.triangularView<Eigen::StrictlyUpper>() = rho.adjoint();
  return rho.squaredNorm();
}

/// Eigenvalues of rho_R, tiny negatives clamped.
inline Eigen::VectorXd reduced_spectrum(const ChoiState& c, const RegionMask& mask) {
  if (mask.popcount() == 0 || mask.popcount() == c.channels()) return Eigen::VectorXd::Ones(1);
  const MatrixXcd M = detail::reshape_for(c, mask);
  const MatrixXcd rho = M * M.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed on reduced density matrix");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10) throw std::runtime_error("reduced density matrix has a negative eigenvalue");
    if (ev(i) < 0) ev(i) = 0;
  }
  return ev;
}

/// (1/(1-n)) ln sum lambda^n, natural log.
inline double renyi_n_entropy(const ChoiState& c, const RegionMask& mask, int n) {
  if (n < 2) throw std::invalid_argument("Renyi index must be >= 2");
  const auto ev = reduced_spectrum(c, mask);
  long double s = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::pow(static_cast<long double>(ev(i)), n);
  return static_cast<double>(std::log(s) / (1.0L - n));
}

/// Mask of flipped sites: inputs with sigma = -1, outputs with tau = -1.
inline RegionMask feature_mask(const std::vector<int>& sigma, const std::vector<int>& tau) {
  if (sigma.size() != tau.size()) throw std::invalid_argument("sigma and tau differ in length");
  const int N = static_cast<int>(sigma.size());
  std::uint32_t b = 0;
  for (int i = 0; i < N; ++i) {
    if (value(spin_from_int(sigma[i])) < 0) b |= 1u << i;
    if (value(spin_from_int(tau[i])) < 0) b |= 1u << (N + i);
  }
  return RegionMask(b, 2 * N);
}

/// W_U^{(2)}[sigma, tau] = D^2 Tr rho^2 over the flipped sites.
inline double w_feature_direct(const MatrixXcd& U, int d, const std::vector<int>& sigma, const std::vector<int>& tau) {
  const int N = static_cast<int>(sigma.size());
  const auto c = ChoiState::from_unitary(U, N, d);
  const double D = std::pow(static_cast<double>(d), N);
  return D * D * renyi2_purity(c, feature_mask(sigma, tau));
}

// Two-qudit studies -----------------------------------------------------------------

/// Channels of a two-qudit gate: A, B inputs; C, D outputs.
inline RegionMask two_qudit_AC() { return RegionMask(0b0101, 4); }
inline RegionMask two_qudit_AD() { return RegionMask(0b1001, 4); }

struct EntropyPair {
  double S_AC = 0;
  double S_AD = 0;
};

/// (S(AC), S(AD)) in dits.
inline EntropyPair two_qudit_entropies(const MatrixXcd& U, int d, int n) {
  const auto c = ChoiState::from_unitary(U, 2, d);
  const double lnd = std::log(static_cast<double>(d));
  return {renyi_n_entropy(c, two_qudit_AC(), n) / lnd, renyi_n_entropy(c, two_qudit_AD(), n) / lnd};
}

inline MatrixXcd pauli(int k) {
  MatrixXcd P(2, 2);
  switch (k) {
    case 0: P << 1, 0, 0, 1; break;
    case 1: P << 0, 1, 1, 0; break;
    case 2: P << 0, cd(0, -1), cd(0, 1), 0; break;
    case 3: P << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("Pauli index must be 0..3");
  }
  return P;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// H = (pi/4) sum_{k <= level} sigma^k sigma^k, level 0 meaning H = 0; U = exp(-i H).
inline MatrixXcd corner_gate(int level) {
  if (level < 0 || level > 3) throw std::invalid_argument("corner gate level must be 0..3");
  MatrixXcd H = MatrixXcd::Zero(4, 4);
  for (int k = 1; k <= level; ++k) H += std::numbers::pi / 4 * kron(pauli(k), pauli(k));
  return evolve(H, 1.0);
}

// Ensembles -----------------------------------------------------------------------------

struct ScanConfig {
  int N = 2;
  int d = 2;
  std::vector<double> times;  // ignored when late_time is set
  bool late_time = false;
  int samples = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// values[time][quantity][sample]
struct ScanResult {
  std::vector<double> times;
  std::vector<std::string> quantities;
  std::vector<std::vector<std::vector<double>>> values;

  EnsembleStats stats(std::size_t ti, std::size_t qi, std::uint64_t seed = 0) const {
    return summarize(values[ti][qi], seed);
  }
};

using QuantityFn = std::function<std::vector<double>(const MatrixXcd& U)>;

/// Late-time realization: Haar V with i.i.d. uniform eigenphases.
inline MatrixXcd late_time_unitary(int D, std::uint64_t seed, std::uint64_t index) {
  auto rng = stream_rng(seed, index, 2);
  const MatrixXcd V = haar_unitary(D, rng);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  Eigen::VectorXcd ph(D);
  for (int m = 0; m < D; ++m) ph(m) = std::polar(1.0, phase(rng));
  return V * ph.asDiagonal() * V.adjoint();
}

/// <|sum_m e^{i theta_m}|^4> / D^4 over i.i.d. uniform phases.
inline Estimate phase_sum_fourth_moment(int D, int samples, std::uint64_t seed, int threads = 0) {
  if (D < 1 || samples < 2) throw std::invalid_argument("need D >= 1 and at least 2 samples");
  auto one = [&](std::size_t i) -> double {
    auto rng = stream_rng(seed, i, 3);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
    cd z = 0;
    for (int m = 0; m < D; ++m) z += std::polar(1.0, phase(rng));
    const double a = std::norm(z);
    return a * a / std::pow(static_cast<double>(D), 4);
  };
  const auto st = summarize(parallel_map<double>(samples, threads, one), seed);
  return {st.mean, st.standard_error};
}

/// ln of a sample mean, standard error by the delta method.
inline Estimate log_of_mean(const EnsembleStats& s) {
  if (!(s.mean > 0)) throw std::domain_error("log of a non-positive mean");
  return {std::log(s.mean), s.standard_error / s.mean};
}

inline ScanResult ensemble_scan(const ScanConfig& cfg, const std::vector<std::string>& names, const QuantityFn& f) {
  check_choi_size(cfg.N, cfg.d);
  if (cfg.samples < 2) throw std::invalid_argument("ensemble_scan needs at least 2 samples");
  const int D = static_cast<int>(std::llround(std::pow(cfg.d, cfg.N)));
  const std::vector<double> times = cfg.late_time ? std::vector<double>{INFINITY} : cfg.times;
  if (times.empty()) throw std::invalid_argument("ensemble_scan needs at least one time");
  using PerSample = std::vector<std::vector<double>>;  // [time][quantity]
  auto one = [&](std::size_t i) -> PerSample {
    PerSample out;
    if (cfg.late_time) {
      out.push_back(f(late_time_unitary(D, cfg.seed, i)));
    } else {
      const auto dec = decompose(sample_gue(D, cfg.seed, i).H);
      for (double t : times) out.push_back(f(evolve(dec, t)));
    }
    for (const auto& q : out)
      if (q.size() != names.size()) throw std::logic_error("quantity callback returned the wrong count");
    return out;
  };
  const auto per = parallel_map<PerSample>(cfg.samples, cfg.threads, one);
  ScanResult r;
  r.times = times;
  r.quantities = names;
  r.values.assign(times.size(), std::vector<std::vector<double>>(names.size(), std::vector<double>(cfg.samples)));
  for (std::size_t i = 0; i < per.size(); ++i)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (std::size_t qi = 0; qi < names.size(); ++qi) r.values[ti][qi][i] = per[i][ti][qi];
  return r;
}

// Bound curves -----------------------------------------------------------------------------

struct BoundPoint {
  double t = 0;
  double W_AC = 0, W_AD = 0;
  double S_AC = 0, S_AD = 0;  // dits
};

inline BoundPoint lower_edge(int n, double t) {
  const double c = std::cos(t);
  BoundPoint b;
  b.t = t;
  b.W_AC = std::pow(8.0, -n) * (3 * std::pow(1 - c, n) + std::pow(5 + 3 * c, n));
  b.W_AD = std::pow(8.0, -n) * (3 * std::pow(1 + c, n) + std::pow(5 - 3 * c, n));
  b.S_AC = std::log2(b.W_AC) / (1.0 - n);
  b.S_AD = std::log2(b.W_AD) / (1.0 - n);
  return b;
}

inline BoundPoint upper_edge(int n, double t) {
  const double c = std::cos(t), s = std::sin(t), s2 = std::sin(2 * t);
  BoundPoint b;
  b.t = t;
  b.W_AC = std::pow(2.0, 1 - n) * (std::pow(c, 2 * n) + std::pow(s, 2 * n));
  b.W_AD = std::pow(2.0, 1 - 2 * n) * (std::pow(1 - s2, n) + std::pow(1 + s2, n));
  b.S_AC = std::log2(b.W_AC) / (1.0 - n);
  b.S_AD = std::log2(b.W_AD) / (1.0 - n);
  return b;
}

struct BoundCurves {
  std::vector<BoundPoint> lower;  // t in [0, pi]
  std::vector<BoundPoint> upper;  // t in [0, pi/4]
};

/// Qubit edge curves of the (S(AC), S(AD)) region on `points` parameter values each.
inline BoundCurves bound_curves(int n, int points) {
  if (n < 2) throw std::invalid_argument("Renyi index must be >= 2");
  if (points < 2) throw std::invalid_argument("need at least 2 curve points");
  BoundCurves c;
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    c.lower.push_back(lower_edge(n, f * std::numbers::pi));
    c.upper.push_back(upper_edge(n, f * std::numbers::pi / 4));
  }
  return c;
}

namespace detail {

// Parameter where a monotone edge coordinate reaches `target`.
template <class F>
double edge_parameter(F coord, double lo, double hi, double target, bool increasing) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((coord(mid) < target) == increasing ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Whether (x, y) = (S(AC), S(AD)) lies in the region between the edges, up to slack.
/// A point is outside an edge only if it is beyond it both horizontally and vertically,
/// which keeps the test stable where an edge runs flat into a corner.
inline bool within_bounds(int n, double x, double y, double slack) {
  if (x < -slack || y < -slack || x > 2 + slack || y > 2 + slack) return false;
  const double xc = std::clamp(x, 0.0, 2.0), yc = std::clamp(y, 0.0, 2.0);
  const double pi = std::numbers::pi;
  // lower edge: S_AC rises 0 -> 2 while S_AD falls 2 -> 0 on [0, pi]
  auto lac = [&](double t) { return lower_edge(n, t).S_AC; };
  auto lad = [&](double t) { return lower_edge(n, t).S_AD; };
  const double y_low = lad(detail::edge_parameter(lac, 0, pi, xc, true));
  const double x_low = lac(detail::edge_parameter(lad, 0, pi, yc, false));
  if (y < y_low - slack && x < x_low - slack) return false;
  // upper edge: S_AC rises 1 -> 2 while S_AD falls 2 -> 1 on [0, pi/4]
  if (x > 1 && y > 1) {
    auto uac = [&](double t) { return upper_edge(n, t).S_AC; };
    auto uad = [&](double t) { return upper_edge(n, t).S_AD; };
    const double y_up = uad(detail::edge_parameter(uac, 0, pi / 4, xc, true));
    const double x_up = uac(detail::edge_parameter(uad, 0, pi / 4, yc, false));
    if (y > y_up + slack && x > x_up + slack) return false;
  }
  return true;
}

}  // namespace entfeat

#endif  // ENTFEAT_ORACLE_HPP
