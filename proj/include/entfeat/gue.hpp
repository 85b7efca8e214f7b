#ifndef ENTFEAT_GUE_HPP
#define ENTFEAT_GUE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace entfeat {

using cd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

/// Independent generator for sample `index` of a run seeded by `seed`.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
  return std::mt19937_64(seq);
}

/// Thread count: explicit request, else ENTFEAT_THREADS, else hardware concurrency.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ENTFEAT_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs f(i) for i in [0, n) on contiguous blocks; results land at their index.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n));
  if (nt == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nt);
  for (std::size_t w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * n / nt; i < (w + 1) * n / nt; ++i) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Hermitian matrix with its construction record.
struct HermitianMatrix {
  MatrixXcd H;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  bool hermitian = true;
  Eigen::Index dimension() const { return H.rows(); }
};

/// P(H) ~ exp(-(D/2) Tr H^2): diagonal N(0, 1/D), off-diagonal re/im N(0, 1/(2D)).
inline HermitianMatrix sample_gue(int D, std::uint64_t seed, std::uint64_t index) {
  if (D < 2) throw std::invalid_argument("sample_gue: D must be >= 2");
  auto rng = stream_rng(seed, index, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd_diag = 1.0 / std::sqrt(static_cast<double>(D));
  const double sd_off = 1.0 / std::sqrt(2.0 * D);
  HermitianMatrix out;
  out.seed = seed;
  out.index = index;
  out.H.resize(D, D);
  for (int i = 0; i < D; ++i) {
    out.H(i, i) = cd(sd_diag * normal(rng), 0.0);
    for (int j = i + 1; j < D; ++j) {
      double re = sd_off * normal(rng);
      double im = sd_off * normal(rng);
      out.H(i, j) = cd(re, im);
      out.H(j, i) = cd(re, -im);
    }
  }
  return out;
}

/// Sorted GUE eigenvalues with provenance.
struct GueSample {
  std::vector<double> eigenvalues;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

inline GueSample sample_gue_spectrum(int D, std::uint64_t seed, std::uint64_t index) {
  const auto h = sample_gue(D, seed, index);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  GueSample s;
  s.seed = seed;
  s.index = index;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + D);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

/// Haar unitary: QR of a complex Gaussian matrix, R's diagonal phases moved into Q.
inline MatrixXcd haar_unitary(int D, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  MatrixXcd Z(D, D);
  for (int j = 0; j < D; ++j)
    for (int i = 0; i < D; ++i) {
      double re = normal(rng);
      double im = normal(rng);
      Z(i, j) = cd(re, im);
    }
  Eigen::HouseholderQR<MatrixXcd> qr(Z);
  MatrixXcd Q = qr.householderQ();
  const MatrixXcd& R = qr.matrixQR();
  for (int j = 0; j < D; ++j) {
    cd r = R(j, j);
    double a = std::abs(r);
    Q.col(j) *= (a > 0 ? r / a : cd(1.0, 0.0));
  }
  return Q;
}

/// Mean, spread and standard error of a sample list.
struct EnsembleStats {
  double mean = 0;
  double stddev = 0;
  double standard_error = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

inline EnsembleStats summarize(const std::vector<double>& xs, std::uint64_t seed = 0) {
  if (xs.size() < 2) throw std::invalid_argument("need at least 2 samples for a variance estimate");
  EnsembleStats s;
  s.count = xs.size();
  s.seed = seed;
  long double sum = 0;
  for (double x : xs) sum += x;
  const long double mean = sum / xs.size();
  long double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  s.mean = static_cast<double>(mean);
  s.stddev = static_cast<double>(std::sqrt(ss / (xs.size() - 1)));
  s.standard_error = s.stddev / std::sqrt(static_cast<double>(xs.size()));
  return s;
}

}  // namespace entfeat

#endif  // ENTFEAT_GUE_HPP
