#pragma once

// Phase-space conventions, Gaussian states, symplectic decompositions and
// Gaussian channels.
//
// Conventions used throughout the library:
//   * quadrature ordering (x1, p1, ..., xm, pm)
//   * [x, p] = 2i, vacuum covariance = identity
//   * Omega = direct sum of [[0, -1], [1, 0]] blocks
//   * trace rule tr[A rho] = (4 pi)^m \int W_A W drops out of this header but
//     every module imports these constants from here.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cvng/polynomial.hpp"

namespace cvng {

constexpr double kPi = std::numbers::pi;

// Default eigenvalue tolerance on positive-semidefinite checks.
constexpr double kPsdTol = 1e-9;

inline Mat omega(int m) {
  if (m < 1) throw std::invalid_argument("omega: mode count must be >= 1");
  Mat O = Mat::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    O(2 * j, 2 * j + 1) = -1.0;
    O(2 * j + 1, 2 * j) = 1.0;
  }
  return O;
}

struct SymplecticForm {
  int m;
  explicit SymplecticForm(int modes) : m(modes) {
    if (m < 1) throw std::invalid_argument("SymplecticForm: m must be >= 1");
  }
  Mat matrix() const { return omega(m); }
};

// Normalized phase-space direction; defines mode span(f, Omega f).
struct ModeVector {
  Vec f;
  explicit ModeVector(Vec v) : f(std::move(v)) {
    if (f.size() % 2 != 0 || f.size() == 0)
      throw std::invalid_argument("ModeVector: length must be even");
    if (std::abs(f.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("ModeVector: not normalized");
  }
  int modes() const { return static_cast<int>(f.size()) / 2; }
};

// 2m x 2 matrix of columns (b, Omega b); projects onto the mode plane.
inline Mat mode_matrix(const ModeVector& b) {
  const int n = static_cast<int>(b.f.size());
  Mat B(n, 2);
  B.col(0) = b.f;
  B.col(1) = omega(n / 2) * b.f;
  return B;
}

inline void require_symmetric(const Mat& V, double tol = 1e-10) {
  if (V.rows() != V.cols() || (V - V.transpose()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("covariance matrix must be symmetric");
  if (V.rows() % 2 != 0) throw std::invalid_argument("covariance dimension must be even");
}

inline double min_eig_hermitian(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Heisenberg constraint V - i Omega >= 0 (up to tolerance).
inline bool is_physical(const Mat& V, double tol = kPsdTol) {
  require_symmetric(V);
  const int m = static_cast<int>(V.rows()) / 2;
  CMat H = V.cast<Complex>() - Complex(0, 1) * omega(m).cast<Complex>();
  return min_eig_hermitian(H) >= -tol;
}

struct GaussianState {
  Vec xi;
  Mat V;

  GaussianState(Vec mean, Mat cov) : xi(std::move(mean)), V(std::move(cov)) {
    require_symmetric(V);
    if (xi.size() != V.rows())
      throw std::invalid_argument("GaussianState: mean/covariance size mismatch");
    if (!is_physical(V))
      throw std::invalid_argument("GaussianState: covariance violates V - i Omega >= 0");
  }

  int modes() const { return static_cast<int>(xi.size()) / 2; }

  static GaussianState vacuum(int m) {
    return GaussianState(Vec::Zero(2 * m), Mat::Identity(2 * m, 2 * m));
  }

  static GaussianState coherent(const Vec& alpha) {
    return GaussianState(alpha, Mat::Identity(alpha.size(), alpha.size()));
  }

  // Single-mode squeezed vacuum, x-variance s.
  static GaussianState squeezed(double s) {
    Mat V(2, 2);
    V << s, 0, 0, 1.0 / s;
    return GaussianState(Vec::Zero(2), V);
  }

  static GaussianState thermal(double nu, int m = 1) {
    if (nu < 1.0) throw std::invalid_argument("thermal: nu must be >= 1");
    return GaussianState(Vec::Zero(2 * m), nu * Mat::Identity(2 * m, 2 * m));
  }

  // Two-mode EPR state obtained by mixing two oppositely squeezed vacua on a
  // balanced beamsplitter; V as displayed in the entanglement-increase case
  // study.
  static GaussianState epr(double s) {
    Mat V(4, 4);
    const double a = (s * s + 1) / (2 * s), c = (s * s - 1) / (2 * s);
    V << a, 0, c, 0,
         0, a, 0, -c,
         c, 0, a, 0,
         0, -c, 0, a;
    return GaussianState(Vec::Zero(4), V);
  }
};

inline double symplectic_defect(const Mat& S) {
  const int m = static_cast<int>(S.rows()) / 2;
  Mat O = omega(m);
  return (S.transpose() * O * S - O).norm();
}

inline void require_symplectic(const Mat& S, double tol = 1e-9) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0 || symplectic_defect(S) > tol)
    throw std::invalid_argument("matrix is not symplectic");
}

struct WilliamsonDecomposition {
  Mat S;   // symplectic, V = S^T N S
  Vec nu;  // symplectic eigenvalues, descending
  Mat N() const {
    const int m = static_cast<int>(nu.size());
    Vec d(2 * m);
    for (int j = 0; j < m; ++j) d[2 * j] = d[2 * j + 1] = nu[j];
    return d.asDiagonal();
  }
};

// Williamson normal form of a positive-definite covariance matrix.
// The symplectic eigenvalues are |spec(i Omega V)|; S is assembled from the
// ordered eigenplane pairs of the skew-symmetric V^{1/2} Omega V^{1/2}
// (orthogonal real Schur form), which keeps degenerate spectra deterministic.
inline WilliamsonDecomposition williamson(const Mat& V) {
  require_symmetric(V);
  const int n = static_cast<int>(V.rows());
  const int m = n / 2;
  Eigen::SelfAdjointEigenSolver<Mat> es(V);
  if (es.eigenvalues().minCoeff() <= 1e-12)
    throw std::invalid_argument("williamson: V must be positive definite");
  Mat Vh = es.operatorSqrt();

  Mat W = Vh * omega(m) * Vh;  // skew-symmetric
  Eigen::RealSchur<Mat> schur(W);
  Mat Q = schur.matrixU();
  Mat T = schur.matrixT();

  // Collect the 2x2 blocks [[0, b], [-b, 0]]; normalize to b = -nu (nu > 0)
  // by swapping columns, then sort pairs by nu descending.
  std::vector<std::pair<double, int>> blocks;  // (nu, column of pair start)
  Mat Qc = Q;
  for (int j = 0; j < n; j += 2) {
    double b = T(j, j + 1);
    if (std::abs(b) < 1e-14)
      throw std::runtime_error("williamson: degenerate Schur block");
    if (b > 0) {  // swap the two columns to flip the block sign
      Qc.col(j).swap(Qc.col(j + 1));
      b = -b;
    }
    blocks.push_back({-b, j});
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  Vec nu(m);
  Mat Qs(n, n);
  for (int k = 0; k < m; ++k) {
    nu[k] = blocks[k].first;
    Qs.col(2 * k) = Qc.col(blocks[k].second);
    Qs.col(2 * k + 1) = Qc.col(blocks[k].second + 1);
  }
  // Canonical sign: make the largest-magnitude entry of the first column of
  // each pair positive (flipping both columns preserves the block).
  for (int k = 0; k < m; ++k) {
    int imax = 0;
    Qs.col(2 * k).cwiseAbs().maxCoeff(&imax);
    if (Qs(imax, 2 * k) < 0) {
      Qs.col(2 * k) *= -1.0;
      Qs.col(2 * k + 1) *= -1.0;
    }
  }

  Vec nsqrt(n);
  for (int k = 0; k < m; ++k) nsqrt[2 * k] = nsqrt[2 * k + 1] = std::sqrt(nu[k]);
  // L = V^{1/2} Q N^{-1/2} is symplectic with V = L N L^T; we return S = L^T.
  Mat L = Vh * Qs * nsqrt.cwiseInverse().asDiagonal();
  WilliamsonDecomposition wd{L.transpose(), nu};
  return wd;
}

struct BlochMessiahDecomposition {
  Mat O1, O2;  // orthogonal symplectic
  Vec s;       // squeezing values >= 1, descending
  Mat K() const {
    const int m = static_cast<int>(s.size());
    Vec d(2 * m);
    for (int j = 0; j < m; ++j) {
      d[2 * j] = std::sqrt(s[j]);
      d[2 * j + 1] = 1.0 / std::sqrt(s[j]);
    }
    return d.asDiagonal();
  }
};

// Euler / Bloch-Messiah decomposition S = O1 K O2 with O_i orthogonal
// symplectic and K = diag(s^1/2, s^-1/2, ...).
inline BlochMessiahDecomposition bloch_messiah(const Mat& S) {
  require_symplectic(S);
  const int n = static_cast<int>(S.rows());
  const int m = n / 2;
  Mat O = omega(m);

  Mat M = S.transpose() * S;  // symmetric positive definite symplectic
  Eigen::SelfAdjointEigenSolver<Mat> es(M);

  // Eigenvalues come in (lam, 1/lam) pairs with eigenvector pairs (w, Omega w).
  // Build O2 rows from the lam >= 1 representatives; candidates already
  // covered by a chosen plane span(w, Omega w) project to zero, which also
  // discards the 1/lam partners automatically.
  std::vector<std::pair<double, Vec>> pairs;
  for (int i = n - 1; i >= 0 && static_cast<int>(pairs.size()) < m; --i) {
    double lam = es.eigenvalues()[i];
    if (lam < 1.0 - 1e-9) continue;
    Vec w = es.eigenvectors().col(i);
    for (const auto& [l0, w0] : pairs) {
      (void)l0;
      w -= w0.dot(w) * w0;
      Vec ow0 = O * w0;
      w -= ow0.dot(w) * ow0;
    }
    double nrm = w.norm();
    if (nrm < 1e-6) continue;
    w /= nrm;
    pairs.push_back({lam, w});
  }
  if (static_cast<int>(pairs.size()) != m)
    throw std::runtime_error("bloch_messiah: failed to pair eigenvalues");

  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  Vec s(m);
  Mat O2(n, n);
  for (int k = 0; k < m; ++k) {
    s[k] = pairs[k].first;
    O2.row(2 * k) = pairs[k].second.transpose();
    O2.row(2 * k + 1) = (O * pairs[k].second).transpose();
  }
  BlochMessiahDecomposition bm;
  bm.s = s;
  bm.O2 = O2;
  Mat Kinv = bm.K().diagonal().cwiseInverse().asDiagonal();
  bm.O1 = S * O2.transpose() * Kinv;

  // Column-sign convention: first significant entry of each O1 pair positive.
  for (int k = 0; k < m; ++k) {
    int imax = 0;
    bm.O1.col(2 * k).cwiseAbs().maxCoeff(&imax);
    if (bm.O1(imax, 2 * k) < 0) {
      bm.O1.col(2 * k) *= -1.0;
      bm.O1.col(2 * k + 1) *= -1.0;
      bm.O2.row(2 * k) *= -1.0;
      bm.O2.row(2 * k + 1) *= -1.0;
    }
  }
  return bm;
}

inline double purity(const GaussianState& st) {
  double det = st.V.determinant();
  if (det < 1.0 - kPsdTol)
    throw std::invalid_argument("purity: det V < 1, state is unphysical");
  return 1.0 / std::sqrt(det);
}

// Von Neumann entropy of the Gaussian state with covariance V (nats).
inline double gaussian_entropy(const Mat& V) {
  if (!is_physical(V)) throw std::invalid_argument("gaussian_entropy: unphysical V");
  auto wd = williamson(V);
  double S = 0.0;
  for (int j = 0; j < wd.nu.size(); ++j) {
    double nu = wd.nu[j];
    if (nu <= 1.0 + 1e-12) continue;  // pure-mode term vanishes
    double a = (nu + 1) / 2, b = (nu - 1) / 2;
    S += a * std::log(a) - b * std::log(b);
  }
  return S;
}

inline double gaussian_entropy_from_nu(const Vec& nu) {
  double S = 0.0;
  for (int j = 0; j < nu.size(); ++j) {
    if (nu[j] <= 1.0 + 1e-12) continue;
    double a = (nu[j] + 1) / 2, b = (nu[j] - 1) / 2;
    S += a * std::log(a) - b * std::log(b);
  }
  return S;
}

// (tr[V - 1] + ||xi||^2) / 4. The paper states this for pure Gaussian states;
// it follows from second moments for mixed ones as well.
inline double mean_photon_number(const GaussianState& st) {
  const int n = static_cast<int>(st.xi.size());
  return ((st.V - Mat::Identity(n, n)).trace() + st.xi.squaredNorm()) / 4.0;
}

struct GaussianChannel {
  Mat X;
  Mat Vc;
  Vec alpha;

  int in_modes() const { return static_cast<int>(X.cols()) / 2; }
  int out_modes() const { return static_cast<int>(X.rows()) / 2; }
};

inline bool channel_is_valid(const GaussianChannel& ch, double tol = kPsdTol) {
  if (ch.Vc.rows() != ch.X.rows() || ch.alpha.size() != ch.X.rows()) return false;
  if ((ch.Vc - ch.Vc.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  const int mo = ch.out_modes(), mi = ch.in_modes();
  CMat H = ch.Vc.cast<Complex>() +
           Complex(0, 1) * (ch.X * omega(mi) * ch.X.transpose() - omega(mo)).cast<Complex>();
  return min_eig_hermitian(H) >= -tol;
}

inline GaussianChannel identity_channel(int m) {
  return {Mat::Identity(2 * m, 2 * m), Mat::Zero(2 * m, 2 * m), Vec::Zero(2 * m)};
}

// Uniform loss: X = sqrt(1 - eta) 1, Vc = eta 1.
inline GaussianChannel loss_channel(double eta, int m) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("loss_channel: eta in [0,1]");
  const int n = 2 * m;
  return {std::sqrt(1.0 - eta) * Mat::Identity(n, n), eta * Mat::Identity(n, n),
          Vec::Zero(n)};
}

inline GaussianChannel symplectic_channel(const Mat& S) {
  require_symplectic(S);
  const int n = static_cast<int>(S.rows());
  return {S, Mat::Zero(n, n), Vec::Zero(n)};
}

inline GaussianState apply_channel(const GaussianState& st, const GaussianChannel& ch) {
  if (ch.X.cols() != st.V.rows())
    throw std::invalid_argument("apply_channel: dimension mismatch");
  if (!channel_is_valid(ch))
    throw std::invalid_argument("apply_channel: invalid Gaussian channel");
  Mat V = ch.X * st.V * ch.X.transpose() + ch.Vc;
  V = 0.5 * (V + V.transpose());
  return GaussianState(ch.X * st.xi + ch.alpha, V);
}

// Beamsplitter between one specific mode b of an m-mode system and one
// auxiliary mode, as a symplectic matrix on 2(m+1) dimensions:
//   [[ (cos t - 1) B B^T + 1, sin t B ], [ -sin t B^T, cos t 1 ]].
inline Mat mode_selective_beamsplitter(const ModeVector& b, double theta, int m) {
  if (b.modes() != m) throw std::invalid_argument("mode_selective_beamsplitter: mode count");
  const int n = 2 * m;
  Mat B = mode_matrix(b);
  Mat S = Mat::Zero(n + 2, n + 2);
  S.topLeftCorner(n, n) =
      (std::cos(theta) - 1.0) * B * B.transpose() + Mat::Identity(n, n);
  S.topRightCorner(n, 2) = std::sin(theta) * B;
  S.bottomLeftCorner(2, n) = -std::sin(theta) * B.transpose();
  S.bottomRightCorner(2, 2) = std::cos(theta) * Mat::Identity(2, 2);
  return S;
}

// Two-mode squeezer exp{theta [a'(g) a'(b) - a(b) a(g)]} on quadratures:
// x-quadratures mix with +sinh, p-quadratures with -sinh.
inline Mat two_mode_squeezer(double theta) {
  const double c = std::cosh(theta), s = std::sinh(theta);
  Mat S(4, 4);
  S << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return S;
}

// Mode-selective two-mode squeezer coupling mode b with one auxiliary mode.
inline Mat mode_selective_two_mode_squeezer(const ModeVector& b, double theta, int m) {
  if (b.modes() != m) throw std::invalid_argument("mode_selective_two_mode_squeezer: mode count");
  const int n = 2 * m;
  Mat B = mode_matrix(b);
  Mat Z = Mat::Identity(2, 2);
  Z(1, 1) = -1.0;
  const double c = std::cosh(theta), s = std::sinh(theta);
  Mat S = Mat::Zero(n + 2, n + 2);
  S.topLeftCorner(n, n) = (c - 1.0) * B * B.transpose() + Mat::Identity(n, n);
  S.topRightCorner(n, 2) = s * B * Z;
  S.bottomLeftCorner(2, n) = s * Z * B.transpose();
  S.bottomRightCorner(2, 2) = c * Mat::Identity(2, 2);
  return S;
}

// Map a complex m x m unitary to its orthogonal symplectic representation in
// the interleaved quadrature ordering.
inline Mat unitary_to_orthosymplectic(const CMat& U) {
  const int m = static_cast<int>(U.rows());
  Mat O(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      O(2 * i, 2 * j) = U(i, j).real();
      O(2 * i, 2 * j + 1) = -U(i, j).imag();
      O(2 * i + 1, 2 * j) = U(i, j).imag();
      O(2 * i + 1, 2 * j + 1) = U(i, j).real();
    }
  return O;
}

}  // namespace cvng
