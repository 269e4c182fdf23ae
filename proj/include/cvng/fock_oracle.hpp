#pragma once

// Truncated Fock-space brute force: dense matrices in a photon-number-capped
// basis. Ground truth for Wigner values (displaced parity), characteristic
// functions, entropies, fidelities and moments. Deliberately simple; no
// attempt at sparse or tensor representations.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvng/symplectic.hpp"
#include "cvng/wigner.hpp"

namespace cvng {
namespace fock {

struct Space {
  int dim;    // levels per mode
  int modes;  // mode count

  long total_dim() const {
    long d = 1;
    for (int i = 0; i < modes; ++i) d *= dim;
    return d;
  }
};

inline CMat annihilation(int d) {
  if (d < 2) throw std::invalid_argument("annihilation: dim must be >= 2");
  CMat a = CMat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline CMat creation(int d) { return annihilation(d).adjoint(); }

inline CMat number_operator(int d) {
  CMat n = CMat::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = k;
  return n;
}

// x = a + a^dag, p = i(a^dag - a); [x, p] = 2i below the truncation corner.
inline CMat position(int d) { return annihilation(d) + creation(d); }
inline CMat momentum(int d) { return Complex(0, 1) * (creation(d) - annihilation(d)); }

inline CMat identity(int d) { return CMat::Identity(d, d); }

// Operator embedding into a multimode space: ops[k] acts on mode k.
inline CMat kron(const CMat& A, const CMat& B) {
  CMat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline CMat embed(const Space& sp, int mode, const CMat& op) {
  CMat out = CMat::Identity(1, 1);
  for (int k = 0; k < sp.modes; ++k)
    out = kron(out, k == mode ? op : identity(sp.dim));
  return out;
}

// Single-mode displacement D(alpha) = exp(ac a^dag - conj(ac) a) with the
// phase-space convention ac = (alpha_x + i alpha_p) / 2.
inline CMat displacement(int d, double ax, double ap) {
  Complex ac(0.5 * ax, 0.5 * ap);
  CMat g = ac * creation(d) - std::conj(ac) * annihilation(d);
  return g.exp();
}

// Single-mode squeezer mapping vacuum to V = diag(s, 1/s).
inline CMat squeezer(int d, double s) {
  if (s <= 0.0) throw std::invalid_argument("squeezer: s must be positive");
  double r = 0.5 * std::log(s);
  CMat a = annihilation(d);
  CMat g = 0.5 * r * (creation(d) * creation(d) - a * a);
  return g.exp();
}

inline CMat phase_rotation(int d, double phi) {
  CMat g = Complex(0, -phi) * number_operator(d);
  return g.exp();
}

// Two-mode beamsplitter exp{theta (a1^dag a2 - a1 a2^dag)} on modes (i, j);
// quadratures map as x1 -> cos x1 + sin x2, x2 -> cos x2 - sin x1.
inline CMat beamsplitter(const Space& sp, int i, int j, double theta) {
  CMat a1 = embed(sp, i, annihilation(sp.dim));
  CMat a2 = embed(sp, j, annihilation(sp.dim));
  CMat g = theta * (a1.adjoint() * a2 - a1 * a2.adjoint());
  return g.exp();
}

// Two-mode squeezer exp{theta (a1^dag a2^dag - a1 a2)} on modes (i, j).
inline CMat two_mode_squeezer_gate(const Space& sp, int i, int j, double theta) {
  CMat a1 = embed(sp, i, annihilation(sp.dim));
  CMat a2 = embed(sp, j, annihilation(sp.dim));
  CMat g = theta * (a1.adjoint() * a2.adjoint() - a1 * a2);
  return g.exp();
}

struct TruncatedState {
  Space space;
  CMat rho;

  double trace_error() const { return std::abs(rho.trace() - Complex(1.0)); }

  // Population of the top two levels of each mode, a cheap leakage estimate.
  double leakage() const {
    double leak = 0.0;
    const int d = space.dim;
    for (int mode = 0; mode < space.modes; ++mode) {
      CMat proj = CMat::Zero(d, d);
      proj(d - 1, d - 1) = 1.0;
      proj(d - 2, d - 2) = 1.0;
      leak = std::max(leak, std::real((embed(space, mode, proj) * rho).trace()));
    }
    return leak;
  }
};

inline TruncatedState vacuum_state(const Space& sp) {
  CMat rho = CMat::Zero(sp.total_dim(), sp.total_dim());
  rho(0, 0) = 1.0;
  return {sp, rho};
}

inline CVec fock_vector(const Space& sp, const std::vector<int>& ns) {
  if (static_cast<int>(ns.size()) != sp.modes)
    throw std::invalid_argument("fock_vector: pattern length");
  long idx = 0;
  for (int k = 0; k < sp.modes; ++k) {
    if (ns[k] < 0 || ns[k] >= sp.dim) throw std::invalid_argument("fock_vector: level out of range");
    idx = idx * sp.dim + ns[k];
  }
  CVec v = CVec::Zero(sp.total_dim());
  v[idx] = 1.0;
  return v;
}

inline TruncatedState pure_state(const Space& sp, const CVec& psi) {
  CVec n = psi / psi.norm();
  return {sp, n * n.adjoint()};
}

inline TruncatedState fock_state(const Space& sp, const std::vector<int>& ns) {
  return pure_state(sp, fock_vector(sp, ns));
}

inline TruncatedState thermal_state(int d, double nbar) {
  CMat rho = CMat::Zero(d, d);
  double norm = 0.0;
  for (int n = 0; n < d; ++n) {
    double p = std::pow(nbar / (1.0 + nbar), n) / (1.0 + nbar);
    rho(n, n) = p;
    norm += p;
  }
  rho /= norm;  // renormalize the truncated tail
  return {Space{d, 1}, rho};
}

inline TruncatedState apply_unitary(const TruncatedState& st, const CMat& U) {
  return {st.space, U * st.rho * U.adjoint()};
}

// Multimode displacement by phase-space vector x (interleaved ordering).
inline CMat displacement_multimode(const Space& sp, const Vec& x) {
  if (x.size() != 2 * sp.modes) throw std::invalid_argument("displacement: dimension");
  CMat out = CMat::Identity(1, 1);
  for (int k = 0; k < sp.modes; ++k)
    out = kron(out, displacement(sp.dim, x[2 * k], x[2 * k + 1]));
  return out;
}

inline CMat parity_operator(const Space& sp) {
  CMat P = CMat::Zero(sp.total_dim(), sp.total_dim());
  for (long idx = 0; idx < sp.total_dim(); ++idx) {
    long rem = idx;
    int tot = 0;
    for (int k = sp.modes - 1; k >= 0; --k) {
      tot += static_cast<int>(rem % sp.dim);
      rem /= sp.dim;
    }
    P(idx, idx) = (tot % 2 == 0) ? 1.0 : -1.0;
  }
  return P;
}

// W(x) = (2 pi)^-m tr[rho D(x) (-1)^N D(x)^dag]: parity displaced to the
// phase-space point x. With D(alpha)|0> = |alpha> the conjugation direction
// matters: the kernel must localize a coherent state at +xi, which pins it to
// D P D^dag (the opposite order evaluates W(-x); invisible on
// reflection-symmetric states, wrong on displaced ones).
inline double wigner_displaced_parity(const TruncatedState& st, const Vec& x,
                                      double leak_tol = 1e-6) {
  if (st.leakage() > leak_tol)
    throw std::runtime_error("wigner_displaced_parity: truncation leakage too high");
  CMat D = displacement_multimode(st.space, x);
  CMat P = parity_operator(st.space);
  Complex val = (st.rho * D * P * D.adjoint()).trace();
  return std::pow(2.0 * kPi, -st.space.modes) * std::real(val);
}

// Quantum characteristic function tr[rho exp(i q(lambda))].
inline Complex characteristic(const TruncatedState& st, const Vec& lambda) {
  const int d = st.space.dim;
  CMat Q = CMat::Zero(st.space.total_dim(), st.space.total_dim());
  for (int k = 0; k < st.space.modes; ++k) {
    Q += lambda[2 * k] * embed(st.space, k, position(d));
    Q += lambda[2 * k + 1] * embed(st.space, k, momentum(d));
  }
  CMat U = (Complex(0, 1) * Q).exp();
  return (st.rho * U).trace();
}

// Eigenvalue-based von Neumann entropy, 0 log 0 = 0.
inline double entropy(const TruncatedState& st, double psd_tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<CMat> es(st.rho, Eigen::EigenvaluesOnly);
  double S = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()[i];
    if (p < -psd_tol) throw std::invalid_argument("entropy: state not positive semidefinite");
    if (p > 1e-15) S -= p * std::log(p);
  }
  return S;
}

inline double fidelity(const TruncatedState& st, const CVec& psi) {
  CVec n = psi / psi.norm();
  return std::real((n.adjoint() * st.rho * n)(0));
}

// First and second quadrature moments in the interleaved ordering; V is the
// covariance matrix in vacuum-noise units.
inline std::pair<Vec, Mat> moments(const TruncatedState& st) {
  const int m = st.space.modes;
  const int d = st.space.dim;
  std::vector<CMat> quad(2 * m);
  for (int k = 0; k < m; ++k) {
    quad[2 * k] = embed(st.space, k, position(d));
    quad[2 * k + 1] = embed(st.space, k, momentum(d));
  }
  Vec xi(2 * m);
  for (int i = 0; i < 2 * m; ++i) xi[i] = std::real((st.rho * quad[i]).trace());
  Mat V(2 * m, 2 * m);
  for (int i = 0; i < 2 * m; ++i)
    for (int j = i; j < 2 * m; ++j) {
      Complex sym = 0.5 * ((st.rho * quad[i] * quad[j]).trace() +
                           (st.rho * quad[j] * quad[i]).trace());
      V(i, j) = V(j, i) = std::real(sym) - xi[i] * xi[j];
    }
  return {xi, V};
}

// One Gaussian gate of a preparation recipe.
struct Gate {
  enum class Kind { Displacement, Squeezer, PhaseRotation, Beamsplitter, TwoModeSqueezer };
  Kind kind;
  int mode_a = 0;
  int mode_b = 0;
  double par1 = 0.0;  // s for squeezer, theta otherwise, alpha_x for displacement
  double par2 = 0.0;  // alpha_p for displacement

  static Gate displacement(int mode, double ax, double ap) {
    return {Kind::Displacement, mode, 0, ax, ap};
  }
  static Gate squeezer(int mode, double s) { return {Kind::Squeezer, mode, 0, s, 0}; }
  static Gate phase(int mode, double phi) { return {Kind::PhaseRotation, mode, 0, phi, 0}; }
  static Gate beamsplitter(int a, int b, double theta) {
    return {Kind::Beamsplitter, a, b, theta, 0};
  }
  static Gate two_mode_squeezer(int a, int b, double theta) {
    return {Kind::TwoModeSqueezer, a, b, theta, 0};
  }
};

inline CMat gate_unitary(const Space& sp, const Gate& g) {
  switch (g.kind) {
    case Gate::Kind::Displacement:
      return embed(sp, g.mode_a, displacement(sp.dim, g.par1, g.par2));
    case Gate::Kind::Squeezer:
      return embed(sp, g.mode_a, squeezer(sp.dim, g.par1));
    case Gate::Kind::PhaseRotation:
      return embed(sp, g.mode_a, phase_rotation(sp.dim, g.par1));
    case Gate::Kind::Beamsplitter:
      return beamsplitter(sp, g.mode_a, g.mode_b, g.par1);
    case Gate::Kind::TwoModeSqueezer:
      return two_mode_squeezer_gate(sp, g.mode_a, g.mode_b, g.par1);
  }
  throw std::logic_error("gate_unitary: unknown gate");
}

// Symplectic action of a gate in the interleaved quadrature ordering,
// matching gate_unitary: U^dag r U = S r.
inline Mat gate_symplectic(int m, const Gate& g) {
  auto embed2 = [&](const Mat& s2, int mode) {
    Mat S = Mat::Identity(2 * m, 2 * m);
    S.block(2 * mode, 2 * mode, 2, 2) = s2;
    return S;
  };
  switch (g.kind) {
    case Gate::Kind::Displacement:
      return Mat::Identity(2 * m, 2 * m);
    case Gate::Kind::Squeezer: {
      Mat s2(2, 2);
      s2 << std::sqrt(g.par1), 0, 0, 1.0 / std::sqrt(g.par1);
      return embed2(s2, g.mode_a);
    }
    case Gate::Kind::PhaseRotation: {
      Mat s2(2, 2);
      s2 << std::cos(g.par1), std::sin(g.par1), -std::sin(g.par1), std::cos(g.par1);
      return embed2(s2, g.mode_a);
    }
    case Gate::Kind::Beamsplitter: {
      Mat S = Mat::Identity(2 * m, 2 * m);
      double c = std::cos(g.par1), s = std::sin(g.par1);
      int ia = 2 * g.mode_a, ib = 2 * g.mode_b;
      for (int q = 0; q < 2; ++q) {
        S(ia + q, ia + q) = c;
        S(ib + q, ib + q) = c;
        S(ia + q, ib + q) = s;
        S(ib + q, ia + q) = -s;
      }
      return S;
    }
    case Gate::Kind::TwoModeSqueezer: {
      Mat S = Mat::Identity(2 * m, 2 * m);
      double c = std::cosh(g.par1), s = std::sinh(g.par1);
      int ia = 2 * g.mode_a, ib = 2 * g.mode_b;
      S(ia, ia) = c; S(ia + 1, ia + 1) = c;
      S(ib, ib) = c; S(ib + 1, ib + 1) = c;
      S(ia, ib) = s; S(ib, ia) = s;
      S(ia + 1, ib + 1) = -s; S(ib + 1, ia + 1) = -s;
      return S;
    }
  }
  throw std::logic_error("gate_symplectic: unknown gate");
}

inline Vec gate_displacement_vector(int m, const Gate& g) {
  Vec d = Vec::Zero(2 * m);
  if (g.kind == Gate::Kind::Displacement) {
    d[2 * g.mode_a] = g.par1;
    d[2 * g.mode_a + 1] = g.par2;
  }
  return d;
}

inline TruncatedState apply_gates(TruncatedState st, const std::vector<Gate>& gates) {
  for (const auto& g : gates) st = apply_unitary(st, gate_unitary(st.space, g));
  return st;
}

// Expected (V, xi) of a recipe applied to the vacuum, composed symplectically.
inline GaussianState recipe_target(int m, const std::vector<Gate>& gates) {
  Mat V = Mat::Identity(2 * m, 2 * m);
  Vec xi = Vec::Zero(2 * m);
  for (const auto& g : gates) {
    Mat S = gate_symplectic(m, g);
    V = S * V * S.transpose();
    xi = S * xi + gate_displacement_vector(m, g);
  }
  return GaussianState(xi, 0.5 * (V + V.transpose()));
}

// Gaussian unitary in Fock space implementing the quadrature map S (an
// orthogonal symplectic), via its complex m x m representation.
inline CMat orthosymplectic_unitary(const Space& sp, const Mat& O) {
  const int m = sp.modes;
  CMat u(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double re = 0.5 * (O(2 * i, 2 * j) + O(2 * i + 1, 2 * j + 1));
      double im = 0.5 * (O(2 * i + 1, 2 * j) - O(2 * i, 2 * j + 1));
      u(i, j) = Complex(re, im);
    }
  // h = i log u, via the spectral decomposition of the unitary u.
  Eigen::ComplexEigenSolver<CMat> es(u);
  CMat W = es.eigenvectors();
  CVec logs(m);
  for (int i = 0; i < m; ++i) logs[i] = std::log(es.eigenvalues()[i]);
  CMat logu = W * logs.asDiagonal() * W.inverse();
  CMat h = Complex(0, 1) * logu;
  h = 0.5 * (h + CMat(h.adjoint()));  // enforce hermiticity
  CMat H = CMat::Zero(sp.total_dim(), sp.total_dim());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (std::abs(h(i, j)) < 1e-15) continue;
      H += h(i, j) * (embed(sp, i, creation(sp.dim)) * embed(sp, j, annihilation(sp.dim)));
    }
  return (Complex(0, -1) * H).exp();
}

inline CMat symplectic_unitary(const Space& sp, const Mat& S) {
  auto bm = bloch_messiah(S);
  CMat U1 = orthosymplectic_unitary(sp, bm.O1);
  CMat U2 = orthosymplectic_unitary(sp, bm.O2);
  CMat K = CMat::Identity(sp.total_dim(), sp.total_dim());
  for (int j = 0; j < bm.s.size(); ++j) {
    if (std::abs(bm.s[j] - 1.0) < 1e-14) continue;
    K = K * embed(sp, j, squeezer(sp.dim, bm.s[j]));
  }
  // U(A B) = U(A) U(B) for quadrature maps.
  return U1 * K * U2;
}

// Truncated Gaussian state with moments (V, xi): Williamson thermal core,
// then the Gaussian unitary for S^T, then the displacement.
inline TruncatedState gaussian_to_fock(const Space& sp, const GaussianState& target,
                                       double leak_tol = 1e-4) {
  const int m = sp.modes;
  if (target.modes() != m) throw std::invalid_argument("gaussian_to_fock: mode count");
  auto wd = williamson(target.V);
  TruncatedState core = [&] {
    TruncatedState acc = thermal_state(sp.dim, 0.5 * (wd.nu[0] - 1.0));
    for (int j = 1; j < m; ++j) {
      TruncatedState nxt = thermal_state(sp.dim, 0.5 * (wd.nu[j] - 1.0));
      acc = TruncatedState{Space{sp.dim, acc.space.modes + 1}, kron(acc.rho, nxt.rho)};
    }
    return acc;
  }();
  CMat U = symplectic_unitary(sp, wd.S.transpose());
  TruncatedState st = apply_unitary(core, U);
  st = apply_unitary(st, displacement_multimode(sp, target.xi));
  if (st.leakage() > leak_tol)
    throw std::runtime_error("gaussian_to_fock: truncation leakage too high");
  return st;
}

inline TruncatedState recipe_to_fock(const Space& sp, const std::vector<Gate>& gates,
                                     double leak_tol = 1e-4) {
  TruncatedState st = apply_gates(vacuum_state(sp), gates);
  if (st.leakage() > leak_tol)
    throw std::runtime_error("recipe_to_fock: truncation leakage too high");
  return st;
}

// Conditional-operation helpers used as independent cross-checks.
inline TruncatedState photon_subtracted(const TruncatedState& st, int mode) {
  CMat a = embed(st.space, mode, annihilation(st.space.dim));
  CMat num = a * st.rho * a.adjoint();
  double tr = std::real(num.trace());
  if (tr < 1e-12) throw std::invalid_argument("photon_subtracted: zero probability");
  return {st.space, num / tr};
}

inline TruncatedState photon_added(const TruncatedState& st, int mode) {
  CMat ad = embed(st.space, mode, creation(st.space.dim));
  CMat num = ad * st.rho * ad.adjoint();
  double tr = std::real(num.trace());
  return {st.space, num / tr};
}

inline TruncatedState partial_trace_keep_first(const TruncatedState& st) {
  if (st.space.modes != 2) throw std::invalid_argument("partial_trace: two modes only");
  const int d = st.space.dim;
  CMat out = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out(i, j) += st.rho(i * d + k, j * d + k);
  return {Space{d, 1}, out};
}

}  // namespace fock
}  // namespace cvng
