#pragma once

// Conditional (heralded) preparation of non-Gaussian states from Gaussian
// inputs: Schur-complement conditionals, the generic herald pipeline
// W_{f|A} = (<A>_{g|x_f} / <A>) W_f, and the closed-form theta -> 0
// mode-selective photon subtraction, plus photon addition through a weak
// two-mode squeezer.

#include <stdexcept>
#include <vector>

#include "cvng/symplectic.hpp"
#include "cvng/wigner.hpp"

namespace cvng {

// Ordered split of mode indices (0-based) into subsystems f and g.
struct Bipartition {
  std::vector<int> f_modes;
  std::vector<int> g_modes;

  Bipartition(std::vector<int> f, std::vector<int> g, int m)
      : f_modes(std::move(f)), g_modes(std::move(g)) {
    std::vector<int> seen(m, 0);
    for (int i : f_modes) {
      if (i < 0 || i >= m || seen[i]++) throw std::invalid_argument("Bipartition: bad f set");
    }
    for (int i : g_modes) {
      if (i < 0 || i >= m || seen[i]++) throw std::invalid_argument("Bipartition: bad g set");
    }
    if (static_cast<int>(f_modes.size() + g_modes.size()) != m)
      throw std::invalid_argument("Bipartition: union must cover all modes");
  }

  std::vector<int> f_axes() const { return axes(f_modes); }
  std::vector<int> g_axes() const { return axes(g_modes); }

 private:
  static std::vector<int> axes(const std::vector<int>& modes) {
    std::vector<int> a;
    for (int m : modes) {
      a.push_back(2 * m);
      a.push_back(2 * m + 1);
    }
    return a;
  }
};

struct GaussianBlocks {
  Mat Vf, Vg, Vgf;
  Vec xi_f, xi_g;
};

inline GaussianBlocks blocks(const GaussianState& st, const Bipartition& part) {
  auto fa = part.f_axes(), ga = part.g_axes();
  const int nf = static_cast<int>(fa.size()), ng = static_cast<int>(ga.size());
  GaussianBlocks b;
  b.Vf.resize(nf, nf);
  b.Vg.resize(ng, ng);
  b.Vgf.resize(ng, nf);
  b.xi_f.resize(nf);
  b.xi_g.resize(ng);
  for (int i = 0; i < nf; ++i) {
    b.xi_f[i] = st.xi[fa[i]];
    for (int j = 0; j < nf; ++j) b.Vf(i, j) = st.V(fa[i], fa[j]);
  }
  for (int i = 0; i < ng; ++i) {
    b.xi_g[i] = st.xi[ga[i]];
    for (int j = 0; j < ng; ++j) b.Vg(i, j) = st.V(ga[i], ga[j]);
    for (int j = 0; j < nf; ++j) b.Vgf(i, j) = st.V(ga[i], fa[j]);
  }
  return b;
}

// Conditional distribution W(x_g | x_f): Schur-complement covariance plus the
// affine mean map x_f -> xi_g + Vgf Vf^-1 (x_f - xi_f).
struct ConditionalGaussian {
  Mat V_schur;
  Mat slope;    // Vgf Vf^-1
  Vec offset;   // xi_g - slope xi_f

  Vec mean(const Vec& x_f) const { return offset + slope * x_f; }
};

inline ConditionalGaussian conditional_gaussian(const GaussianBlocks& b) {
  Eigen::FullPivLU<Mat> lu(b.Vf);
  if (!lu.isInvertible()) throw std::invalid_argument("conditional_gaussian: singular Vf");
  Mat Vfinv = lu.inverse();
  ConditionalGaussian c;
  c.V_schur = b.Vg - b.Vgf * Vfinv * b.Vgf.transpose();
  c.V_schur = 0.5 * (c.V_schur + c.V_schur.transpose());
  c.slope = b.Vgf * Vfinv;
  c.offset = b.xi_g - c.slope * b.xi_f;
  return c;
}

struct HeraldedState {
  WignerForm form;          // normalized Wigner function on subsystem f
  GaussianState base;       // reduced Gaussian W_f before conditioning
  double success = 0.0;     // <A>, the heralding probability weight
};

// POVM-element Wigner forms shipped with the module; all carry the
// (4 pi)^m trace normalization of the product rule.
inline WignerForm fock_projector_wigner(int n, int m = 1) {
  WignerForm w = fock_wigner(n, ModeVector(Vec::Unit(2 * m, 0)));
  return w;
}

inline WignerForm onoff_click_wigner_form(int m = 1) {
  // 1 - |0><0|: constant (4 pi)^-m minus the vacuum Gaussian.
  WignerForm w = identity_wigner(m);
  WignerForm vac = vacuum_wigner(m);
  for (auto t : vac.terms()) {
    t.w *= -1.0;
    w.add_term(std::move(t));
  }
  return w;
}

inline WignerForm coherent_projector_wigner(const Vec& alpha) {
  return gaussian_wigner(GaussianState::coherent(alpha));
}

// Generic herald: W_{f|A}(x_f) = (<A>_{g|x_f} / <A>) W_f(x_f), computed by
// multiplying the joint Gaussian with the embedded W_A and integrating the
// g coordinates out exactly.
inline HeraldedState herald(const GaussianState& st, const Bipartition& part,
                            const WignerForm& A, double zero_prob_tol = 1e-9) {
  auto ga = part.g_axes();
  if (A.nvars() != static_cast<int>(ga.size()))
    throw std::invalid_argument("herald: POVM form does not match g subsystem");
  WignerForm joint = gaussian_wigner(st);
  WignerForm weighted = joint.product_embedded(A, ga);
  WignerForm numerator = weighted.marginal(part.f_axes());
  const int lp = static_cast<int>(ga.size()) / 2;
  double norm = numerator.integral();
  double prob = std::pow(4.0 * kPi, lp) * norm;
  if (!(prob > zero_prob_tol))
    throw std::invalid_argument("herald: zero-probability heralding event");
  numerator.scale(1.0 / norm);

  auto b = blocks(st, part);
  HeraldedState out{std::move(numerator), GaussianState(b.xi_f, b.Vf), prob};
  return out;
}

inline Vec mode_projection(const ModeVector& b, const Vec& v) {
  Mat B = mode_matrix(b);
  return B.transpose() * v;
}

// Success probability of subtraction through a weak tap:
// <A> ~ theta^2/2 (tr[V_b - 1] + ||xi_b||^2).
inline double subtraction_probability_rate(const GaussianState& st, const ModeVector& b,
                                           double theta) {
  Mat B = mode_matrix(b);
  Mat Vb = B.transpose() * st.V * B;
  Vec xib = B.transpose() * st.xi;
  return 0.5 * theta * theta * ((Vb - Mat::Identity(2, 2)).trace() + xib.squaredNorm());
}

// Exact theta -> 0 single-photon subtraction in mode b:
//   W^-(x) = [ ||B^T (1 - V^-1)(x - xi) + xi_b||^2 + tr(1 - B^T V^-1 B) ]
//            / [ tr(V_b - 1) + ||xi_b||^2 ] * W(x).
inline HeraldedState photon_subtract(const GaussianState& st, const ModeVector& b,
                                     double zero_prob_tol = 1e-9) {
  if (b.modes() != st.modes()) throw std::invalid_argument("photon_subtract: mode count");
  const int n = 2 * st.modes();
  Mat B = mode_matrix(b);
  Mat Vinv = st.V.inverse();
  Mat Vb = B.transpose() * st.V * B;
  Vec xib = B.transpose() * st.xi;
  double denom = (Vb - Mat::Identity(2, 2)).trace() + xib.squaredNorm();
  if (!(denom > zero_prob_tol))
    throw std::invalid_argument("photon_subtract: zero success probability (vacuum-like mode)");

  // Quadratic polynomial ||L (x - xi) + xi_b||^2 + c0 with L = B^T (1 - V^-1).
  Mat L = B.transpose() * (Mat::Identity(n, n) - Vinv);
  Polynomial q = Polynomial::constant(n, 0.0);
  for (int r = 0; r < 2; ++r) {
    CVec row = L.row(r).transpose().cast<Complex>();
    Complex c0 = xib[r] - L.row(r).dot(st.xi);
    Polynomial lin = Polynomial::linear(row, c0);
    q += lin * lin;
  }
  double c0 = (Mat::Identity(2, 2) - B.transpose() * Vinv * B).trace();
  q += Polynomial::constant(n, c0);
  q = q * Complex(1.0 / denom);

  WignerForm base = gaussian_wigner(st);
  WignerForm out(n);
  for (auto t : base.terms()) {
    t.poly = t.poly * q;
    out.add_term(std::move(t));
  }
  HeraldedState hs{std::move(out), st, denom};
  return hs;
}

// Photon addition through the generic pipeline: extend by an auxiliary
// vacuum, couple mode b to it with a weak two-mode squeezer, herald |1><1|
// on the auxiliary mode.
inline HeraldedState photon_add(const GaussianState& st, const ModeVector& b, double theta) {
  if (theta <= 0.0 || theta > 0.2)
    throw std::invalid_argument("photon_add: theta must be in (0, 0.2]");
  const int m = st.modes();
  const int n = 2 * m;
  Mat Vext = Mat::Identity(n + 2, n + 2);
  Vext.topLeftCorner(n, n) = st.V;
  Vec xiext = Vec::Zero(n + 2);
  xiext.head(n) = st.xi;
  Mat S = mode_selective_two_mode_squeezer(b, theta, m);
  GaussianState joint(S * xiext, S * Vext * S.transpose());

  std::vector<int> fmodes(m), gmodes = {m};
  for (int i = 0; i < m; ++i) fmodes[i] = i;
  Bipartition part(fmodes, gmodes, m + 1);
  return herald(joint, part, fock_projector_wigner(1));
}

// Richardson extrapolation of the photon-addition pipeline over a theta
// ladder (default {0.02, 0.01, 0.005}); eliminates the O(theta) and
// O(theta^2) contamination and defines the reference added-photon state.
inline WignerForm photon_add_extrapolated(const GaussianState& st, const ModeVector& b) {
  WignerForm w1 = photon_add(st, b, 0.02).form;
  WignerForm w2 = photon_add(st, b, 0.01).form;
  WignerForm w3 = photon_add(st, b, 0.005).form;
  // (8 w3 - 6 w2 + w1) / 3 for the ratio-2 ladder.
  WignerForm out(w1.nvars());
  auto add_scaled = [&](const WignerForm& w, double s) {
    for (auto t : w.terms()) {
      t.w *= s;
      out.add_term(std::move(t));
    }
  };
  add_scaled(w3, 8.0 / 3.0);
  add_scaled(w2, -2.0);
  add_scaled(w1, 1.0 / 3.0);
  return out;
}

}  // namespace cvng
