#pragma once

// Closed-form Wigner representations: finite sums of polynomial x Gaussian
// terms with possibly complex weights and centers. Every formula in this
// class is closed under products, affine coordinate substitutions and
// marginals, so overlaps and moments are computed exactly by Wick/Isserlis
// integration; grids appear only at the CLI boundary.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cvng/polynomial.hpp"
#include "cvng/quadrature.hpp"
#include "cvng/symplectic.hpp"

namespace cvng {

// weight * exp(logw) * poly(x) * exp(-1/2 (x-c)^T A (x-c)) with A real
// symmetric PSD and c possibly complex. All normalization constants are
// folded into the weight; logw keeps large-separation interference terms
// representable.
struct PolyGaussTerm {
  Complex w;
  double logw = 0.0;
  Polynomial poly;
  Mat A;
  CVec c;

  int nvars() const { return static_cast<int>(c.size()); }

  Complex value(const Vec& x) const {
    CVec d = x.cast<Complex>() - c;
    Complex q = (d.transpose() * A.cast<Complex>() * d)(0);
    return w * poly.evaluate(x) * std::exp(logw - 0.5 * q);
  }

  void rebalance() {
    double a = std::abs(w);
    if (a == 0.0) return;
    if (a > 1e3 || a < 1e-3) {
      logw += std::log(a);
      w /= a;
    }
  }
};

namespace detail {

inline Complex bilinear(const CVec& a, const Mat& M, const CVec& b) {
  return (a.transpose() * M.cast<Complex>() * b)(0);
}

// Gaussian product: exp(-1/2 (x-c1)'A1(x-c1)) exp(-1/2 (x-c2)'A2(x-c2))
//   = K exp(-1/2 (x-c)'A(x-c)),  A = A1+A2, c = A^-1 (A1 c1 + A2 c2).
struct GaussProduct {
  Mat A;
  CVec c;
  Complex logK;  // K = exp(logK)
};

inline GaussProduct gauss_product(const Mat& A1, const CVec& c1, const Mat& A2,
                                  const CVec& c2) {
  GaussProduct g;
  g.A = A1 + A2;
  Eigen::LDLT<Mat> ldlt(g.A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("gauss_product: singular combined form");
  CVec rhs = A1.cast<Complex>() * c1 + A2.cast<Complex>() * c2;
  // Solve with the real factorization on real/imaginary parts.
  Vec re = ldlt.solve(rhs.real());
  Vec im = ldlt.solve(rhs.imag());
  g.c = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  Complex delta = bilinear(c1, A1, c1) + bilinear(c2, A2, c2) - bilinear(g.c, g.A, g.c);
  g.logK = -0.5 * delta;
  return g;
}

inline double log_det_spd(const Mat& A) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_det_spd: matrix not positive definite");
  double s = 0.0;
  for (int i = 0; i < A.rows(); ++i) s += std::log(llt.matrixL()(i, i));
  return 2.0 * s;
}

// Expectation over the trailing ny variables (covariance Sigma, zero mean);
// returns a polynomial in the leading nk variables.
inline Polynomial partial_gaussian_expectation(const Polynomial& p, int nk,
                                               const Mat& Sigma) {
  Polynomial out(nk);
  std::vector<int> idx;
  for (const auto& [mono, coeff] : p.terms()) {
    idx.clear();
    int ydeg = 0;
    for (int i = nk; i < p.nvars(); ++i) {
      ydeg += mono[i];
      for (int k = 0; k < mono[i]; ++k) idx.push_back(i - nk);
    }
    if (ydeg % 2 == 1) continue;
    double mom = detail::isserlis(idx, Sigma);
    if (mom == 0.0) continue;
    Monomial mk(mono.begin(), mono.begin() + nk);
    out.add_term(mk, coeff * mom);
  }
  out.prune();
  return out;
}

}  // namespace detail

class WignerForm {
 public:
  WignerForm() : nvars_(0) {}
  explicit WignerForm(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  int modes() const {
    if (nvars_ % 2 != 0) throw std::logic_error("WignerForm: odd variable count has no mode count");
    return nvars_ / 2;
  }
  const std::vector<PolyGaussTerm>& terms() const { return terms_; }
  const std::vector<WignerForm>& factors() const { return factors_; }

  void add_term(PolyGaussTerm t) {
    if (t.nvars() != nvars_ || t.A.rows() != nvars_)
      throw std::invalid_argument("WignerForm::add_term: arity mismatch");
    t.rebalance();
    if (std::abs(t.w) == 0.0 || t.poly.is_zero()) return;
    terms_.push_back(std::move(t));
  }

  double value(const Vec& x) const { return value_complex(x).real(); }

  Complex value_complex(const Vec& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("WignerForm::value: point size");
    Complex acc = 0;
    for (const auto& t : terms_) acc += t.value(x);
    return acc;
  }

  // Exact integral over all variables (Wick/Isserlis, no grids).
  Complex integral_complex() const {
    Complex acc = 0;
    for (const auto& t : terms_) {
      Eigen::LDLT<Mat> ldlt(t.A);
      Mat Sigma = ldlt.solve(Mat::Identity(nvars_, nvars_));
      Complex e = gaussian_expectation(t.poly, t.c, Sigma);
      double logn = 0.5 * nvars_ * std::log(2.0 * kPi) - 0.5 * detail::log_det_spd(t.A);
      acc += t.w * std::exp(t.logw + logn) * e;
    }
    return acc;
  }

  double integral() const { return integral_complex().real(); }

  void scale(Complex s) {
    for (auto& t : terms_) {
      t.w *= s;
      t.rebalance();
    }
    for (auto& f : factors_) f.scale(s);  // factors only meaningful for scalar 1
    if (s != Complex(1) && !factors_.empty()) factors_.clear();
  }

  void normalize() {
    double n = integral();
    if (!(n > 0.0)) throw std::runtime_error("WignerForm::normalize: non-positive norm");
    scale(1.0 / n);
  }

  // W'(x) = W(S^-1 (x - shift)); S symplectic keeps integrals invariant.
  WignerForm substituted(const Mat& S, const Vec& shift) const {
    require_symplectic(S, 1e-8);
    Mat Sinv = S.inverse();
    WignerForm out(nvars_);
    for (const auto& t : terms_) {
      PolyGaussTerm nt;
      nt.w = t.w;
      nt.logw = t.logw;
      nt.A = Sinv.transpose() * t.A * Sinv;
      nt.A = 0.5 * (nt.A + nt.A.transpose());
      nt.c = S.cast<Complex>() * t.c + shift.cast<Complex>();
      nt.poly = t.poly.substitute_affine(Sinv, (-Sinv * shift).cast<Complex>());
      out.add_term(std::move(nt));
    }
    return out;
  }

  WignerForm displaced(const Vec& alpha) const {
    return substituted(Mat::Identity(nvars_, nvars_), alpha);
  }

  static WignerForm tensor(const WignerForm& a, const WignerForm& b) {
    WignerForm out(a.nvars_ + b.nvars_);
    std::vector<int> ia(a.nvars_), ib(b.nvars_);
    for (int i = 0; i < a.nvars_; ++i) ia[i] = i;
    for (int i = 0; i < b.nvars_; ++i) ib[i] = a.nvars_ + i;
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        PolyGaussTerm t;
        t.w = ta.w * tb.w;
        t.logw = ta.logw + tb.logw;
        t.A = Mat::Zero(out.nvars_, out.nvars_);
        t.A.topLeftCorner(a.nvars_, a.nvars_) = ta.A;
        t.A.bottomRightCorner(b.nvars_, b.nvars_) = tb.A;
        t.c = CVec(out.nvars_);
        t.c << ta.c, tb.c;
        t.poly = ta.poly.embed(out.nvars_, ia) * tb.poly.embed(out.nvars_, ib);
        out.add_term(std::move(t));
      }
    // Remember the product structure (used by negativity_volume).
    if (a.factors_.empty() && b.factors_.empty()) {
      out.factors_ = {a, b};
    } else {
      auto fa = a.factors_.empty() ? std::vector<WignerForm>{a} : a.factors_;
      auto fb = b.factors_.empty() ? std::vector<WignerForm>{b} : b.factors_;
      out.factors_ = fa;
      out.factors_.insert(out.factors_.end(), fb.begin(), fb.end());
    }
    return out;
  }

  // Pointwise product of this form with another form living on a subset of
  // this form's coordinates (other's variable i -> coords[i]).
  WignerForm product_embedded(const WignerForm& other,
                              const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != other.nvars_)
      throw std::invalid_argument("product_embedded: coordinate map size");
    WignerForm out(nvars_);
    for (const auto& to : other.terms_) {
      Mat Ao = Mat::Zero(nvars_, nvars_);
      CVec co = CVec::Zero(nvars_);
      for (int i = 0; i < other.nvars_; ++i) {
        co[coords[i]] = to.c[i];
        for (int j = 0; j < other.nvars_; ++j) Ao(coords[i], coords[j]) = to.A(i, j);
      }
      Polynomial po = to.poly.embed(nvars_, coords);
      for (const auto& ts : terms_) {
        auto gp = detail::gauss_product(ts.A, ts.c, Ao, co);
        PolyGaussTerm t;
        t.w = ts.w * to.w * std::exp(Complex(0, gp.logK.imag()));
        t.logw = ts.logw + to.logw + gp.logK.real();
        t.A = 0.5 * (gp.A + gp.A.transpose());
        t.c = gp.c;
        t.poly = ts.poly * po;
        out.add_term(std::move(t));
      }
    }
    return out;
  }

  WignerForm product(const WignerForm& other) const {
    if (other.nvars_ != nvars_) throw std::invalid_argument("product: arity mismatch");
    std::vector<int> coords(nvars_);
    for (int i = 0; i < nvars_; ++i) coords[i] = i;
    return product_embedded(other, coords);
  }

  // Exact analytic integration of the dropped coordinates.
  WignerForm marginal(const std::vector<int>& kept) const {
    if (kept.empty()) throw std::invalid_argument("marginal: empty axis set");
    std::vector<int> drop;
    std::vector<bool> keep_mask(nvars_, false);
    for (int k : kept) {
      if (k < 0 || k >= nvars_) throw std::invalid_argument("marginal: axis out of range");
      keep_mask[k] = true;
    }
    for (int i = 0; i < nvars_; ++i)
      if (!keep_mask[i]) drop.push_back(i);
    const int nk = static_cast<int>(kept.size());
    const int nd = static_cast<int>(drop.size());
    WignerForm out(nk);
    if (nd == 0) {
      // Pure permutation of coordinates.
      for (const auto& t : terms_) {
        PolyGaussTerm nt;
        nt.w = t.w;
        nt.logw = t.logw;
        nt.A = Mat(nk, nk);
        nt.c = CVec(nk);
        for (int i = 0; i < nk; ++i) {
          nt.c[i] = t.c[kept[i]];
          for (int j = 0; j < nk; ++j) nt.A(i, j) = t.A(kept[i], kept[j]);
        }
        std::vector<int> target(nvars_, 0);
        for (int i = 0; i < nk; ++i) target[kept[i]] = i;
        nt.poly = t.poly.embed(nk, target);
        out.add_term(std::move(nt));
      }
      return out;
    }
    for (const auto& t : terms_) {
      Mat AKK(nk, nk), AKD(nk, nd), ADD(nd, nd);
      CVec cK(nk), cD(nd);
      for (int i = 0; i < nk; ++i) {
        cK[i] = t.c[kept[i]];
        for (int j = 0; j < nk; ++j) AKK(i, j) = t.A(kept[i], kept[j]);
        for (int j = 0; j < nd; ++j) AKD(i, j) = t.A(kept[i], drop[j]);
      }
      for (int i = 0; i < nd; ++i) {
        cD[i] = t.c[drop[i]];
        for (int j = 0; j < nd; ++j) ADD(i, j) = t.A(drop[i], drop[j]);
      }
      Eigen::LDLT<Mat> ldlt(ADD);
      Mat ADDinv = ldlt.solve(Mat::Identity(nd, nd));
      Mat M = -ADDinv * AKD.transpose();  // x_D linear response to x_K
      Mat Atilde = AKK - AKD * ADDinv * AKD.transpose();

      // Substitute old variables by (x_K, y): x_K passes through, and
      // x_D = M x_K + y + (c_D - M c_K).
      Mat L = Mat::Zero(nvars_, nk + nd);
      CVec shift = CVec::Zero(nvars_);
      for (int i = 0; i < nk; ++i) L(kept[i], i) = 1.0;
      for (int j = 0; j < nd; ++j) {
        L(drop[j], nk + j) = 1.0;
        for (int i = 0; i < nk; ++i) L(drop[j], i) = M(j, i);
        Complex s = cD[j];
        for (int i = 0; i < nk; ++i) s -= M(j, i) * cK[i];
        shift[drop[j]] = s;
      }
      Polynomial pz = t.poly.substitute_affine(L, shift);
      Polynomial pk = detail::partial_gaussian_expectation(pz, nk, ADDinv);

      PolyGaussTerm nt;
      nt.w = t.w;
      nt.logw = t.logw + 0.5 * nd * std::log(2.0 * kPi) - 0.5 * detail::log_det_spd(ADD);
      nt.A = 0.5 * (Atilde + Atilde.transpose());
      nt.c = cK;
      nt.poly = std::move(pk);
      out.add_term(std::move(nt));
    }
    return out;
  }

  // Marginal keeping whole modes (0-based mode indices).
  WignerForm marginal_modes(const std::vector<int>& modes) const {
    std::vector<int> axes;
    for (int m : modes) {
      axes.push_back(2 * m);
      axes.push_back(2 * m + 1);
    }
    return marginal(axes);
  }

  void clear_factors() { factors_.clear(); }
  void set_factors(std::vector<WignerForm> f) { factors_ = std::move(f); }

 private:
  int nvars_;
  std::vector<PolyGaussTerm> terms_;
  std::vector<WignerForm> factors_;
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline WignerForm gaussian_wigner(const GaussianState& st) {
  const int n = static_cast<int>(st.xi.size());
  PolyGaussTerm t;
  t.A = st.V.inverse();
  t.A = 0.5 * (t.A + t.A.transpose());
  t.c = st.xi.cast<Complex>();
  t.poly = Polynomial::constant(n, 1.0);
  t.w = 1.0;
  t.logw = -0.5 * n * std::log(2.0 * kPi) - 0.5 * std::log(st.V.determinant());
  WignerForm f(n);
  f.add_term(std::move(t));
  return f;
}

inline WignerForm vacuum_wigner(int m) { return gaussian_wigner(GaussianState::vacuum(m)); }

// ||x_b||^2 = (b.x)^2 + ((Omega b).x)^2 as a polynomial.
inline Polynomial mode_radius_squared(const ModeVector& b) {
  const int n = static_cast<int>(b.f.size());
  Vec ob = omega(n / 2) * b.f;
  Polynomial q1 = Polynomial::linear(b.f.cast<Complex>());
  Polynomial q2 = Polynomial::linear(ob.cast<Complex>());
  return q1 * q1 + q2 * q2;
}

// n-photon Fock state in mode b of an m-mode system (vacuum elsewhere):
//   W(x) = sum_k binom(n,k) (-1)^(n+k) ||x_b||^(2k) / k! * exp(-||x||^2/2)/(2 pi)^m.
inline WignerForm fock_wigner(int n, const ModeVector& b) {
  if (n < 0) throw std::invalid_argument("fock_wigner: negative photon number");
  const int nv = static_cast<int>(b.f.size());
  const int m = nv / 2;
  Polynomial r2 = mode_radius_squared(b);
  Polynomial p = Polynomial::constant(nv, 0.0);
  double binom = 1.0;  // binom(n, k)
  double kfact = 1.0;
  Polynomial r2k = Polynomial::constant(nv, 1.0);
  for (int k = 0; k <= n; ++k) {
    double sign = ((n + k) % 2 == 0) ? 1.0 : -1.0;
    p += r2k * Complex(sign * binom / kfact);
    r2k = r2k * r2;
    binom *= static_cast<double>(n - k) / (k + 1);
    kfact *= (k + 1);
  }
  PolyGaussTerm t;
  t.A = Mat::Identity(nv, nv);
  t.c = CVec::Zero(nv);
  t.poly = std::move(p);
  t.w = 1.0;
  t.logw = -m * std::log(2.0 * kPi);
  WignerForm f(nv);
  f.add_term(std::move(t));
  return f;
}

inline WignerForm fock_wigner(int n) { return fock_wigner(n, ModeVector(Vec::Unit(2, 0))); }

// Product of single-mode Fock states in an orthonormal mode basis.
inline WignerForm multimode_fock_wigner(const std::vector<int>& ns,
                                        const std::vector<ModeVector>& basis) {
  if (ns.size() != basis.size() || ns.empty())
    throw std::invalid_argument("multimode_fock_wigner: arity mismatch");
  const int m = static_cast<int>(ns.size());
  Mat O(2 * m, 2 * m);
  Mat Om = omega(m);
  for (int j = 0; j < m; ++j) {
    if (basis[j].modes() != m)
      throw std::invalid_argument("multimode_fock_wigner: mode dimension");
    O.col(2 * j) = basis[j].f;
    O.col(2 * j + 1) = Om * basis[j].f;
  }
  if ((O.transpose() * O - Mat::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("multimode_fock_wigner: modes not orthonormal");

  WignerForm f = fock_wigner(ns[0]);
  for (int j = 1; j < m; ++j) f = WignerForm::tensor(f, fock_wigner(ns[j]));
  bool standard = (O - Mat::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() < 1e-14;
  if (standard) return f;
  // Rotate the standard-basis product into the requested mode basis.
  WignerForm r = f.substituted(O, Vec::Zero(2 * m));
  r.clear_factors();
  return r;
}

// Wigner term for the operator D(alpha) |G><G| D(beta)^dag, |G> the pure
// Gaussian state with covariance V (det V = 1) and zero mean. Complex center
// mu = (alpha+beta)/2 - i/2 V Omega (alpha-beta); the weight carries
// tr = <G| D(-beta) D(alpha) |G>.
inline PolyGaussTerm displaced_gaussian_cross_term(const Mat& V, const Vec& alpha,
                                                   const Vec& beta) {
  const int n = static_cast<int>(alpha.size());
  const int m = n / 2;
  Mat Om = omega(m);
  Vec d = alpha - beta;
  PolyGaussTerm t;
  t.A = V.inverse();
  t.A = 0.5 * (t.A + t.A.transpose());
  CVec mu = (0.5 * (alpha + beta)).cast<Complex>();
  Vec vod = V * (Om * d);
  mu -= Complex(0, 0.5) * vod.cast<Complex>();
  t.c = mu;
  double phase = -0.25 * beta.dot(Om * alpha);
  Vec omd = Om * d;
  double logmag = -0.125 * omd.dot(V * omd);
  t.w = std::exp(Complex(0, phase));
  t.logw = logmag - m * std::log(2.0 * kPi) - 0.5 * std::log(V.determinant());
  t.poly = Polynomial::constant(n, 1.0);
  return t;
}

// Schroedinger cat (|alpha> +/- |-alpha>)/N. The interference term is stored
// as a complex-conjugate pair of complex-center Gaussians. The displayed
// closed form in the source text carries a different convention factor; this
// construction is fixed by the displaced-parity oracle (W(0) = +/- 1/(2 pi)^m).
inline WignerForm cat_wigner(int parity, const Vec& alpha) {
  if (parity != +1 && parity != -1) throw std::invalid_argument("cat_wigner: parity +/-1");
  const double a2 = alpha.squaredNorm();
  if (parity == -1 && a2 <= 0.0)
    throw std::invalid_argument("cat_wigner: odd cat with alpha = 0 is undefined");
  if (a2 <= 0.0 && parity == +1 && alpha.size() == 0)
    throw std::invalid_argument("cat_wigner: empty displacement");
  const int n = static_cast<int>(alpha.size());
  Mat V = Mat::Identity(n, n);
  const double norm2 = 2.0 * (1.0 + parity * std::exp(-0.5 * a2));
  WignerForm f(n);
  auto add_scaled = [&](PolyGaussTerm t, double s) {
    t.w *= s;
    f.add_term(std::move(t));
  };
  add_scaled(displaced_gaussian_cross_term(V, alpha, alpha), 1.0 / norm2);
  add_scaled(displaced_gaussian_cross_term(V, -alpha, -alpha), 1.0 / norm2);
  add_scaled(displaced_gaussian_cross_term(V, alpha, -alpha), parity / norm2);
  add_scaled(displaced_gaussian_cross_term(V, -alpha, alpha), parity / norm2);
  return f;
}

inline WignerForm mixture_wigner(const std::vector<double>& weights,
                                 const std::vector<WignerForm>& forms) {
  if (weights.size() != forms.size() || forms.empty())
    throw std::invalid_argument("mixture_wigner: arity mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw std::invalid_argument("mixture_wigner: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mixture_wigner: weights must sum to 1");
  WignerForm out(forms[0].nvars());
  for (size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].nvars() != out.nvars())
      throw std::invalid_argument("mixture_wigner: mixed arities");
    if (weights[i] == 0.0) continue;
    for (auto t : forms[i].terms()) {
      t.w *= weights[i];
      out.add_term(std::move(t));
    }
  }
  return out;
}

// Finite-envelope GKP state: superposition of 2 k_range + 1 displaced
// squeezed vacua (x-variance 1/s) including all cross-interference terms.
// The envelope truncation breaks the analytic norm, so the form is
// renormalized by its own integral.
inline WignerForm gkp_wigner(int logical, double s, double delta, int k_range) {
  if (logical != 0 && logical != 1) throw std::invalid_argument("gkp_wigner: logical 0|1");
  if (s <= 1.0 || delta <= 0.0 || k_range < 1)
    throw std::invalid_argument("gkp_wigner: require s > 1, delta > 0, k_range >= 1");
  Mat V(2, 2);
  V << 1.0 / s, 0, 0, s;
  const double rp = std::sqrt(kPi);
  std::vector<double> w;
  std::vector<Vec> disp;
  for (int k = -k_range; k <= k_range; ++k) {
    double env = (logical == 0) ? std::exp(-2.0 * kPi * (k * delta) * (k * delta))
                                : std::exp(-2.0 * kPi * ((k + 0.5) * delta) * ((k + 0.5) * delta));
    double x = (logical == 0) ? 2.0 * k * rp : (2.0 * k + 1.0) * rp;
    w.push_back(env);
    Vec a(2);
    a << x, 0.0;
    disp.push_back(a);
  }
  WignerForm f(2);
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = 0; j < w.size(); ++j) {
      PolyGaussTerm t = displaced_gaussian_cross_term(V, disp[i], disp[j]);
      t.w *= w[i] * w[j];
      f.add_term(std::move(t));
    }
  f.normalize();
  return f;
}

// Wigner representation of the identity operator: the constant (4 pi)^-m.
inline WignerForm identity_wigner(int m) {
  WignerForm f(2 * m);
  PolyGaussTerm t;
  t.A = Mat::Zero(2 * m, 2 * m);
  t.c = CVec::Zero(2 * m);
  t.poly = Polynomial::constant(2 * m, 1.0);
  t.w = 1.0;
  t.logw = -m * std::log(4.0 * kPi);
  f.add_term(std::move(t));
  return f;
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

// tr[A B] = (4 pi)^m \int W_A W_B, exact.
inline double overlap(const WignerForm& a, const WignerForm& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("overlap: dimension mismatch");
  const int m = a.modes();
  WignerForm p = a.product(b);
  return std::pow(4.0 * kPi, m) * p.integral();
}

// Q(alpha) = \int W(x) W_0(x - alpha) dx  (Gaussian-smoothed Wigner function).
inline double q_function(const WignerForm& w, const Vec& alpha) {
  const int m = w.modes();
  WignerForm coh = gaussian_wigner(GaussianState::coherent(alpha));
  WignerForm p = w.product(coh);
  return p.integral();
}

// First and second moments of a normalized form by exact Wick integration.
inline std::pair<Vec, Mat> form_moments(const WignerForm& w) {
  const int n = w.nvars();
  Vec xi(n);
  Mat second(n, n);
  auto moment = [&](const Polynomial& p) {
    WignerForm probe(n);
    for (auto t : w.terms()) {
      t.poly = t.poly * p;
      probe.add_term(std::move(t));
    }
    return probe.integral();
  };
  for (int i = 0; i < n; ++i) xi[i] = moment(Polynomial::variable(n, i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Polynomial p = Polynomial::variable(n, i) * Polynomial::variable(n, j);
      second(i, j) = second(j, i) = moment(p);
    }
  Mat V = second - xi * xi.transpose();
  return {xi, 0.5 * (V + V.transpose())};
}

struct RadialTermData {
  double a;                     // isotropic inverse covariance
  double logw;                  // log magnitude
  Complex w;                    // phase weight
  std::vector<Complex> radial;  // coefficients of r^0, r^2, r^4, ...
};

// Radial reduction of a single-mode form: succeeds when every term is
// centered at the origin with isotropic Gaussian part and a rotationally
// invariant polynomial.
inline std::optional<std::vector<RadialTermData>> radial_profile(const WignerForm& f) {
  if (f.nvars() != 2) return std::nullopt;
  std::vector<RadialTermData> out;
  for (const auto& t : f.terms()) {
    if (t.c.cwiseAbs().maxCoeff() > 1e-13) return std::nullopt;
    double a = 0.5 * (t.A(0, 0) + t.A(1, 1));
    if (std::abs(t.A(0, 0) - t.A(1, 1)) > 1e-12 * std::max(1.0, a) ||
        std::abs(t.A(0, 1)) > 1e-12 * std::max(1.0, a))
      return std::nullopt;
    // Radial iff poly = sum_k c_k (x^2+p^2)^k.
    int deg = t.poly.degree();
    if (deg % 2 == 1) return std::nullopt;
    std::vector<Complex> ck(deg / 2 + 1, 0.0);
    for (const auto& [mono, coeff] : t.poly.terms()) {
      if (mono[0] % 2 == 1 || mono[1] % 2 == 1) return std::nullopt;
      (void)coeff;
    }
    for (size_t k = 0; k < ck.size(); ++k) {
      Monomial mx(2, 0);
      mx[0] = static_cast<unsigned char>(2 * k);
      ck[k] = t.poly.coefficient(mx);
    }
    double scale = 0.0;
    for (auto c : ck) scale = std::max(scale, std::abs(c));
    for (const auto& [mono, coeff] : t.poly.terms()) {
      int i = mono[0] / 2, j = mono[1] / 2;
      int k = i + j;
      if (k >= static_cast<int>(ck.size())) return std::nullopt;
      double binom = 1.0;
      for (int q = 0; q < j; ++q) binom *= static_cast<double>(k - q) / (q + 1);
      if (std::abs(coeff - ck[k] * binom) > 1e-10 * std::max(1.0, scale))
        return std::nullopt;
    }
    out.push_back({a, t.logw, t.w, std::move(ck)});
  }
  return out;
}

struct NegativityOptions {
  double tol = 1e-6;
  long max_regions = 400000;
  double box_sigmas = 10.0;
};

// Negativity volume \int |W| - 1. Radially symmetric single-mode forms reduce
// to a 1D radial integral; mode-disjoint products factorize exactly; anything
// else goes through adaptive cubature on a +/- box_sigmas box.
inline double negativity_volume(const WignerForm& f, double tol = 1e-6,
                                const NegativityOptions& opt_in = {}) {
  NegativityOptions opt = opt_in;
  opt.tol = tol;
  if (!f.factors().empty()) {
    double prod = 1.0;
    for (const auto& g : f.factors())
      prod *= 1.0 + negativity_volume(g, tol / static_cast<double>(f.factors().size()), opt);
    return prod - 1.0;
  }
  if (auto rad = radial_profile(f)) {
    double amin = rad->front().a;
    for (const auto& r : *rad) amin = std::min(amin, r.a);
    if (amin <= 0.0) throw std::runtime_error("negativity_volume: non-decaying term");
    double R = opt.box_sigmas / std::sqrt(amin);
    auto fr = [&](double r) {
      Complex acc = 0;
      double r2 = r * r;
      for (const auto& t : *rad) {
        Complex p = 0;
        double rk = 1.0;
        for (auto c : t.radial) {
          p += c * rk;
          rk *= r2;
        }
        acc += t.w * std::exp(t.logw - 0.5 * t.a * r2) * p;
      }
      return 2.0 * kPi * r * std::abs(acc.real());
    };
    auto q = integrate_1d(fr, 0.0, R, tol * 0.5);
    if (!q.converged) throw std::runtime_error("negativity_volume: radial quadrature did not converge");
    return std::max(0.0, q.value - 1.0);
  }
  const int n = f.nvars();
  // Bounding box from term centers and covariances.
  Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  for (const auto& t : f.terms()) {
    Mat Sigma = t.A.ldlt().solve(Mat::Identity(n, n));
    for (int i = 0; i < n; ++i) {
      double s = std::sqrt(std::max(0.0, Sigma(i, i)));
      lo[i] = std::min(lo[i], t.c[i].real() - opt.box_sigmas * s);
      hi[i] = std::max(hi[i], t.c[i].real() + opt.box_sigmas * s);
    }
  }
  auto fv = [&](const Vec& x) { return std::abs(f.value(x)); };
  auto q = integrate_nd(fv, lo, hi, tol * 0.5, opt.max_regions);
  if (!q.converged) throw std::runtime_error("negativity_volume: cubature did not converge");
  return std::max(0.0, q.value - 1.0);
}

inline double log_negativity(const WignerForm& f, double tol = 1e-6) {
  return std::log1p(negativity_volume(f, tol));
}

}  // namespace cvng
