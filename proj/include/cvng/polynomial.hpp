#pragma once

// Sparse multivariate polynomials with complex coefficients, plus the
// Gaussian-moment (Isserlis) machinery used to integrate polynomial x Gaussian
// expressions in closed form.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

namespace cvng {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Exponent vector, one entry per variable. Kept short: total degrees stay
// below ~16 in practice (purity integrands of degree-8 forms).
using Monomial = std::vector<unsigned char>;

class Polynomial {
 public:
  Polynomial() : nvars_(0) {}
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, Complex c) {
    Polynomial p(nvars);
    if (c != Complex(0)) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }

  static Polynomial variable(int nvars, int index, Complex coeff = 1.0) {
    Polynomial p(nvars);
    Monomial m(nvars, 0);
    m[index] = 1;
    p.terms_[m] = coeff;
    return p;
  }

  // Linear form c0 + sum_i coeffs[i] x_i.
  static Polynomial linear(const CVec& coeffs, Complex c0 = 0.0) {
    Polynomial p(static_cast<int>(coeffs.size()));
    if (c0 != Complex(0)) p.terms_[Monomial(p.nvars_, 0)] = c0;
    for (int i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == Complex(0)) continue;
      Monomial m(p.nvars_, 0);
      m[i] = 1;
      p.terms_[m] += coeffs[i];
    }
    p.prune();
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Complex>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
      int t = 0;
      for (auto e : m) t += e;
      d = std::max(d, t);
    }
    return d;
  }

  Complex coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex(0) : it->second;
  }

  void add_term(const Monomial& m, Complex c) {
    if (static_cast<int>(m.size()) != nvars_)
      throw std::invalid_argument("Polynomial::add_term: arity mismatch");
    terms_[m] += c;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [m, c] : o.terms_) terms_[m] += c;
    prune();
    return *this;
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    r += o;
    return r;
  }

  Polynomial operator*(const Polynomial& o) const {
    check_arity(o);
    Polynomial r(nvars_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        Monomial m(nvars_);
        for (int i = 0; i < nvars_; ++i) m[i] = ma[i] + mb[i];
        r.terms_[m] += ca * cb;
      }
    r.prune();
    return r;
  }

  Polynomial operator*(Complex s) const {
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c *= s;
    r.prune();
    return r;
  }

  Polynomial conjugate() const {
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c = std::conj(c);
    return r;
  }

  Complex evaluate(const CVec& x) const {
    Complex acc = 0;
    for (const auto& [m, c] : terms_) {
      Complex t = c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m[i]; ++k) t *= x[i];
      acc += t;
    }
    return acc;
  }

  Complex evaluate(const Vec& x) const {
    CVec cx = x.cast<Complex>();
    return evaluate(cx);
  }

  // Substitute x = L y + shift where L is real (new variables y) and the
  // shift may be complex. The result is a polynomial in y.
  Polynomial substitute_affine(const Mat& L, const CVec& shift) const {
    const int ny = static_cast<int>(L.cols());
    if (L.rows() != nvars_ || shift.size() != nvars_)
      throw std::invalid_argument("Polynomial::substitute_affine: shape mismatch");
    // Per-variable linear forms in the new variables.
    std::vector<Polynomial> lin(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      CVec row = L.row(i).transpose().cast<Complex>();
      lin[i] = Polynomial::linear(row, shift[i]);
    }
    Polynomial r(ny);
    for (const auto& [m, c] : terms_) {
      Polynomial t = Polynomial::constant(ny, c);
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m[i]; ++k) t = t * lin[i];
      r += t;
    }
    return r;
  }

  // Rename variables into a larger space: variable i becomes target[i].
  Polynomial embed(int new_nvars, const std::vector<int>& target) const {
    Polynomial r(new_nvars);
    for (const auto& [m, c] : terms_) {
      Monomial mm(new_nvars, 0);
      for (int i = 0; i < nvars_; ++i) mm[target[i]] += m[i];
      r.terms_[mm] += c;
    }
    return r;
  }

  void prune(double eps = 0.0) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= eps)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

 private:
  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_)
      throw std::invalid_argument("Polynomial arity mismatch");
  }

  int nvars_;
  std::map<Monomial, Complex> terms_;
};

inline Polynomial operator*(Complex s, const Polynomial& p) { return p * s; }

namespace detail {

// E[prod_i y_{idx[i]}] for y ~ N(0, Sigma): sum over perfect pairings
// (Isserlis / Wick). idx.size() <= ~10 keeps this cheap.
inline double isserlis(std::vector<int>& idx, const Mat& Sigma) {
  const size_t n = idx.size();
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  if (n == 2) return Sigma(idx[0], idx[1]);
  // Pair idx[0] with each other element, recurse on the rest.
  double acc = 0.0;
  std::vector<int> rest(n - 2);
  for (size_t j = 1; j < n; ++j) {
    double s = Sigma(idx[0], idx[j]);
    if (s == 0.0) continue;
    size_t k = 0;
    for (size_t t = 1; t < n; ++t)
      if (t != j) rest[k++] = idx[t];
    acc += s * isserlis(rest, Sigma);
  }
  return acc;
}

}  // namespace detail

// E[poly(y)] for y ~ N(0, Sigma) with Sigma = covariance (real symmetric PSD).
inline Complex gaussian_expectation(const Polynomial& poly, const Mat& Sigma) {
  Complex acc = 0;
  std::vector<int> idx;
  for (const auto& [m, c] : poly.terms()) {
    idx.clear();
    int deg = 0;
    for (int i = 0; i < poly.nvars(); ++i) {
      deg += m[i];
      for (int k = 0; k < m[i]; ++k) idx.push_back(i);
    }
    if (deg % 2 == 1) continue;
    acc += c * detail::isserlis(idx, Sigma);
  }
  return acc;
}

// E[poly(y + mu)] for y ~ N(0, Sigma), mu possibly complex.
inline Complex gaussian_expectation(const Polynomial& poly, const CVec& mu,
                                    const Mat& Sigma) {
  Mat id = Mat::Identity(poly.nvars(), poly.nvars());
  return gaussian_expectation(poly.substitute_affine(id, mu), Sigma);
}

}  // namespace cvng
