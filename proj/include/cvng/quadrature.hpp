#pragma once

// Adaptive quadrature: 1D Gauss-Kronrod 7-15 with interval bisection for
// radial integrals, and an adaptive Genz-Malik degree-7 cubature for
// low-dimensional phase-space integrals (d <= 6 in practice).

#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace cvng {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline const double kGK15X[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline const double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline const double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

inline Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = kGK15WK[7] * f(c);
  double resg = kGK15WG[3] * f(c);
  for (int j = 0; j < 7; ++j) {
    double fa = f(c - h * kGK15X[j]);
    double fb = f(c + h * kGK15X[j]);
    resk += kGK15WK[j] * (fa + fb);
    if (j % 2 == 1) resg += kGK15WG[j / 2] * (fa + fb);
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = resk * h;
  s.error = std::abs((resk - resg) * h);
  return s;
}

}  // namespace detail

// Adaptive 1D integration of f on [a, b] to absolute tolerance tol.
inline QuadratureResult integrate_1d(const std::function<double(double)>& f,
                                     double a, double b, double tol,
                                     int max_segments = 20000) {
  std::priority_queue<detail::Segment> heap;
  auto s0 = detail::gk15(f, a, b);
  double total = s0.value, toterr = s0.error;
  heap.push(s0);
  long evals = 15;
  while (toterr > tol && static_cast<int>(heap.size()) < max_segments) {
    auto worst = heap.top();
    heap.pop();
    total -= worst.value;
    toterr -= worst.error;
    double mid = 0.5 * (worst.a + worst.b);
    auto s1 = detail::gk15(f, worst.a, mid);
    auto s2 = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += s1.value + s2.value;
    toterr += s1.error + s2.error;
    heap.push(s1);
    heap.push(s2);
  }
  return {total, toterr, toterr <= tol, evals};
}

namespace detail {

struct Region {
  Eigen::VectorXd lo, hi;
  double value, error;
  int split_dim;
  bool operator<(const Region& o) const { return error < o.error; }
};

// Genz-Malik degree-7 rule with embedded degree-5 error estimate.
template <typename F>
inline void genz_malik(const F& f, Region& r, long& evals) {
  const int d = static_cast<int>(r.lo.size());
  const double l2 = std::sqrt(9.0 / 70.0);
  const double l3 = std::sqrt(9.0 / 10.0);
  const double l4 = l3;
  const double l5 = std::sqrt(9.0 / 19.0);

  const double w1 = (12824.0 - 9120.0 * d + 400.0 * d * d) / 19683.0;
  const double w2 = 980.0 / 6561.0;
  const double w3 = (1820.0 - 400.0 * d) / 19683.0;
  const double w4 = 200.0 / 19683.0;
  const double w5 = 6859.0 / 19683.0 / std::pow(2.0, d);
  const double e1 = (729.0 - 950.0 * d + 50.0 * d * d) / 729.0;
  const double e2 = 245.0 / 486.0;
  const double e3 = (265.0 - 100.0 * d) / 1458.0;
  const double e4 = 25.0 / 729.0;

  Eigen::VectorXd c = 0.5 * (r.lo + r.hi);
  Eigen::VectorXd h = 0.5 * (r.hi - r.lo);
  double vol = 1.0;
  for (int i = 0; i < d; ++i) vol *= 2.0 * h[i];

  const double f0 = f(c);
  ++evals;
  double s2 = 0, s3 = 0, s4 = 0, s5 = 0;
  double maxdiff = -1.0;
  int sdim = 0;
  const double ratio = (l2 * l2) / (l3 * l3);
  Eigen::VectorXd x = c;
  for (int i = 0; i < d; ++i) {
    x[i] = c[i] - l2 * h[i];
    double fm2 = f(x);
    x[i] = c[i] + l2 * h[i];
    double fp2 = f(x);
    x[i] = c[i] - l3 * h[i];
    double fm3 = f(x);
    x[i] = c[i] + l3 * h[i];
    double fp3 = f(x);
    x[i] = c[i];
    evals += 4;
    s2 += fm2 + fp2;
    s3 += fm3 + fp3;
    double diff = std::abs(fm2 + fp2 - 2 * f0 - ratio * (fm3 + fp3 - 2 * f0));
    if (diff > maxdiff) {
      maxdiff = diff;
      sdim = i;
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int si = -1; si <= 1; si += 2)
        for (int sj = -1; sj <= 1; sj += 2) {
          x[i] = c[i] + si * l4 * h[i];
          x[j] = c[j] + sj * l4 * h[j];
          s4 += f(x);
          ++evals;
          x[i] = c[i];
          x[j] = c[j];
        }
  for (long corner = 0; corner < (1L << d); ++corner) {
    for (int i = 0; i < d; ++i)
      x[i] = c[i] + ((corner >> i) & 1 ? l5 : -l5) * h[i];
    s5 += f(x);
    ++evals;
  }

  const double res7 = vol * (w1 * f0 + w2 * s2 + w3 * s3 + w4 * s4 + w5 * s5);
  const double res5 = vol * (e1 * f0 + e2 * s2 + e3 * s3 + e4 * s4);
  r.value = res7;
  r.error = std::abs(res7 - res5);
  r.split_dim = sdim;
}

}  // namespace detail

// Adaptive cubature of f over the box [lo, hi] to absolute tolerance tol.
inline QuadratureResult integrate_nd(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double tol,
    long max_regions = 400000) {
  const int d = static_cast<int>(lo.size());
  if (d < 2) throw std::invalid_argument("integrate_nd: dimension must be >= 2");
  long evals = 0;
  detail::Region r0{lo, hi, 0, 0, 0};
  detail::genz_malik(f, r0, evals);
  std::priority_queue<detail::Region> heap;
  double total = r0.value, toterr = r0.error;
  heap.push(r0);
  long nregions = 1;
  while (toterr > tol && nregions < max_regions) {
    auto worst = heap.top();
    heap.pop();
    total -= worst.value;
    toterr -= worst.error;
    const int sd = worst.split_dim;
    double mid = 0.5 * (worst.lo[sd] + worst.hi[sd]);
    detail::Region a = worst, b = worst;
    a.hi[sd] = mid;
    b.lo[sd] = mid;
    detail::genz_malik(f, a, evals);
    detail::genz_malik(f, b, evals);
    total += a.value + b.value;
    toterr += a.error + b.error;
    heap.push(a);
    heap.push(b);
    ++nregions;
  }
  return {total, toterr, toterr <= tol, evals};
}

}  // namespace cvng
