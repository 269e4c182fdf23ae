#pragma once

// Quantum non-Gaussianity witnesses, stellar rank of finite core states,
// fidelity-based rank certificates, entropic non-Gaussianity and the central
// limit property.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cvng/fock_oracle.hpp"
#include "cvng/symplectic.hpp"

namespace cvng {

// Normalized single-mode Fock-basis amplitudes c_0 .. c_N.
struct CoreState {
  CVec coeffs;

  explicit CoreState(CVec c) : coeffs(std::move(c)) {
    if (coeffs.size() == 0) throw std::invalid_argument("CoreState: empty coefficients");
    if (std::abs(coeffs.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("CoreState: amplitudes not normalized");
  }
};

// Energy-based witness: a state in the convex hull of Gaussian states obeys
// W(0) >= (2 pi)^-m exp(-4 nbar (2 nbar + 1)). Certified quantum
// non-Gaussian iff the value undercuts the bound (or is negative).
inline bool qng_energy_witness(double w_at_origin, double nbar, int m) {
  if (nbar < 0.0) throw std::invalid_argument("qng_energy_witness: nbar must be >= 0");
  if (w_at_origin < 0.0) return true;
  double bound = std::pow(2.0 * kPi, -m) * std::exp(-4.0 * nbar * (2.0 * nbar + 1.0));
  return w_at_origin < bound - 1e-12;
}

// Stellar polynomial P(z) with coefficients c_n / sqrt(n!).
inline CVec stellar_function(const CoreState& core) {
  const int n = static_cast<int>(core.coeffs.size());
  if (core.coeffs.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("stellar_function: all-zero coefficients");
  CVec p(n);
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    p[k] = core.coeffs[k] / std::sqrt(fact);
  }
  return p;
}

struct StellarReport {
  int rank = 0;
  std::vector<Complex> roots;                 // with multiplicity
  std::vector<std::pair<Complex, int>> clusters;  // merged within 1e-6
};

// Rank = highest coefficient above tol; roots from the companion matrix of
// the stellar polynomial, clustered within radius 1e-6 for multiplicity.
inline StellarReport stellar_rank(const CoreState& core, double tol = 1e-9) {
  StellarReport rep;
  const int n = static_cast<int>(core.coeffs.size());
  int rank = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(core.coeffs[k]) > tol) rank = k;
  rep.rank = rank;
  if (rank == 0) return rep;

  CVec p = stellar_function(core);
  // Companion matrix of p_0 + p_1 z + ... + p_rank z^rank.
  CMat comp = CMat::Zero(rank, rank);
  for (int i = 1; i < rank; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < rank; ++i) comp(i, rank - 1) = -p[i] / p[rank];
  Eigen::ComplexEigenSolver<CMat> es(comp);
  for (int i = 0; i < rank; ++i) rep.roots.push_back(es.eigenvalues()[i]);

  std::vector<bool> used(rep.roots.size(), false);
  for (size_t i = 0; i < rep.roots.size(); ++i) {
    if (used[i]) continue;
    Complex c = rep.roots[i];
    int mult = 1;
    used[i] = true;
    for (size_t j = i + 1; j < rep.roots.size(); ++j) {
      if (!used[j] && std::abs(rep.roots[j] - c) < 1e-6) {
        used[j] = true;
        ++mult;
      }
    }
    rep.clusters.push_back({c, mult});
  }
  return rep;
}

// Fidelity-based stellar-rank certificate. Only the k = 0 threshold (target
// |1>, fidelity > 0.478) ships with the library; other ranks need a
// caller-supplied threshold.
inline bool rank_certificate(double fidelity, int k,
                             std::optional<double> threshold = std::nullopt) {
  if (fidelity < 0.0 || fidelity > 1.0)
    throw std::invalid_argument("rank_certificate: fidelity out of range");
  if (k == 0) return fidelity > threshold.value_or(0.478);
  if (!threshold)
    throw std::invalid_argument("rank_certificate: k >= 1 requires a caller threshold");
  return fidelity > *threshold;
}

// Entropic non-Gaussianity delta = S(sigma_V) - S(rho), where sigma_V is the
// Gaussian state with the same first and second moments.
inline double entropic_nongaussianity(const fock::TruncatedState& rho, const Mat& V,
                                      const Vec& xi, double moment_tol = 1e-6) {
  auto [mxi, mV] = fock::moments(rho);
  if ((mxi - xi).cwiseAbs().maxCoeff() > moment_tol ||
      (mV - V).cwiseAbs().maxCoeff() > moment_tol)
    throw std::invalid_argument("entropic_nongaussianity: moments do not match (V, xi)");
  double delta = gaussian_entropy(V) - fock::entropy(rho);
  if (delta < -1e-8)
    throw std::runtime_error("entropic_nongaussianity: negative gap beyond tolerance");
  return std::max(0.0, delta);
}

inline double entropic_nongaussianity(const fock::TruncatedState& rho,
                                      double moment_tol = 1e-6) {
  auto [xi, V] = fock::moments(rho);
  (void)moment_tol;
  double delta = gaussian_entropy(V) - fock::entropy(rho);
  return std::max(0.0, delta);
}

// Central-limit deviation max_lambda |chi(lambda/sqrt(N))^N - chi_G(lambda)|
// over the provided sample points, using the product-state identity for
// averaged quadratures and the oracle characteristic function.
inline double clt_convergence(const CoreState& core, long n_copies,
                              const std::vector<Vec>& lambdas, int dim = 40) {
  if (n_copies < 1) throw std::invalid_argument("clt_convergence: N must be >= 1");
  fock::Space sp{dim, 1};
  CVec psi = CVec::Zero(dim);
  for (int k = 0; k < core.coeffs.size() && k < dim; ++k) psi[k] = core.coeffs[k];
  auto rho = fock::pure_state(sp, psi);
  auto [xi, V] = fock::moments(rho);
  double maxdev = 0.0;
  for (const Vec& l : lambdas) {
    Complex chi = fock::characteristic(rho, Vec(l / std::sqrt(double(n_copies))));
    Complex chiN = std::pow(chi, double(n_copies));
    Complex chiG = std::exp(Complex(0, xi.dot(l)) - 0.5 * l.dot(V * l));
    maxdev = std::max(maxdev, std::abs(chiN - chiG));
  }
  return maxdev;
}

inline std::vector<Vec> clt_sample_points(double radius = 3.0, int per_axis = 7) {
  std::vector<Vec> pts;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      Vec l(2);
      l << -radius + 2 * radius * i / (per_axis - 1),
          -radius + 2 * radius * j / (per_axis - 1);
      if (l.norm() <= radius + 1e-12) pts.push_back(l);
    }
  return pts;
}

}  // namespace cvng
