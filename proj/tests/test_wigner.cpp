#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cvng/fock_oracle.hpp"
#include "cvng/wigner.hpp"

using namespace cvng;

namespace {

std::mt19937 rng(4242);

Vec pt2(double x, double p) {
  Vec v(2);
  v << x, p;
  return v;
}

Mat random_orthosymplectic2(int m) {
  std::normal_distribution<double> g;
  CMat Z(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ();
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i) Q.col(i) *= R(i, i) / std::abs(R(i, i));
  return unitary_to_orthosymplectic(Q);
}

Mat random_symplectic2(int m, double smax = 2.0) {
  std::uniform_real_distribution<double> u(1.0, smax);
  Vec d(2 * m);
  for (int j = 0; j < m; ++j) {
    double s = u(rng);
    d[2 * j] = std::sqrt(s);
    d[2 * j + 1] = 1.0 / std::sqrt(s);
  }
  return random_orthosymplectic2(m) * Mat(d.asDiagonal()) * random_orthosymplectic2(m);
}

}  // namespace

TEST_CASE("gaussian wigner values and normalization") {
  WignerForm vac = vacuum_wigner(1);
  REQUIRE(vac.value(Vec::Zero(2)) == Catch::Approx(1.0 / (2 * kPi)).margin(1e-14));
  REQUIRE(vac.integral() == Catch::Approx(1.0).margin(1e-12));

  Vec alpha = pt2(1.5, -0.3);
  WignerForm coh = gaussian_wigner(GaussianState::coherent(alpha));
  REQUIRE(coh.value(alpha) == Catch::Approx(1.0 / (2 * kPi)).margin(1e-14));
  REQUIRE(coh.value(Vec::Zero(2)) ==
          Catch::Approx(std::exp(-0.5 * alpha.squaredNorm()) / (2 * kPi)).margin(1e-14));

  WignerForm sq = gaussian_wigner(GaussianState::squeezed(2.0));
  REQUIRE(sq.value(Vec::Zero(2)) == Catch::Approx(1.0 / (2 * kPi)).margin(1e-14));
  REQUIRE(sq.integral() == Catch::Approx(1.0).margin(1e-12));

  Mat bad = 0.25 * Mat::Identity(2, 2);
  REQUIRE_THROWS_AS(GaussianState(Vec::Zero(2), bad), std::invalid_argument);
}

TEST_CASE("fock wigner") {
  REQUIRE(fock_wigner(0).value(Vec::Zero(2)) == Catch::Approx(1.0 / (2 * kPi)));
  REQUIRE(fock_wigner(1).value(Vec::Zero(2)) == Catch::Approx(-1.0 / (2 * kPi)));
  for (int n = 0; n <= 4; ++n) REQUIRE(fock_wigner(n).integral() == Catch::Approx(1.0).margin(1e-10));
  REQUIRE_THROWS_AS(fock_wigner(-1), std::invalid_argument);

  // n = 2 matches the displaced-parity oracle on a 5x5 grid at truncation 40.
  fock::Space sp{40, 1};
  auto two = fock::fock_state(sp, {2});
  WignerForm w2 = fock_wigner(2);
  for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0})
    for (double p : {-2.0, -1.0, 0.0, 1.0, 2.0})
      REQUIRE(w2.value(pt2(x, p)) ==
              Catch::Approx(fock::wigner_displaced_parity(two, pt2(x, p))).margin(1e-8));
}

TEST_CASE("multimode fock wigner") {
  std::vector<ModeVector> basis = {ModeVector(Vec::Unit(4, 0)), ModeVector(Vec::Unit(4, 2))};
  WignerForm w00 = multimode_fock_wigner({0, 0}, basis);
  REQUIRE(w00.value(Vec::Zero(4)) == Catch::Approx(1.0 / std::pow(2 * kPi, 2)).margin(1e-14));

  WignerForm w11 = multimode_fock_wigner({1, 1}, basis);
  REQUIRE(w11.value(Vec::Zero(4)) == Catch::Approx(1.0 / std::pow(2 * kPi, 2)).margin(1e-14));
  REQUIRE(w11.integral() == Catch::Approx(1.0).margin(1e-10));

  // Marginal of (1,0) over the second mode plane is the single-mode |1> form.
  WignerForm w10 = multimode_fock_wigner({1, 0}, basis);
  WignerForm red = w10.marginal_modes({0});
  WignerForm one = fock_wigner(1);
  for (double x : {-1.0, 0.0, 0.7})
    for (double p : {-0.4, 0.0, 1.2})
      REQUIRE(red.value(pt2(x, p)) == Catch::Approx(one.value(pt2(x, p))).margin(1e-12));

  // Oblique orthonormal mode pair still yields a normalized form.
  Vec b1(4), b2(4);
  b1 << 0.6, 0.0, 0.8, 0.0;
  b2 << -0.8, 0.0, 0.6, 0.0;
  WignerForm wob = multimode_fock_wigner({1, 0}, {ModeVector(b1), ModeVector(b2)});
  REQUIRE(wob.integral() == Catch::Approx(1.0).margin(1e-10));

  Vec nb(4);
  nb << 1.0, 0.0, 1.0, 0.0;
  nb.normalize();
  REQUIRE_THROWS_AS(multimode_fock_wigner({1, 0}, {ModeVector(nb), ModeVector(nb)}),
                    std::invalid_argument);
}

TEST_CASE("cat wigner against the displaced-parity oracle") {
  // Fixed by the oracle: W(0) = +1/(2 pi) for even and -1/(2 pi) for odd cats
  // (pure parity eigenstates), independent of the displacement.
  Vec alpha = pt2(6.0, 0.0);
  WignerForm even = cat_wigner(+1, alpha);
  WignerForm odd = cat_wigner(-1, alpha);
  REQUIRE(even.value(Vec::Zero(2)) == Catch::Approx(1.0 / (2 * kPi)).margin(1e-12));
  REQUIRE(odd.value(Vec::Zero(2)) == Catch::Approx(-1.0 / (2 * kPi)).margin(1e-12));
  REQUIRE(even.integral() == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(odd.integral() == Catch::Approx(1.0).margin(1e-8));

  // Large-displacement limit: blob height at x = alpha approaches 1/(4 pi).
  REQUIRE(even.value(alpha) == Catch::Approx(1.0 / (4 * kPi)).margin(1e-8));

  // Pointwise oracle comparison for ||alpha|| = 6 on the standard grid.
  // (The displaced-parity oracle shifts the far blob by another ||x||, so the
  // truncation must cover mean photon number (||alpha|| + ||x||)^2 / 4.)
  const int d = 80;
  fock::Space sp{d, 1};
  CVec vac = CVec::Zero(d);
  vac[0] = 1.0;
  CVec plus = fock::displacement(d, 6.0, 0.0) * vac;
  CVec minus = fock::displacement(d, -6.0, 0.0) * vac;
  for (int parity : {+1, -1}) {
    CVec psi = plus + double(parity) * minus;
    auto st = fock::pure_state(sp, psi);
    WignerForm form = parity > 0 ? even : odd;
    for (double x : {-1.0, 0.0, 0.5, 2.0})
      for (double p : {-0.8, 0.0, 0.4, 1.0})
        REQUIRE(form.value(pt2(x, p)) ==
                Catch::Approx(fock::wigner_displaced_parity(st, pt2(x, p))).margin(1e-8));
  }

  REQUIRE_THROWS_AS(cat_wigner(-1, Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("mixture wigner") {
  // lambda |0><0| + (1-lambda) |1><1| at lambda = 1/2 vanishes at the origin.
  WignerForm mix = mixture_wigner({0.5, 0.5}, {fock_wigner(0), fock_wigner(1)});
  REQUIRE(mix.value(Vec::Zero(2)) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(mix.integral() == Catch::Approx(1.0).margin(1e-10));

  // Coherent +/- mixture with ||alpha|| = 4: W(0) = e^{-8} / (2 pi).
  Vec alpha = pt2(4.0, 0.0);
  WignerForm cohmix = mixture_wigner(
      {0.5, 0.5}, {gaussian_wigner(GaussianState::coherent(alpha)),
                   gaussian_wigner(GaussianState::coherent(-alpha))});
  REQUIRE(cohmix.value(Vec::Zero(2)) == Catch::Approx(std::exp(-8.0) / (2 * kPi)).margin(1e-16));

  WignerForm first = mixture_wigner({1.0, 0.0}, {fock_wigner(1), fock_wigner(0)});
  REQUIRE(first.value(pt2(0.3, -0.2)) ==
          Catch::Approx(fock_wigner(1).value(pt2(0.3, -0.2))).margin(1e-14));

  REQUIRE_THROWS_AS(mixture_wigner({0.7, 0.7}, {fock_wigner(0), fock_wigner(1)}),
                    std::invalid_argument);
}

TEST_CASE("gkp wigner") {
  // delta -> large collapses onto the k = 0 squeezed vacuum.
  WignerForm g0 = gkp_wigner(0, 2.0, 5.0, 3);
  Mat Vs(2, 2);
  Vs << 0.5, 0, 0, 2.0;
  WignerForm sq = gaussian_wigner(GaussianState(Vec::Zero(2), Vs));
  REQUIRE(overlap(g0, sq) > 0.99);

  // s = 2, delta = 0.3: normalized grid with sign changes.
  WignerForm g = gkp_wigner(0, 2.0, 0.3, 3);
  REQUIRE(g.integral() == Catch::Approx(1.0).margin(1e-10));
  double minval = 0.0, maxval = 0.0;
  for (double x = -4.0; x <= 4.0; x += 0.25)
    for (double p = -4.0; p <= 4.0; p += 0.25) {
      double v = g.value(pt2(x, p));
      minval = std::min(minval, v);
      maxval = std::max(maxval, v);
    }
  REQUIRE(minval < 0.0);
  REQUIRE(maxval > 0.0);

  REQUIRE_THROWS_AS(gkp_wigner(0, 0.5, 0.3, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(gkp_wigner(2, 2.0, 0.3, 3), std::invalid_argument);
}

TEST_CASE("gkp pointwise against oracle") {
  // Truncated-Fock reconstruction of the same finite superposition.
  const int d = 70;
  fock::Space sp{d, 1};
  double s = 2.0, delta = 0.3;
  int krange = 2;
  CVec acc = CVec::Zero(d);
  CVec vac = CVec::Zero(d);
  vac[0] = 1.0;
  CVec sqvac = fock::squeezer(d, 1.0 / s) * vac;  // x-variance 1/s
  for (int k = -krange; k <= krange; ++k) {
    double w = std::exp(-2.0 * kPi * (k * delta) * (k * delta));
    acc += w * (fock::displacement(d, 2.0 * k * std::sqrt(kPi), 0.0) * sqvac);
  }
  auto st = fock::pure_state(sp, acc);
  WignerForm g = gkp_wigner(0, s, delta, krange);
  for (double x : {-1.7, 0.0, 0.9})
    for (double p : {-0.6, 0.0, 1.3})
      REQUIRE(g.value(pt2(x, p)) ==
              Catch::Approx(fock::wigner_displaced_parity(st, pt2(x, p), 1e-5)).margin(1e-6));
}

TEST_CASE("overlap") {
  REQUIRE(overlap(vacuum_wigner(1), vacuum_wigner(1)) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(overlap(fock_wigner(1), vacuum_wigner(1)) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(overlap(fock_wigner(1), fock_wigner(1)) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(overlap(fock_wigner(2), fock_wigner(2)) == Catch::Approx(1.0).margin(1e-12));
  // Purity of thermal state nu: 1/nu.
  WignerForm th = gaussian_wigner(GaussianState::thermal(3.0));
  REQUIRE(overlap(th, th) == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("q function") {
  REQUIRE(q_function(vacuum_wigner(1), Vec::Zero(2)) ==
          Catch::Approx(1.0 / (4 * kPi)).margin(1e-14));
  REQUIRE(q_function(fock_wigner(1), Vec::Zero(2)) == Catch::Approx(0.0).margin(1e-14));

  // Q >= 0 for random two-mode Gaussian states and for Wigner-negative forms.
  Mat S = random_symplectic2(2);
  GaussianState st(Vec::Zero(4), S.transpose() * S);
  WignerForm w = gaussian_wigner(st);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    Vec a(4);
    for (int k = 0; k < 4; ++k) a[k] = u(rng);
    REQUIRE(q_function(w, a) >= -1e-12);
  }
  WignerForm f3 = fock_wigner(3);
  for (int i = 0; i < 200; ++i) {
    Vec a = pt2(u(rng), u(rng));
    REQUIRE(q_function(f3, a) >= -1e-12);
  }
}

TEST_CASE("marginals") {
  // x-marginal of the vacuum: 1D Gaussian with unit variance.
  WignerForm vac = vacuum_wigner(1);
  WignerForm mx = vac.marginal({0});
  Vec x1(1);
  x1 << 0.0;
  REQUIRE(mx.value(x1) == Catch::Approx(1.0 / std::sqrt(2 * kPi)).margin(1e-12));
  x1 << 1.0;
  REQUIRE(mx.value(x1) == Catch::Approx(std::exp(-0.5) / std::sqrt(2 * kPi)).margin(1e-12));

  // Product state marginal factors.
  WignerForm prod = WignerForm::tensor(fock_wigner(1), vacuum_wigner(1));
  WignerForm red = prod.marginal_modes({0});
  for (double x : {-1.0, 0.0, 0.8})
    REQUIRE(red.value(pt2(x, 0.2)) == Catch::Approx(fock_wigner(1).value(pt2(x, 0.2))).margin(1e-12));

  REQUIRE_THROWS_AS(vac.marginal({}), std::invalid_argument);
}

TEST_CASE("HOM marginal against oracle partial trace") {
  // HOM state from the beamsplitter substitution on |1,1>.
  std::vector<ModeVector> basis = {ModeVector(Vec::Unit(4, 0)), ModeVector(Vec::Unit(4, 2))};
  WignerForm w11 = multimode_fock_wigner({1, 1}, basis);
  Mat S = fock::gate_symplectic(2, fock::Gate::beamsplitter(0, 1, kPi / 4));
  WignerForm hom = w11.substituted(S, Vec::Zero(4));
  REQUIRE(hom.integral() == Catch::Approx(1.0).margin(1e-10));

  fock::Space sp{30, 2};
  CVec psi = (fock::fock_vector(sp, {2, 0}) - fock::fock_vector(sp, {0, 2})) / std::sqrt(2.0);
  auto red_oracle = fock::partial_trace_keep_first(fock::pure_state(sp, psi));
  WignerForm red = hom.marginal_modes({0});
  for (double x : {-1.5, -0.5, 0.0, 1.0})
    for (double p : {-1.0, 0.0, 0.5})
      REQUIRE(red.value(pt2(x, p)) ==
              Catch::Approx(fock::wigner_displaced_parity(red_oracle, pt2(x, p))).margin(1e-8));
}

TEST_CASE("negativity volume of Fock states") {
  REQUIRE(negativity_volume(vacuum_wigner(1), 1e-9) == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(negativity_volume(gaussian_wigner(GaussianState::squeezed(3.0)), 1e-9) ==
          Catch::Approx(0.0).margin(1e-9));

  // Frozen radial-oracle values; the first is also 4 e^{-1/2} - 1 exactly.
  REQUIRE(negativity_volume(fock_wigner(1), 1e-7) ==
          Catch::Approx(4.0 * std::exp(-0.5) - 2.0).margin(1e-6));
  REQUIRE(negativity_volume(fock_wigner(1), 1e-6) == Catch::Approx(0.42612).margin(1e-4));
  REQUIRE(negativity_volume(fock_wigner(2), 1e-6) == Catch::Approx(0.72899).margin(1e-4));
  REQUIRE(negativity_volume(fock_wigner(3), 1e-6) == Catch::Approx(0.97667).margin(1e-4));

  REQUIRE(log_negativity(fock_wigner(1), 1e-6) == Catch::Approx(0.354959).margin(1e-4));
  REQUIRE(log_negativity(fock_wigner(2), 1e-6) == Catch::Approx(0.547537).margin(1e-4));
  REQUIRE(log_negativity(fock_wigner(3), 1e-6) == Catch::Approx(0.681415).margin(1e-4));
}

TEST_CASE("negativity invariance under displacement and symplectic substitution") {
  const double n1 = negativity_volume(fock_wigner(1), 1e-6);
  for (int trial = 0; trial < 20; ++trial) {
    Mat S = random_symplectic2(1, 1.6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec shift = pt2(u(rng), u(rng));
    WignerForm moved = fock_wigner(1).substituted(S, shift);
    REQUIRE(negativity_volume(moved, 1e-5) == Catch::Approx(n1).margin(5e-5));
  }
}

TEST_CASE("state forms integrate to one and have bounded self-overlap") {
  std::vector<WignerForm> states = {
      vacuum_wigner(1),
      fock_wigner(3),
      cat_wigner(+1, pt2(3.0, 1.0)),
      gkp_wigner(1, 2.0, 0.4, 3),
      mixture_wigner({0.3, 0.7}, {fock_wigner(0), fock_wigner(2)}),
  };
  for (const auto& w : states) {
    REQUIRE(w.integral() == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(overlap(w, w) <= 1.0 + 1e-9);
    REQUIRE(std::abs(w.value_complex(pt2(0.37, -0.81)).imag()) < 1e-12);
  }
  // Purity 1 exactly for the pure constructions.
  REQUIRE(overlap(states[2], states[2]) == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(overlap(states[3], states[3]) == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(overlap(states[4], states[4]) < 1.0 - 1e-3);
}
