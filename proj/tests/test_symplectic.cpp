#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cvng/symplectic.hpp"

using namespace cvng;

namespace {

std::mt19937 rng(12345);

Mat random_orthosymplectic(int m) {
  // Haar-ish unitary from QR of a complex Gaussian matrix, mapped to its
  // real symplectic representation.
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

Mat random_symplectic(int m, double smax = 3.0) {
  std::uniform_real_distribution<double> u(1.0, smax);
  Vec d(2 * m);
  for (int j = 0; j < m; ++j) {
    double s = u(rng);
    d[2 * j] = std::sqrt(s);
    d[2 * j + 1] = 1.0 / std::sqrt(s);
  }
  return random_orthosymplectic(m) * Mat(d.asDiagonal()) * random_orthosymplectic(m);
}

Mat random_physical_covariance(int m, double noise = 0.5) {
  std::uniform_real_distribution<double> u(0.0, noise);
  Mat S = random_symplectic(m);
  Mat V = S.transpose() * S;
  Vec extra(2 * m);
  for (int i = 0; i < 2 * m; ++i) extra[i] = u(rng);
  V += Mat(extra.asDiagonal());
  return 0.5 * (V + V.transpose());
}

}  // namespace

TEST_CASE("omega basics") {
  Mat O1 = omega(1);
  Mat expected(2, 2);
  expected << 0, -1, 1, 0;
  REQUIRE((O1 - expected).norm() == 0.0);

  Mat O2 = omega(2);
  REQUIRE(O2.rows() == 4);
  REQUIRE((O2.topLeftCorner(2, 2) - expected).norm() == 0.0);
  REQUIRE((O2.bottomRightCorner(2, 2) - expected).norm() == 0.0);
  REQUIRE(O2.topRightCorner(2, 2).norm() == 0.0);

  Mat O3 = omega(3);
  REQUIRE((O3 * O3 + Mat::Identity(6, 6)).norm() == 0.0);
  REQUIRE((O3.transpose() + O3).norm() == 0.0);

  REQUIRE_THROWS_AS(omega(0), std::invalid_argument);
}

TEST_CASE("is_physical") {
  REQUIRE(is_physical(Mat::Identity(2, 2)));
  Mat below = 0.5 * Mat::Identity(2, 2);
  REQUIRE_FALSE(is_physical(below));
  Mat squeezed(2, 2);
  squeezed << 2.0, 0.0, 0.0, 0.5;
  REQUIRE(is_physical(squeezed));
  Mat nonsym(2, 2);
  nonsym << 1.0, 0.2, -0.2, 1.0;
  REQUIRE_THROWS_AS(is_physical(nonsym), std::invalid_argument);
}

TEST_CASE("williamson thermal and squeezed") {
  {
    Mat V = 3.0 * Mat::Identity(2, 2);
    auto wd = williamson(V);
    REQUIRE(wd.nu.size() == 1);
    REQUIRE(wd.nu[0] == Catch::Approx(3.0).margin(1e-10));
    REQUIRE(symplectic_defect(wd.S) < 1e-9);
    REQUIRE((wd.S.transpose() * wd.S - Mat::Identity(2, 2)).norm() < 1e-8);
  }
  {
    Mat V(2, 2);
    V << 2.0, 0.0, 0.0, 0.5;
    auto wd = williamson(V);
    REQUIRE(wd.nu[0] == Catch::Approx(1.0).margin(1e-10));
    Mat rec = wd.S.transpose() * wd.N() * wd.S;
    REQUIRE((rec - V).norm() < 1e-8);
  }
}

TEST_CASE("williamson round-trip on random physical covariances") {
  for (int m = 1; m <= 4; ++m) {
    for (int trial = 0; trial < 25; ++trial) {
      Mat V = random_physical_covariance(m);
      auto wd = williamson(V);
      REQUIRE(symplectic_defect(wd.S) < 1e-9);
      REQUIRE(wd.nu.minCoeff() >= 1.0 - 1e-9);
      for (int j = 0; j + 1 < wd.nu.size(); ++j) REQUIRE(wd.nu[j] >= wd.nu[j + 1] - 1e-12);
      Mat rec = wd.S.transpose() * wd.N() * wd.S;
      REQUIRE((rec - V).norm() < 1e-8);
    }
  }
  REQUIRE_THROWS_AS(williamson(Mat::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("bloch-messiah identity and diagonal") {
  {
    auto bm = bloch_messiah(Mat::Identity(4, 4));
    for (int j = 0; j < bm.s.size(); ++j) REQUIRE(bm.s[j] == Catch::Approx(1.0).margin(1e-10));
    Mat rec = bm.O1 * bm.K() * bm.O2;
    REQUIRE((rec - Mat::Identity(4, 4)).norm() < 1e-8);
  }
  {
    Mat S(2, 2);
    S << std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    auto bm = bloch_messiah(S);
    REQUIRE(bm.s[0] == Catch::Approx(2.0).margin(1e-9));
    REQUIRE((bm.O1 * bm.K() * bm.O2 - S).norm() < 1e-8);
  }
}

TEST_CASE("bloch-messiah round-trip on random symplectics") {
  for (int m = 1; m <= 4; ++m) {
    for (int trial = 0; trial < 25; ++trial) {
      Mat S = random_symplectic(m);
      auto bm = bloch_messiah(S);
      REQUIRE((bm.O1.transpose() * bm.O1 - Mat::Identity(2 * m, 2 * m)).norm() < 1e-9);
      REQUIRE((bm.O2.transpose() * bm.O2 - Mat::Identity(2 * m, 2 * m)).norm() < 1e-9);
      REQUIRE(symplectic_defect(bm.O1) < 1e-9);
      REQUIRE(symplectic_defect(bm.O2) < 1e-9);
      REQUIRE(bm.s.minCoeff() >= 1.0 - 1e-10);
      REQUIRE((bm.O1 * bm.K() * bm.O2 - S).norm() < 1e-8);
    }
  }
  Mat bad = 2.0 * Mat::Identity(4, 4);
  REQUIRE_THROWS_AS(bloch_messiah(bad), std::invalid_argument);
}

TEST_CASE("purity") {
  REQUIRE(purity(GaussianState::vacuum(1)) == Catch::Approx(1.0));
  REQUIRE(purity(GaussianState::thermal(3.0)) == Catch::Approx(1.0 / 3.0));
  REQUIRE(purity(GaussianState::epr(2.5)) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("gaussian entropy") {
  REQUIRE(gaussian_entropy(Mat::Identity(2, 2)) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(gaussian_entropy(3.0 * Mat::Identity(2, 2)) ==
          Catch::Approx(2.0 * std::log(2.0)).margin(1e-12));
  // Additivity over modes: nu = (1, 3).
  Mat V = Mat::Identity(4, 4);
  V(2, 2) = V(3, 3) = 3.0;
  REQUIRE(gaussian_entropy(V) == Catch::Approx(2.0 * std::log(2.0)).margin(1e-10));
  // Invariance under symplectic conjugation.
  for (int trial = 0; trial < 10; ++trial) {
    Mat S = random_symplectic(2);
    Mat W = S.transpose() * V * S;
    W = 0.5 * (W + W.transpose());
    REQUIRE(gaussian_entropy(W) == Catch::Approx(gaussian_entropy(V)).margin(1e-8));
  }
}

TEST_CASE("mean photon number") {
  REQUIRE(mean_photon_number(GaussianState::vacuum(2)) == Catch::Approx(0.0).margin(1e-14));
  Vec xi(2);
  xi << 2.0, 0.0;  // ||xi||^2 = 4
  REQUIRE(mean_photon_number(GaussianState::coherent(xi)) == Catch::Approx(1.0));
  REQUIRE(mean_photon_number(GaussianState::squeezed(2.0)) == Catch::Approx(1.0 / 8.0));

  // Invariant under orthogonal symplectic basis change, not under squeezing.
  GaussianState st = GaussianState::epr(3.0);
  double n0 = mean_photon_number(st);
  for (int trial = 0; trial < 5; ++trial) {
    Mat O = random_orthosymplectic(2);
    GaussianState rot(O * st.xi, O * st.V * O.transpose());
    REQUIRE(mean_photon_number(rot) == Catch::Approx(n0).margin(1e-9));
  }
  Mat K = Mat::Identity(4, 4);
  K(0, 0) = 2.0;
  K(1, 1) = 0.5;
  GaussianState sq(K * st.xi, K * st.V * K.transpose());
  REQUIRE(std::abs(mean_photon_number(sq) - n0) > 1e-3);
}

TEST_CASE("apply_channel") {
  GaussianState vac = GaussianState::vacuum(1);
  auto idch = identity_channel(1);
  auto out = apply_channel(vac, idch);
  REQUIRE((out.V - vac.V).norm() < 1e-14);

  // Uniform loss fixes the vacuum.
  auto loss = loss_channel(0.3, 1);
  auto out2 = apply_channel(vac, loss);
  REQUIRE((out2.V - Mat::Identity(2, 2)).norm() < 1e-14);

  // Frozen from evaluating X V X^T + Vc with eta = 0.5 on diag(4, 1/4).
  Mat V(2, 2);
  V << 4.0, 0.0, 0.0, 0.25;
  GaussianState st(Vec::Zero(2), V);
  auto out3 = apply_channel(st, loss_channel(0.5, 1));
  REQUIRE(out3.V(0, 0) == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(out3.V(1, 1) == Catch::Approx(0.625).margin(1e-12));
  REQUIRE(is_physical(out3.V));

  // Valid channels map physical states to physical states.
  for (int trial = 0; trial < 20; ++trial) {
    Mat Vr = random_physical_covariance(2);
    GaussianState s(Vec::Zero(4), Vr);
    auto ch = loss_channel(0.6, 2);
    REQUIRE(is_physical(apply_channel(s, ch).V));
  }

  GaussianChannel bad{0.5 * Mat::Identity(2, 2), Mat::Zero(2, 2), Vec::Zero(2)};
  REQUIRE_FALSE(channel_is_valid(bad));
  REQUIRE_THROWS_AS(apply_channel(vac, bad), std::invalid_argument);
}

TEST_CASE("mode-selective beamsplitter") {
  ModeVector e1(Vec::Unit(2, 0));
  Mat S0 = mode_selective_beamsplitter(e1, 0.0, 1);
  REQUIRE((S0 - Mat::Identity(4, 4)).norm() < 1e-14);

  Mat Sswap = mode_selective_beamsplitter(e1, kPi / 2.0, 1);
  // Full swap of mode 1 with the auxiliary mode, up to sign.
  REQUIRE(Sswap.topLeftCorner(2, 2).norm() < 1e-12);
  REQUIRE((Sswap.topRightCorner(2, 2) - Mat::Identity(2, 2)).norm() < 1e-12);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vec b(4);
    for (int i = 0; i < 4; ++i) b[i] = u(rng);
    b.normalize();
    Mat S = mode_selective_beamsplitter(ModeVector(b), 0.1, 2);
    REQUIRE(symplectic_defect(S) < 1e-12);
  }
}

TEST_CASE("two-mode squeezer") {
  REQUIRE((two_mode_squeezer(0.0) - Mat::Identity(4, 4)).norm() < 1e-14);
  REQUIRE(symplectic_defect(two_mode_squeezer(1.0)) < 1e-12);

  // Acting on two vacua yields an EPR state with symplectic eigenvalue 1.
  Mat S = two_mode_squeezer(0.7);
  Mat V = S * Mat::Identity(4, 4) * S.transpose();
  auto wd = williamson(V);
  REQUIRE(wd.nu[0] == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(wd.nu[1] == Catch::Approx(1.0).margin(1e-9));

  // Mode-selective version reduces to the plain one on basis modes.
  ModeVector e1(Vec::Unit(2, 0));
  REQUIRE((mode_selective_two_mode_squeezer(e1, 0.7, 1) - S).norm() < 1e-12);
  Vec b(4);
  b << 0.6, 0.0, 0.8, 0.0;
  REQUIRE(symplectic_defect(mode_selective_two_mode_squeezer(ModeVector(b), 0.5, 2)) < 1e-10);
}

TEST_CASE("purity is 1 iff all symplectic eigenvalues are 1") {
  for (int trial = 0; trial < 30; ++trial) {
    Mat V = random_physical_covariance(2, trial % 2 == 0 ? 0.0 : 0.4);
    GaussianState st(Vec::Zero(4), V);
    auto wd = williamson(V);
    bool pure_by_nu = (wd.nu.array() <= 1.0 + 1e-8).all();
    bool pure_by_purity = purity(st) > 1.0 - 1e-6;
    REQUIRE(pure_by_nu == pure_by_purity);
  }
}
