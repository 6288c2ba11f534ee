#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cavdd/effective_coupling.hpp"

using namespace cavdd;

namespace {

// Exact eigenvalues of H0 + V restricted to {|e1 g2 0>, |g1 e2 0>, |g1 g2 1>}.
Eigen::Vector3d single_excitation_spectrum(const SingleModeSystem& s) {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 0) = s.omega1;
  h(1, 1) = s.omega2;
  h(2, 2) = s.nu;
  h(0, 2) = s.g1;
  h(1, 2) = s.g2;
  h(2, 0) = std::conj(s.g1);
  h(2, 1) = std::conj(s.g2);
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd>(h).eigenvalues();
}

// The two dipole-like exact levels: drop the one closest to the bare mode.
std::array<double, 2> dipole_levels(const SingleModeSystem& s) {
  const Eigen::Vector3d e = single_excitation_spectrum(s);
  int photon = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(e[i] - s.nu) < std::abs(e[photon] - s.nu)) photon = i;
  std::array<double, 2> out{};
  int n = 0;
  for (int i = 0; i < 3; ++i)
    if (i != photon) out[n++] = e[i];
  return out;
}

SingleModeSystem random_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.5, 5.0), g(-0.3, 0.3);
  SingleModeSystem s;
  do {
    s.omega1 = w(rng);
    s.omega2 = w(rng);
    s.nu = w(rng);
  } while (std::abs(s.omega1 - s.nu) < 0.05 || std::abs(s.omega2 - s.nu) < 0.05);
  s.g1 = {g(rng), g(rng)};
  s.g2 = {g(rng), g(rng)};
  return s;
}

}  // namespace

TEST(FnTransform, WorkedExample) {
  SingleModeSystem s{2.0, 3.0, 1.0, 0.1, 0.1};
  const FnResult r = fn_transform(s);
  EXPECT_NEAR(r.beta.real(), 0.0075, 1e-16);
  EXPECT_EQ(r.beta.imag(), 0.0);
  EXPECT_NEAR(r.xi1, 0.01, 1e-17);
  EXPECT_NEAR(r.xi2, 0.005, 1e-17);
  EXPECT_NEAR(r.A.real(), -0.1, 1e-17);
  EXPECT_NEAR(r.B.real(), -0.05, 1e-17);
}

TEST(FnTransform, DecoupledDipole) {
  SingleModeSystem s{2.0, 3.0, 1.0, {0.2, 0.1}, 0.0};
  const FnResult r = fn_transform(s);
  EXPECT_EQ(r.beta, complex(0.0, 0.0));
  EXPECT_EQ(r.xi2, 0.0);
  EXPECT_DOUBLE_EQ(r.xi1, 0.05);
}

TEST(FnTransform, EqualDetunings) {
  SingleModeSystem s{2.5, 2.5, 1.5, 0.07, -0.04};
  EXPECT_DOUBLE_EQ(fn_transform(s).beta.real(), 0.07 * -0.04 / 1.0);
}

TEST(FnTransform, ExchangeInvariance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const SingleModeSystem s = random_system(rng);
    SingleModeSystem t{s.omega2, s.omega1, s.nu, s.g2, s.g1};
    const FnResult a = fn_transform(s), b = fn_transform(t);
    EXPECT_NEAR(std::abs(a.beta - b.beta), 0.0, 1e-15);
    EXPECT_EQ(a.xi1, b.xi2);
    EXPECT_EQ(a.xi2, b.xi1);
  }
}

TEST(FnTransform, ShiftSignFollowsDetuning) {
  EXPECT_GT(fn_transform({2.0, 3.0, 1.0, 0.1, 0.1}).xi1, 0.0);
  EXPECT_LT(fn_transform({2.0, 3.0, 4.0, 0.1, 0.1}).xi1, 0.0);
}

TEST(FnTransform, GuardAndValidation) {
  EXPECT_THROW(fn_transform({1.0, 3.0, 1.0, 0.1, 0.1}), ResonanceGuard);
  SingleModeSystem s{1.0, 3.0, 1.0 + 1e-3, 0.1, 0.1};
  EXPECT_NO_THROW(fn_transform(s));
  s.detune_guard = 1e-2;
  EXPECT_THROW(fn_transform(s), ResonanceGuard);
  EXPECT_THROW(fn_transform({NAN, 3.0, 1.0, 0.1, 0.1}), ValidationError);
}

TEST(FirstOrder, GeneratorCancelsCoupling) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const SingleModeSystem s = random_system(rng);
    EXPECT_LE(first_order_residual(s), 1e-14);
  }
}

TEST(FirstOrder, PerturbedGeneratorLeavesResidual) {
  SingleModeSystem s{2.0, 3.0, 1.0, 0.1, 0.1};
  const FnResult f = fn_transform(s);
  // d1 = 1, so a 1% change in A leaves 1% of g1.
  EXPECT_NEAR(first_order_residual(s, f.A * 1.01, f.B), 0.01 * std::abs(s.g1), 1e-15);
}

// At the crossing w1 = w2 the exact avoided-crossing gap is 2|beta| when the
// level shifts agree (g1 = g2).
TEST(ExactDiagonalization, CrossingGapIsTwiceBeta) {
  for (double delta : {-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0})
    for (double g : {0.003, 0.01, 0.03}) {
      SingleModeSystem s{3.0 + delta, 3.0 + delta, 3.0, g, g};
      const auto lv = dipole_levels(s);
      const double gap = std::abs(lv[1] - lv[0]);
      const double beta = std::abs(fn_transform(s).beta);
      EXPECT_LE(std::abs(0.5 * gap - beta), 5.0 * g * g * g / (delta * delta)) << delta << " " << g;
    }
}

// Away from the crossing the exact pair of levels follows the effective 2x2
// Hamiltonian diag(w_a + xi_a) with off-diagonal beta.
TEST(ExactDiagonalization, EffectiveHamiltonianOnGrid) {
  for (double d1 : {-3.0, -1.0, -0.4, 0.4, 1.0, 3.0})
    for (double d2 : {-2.0, -0.7, 0.5, 1.5})
      for (double g : {0.004, 0.02}) {
        SingleModeSystem s{5.0 + d1, 5.0 + d2, 5.0, g, 0.6 * g};
        const FnResult f = fn_transform(s);
        Eigen::Matrix2cd h;
        h << s.omega1 + f.xi1, f.beta, std::conj(f.beta), s.omega2 + f.xi2;
        const Eigen::Vector2d model = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(h).eigenvalues();
        const auto exact = dipole_levels(s);
        const double dmin = std::min(std::abs(d1), std::abs(d2));
        const double tol = 5.0 * g * g * g / (dmin * dmin);
        EXPECT_LE(std::abs(exact[0] - model[0]), tol) << d1 << " " << d2 << " " << g;
        EXPECT_LE(std::abs(exact[1] - model[1]), tol) << d1 << " " << d2 << " " << g;
      }
}

TEST(ZetaConvention, MatchesPoleForm) {
  const Constants k;
  const double z1 = 1.7, z2 = -0.6, nu = 9.0, w = 9.3;
  const double g1 = coupling_from_zeta(z1, nu, k), g2 = coupling_from_zeta(z2, nu, k);
  EXPECT_NEAR(g1 * g2 / (w - nu), k.c * k.c * z1 * z2 / (2.0 * nu * (w - nu)), 1e-14);
  EXPECT_THROW(coupling_from_zeta(1.0, 0.0, k), ValidationError);
}
