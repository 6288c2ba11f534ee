#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cavdd/core.hpp"
#include "cavdd/interaction_table.hpp"

using namespace cavdd;

namespace {

Dipole three_level() {
  const Vec3 z{};
  return Dipole({0.1, 0.2, 0.3}, {0.0, 5.0, 7.5}, {{z, ex, ey}, {ex, ez, z}, {ey, z, z}});
}

}  // namespace

TEST(TransitionFrequency, LevelDifferencesOverHbar) {
  const Constants k;
  const Dipole d = Dipole::two_level({}, 5.0, ez);
  EXPECT_DOUBLE_EQ(transition_frequency(d, {1, 0}, k), 5.0);
  EXPECT_DOUBLE_EQ(transition_frequency(d, {0, 0}, k), 0.0);
  EXPECT_DOUBLE_EQ(transition_frequency(d, {0, 1}, k), -5.0);
}

TEST(TransitionFrequency, HbarScalesFrequencies) {
  Constants k;
  k.hbar = 2.0;
  const Dipole d = Dipole::two_level({}, 5.0, ez);
  EXPECT_DOUBLE_EQ(transition_frequency(d, {1, 0}, k), 2.5);
}

TEST(TransitionFrequency, AntisymmetricInLevels) {
  const Constants k;
  const Dipole d = three_level();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      EXPECT_EQ(transition_frequency(d, {a, b}, k), -transition_frequency(d, {b, a}, k));
}

TEST(TransitionFrequency, IndexOutOfRangeThrows) {
  const Constants k;
  const Dipole d = Dipole::two_level({}, 5.0, ez);
  EXPECT_THROW(transition_frequency(d, {2, 0}, k), ValidationError);
  EXPECT_THROW(d.moment(0, 3), ValidationError);
}

TEST(Dipole, FromFrequenciesStoresEnergies) {
  Constants k;
  k.hbar = 0.5;
  const Dipole d = Dipole::from_frequencies({}, {0.0, 4.0}, {{Vec3{}, ex}, {ex, Vec3{}}}, k);
  EXPECT_DOUBLE_EQ(d.energies()[1], 2.0);
  EXPECT_DOUBLE_EQ(transition_frequency(d, {1, 0}, k), 4.0);
}

TEST(Dipole, RejectsNonHermitianMoments) {
  EXPECT_THROW(Dipole({}, {0.0, 1.0}, {{Vec3{}, ex}, {ey, Vec3{}}}), ValidationError);
}

TEST(Dipole, RejectsBadShapeAndValues) {
  EXPECT_THROW(Dipole({}, {}, {}), ValidationError);
  EXPECT_THROW(Dipole({}, {0.0, 1.0}, {{Vec3{}}}), ValidationError);
  EXPECT_THROW(Dipole({}, {1.0, 0.0}, {{Vec3{}, ex}, {ex, Vec3{}}}), ValidationError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Dipole::permanent({nan, 0.0, 0.0}, ez), ValidationError);
  EXPECT_THROW(Dipole::permanent({}, {0.0, nan, 0.0}), ValidationError);
  EXPECT_THROW(Dipole({}, {0.0, nan}, {{Vec3{}, ex}, {ex, Vec3{}}}), ValidationError);
}

TEST(Dipole, MovedToKeepsLevelData) {
  const Dipole d = three_level();
  const Dipole m = d.moved_to({0.9, 0.9, 0.9});
  EXPECT_EQ(m.energies(), d.energies());
  EXPECT_EQ(m.moments(), d.moments());
  EXPECT_EQ(m.position(), (Vec3{0.9, 0.9, 0.9}));
}

TEST(Constants, Validation) {
  Constants k;
  EXPECT_NO_THROW(k.validate());
  k.c = 0.0;
  EXPECT_THROW(k.validate(), ValidationError);
  k.c = 1.0;
  k.mu0 = -1.0;
  EXPECT_THROW(k.validate(), ValidationError);
  k.mu0 = 1.0;
  k.hbar = std::numeric_limits<double>::infinity();
  EXPECT_THROW(k.validate(), ValidationError);
}

TEST(Geometry, ContainsAndWallDistance) {
  const CavityGeometry g(1.0, 2.0, 3.0);
  EXPECT_TRUE(g.contains({0.0, 0.0, 0.0}));
  EXPECT_TRUE(g.contains({1.0, 2.0, 3.0}));
  EXPECT_FALSE(g.contains({1.0 + 1e-6, 1.0, 1.0}));
  EXPECT_FALSE(g.contains({0.5, -1e-6, 1.0}));
  EXPECT_NEAR(g.wall_distance({0.5, 1.0, 2.9}), 0.1, 1e-15);
  EXPECT_THROW(g.require_inside({0.5, 2.5, 1.0}, "p"), OutsideGeometry);
  EXPECT_THROW(CavityGeometry(1.0, 0.0, 1.0), ValidationError);
}

TEST(EwaldResolve, DefaultsForUnitCube) {
  const CavityGeometry g = CavityGeometry::cube(1.0);
  const EwaldParams p = resolve({}, g, 20.0);
  EXPECT_DOUBLE_EQ(p.kc, std::sqrt(pi) / 2.0);
  EXPECT_DOUBLE_EQ(p.resonance_tol, 1e-6 * pi);
  // First neglected shell is screened below the target.
  EXPECT_LT(std::erfc(p.kc * 2.0 * p.image_range), p.target_tail);
  EXPECT_GE(std::erfc(p.kc * 2.0 * (p.image_range - 1)), p.target_tail);
  const double dk = p.mode_cutoff - 20.0;
  EXPECT_LE(std::exp(-dk * dk / (4.0 * p.kc * p.kc)), p.target_tail);
}

TEST(EwaldResolve, ExplicitOverridesWin) {
  const CavityGeometry g = CavityGeometry::cube(2.0);
  EwaldSettings s;
  s.kc = 3.0;
  s.image_range = 1;
  s.mode_cutoff = 50.0;
  const EwaldParams p = resolve(s, g, 1.0);
  EXPECT_EQ(p.kc, 3.0);
  EXPECT_EQ(p.image_range, 1);
  EXPECT_EQ(p.mode_cutoff, 50.0);
  s.mode_cutoff = 0.5;
  EXPECT_THROW(resolve(s, g, 1.0), ValidationError);
}

TEST(TermClass, Classification) {
  EXPECT_EQ(classify({0, 0}, 0.0, {1, 1}, 0.0), TermClass::Permanent);
  EXPECT_EQ(classify({0, 0}, 0.0, {1, 0}, 3.0), TermClass::PermanentTransition);
  EXPECT_EQ(classify({1, 0}, 3.0, {0, 1}, -3.0), TermClass::Resonant);
  EXPECT_EQ(classify({1, 0}, 3.0, {0, 1}, -4.0), TermClass::NonResonant);
  EXPECT_EQ(classify({1, 0}, 3.0, {1, 0}, 3.0), TermClass::CounterRotating);
  EXPECT_EQ(classify({0, 1}, -3.0, {0, 1}, -2.0), TermClass::CounterRotating);
}

TEST(Vec3, Algebra) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    const Vec3 a{n(rng), n(rng), n(rng)};
    const Vec3 b{n(rng), n(rng), n(rng)};
    EXPECT_NEAR(dot(cross(a, b), a), 0.0, 1e-12);
    EXPECT_NEAR(dot(a + b, a - b), dot(a, a) - dot(b, b), 1e-12);
  }
  EXPECT_EQ(cross(ex, ey), ez);
}
