// Coupling of two identical two-level dipoles as the pair is lowered towards
// the floor of a unit cube, for parallel (z-z) and crossed (z-x) moments.
// Prints the cavity value, its image and mode parts, and the free-space
// reference at the same transition frequency.

#include <cstdio>

#include "cavdd/ewald.hpp"

int main() {
  using namespace cavdd;
  const Constants k;
  const CavityGeometry cube = CavityGeometry::cube(1.0);
  const double gap = 20.0;
  const double R = 0.1;

  std::printf("%8s %14s %14s %14s %14s %14s\n", "height", "V_zz", "image", "mode", "V_zx", "V_free_zz");
  for (double d : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5}) {
    const Vec3 r1{0.5, 0.5, d};
    const Vec3 r2 = r1 + Vec3{R, 0.0, 0.0};
    const Dipole a = Dipole::two_level(r1, gap, ez);
    const InteractionTable zz = pair_interaction_cavity(a, Dipole::two_level(r2, gap, ez), cube, k);
    const InteractionTable zx = pair_interaction_cavity(a, Dipole::two_level(r2, gap, ex), cube, k);
    // Dipole 1 de-excites while dipole 2 is excited.
    const InteractionTerm* t = zz.find(0, 1, 1, 0);
    const InteractionTerm* s = zx.find(0, 1, 1, 0);
    std::printf("%8.3f %14.6e %14.6e %14.6e %14.6e %14.6e\n", d, t->v21, t->v21_image, t->v21_mode, s->v21,
                v_retarded(ez, ez, r1, r2, gap, k));
  }
}
