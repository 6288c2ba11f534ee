#pragma once

// Built-in scenarios. All use a unit cube, natural units and two-level
// dipoles with gap 20 (so w/c = 20/L), transition moments only.
//
//   fig2a  r1 = (0.5, 0.5, 0.5) L, r2 = r1 + R e_x, m1 = m2 = z, R in (0, L/2), V_{2<-1}
//   fig2b  as fig2a, reporting V_{1<-2}
//   fig2c  as fig2a with r1 = (0.5, 0.5, 0.01) L
//   fig2d  as fig2a with m1 = m2 = x
//   fig2e  as fig2d with r1 = (0.5, 0.5, 0.01) L
//   fig2f  r1 = (0.5, 0.5, d) L, r2 = r1 + 0.1 L e_x, m1 = m2 = z, d in (0, L)
//   fig2g  as fig2f with m2 = x

#include <string>
#include <vector>

#include "cavdd/cli/config.hpp"

namespace cavdd::cli {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2g"};
  return names;
}

namespace detail {

inline DipoleSpec two_level(Vec3 position, Vec3 transition) {
  DipoleSpec d;
  d.position = position;
  d.levels = {0.0, 20.0};
  d.moments = {{Vec3{}, transition}, {transition, Vec3{}}};
  return d;
}

inline RunConfig separation_preset(Vec3 r1, Vec3 m1, Vec3 m2) {
  RunConfig c;
  c.geometry = CavityGeometry::cube(1.0);
  c.dipoles = {two_level(r1, m1), two_level(r1 + Vec3{0.1, 0.0, 0.0}, m2)};
  c.sweep = SweepSpec{SweepVariable::Separation, 0, 0.005, 0.495, 99};
  c.output.skip_zero_moments = true;
  return c;
}

inline RunConfig offset_preset(Vec3 m1, Vec3 m2) {
  RunConfig c;
  c.geometry = CavityGeometry::cube(1.0);
  const Vec3 r1{0.5, 0.5, 0.5};
  c.dipoles = {two_level(r1, m1), two_level(r1 + Vec3{0.1, 0.0, 0.0}, m2)};
  c.sweep = SweepSpec{SweepVariable::Offset, 2, 0.005, 0.995, 199};
  c.output.skip_zero_moments = true;
  return c;
}

inline std::vector<std::string> direction_columns(bool forward) {
  if (forward)
    return {"sweep_value", "u", "v", "a", "b", "class", "status21", "omega21", "v21",
            "v21_image",   "v21_mode", "tail21", "v0_free", "vw21_free", "wall_warning"};
  return {"sweep_value", "u", "v", "a", "b", "class", "status12", "omega12", "v12",
          "v12_image",   "v12_mode", "tail12", "v0_free", "vw12_free", "wall_warning"};
}

}  // namespace detail

/// Throws ConfigError for an unknown name.
inline RunConfig preset(const std::string& name) {
  using namespace detail;
  const Vec3 centre{0.5, 0.5, 0.5};
  const Vec3 bottom{0.5, 0.5, 0.01};
  RunConfig c;
  if (name == "fig2a") {
    c = separation_preset(centre, ez, ez);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2a: L = 1 cube, r1 = (0.5, 0.5, 0.5), r2 = r1 + R e_x, m1 = m2 = z, w/c = 20/L, "
                    "R in (0, L/2); field of dipole 1 at dipole 2";
  } else if (name == "fig2b") {
    c = separation_preset(centre, ez, ez);
    c.output.columns = direction_columns(false);
    c.description = "preset fig2b: as fig2a; field of dipole 2 at dipole 1";
  } else if (name == "fig2c") {
    c = separation_preset(bottom, ez, ez);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2c: as fig2a with r1 = (0.5, 0.5, 0.01) L near the bottom wall";
  } else if (name == "fig2d") {
    c = separation_preset(centre, ex, ex);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2d: as fig2a with m1 = m2 = x";
  } else if (name == "fig2e") {
    c = separation_preset(bottom, ex, ex);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2e: m1 = m2 = x, r1 = (0.5, 0.5, 0.01) L, r2 = r1 + R e_x, w/c = 20/L";
  } else if (name == "fig2f") {
    c = offset_preset(ez, ez);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2f: r1 = (0.5, 0.5, d) L, r2 = r1 + 0.1 L e_x, m1 = m2 = z, w/c = 20/L, d in (0, L)";
  } else if (name == "fig2g") {
    c = offset_preset(ez, ex);
    c.output.columns = direction_columns(true);
    c.description = "preset fig2g: as fig2f with m2 = x";
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset \"" + name + "\" (known: " + known + ")");
  }
  validate(c);
  return c;
}

}  // namespace cavdd::cli
