#pragma once

// Vector-potential eigenmodes of a perfectly conducting rectangular box and
// the direct (slowly convergent) mode-expansion sums built from them.
//
// Component sigma of mode (m, n, p) is cosine along sigma and sine along the
// two other axes, so it vanishes on the sidewalls parallel to sigma and has
// zero normal derivative on the two end caps perpendicular to sigma.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cavdd/core.hpp"

namespace cavdd {

struct ModeIndex {
  int m = 0;
  int n = 0;
  int p = 0;

  int operator[](std::size_t i) const { return i == 0 ? m : (i == 1 ? n : p); }

  /// True when two or more indices vanish; every component is then zero.
  bool degenerate() const { return (m == 0) + (n == 0) + (p == 0) >= 2; }

  Vec3 wavevector(const CavityGeometry& g) const { return {m * pi / g.Lx, n * pi / g.Ly, p * pi / g.Lz}; }
  double k(const CavityGeometry& g) const { return norm(wavevector(g)); }

  std::string str() const {
    return "(" + std::to_string(m) + "," + std::to_string(n) + "," + std::to_string(p) + ")";
  }

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

namespace detail {

// Normalization sqrt(4 (2 - delta_{j0}) / V) of the component that is a cosine
// along the axis whose index is j.
inline double mode_amplitude(int j, double volume) { return std::sqrt(4.0 * (j == 0 ? 1.0 : 2.0) / volume); }

struct AxisTrig {
  std::array<double, 3> c;
  std::array<double, 3> s;
};

inline AxisTrig axis_trig(const ModeIndex& idx, const Vec3& r, const CavityGeometry& g) {
  AxisTrig t;
  const Vec3 kv = idx.wavevector(g);
  for (std::size_t i = 0; i < 3; ++i) {
    t.c[i] = std::cos(kv[i] * r[i]);
    t.s[i] = std::sin(kv[i] * r[i]);
  }
  return t;
}

inline Vec3 mode_value(const std::array<double, 3>& amp, const AxisTrig& t) {
  return {amp[0] * t.c[0] * t.s[1] * t.s[2], amp[1] * t.s[0] * t.c[1] * t.s[2], amp[2] * t.s[0] * t.s[1] * t.c[2]};
}

inline Vec3 mode_curl_value(const std::array<double, 3>& amp, const Vec3& kv, const AxisTrig& t) {
  return {t.s[0] * t.c[1] * t.c[2] * (amp[2] * kv.y - amp[1] * kv.z),
          t.c[0] * t.s[1] * t.c[2] * (amp[0] * kv.z - amp[2] * kv.x),
          t.c[0] * t.c[1] * t.s[2] * (amp[1] * kv.x - amp[0] * kv.y)};
}

// Curls of the single-component fields A^s e_s, s = x, y, z. They sum to the
// curl of the vector mode, but the diagonal Green tensor pairs only equal s.
inline std::array<Vec3, 3> component_curls_value(const std::array<double, 3>& amp, const Vec3& kv,
                                                 const AxisTrig& t) {
  const double dzAx = amp[0] * kv.z * t.c[0] * t.s[1] * t.c[2];
  const double dyAx = amp[0] * kv.y * t.c[0] * t.c[1] * t.s[2];
  const double dzAy = amp[1] * kv.z * t.s[0] * t.c[1] * t.c[2];
  const double dxAy = amp[1] * kv.x * t.c[0] * t.c[1] * t.s[2];
  const double dyAz = amp[2] * kv.y * t.s[0] * t.c[1] * t.c[2];
  const double dxAz = amp[2] * kv.x * t.c[0] * t.s[1] * t.c[2];
  return {Vec3{0.0, dzAx, -dyAx}, Vec3{-dzAy, 0.0, dxAy}, Vec3{dyAz, -dxAz, 0.0}};
}

inline std::array<double, 3> amplitudes(const ModeIndex& idx, const CavityGeometry& g) {
  const double V = g.volume();
  return {mode_amplitude(idx.m, V), mode_amplitude(idx.n, V), mode_amplitude(idx.p, V)};
}

}  // namespace detail

/// (A^x, A^y, A^z) of mode idx at r.
inline Vec3 mode_function(const ModeIndex& idx, const Vec3& r, const CavityGeometry& g) {
  g.require_inside(r, "mode evaluation point");
  return detail::mode_value(detail::amplitudes(idx, g), detail::axis_trig(idx, r, g));
}

/// Analytic curl of mode_function.
inline Vec3 mode_curl(const ModeIndex& idx, const Vec3& r, const CavityGeometry& g) {
  g.require_inside(r, "mode evaluation point");
  return detail::mode_curl_value(detail::amplitudes(idx, g), idx.wavevector(g), detail::axis_trig(idx, r, g));
}

/// Curl of the single-component field A^s_k e_s (s = 0, 1, 2 for x, y, z).
inline Vec3 component_curl(const ModeIndex& idx, std::size_t component, const Vec3& r, const CavityGeometry& g) {
  g.require_inside(r, "mode evaluation point");
  if (component > 2) throw ValidationError("component index must be 0, 1 or 2");
  return detail::component_curls_value(detail::amplitudes(idx, g), idx.wavevector(g),
                                       detail::axis_trig(idx, r, g))[component];
}

/// Coupling sqrt(mu0) m^{ab} . curl A_k(r_dipole) to the full vector mode.
inline double zeta(const Dipole& d, LevelPair pair, const ModeIndex& idx, const CavityGeometry& g,
                   const Constants& k) {
  g.require_inside(d.position(), "dipole position");
  return std::sqrt(k.mu0) * dot(d.moment(pair), mode_curl(idx, d.position(), g));
}

/// Coupling to one polarization component, sqrt(mu0) m^{ab} . curl(A^s_k e_s).
/// The three component couplings of a mode add up to zeta().
inline double zeta_component(const Dipole& d, LevelPair pair, const ModeIndex& idx, std::size_t component,
                             const CavityGeometry& g, const Constants& k) {
  g.require_inside(d.position(), "dipole position");
  return std::sqrt(k.mu0) * dot(d.moment(pair), component_curl(idx, component, d.position(), g));
}

// ---------------------------------------------------------------------------
// Mode tables
// ---------------------------------------------------------------------------

struct Mode {
  ModeIndex idx;
  double k = 0.0;
};

/// All non-degenerate modes with k_mnp <= k_max, ordered by k_mnp and then
/// lexicographically by (m, n, p).
class ModeTable {
 public:
  ModeTable(const CavityGeometry& g, double k_max) : geometry_(g), k_max_(k_max) {
    g.validate();
    if (!(k_max >= 0.0) || !std::isfinite(k_max)) throw ValidationError("mode cutoff must be finite and >= 0");
    const int M = static_cast<int>(std::floor(k_max * g.Lx / pi));
    const int N = static_cast<int>(std::floor(k_max * g.Ly / pi));
    const int P = static_cast<int>(std::floor(k_max * g.Lz / pi));
    for (int m = 0; m <= M; ++m)
      for (int n = 0; n <= N; ++n)
        for (int p = 0; p <= P; ++p) {
          ModeIndex idx{m, n, p};
          if (idx.degenerate()) continue;
          const double k = idx.k(g);
          if (k <= k_max) modes_.push_back({idx, k});
        }
    std::sort(modes_.begin(), modes_.end(), [](const Mode& a, const Mode& b) {
      return a.k != b.k ? a.k < b.k : a.idx < b.idx;
    });
    max_index_ = {M, N, P};
  }

  const CavityGeometry& geometry() const { return geometry_; }
  double cutoff() const { return k_max_; }
  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  const std::array<int, 3>& max_index() const { return max_index_; }

  /// Throws ResonanceGuard naming the first mode with |k_mnp - k| <= tol.
  void check_resonance(double k, double tol) const {
    const double kk = std::abs(k);
    auto it = std::lower_bound(modes_.begin(), modes_.end(), kk - tol,
                               [](const Mode& m, double v) { return m.k < v; });
    if (it != modes_.end() && std::abs(it->k - kk) <= tol)
      throw ResonanceGuard("w/c = " + std::to_string(kk) + " is within " + std::to_string(tol) +
                           " of cavity mode " + it->idx.str() + " (k_mnp = " + std::to_string(it->k) + ")");
  }

 private:
  CavityGeometry geometry_;
  double k_max_;
  std::vector<Mode> modes_;
  std::array<int, 3> max_index_{};
};

/// cos(j pi x / L) and sin(j pi x / L) for j = 0..max on each axis, evaluated
/// once per point and reused across a whole mode table.
class PointTrig {
 public:
  PointTrig(const Vec3& r, const CavityGeometry& g, const std::array<int, 3>& max_index) {
    for (std::size_t i = 0; i < 3; ++i) {
      const int J = max_index[i];
      c_[i].resize(static_cast<std::size_t>(J) + 1);
      s_[i].resize(static_cast<std::size_t>(J) + 1);
      for (int j = 0; j <= J; ++j) {
        const double arg = j * pi / g.side(i) * r[i];
        c_[i][static_cast<std::size_t>(j)] = std::cos(arg);
        s_[i][static_cast<std::size_t>(j)] = std::sin(arg);
      }
    }
  }

  detail::AxisTrig at(const ModeIndex& idx) const {
    return {{c_[0][idx.m], c_[1][idx.n], c_[2][idx.p]}, {s_[0][idx.m], s_[1][idx.n], s_[2][idx.p]}};
  }

 private:
  std::array<std::vector<double>, 3> c_;
  std::array<std::vector<double>, 3> s_;
};

namespace detail {

// Bins of width pi / max(L) used for the shell-wise tail estimate.
struct ShellTracker {
  double width;
  double cutoff;
  long current = -1;
  std::array<double, 3> shell{};
  double last_complete = std::numeric_limits<double>::quiet_NaN();

  ShellTracker(const CavityGeometry& g, double k_max) : width(pi / g.max_side()), cutoff(k_max) {}

  void add(double k, const std::array<double, 3>& contrib) {
    const long s = static_cast<long>(std::floor(k / width));
    if (s != current) close(), current = s;
    for (std::size_t i = 0; i < 3; ++i) shell[i] += contrib[i];
  }

  void close() {
    if (current >= 0 && (current + 1) * width <= cutoff)
      last_complete = std::max({std::abs(shell[0]), std::abs(shell[1]), std::abs(shell[2])});
    shell = {};
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Direct mode sums
// ---------------------------------------------------------------------------

struct ModeSumResult {
  std::array<double, 3> g{};  ///< diagonal components G^x, G^y, G^z
  double tail = 0.0;          ///< magnitude of the last complete k-shell
  std::size_t modes = 0;
};

/// Truncated eigenfunction expansion sum_k A_k(r) A_k(r') / (k^2 - (w/c)^2).
inline ModeSumResult green_A_mode_sum(const Vec3& r, const Vec3& rp, double omega, const CavityGeometry& g,
                                      double k_max, const Constants& k,
                                      std::optional<double> resonance_tol = std::nullopt) {
  g.require_inside(r, "field point");
  g.require_inside(rp, "source point");
  const double kk = omega / k.c;
  if (!(k_max > std::abs(kk))) throw ValidationError("mode cutoff must exceed w/c");
  const ModeTable table(g, k_max);
  table.check_resonance(kk, resonance_tol.value_or(default_resonance_tol(g)));

  const PointTrig tr(r, g, table.max_index());
  const PointTrig tp(rp, g, table.max_index());
  detail::ShellTracker shells(g, k_max);
  ModeSumResult out;
  for (const Mode& mode : table.modes()) {
    const auto amp = detail::amplitudes(mode.idx, g);
    const Vec3 a = detail::mode_value(amp, tr.at(mode.idx));
    const Vec3 b = detail::mode_value(amp, tp.at(mode.idx));
    const double w = 1.0 / (mode.k * mode.k - kk * kk);
    const std::array<double, 3> c{a.x * b.x * w, a.y * b.y * w, a.z * b.z * w};
    for (std::size_t i = 0; i < 3; ++i) out.g[i] += c[i];
    shells.add(mode.k, c);
  }
  shells.close();
  out.tail = shells.last_complete;
  out.modes = table.size();
  return out;
}

namespace detail {

// sum_s zeta_2^s zeta_1^s for one mode.
inline double paired_couplings(const Mode& mode, const CavityGeometry& g, const Vec3& m1, const Vec3& m2,
                               const PointTrig& t1, const PointTrig& t2, double sqrt_mu0) {
  const auto amp = amplitudes(mode.idx, g);
  const Vec3 kv = mode.idx.wavevector(g);
  const auto c1 = component_curls_value(amp, kv, t1.at(mode.idx));
  const auto c2 = component_curls_value(amp, kv, t2.at(mode.idx));
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += (sqrt_mu0 * dot(m2, c2[i])) * (sqrt_mu0 * dot(m1, c1[i]));
  return s;
}

}  // namespace detail

struct ModeInteractionSum {
  double value = 0.0;
  double tail = 0.0;
  std::size_t modes = 0;
};

/// Truncated mode-sum interaction sum_{k,s} c^2 zeta_2^{uv,s} zeta_1^{ab,s} / (w^2 - c^2 k^2).
///
/// Each mode contributes one term per polarization component s, because the
/// Green tensor is diagonal and each A^s_k is normalized on its own; pairing
/// full vector-mode curls would add cross terms s != s' that the Green
/// function does not contain. Writing the curl-from-the-left in terms of
/// curls produces one extra minus sign, which turns the 1/(k^2 - (w/c)^2) of
/// the Green function expansion into this 1/(w^2 - c^2 k^2). With that sign
/// the sum tends to the static dipolar energy at short range.
inline ModeInteractionSum v_mode_sum(const Dipole& d1, const Dipole& d2, LevelPair pair1, LevelPair pair2,
                                     double omega, const CavityGeometry& g, const Constants& k, double k_max,
                                     std::optional<double> resonance_tol = std::nullopt) {
  g.require_inside(d1.position(), "dipole-1 position");
  g.require_inside(d2.position(), "dipole-2 position");
  const double kk = omega / k.c;
  if (!(k_max > std::abs(kk))) throw ValidationError("mode cutoff must exceed w/c");
  const ModeTable table(g, k_max);
  table.check_resonance(kk, resonance_tol.value_or(default_resonance_tol(g)));

  const PointTrig t1(d1.position(), g, table.max_index());
  const PointTrig t2(d2.position(), g, table.max_index());
  const Vec3& m1 = d1.moment(pair1);
  const Vec3& m2 = d2.moment(pair2);
  const double sqrt_mu0 = std::sqrt(k.mu0);
  detail::ShellTracker shells(g, k_max);
  ModeInteractionSum out;
  for (const Mode& mode : table.modes()) {
    const double term = k.c * k.c * detail::paired_couplings(mode, g, m1, m2, t1, t2, sqrt_mu0) /
                        (omega * omega - k.c * k.c * mode.k * mode.k);
    out.value += term;
    shells.add(mode.k, {term, 0.0, 0.0});
  }
  shells.close();
  out.tail = shells.last_complete;
  out.modes = table.size();
  return out;
}

struct NearResonantEstimate {
  double value = 0.0;       ///< exact summands restricted to the band
  double pole_form = 0.0;   ///< same modes with c^2 z2 z1 / 2w / (w - c|k|)
  std::size_t modes = 0;
  bool empty = true;
  std::optional<double> ratio;  ///< value / reference when a reference is given
};

/// Mode sum restricted to | |k| - w/c | <= band (and |k| <= k_max).
inline NearResonantEstimate near_resonant_estimate(const Dipole& d1, const Dipole& d2, LevelPair pair1,
                                                   LevelPair pair2, double omega, const CavityGeometry& g,
                                                   const Constants& k, double band, double k_max,
                                                   std::optional<double> reference = std::nullopt,
                                                   std::optional<double> resonance_tol = std::nullopt) {
  g.require_inside(d1.position(), "dipole-1 position");
  g.require_inside(d2.position(), "dipole-2 position");
  if (!(band >= 0.0)) throw ValidationError("band must be non-negative");
  const double kk = omega / k.c;
  const ModeTable table(g, std::min(k_max, std::abs(kk) + band));
  table.check_resonance(kk, resonance_tol.value_or(default_resonance_tol(g)));

  const PointTrig t1(d1.position(), g, table.max_index());
  const PointTrig t2(d2.position(), g, table.max_index());
  const Vec3& m1 = d1.moment(pair1);
  const Vec3& m2 = d2.moment(pair2);
  const double sqrt_mu0 = std::sqrt(k.mu0);
  NearResonantEstimate out;
  for (const Mode& mode : table.modes()) {
    if (std::abs(mode.k - std::abs(kk)) > band) continue;
    const double c2zz = k.c * k.c * detail::paired_couplings(mode, g, m1, m2, t1, t2, sqrt_mu0);
    out.value += c2zz / (omega * omega - k.c * k.c * mode.k * mode.k);
    out.pole_form += omega != 0.0 ? c2zz / (2.0 * omega) / (omega - k.c * mode.k)
                                  : std::numeric_limits<double>::quiet_NaN();
    ++out.modes;
  }
  out.empty = out.modes == 0;
  if (reference && *reference != 0.0) out.ratio = out.value / *reference;
  return out;
}

}  // namespace cavdd
