#pragma once

// Domain types shared by every numerical module: vectors, physical constants,
// multilevel dipoles, the cavity box and Ewald truncation settings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavdd {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Input failed validation (bad shape, NaN, out-of-range index, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Field and source point coincide (or the field point sits on an image).
class DegenerateSeparation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A point lies outside the cavity box.
class OutsideGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation frequency is within the guard band of a lossless-cavity pole,
/// or the elimination is attempted on resonance.
class ResonanceGuard : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline constexpr Vec3 ex{1.0, 0.0, 0.0};
inline constexpr Vec3 ey{0.0, 1.0, 0.0};
inline constexpr Vec3 ez{0.0, 0.0, 1.0};

inline Vec3 axis_vector(std::size_t axis) {
  Vec3 v;
  v[axis] = 1.0;
  return v;
}

inline std::string to_string(const Vec3& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
  return os.str();
}

/// Throws ValidationError naming `what` if any component is NaN/Inf.
inline const Vec3& require_finite(const Vec3& v, const char* what) {
  if (!v.is_finite()) throw ValidationError(std::string(what) + " has a non-finite component");
  return v;
}

/// Row-major 3x3 real matrix.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline double contract(const Vec3& left, const Mat3& m, const Vec3& right) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) s += left[i] * m[i][j] * right[j];
  return s;
}

inline double max_abs(const Mat3& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s = std::max(s, std::abs(v));
  return s;
}

// ---------------------------------------------------------------------------
// Physical constants
// ---------------------------------------------------------------------------

/// Speed of light, vacuum permeability and reduced Planck constant.
/// Defaults are natural units (all one) with the cavity length as length unit.
struct Constants {
  double c = 1.0;
  double mu0 = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!(c > 0.0) || !(mu0 > 0.0) || !(hbar > 0.0) || !std::isfinite(c) || !std::isfinite(mu0) ||
        !std::isfinite(hbar))
      throw ValidationError("constants c, mu0, hbar must be finite and strictly positive");
  }

  friend bool operator==(const Constants&, const Constants&) = default;
};

// ---------------------------------------------------------------------------
// Dipole
// ---------------------------------------------------------------------------

struct LevelPair {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const LevelPair&, const LevelPair&) = default;
};

/// A multilevel quantum dipole: its position, the eigen-energies of its
/// self-Hamiltonian and the (Hermitian) matrix of magnetic-moment vectors
/// m^{uv} = <u|m|v>. Immutable after construction.
class Dipole {
 public:
  Dipole(Vec3 position, std::vector<double> energies, std::vector<std::vector<Vec3>> moments)
      : position_(position), energies_(std::move(energies)), moments_(std::move(moments)) {
    validate();
  }

  /// Levels given as angular frequencies; stored as energies E = hbar * w.
  static Dipole from_frequencies(Vec3 position, const std::vector<double>& frequencies,
                                 std::vector<std::vector<Vec3>> moments, const Constants& k) {
    std::vector<double> energies(frequencies.size());
    std::transform(frequencies.begin(), frequencies.end(), energies.begin(),
                   [&](double w) { return k.hbar * w; });
    return Dipole(position, std::move(energies), std::move(moments));
  }

  /// Single-level dipole carrying only a permanent moment.
  static Dipole permanent(Vec3 position, Vec3 moment) { return Dipole(position, {0.0}, {{moment}}); }

  /// Two-level dipole with level gap `gap` (energy units), a transition moment
  /// and optional permanent moments of the two levels.
  static Dipole two_level(Vec3 position, double gap, Vec3 transition, Vec3 perm0 = {}, Vec3 perm1 = {}) {
    return Dipole(position, {0.0, gap}, {{perm0, transition}, {transition, perm1}});
  }

  const Vec3& position() const { return position_; }
  const std::vector<double>& energies() const { return energies_; }
  std::size_t levels() const { return energies_.size(); }

  const Vec3& moment(std::size_t u, std::size_t v) const {
    check_index(u);
    check_index(v);
    return moments_[u][v];
  }
  const Vec3& moment(LevelPair p) const { return moment(p.a, p.b); }
  const std::vector<std::vector<Vec3>>& moments() const { return moments_; }

  /// Copy placed at a new position.
  Dipole moved_to(Vec3 position) const { return Dipole(position, energies_, moments_); }

  void check_index(std::size_t u) const {
    if (u >= energies_.size())
      throw ValidationError("level index " + std::to_string(u) + " out of range for dipole with " +
                            std::to_string(energies_.size()) + " levels");
  }

  friend bool operator==(const Dipole&, const Dipole&) = default;

 private:
  void validate() const {
    require_finite(position_, "dipole position");
    if (energies_.empty()) throw ValidationError("dipole needs at least one level");
    for (double e : energies_)
      if (!std::isfinite(e)) throw ValidationError("dipole level energy is not finite");
    if (!std::is_sorted(energies_.begin(), energies_.end()))
      throw ValidationError("dipole level energies must be sorted non-decreasing");
    const std::size_t n = energies_.size();
    if (moments_.size() != n) throw ValidationError("moment matrix must be n x n for n levels");
    for (const auto& row : moments_) {
      if (row.size() != n) throw ValidationError("moment matrix must be n x n for n levels");
      for (const auto& m : row) require_finite(m, "dipole moment");
    }
    // Real moment vectors: Hermitian means symmetric.
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (!(moments_[u][v] == moments_[v][u]))
          throw ValidationError("moment matrix is not Hermitian at (" + std::to_string(u) + "," +
                                std::to_string(v) + ")");
  }

  Vec3 position_;
  std::vector<double> energies_;
  std::vector<std::vector<Vec3>> moments_;
};

/// w_ab = (E_a - E_b) / hbar.
inline double transition_frequency(const Dipole& d, LevelPair p, const Constants& k) {
  d.check_index(p.a);
  d.check_index(p.b);
  return (d.energies()[p.a] - d.energies()[p.b]) / k.hbar;
}

// ---------------------------------------------------------------------------
// Cavity geometry
// ---------------------------------------------------------------------------

struct CavityGeometry {
  double Lx = 1.0;
  double Ly = 1.0;
  double Lz = 1.0;

  CavityGeometry() = default;
  CavityGeometry(double lx, double ly, double lz) : Lx(lx), Ly(ly), Lz(lz) { validate(); }

  static CavityGeometry cube(double L) { return {L, L, L}; }

  void validate() const {
    if (!(Lx > 0.0) || !(Ly > 0.0) || !(Lz > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly) ||
        !std::isfinite(Lz))
      throw ValidationError("cavity side lengths must be finite and positive");
  }

  double volume() const { return Lx * Ly * Lz; }
  double side(std::size_t axis) const { return axis == 0 ? Lx : (axis == 1 ? Ly : Lz); }
  double min_side() const { return std::min({Lx, Ly, Lz}); }
  double max_side() const { return std::max({Lx, Ly, Lz}); }

  /// Closed-box membership with a relative slack of `rel_tol` times the side.
  bool contains(const Vec3& r, double rel_tol = 1e-12) const {
    for (std::size_t i = 0; i < 3; ++i) {
      const double s = side(i) * rel_tol;
      if (!(r[i] >= -s && r[i] <= side(i) + s)) return false;
    }
    return true;
  }

  /// Distance from r to the nearest wall.
  double wall_distance(const Vec3& r) const {
    double d = r.x;
    for (std::size_t i = 0; i < 3; ++i) d = std::min({d, r[i], side(i) - r[i]});
    return d;
  }

  void require_inside(const Vec3& r, const char* what) const {
    require_finite(r, what);
    if (!contains(r)) throw OutsideGeometry(std::string(what) + " " + to_string(r) + " is outside the cavity");
  }

  friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

// ---------------------------------------------------------------------------
// Ewald truncation
// ---------------------------------------------------------------------------

/// Default splitting parameter sqrt(pi) / (2 V^{1/3}).
inline double default_kc(const CavityGeometry& g) { return std::sqrt(pi) / (2.0 * std::cbrt(g.volume())); }

/// Default resonance guard: 1e-6 * pi / min(L).
inline double default_resonance_tol(const CavityGeometry& g) { return 1e-6 * pi / g.min_side(); }

/// User-facing Ewald settings; unset fields are auto-selected per frequency.
struct EwaldSettings {
  std::optional<double> kc;
  std::optional<int> image_range;
  std::optional<double> mode_cutoff;
  std::optional<double> resonance_tol;
  double target_tail = 1e-12;

  friend bool operator==(const EwaldSettings&, const EwaldSettings&) = default;
};

/// Fully resolved Ewald parameters for one wavenumber.
struct EwaldParams {
  double kc = 0.0;            ///< splitting parameter (1/length)
  int image_range = 0;        ///< lattice indices run over [-N, N]
  double mode_cutoff = 0.0;   ///< spectral sum keeps k_mnp <= mode_cutoff
  double resonance_tol = 0.0; ///< |k - k_mnp| must exceed this
  double target_tail = 1e-12;
  /// Multiplies the spectral (mode) contribution. Always +1 in production; the
  /// self-test flips it to confirm the free-space check detects a sign error.
  double spectral_sign = 1.0;

  void validate(double k) const {
    if (!(kc > 0.0) || !std::isfinite(kc)) throw ValidationError("Kc must be positive");
    if (image_range < 0) throw ValidationError("image_range must be non-negative");
    if (!(resonance_tol > 0.0)) throw ValidationError("resonance_tol must be positive");
    if (!(target_tail > 0.0)) throw ValidationError("target_tail must be positive");
    if (!(mode_cutoff > std::abs(k)))
      throw ValidationError("mode_cutoff must exceed the evaluation wavenumber w/c");
  }
};

/// Smallest N whose first neglected image shell is screened below `tail`:
/// every image with |index| > N is at least 2 N min(L) from any box point.
inline int select_image_range(const CavityGeometry& g, double kc, double tail) {
  int n = 1;
  while (std::erfc(kc * 2.0 * n * g.min_side()) >= tail && n < 4096) ++n;
  return n;
}

/// Cutoff with exp(-(k_max - k)^2 / 4 Kc^2) < tail.
inline double select_mode_cutoff(double k, double kc, double tail) {
  return std::abs(k) + 2.0 * kc * std::sqrt(std::log(1.0 / tail)) * (1.0 + 1e-9) + 1e-12;
}

inline EwaldParams resolve(const EwaldSettings& s, const CavityGeometry& g, double k) {
  EwaldParams p;
  p.target_tail = s.target_tail;
  if (!(p.target_tail > 0.0 && p.target_tail < 1.0)) throw ValidationError("target_tail must lie in (0, 1)");
  p.kc = s.kc.value_or(default_kc(g));
  p.resonance_tol = s.resonance_tol.value_or(default_resonance_tol(g));
  p.image_range = s.image_range.value_or(select_image_range(g, p.kc, p.target_tail));
  p.mode_cutoff = s.mode_cutoff.value_or(select_mode_cutoff(k, p.kc, p.target_tail));
  p.validate(k);
  return p;
}

}  // namespace cavdd
