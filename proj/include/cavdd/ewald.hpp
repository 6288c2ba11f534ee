#pragma once

// Ewald-split evaluation of the cavity vector-potential Green tensor.
//
// The image series of the box Green function is split with erf + erfc = 1:
//
//   G^s = sum_images sign_s cos(kR)/(4 pi R) erfc(Kc R)      (image part)
//       + sum_modes  A^s(r) A^s(r') Gamma(k, k_mnp)          (spectral part)
//
// where Gamma is the Fourier transform of cos(kR) erf(Kc R)/(4 pi R). Both
// series are Gaussian-screened, so truncation is chosen from target_tail.
//
// The interaction needs the curl-curl dyadic
//
//   T_ij = eps_ipk eps_jkn d2_p d1_n G^k(r2, r1),   V_{2<-1} = mu0 m2 . T . m1
//
// Image terms are differentiated with the radial chain rule (the source-side
// derivative picks up the reflection Jacobian of each image); mode terms use
// analytic curls of each single-component field A^s e_s,
// T2_ij = -sum_s curl(A^s e_s)_i(r2) curl(A^s e_s)_j(r1) Gamma.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavdd/cavity_modes.hpp"
#include "cavdd/core.hpp"
#include "cavdd/freespace.hpp"
#include "cavdd/interaction_table.hpp"

namespace cavdd {

// ---------------------------------------------------------------------------
// Spectral weight
// ---------------------------------------------------------------------------

/// (1/2q) [ e^{-(k+q)^2/4Kc^2}/(q+k) + e^{-(k-q)^2/4Kc^2}/(q-k) ],  q = k_mnp.
/// Tends to 1/(q^2 - k^2) as Kc grows.
inline double gamma_cutoff(double kk, double kmnp, double kc, double resonance_tol = 0.0) {
  if (!(kmnp > 0.0)) throw ValidationError("gamma_cutoff needs k_mnp > 0");
  if (!(kc > 0.0)) throw ValidationError("gamma_cutoff needs Kc > 0");
  const double dplus = kmnp + kk;
  const double dminus = kmnp - kk;
  if (std::abs(dminus) <= resonance_tol || dminus == 0.0 || dplus == 0.0)
    throw ResonanceGuard("gamma_cutoff evaluated on resonance: k = " + std::to_string(kk) +
                         ", k_mnp = " + std::to_string(kmnp));
  const double s = 4.0 * kc * kc;
  return (std::exp(-dplus * dplus / s) / dplus + std::exp(-dminus * dminus / s) / dminus) / (2.0 * kmnp);
}

// ---------------------------------------------------------------------------
// Image lattice
// ---------------------------------------------------------------------------

/// One reflected/translated copy of the source point.
struct ImageTerm {
  std::array<int, 3> cell{};    ///< (i, j, l)
  std::array<int, 3> parity{};  ///< (r, s, t)
  Vec3 position;
  std::array<double, 3> sign{};      ///< (-1)^{r+s+t-q_sigma}, q = (r, s, t)
  std::array<double, 3> jacobian{};  ///< diag d(image)/d(source) = (-1)^{r,s,t}
};

inline ImageTerm make_image(const Vec3& rp, const CavityGeometry& g, std::array<int, 3> cell,
                            std::array<int, 3> parity) {
  ImageTerm t;
  t.cell = cell;
  t.parity = parity;
  const int total = parity[0] + parity[1] + parity[2];
  for (std::size_t s = 0; s < 3; ++s) {
    t.jacobian[s] = parity[s] ? -1.0 : 1.0;
    t.position[s] = 2.0 * cell[s] * g.side(s) + t.jacobian[s] * rp[s];
    t.sign[s] = ((total - parity[s]) % 2) ? -1.0 : 1.0;
  }
  return t;
}

/// All 8 (2N+1)^3 images, ordered lexicographically in (i, j, l, r, s, t).
inline std::vector<ImageTerm> image_lattice(const Vec3& rp, const CavityGeometry& g, int image_range) {
  g.require_inside(rp, "source point");
  if (image_range < 0) throw ValidationError("image_range must be non-negative");
  const int N = image_range;
  std::vector<ImageTerm> out;
  out.reserve(static_cast<std::size_t>(8 * (2 * N + 1) * (2 * N + 1) * (2 * N + 1)));
  for (int i = -N; i <= N; ++i)
    for (int j = -N; j <= N; ++j)
      for (int l = -N; l <= N; ++l)
        for (int r = 0; r <= 1; ++r)
          for (int s = 0; s <= 1; ++s)
            for (int t = 0; t <= 1; ++t) out.push_back(make_image(rp, g, {i, j, l}, {r, s, t}));
  return out;
}

// ---------------------------------------------------------------------------
// Screened radial kernel
// ---------------------------------------------------------------------------

/// f(R) = cos(kR) erfc(Kc R) / (4 pi R) and its first two radial derivatives.
struct ScreenedRadial {
  double R = 0.0;
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

inline ScreenedRadial screened_kernel(double R, double kk, double kc) {
  const double c = std::cos(kk * R);
  const double s = std::sin(kk * R);
  const double e = std::erfc(kc * R);
  const double de = -2.0 * kc / std::sqrt(pi) * std::exp(-kc * kc * R * R);
  const double d2e = -2.0 * kc * kc * R * de;
  // h = cos * erfc; f = h / (4 pi R)
  const double h = c * e;
  const double dh = -kk * s * e + c * de;
  const double d2h = -kk * kk * c * e - 2.0 * kk * s * de + c * d2e;
  const double norm4pi = 1.0 / (4.0 * pi);
  return {R, norm4pi * h / R, norm4pi * (dh / R - h / (R * R)),
          norm4pi * (d2h / R - 2.0 * dh / (R * R) + 2.0 * h / (R * R * R))};
}

// ---------------------------------------------------------------------------
// Green tensor
// ---------------------------------------------------------------------------

struct GreenTensor {
  std::array<double, 3> gA{};   ///< diagonal G_A^sigma
  std::array<double, 3> gA1{};  ///< image part
  std::array<double, 3> gA2{};  ///< spectral part
  Mat3 T{};                     ///< curl-curl dyadic
  Mat3 T1{};
  Mat3 T2{};
  double tail = 0.0;  ///< larger of the two truncation bounds
};

struct GreenComponents {
  std::array<double, 3> gA{};
  std::array<double, 3> gA1{};
  std::array<double, 3> gA2{};
};

namespace detail {

inline int levi_civita(std::size_t i, std::size_t j, std::size_t k) {
  if (i == j || j == k || i == k) return 0;
  return ((i + 1) % 3 == j) ? 1 : -1;
}

// T_ij = sum eps_ipk eps_jkn D[k][p][n]
inline Mat3 curl_curl(const std::array<Mat3, 3>& D) {
  Mat3 T{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t k = 0; k < 3; ++k) {
          const int e1 = levi_civita(i, p, k);
          if (e1 == 0) continue;
          for (std::size_t n = 0; n < 3; ++n) {
            const int e2 = levi_civita(j, k, n);
            if (e2 != 0) s += e1 * e2 * D[k][p][n];
          }
        }
      T[i][j] = s;
    }
  return T;
}

}  // namespace detail

/// Cavity Green function at one frequency with fixed, resolved truncation.
/// Owns the mode table; evaluation is const and thread-safe.
class CavityGreen {
 public:
  CavityGreen(const CavityGeometry& g, double omega, const EwaldParams& params, const Constants& k)
      : geometry_(g), kk_(omega / k.c), params_(params), modes_(g, params.mode_cutoff) {
    g.validate();
    k.validate();
    params_.validate(kk_);
    modes_.check_resonance(kk_, params_.resonance_tol);
  }

  /// Convenience: resolve truncation from settings for this frequency.
  CavityGreen(const CavityGeometry& g, double omega, const EwaldSettings& settings, const Constants& k)
      : CavityGreen(g, omega, resolve(settings, g, omega / k.c), k) {}

  const EwaldParams& params() const { return params_; }
  const ModeTable& mode_table() const { return modes_; }
  double wavenumber() const { return kk_; }

  double tail_bound() const {
    const double img = std::erfc(params_.kc * 2.0 * params_.image_range * geometry_.min_side());
    const double dk = params_.mode_cutoff - std::abs(kk_);
    const double spec = std::exp(-dk * dk / (4.0 * params_.kc * params_.kc));
    return std::max(img, spec);
  }

  /// Screened image sum at field point r for source rp.
  std::array<double, 3> image_part(const Vec3& r, const Vec3& rp,
                                   std::vector<ScreenedRadial>* per_image = nullptr) const {
    check_points(r, rp);
    std::array<double, 3> g{};
    for_each_image(rp, [&](const ImageTerm& im) {
      const ScreenedRadial q = radial(r, im);
      for (std::size_t s = 0; s < 3; ++s) g[s] += im.sign[s] * q.f;
      if (per_image) per_image->push_back(q);
    });
    return g;
  }

  /// Gaussian-weighted mode sum at field point r for source rp.
  std::array<double, 3> spectral_part(const Vec3& r, const Vec3& rp) const {
    check_points(r, rp);
    const PointTrig tr(r, geometry_, modes_.max_index());
    const PointTrig tp(rp, geometry_, modes_.max_index());
    std::array<double, 3> g{};
    for (const Mode& mode : modes_.modes()) {
      const auto amp = detail::amplitudes(mode.idx, geometry_);
      const Vec3 a = detail::mode_value(amp, tr.at(mode.idx));
      const Vec3 b = detail::mode_value(amp, tp.at(mode.idx));
      const double w = gamma_cutoff(kk_, mode.k, params_.kc);
      for (std::size_t s = 0; s < 3; ++s) g[s] += a[s] * b[s] * w;
    }
    for (double& v : g) v *= params_.spectral_sign;
    return g;
  }

  GreenComponents components(const Vec3& r, const Vec3& rp) const {
    GreenComponents c;
    c.gA1 = image_part(r, rp);
    c.gA2 = spectral_part(r, rp);
    for (std::size_t s = 0; s < 3; ++s) c.gA[s] = c.gA1[s] + c.gA2[s];
    return c;
  }

  /// Full tensor with field point r2 and source point r1.
  GreenTensor tensor(const Vec3& r2, const Vec3& r1) const {
    check_points(r2, r1);
    GreenTensor out;

    // Image part: D[s][p][n] = sum sign_s d2_p d1_n f.
    std::array<Mat3, 3> D{};
    for_each_image(r1, [&](const ImageTerm& im) {
      const ScreenedRadial q = radial(r2, im);
      const Vec3 u = (r2 - im.position) / q.R;
      const double radial_part = q.d2f - q.df / q.R;
      const double iso = q.df / q.R;
      for (std::size_t s = 0; s < 3; ++s) out.gA1[s] += im.sign[s] * q.f;
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t n = 0; n < 3; ++n) {
          const double dd = -im.jacobian[n] * (radial_part * u[p] * u[n] + (p == n ? iso : 0.0));
          for (std::size_t s = 0; s < 3; ++s) D[s][p][n] += im.sign[s] * dd;
        }
    });
    out.T1 = detail::curl_curl(D);

    // Spectral part.
    const PointTrig t2(r2, geometry_, modes_.max_index());
    const PointTrig t1(r1, geometry_, modes_.max_index());
    for (const Mode& mode : modes_.modes()) {
      const auto amp = detail::amplitudes(mode.idx, geometry_);
      const Vec3 kv = mode.idx.wavevector(geometry_);
      const auto trig2 = t2.at(mode.idx);
      const auto trig1 = t1.at(mode.idx);
      const double w = gamma_cutoff(kk_, mode.k, params_.kc);
      const Vec3 a2 = detail::mode_value(amp, trig2);
      const Vec3 a1 = detail::mode_value(amp, trig1);
      for (std::size_t s = 0; s < 3; ++s) out.gA2[s] += a2[s] * a1[s] * w;
      const auto c2 = detail::component_curls_value(amp, kv, trig2);
      const auto c1 = detail::component_curls_value(amp, kv, trig1);
      for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) out.T2[i][j] -= c2[s][i] * c1[s][j] * w;
    }
    for (std::size_t s = 0; s < 3; ++s) out.gA2[s] *= params_.spectral_sign;
    for (auto& row : out.T2)
      for (double& v : row) v *= params_.spectral_sign;

    for (std::size_t s = 0; s < 3; ++s) out.gA[s] = out.gA1[s] + out.gA2[s];
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) out.T[i][j] = out.T1[i][j] + out.T2[i][j];
    out.tail = tail_bound();
    return out;
  }

 private:
  void check_points(const Vec3& r, const Vec3& rp) const {
    geometry_.require_inside(r, "field point");
    geometry_.require_inside(rp, "source point");
  }

  template <class F>
  void for_each_image(const Vec3& rp, F&& f) const {
    const int N = params_.image_range;
    for (int i = -N; i <= N; ++i)
      for (int j = -N; j <= N; ++j)
        for (int l = -N; l <= N; ++l)
          for (int r = 0; r <= 1; ++r)
            for (int s = 0; s <= 1; ++s)
              for (int t = 0; t <= 1; ++t) f(make_image(rp, geometry_, {i, j, l}, {r, s, t}));
  }

  ScreenedRadial radial(const Vec3& r, const ImageTerm& im) const {
    const double R = norm(r - im.position);
    if (!(R > 1e-14 * geometry_.min_side()))
      throw DegenerateSeparation("field point " + to_string(r) + " coincides with an image of the source");
    return screened_kernel(R, kk_, params_.kc);
  }

  CavityGeometry geometry_;
  double kk_;
  EwaldParams params_;
  ModeTable modes_;
};

/// Screened image sum G_A1 with optional per-image radial data (f, f', f'')
/// in image_lattice order.
inline std::array<double, 3> green_A1(const Vec3& r, const Vec3& rp, double omega, const CavityGeometry& g,
                                      const EwaldParams& params, const Constants& k,
                                      std::vector<ScreenedRadial>* per_image = nullptr) {
  return CavityGreen(g, omega, params, k).image_part(r, rp, per_image);
}

/// Gaussian-cutoff mode sum G_A2.
inline std::array<double, 3> green_A2(const Vec3& r, const Vec3& rp, double omega, const CavityGeometry& g,
                                      const EwaldParams& params, const Constants& k) {
  return CavityGreen(g, omega, params, k).spectral_part(r, rp);
}

inline GreenTensor green_tensor(const Vec3& r2, const Vec3& r1, double omega, const CavityGeometry& g,
                                const EwaldParams& params, const Constants& k) {
  return CavityGreen(g, omega, params, k).tensor(r2, r1);
}

inline GreenTensor green_tensor(const Vec3& r2, const Vec3& r1, double omega, const CavityGeometry& g,
                                const EwaldSettings& settings, const Constants& k) {
  return CavityGreen(g, omega, settings, k).tensor(r2, r1);
}

// ---------------------------------------------------------------------------
// Interactions
// ---------------------------------------------------------------------------

struct CavityValue {
  double total = 0.0;
  double image = 0.0;
  double mode = 0.0;
  double tail = 0.0;
};

/// mu0 m2 . T(r2, r1; w) . m1 split into image and mode parts.
inline CavityValue contract(const GreenTensor& t, const Vec3& m2, const Vec3& m1, const Constants& k) {
  return {k.mu0 * contract(m2, t.T, m1), k.mu0 * contract(m2, t.T1, m1), k.mu0 * contract(m2, t.T2, m1),
          t.tail};
}

/// Field of moment m1 at r1, felt by moment m2 at r2, at frequency omega.
inline CavityValue v_cavity(const Vec3& m1, const Vec3& m2, const Vec3& r1, const Vec3& r2, double omega,
                            const CavityGeometry& g, const Constants& k, const EwaldSettings& settings = {}) {
  return contract(green_tensor(r2, r1, omega, g, settings, k), m2, m1, k);
}

/// Coefficient table for two dipoles in the cavity. A resonance-guard hit
/// marks the affected direction of a term as failed; geometry errors throw.
inline InteractionTable pair_interaction_cavity(const Dipole& d1, const Dipole& d2, const CavityGeometry& g,
                                                const Constants& k, const EwaldSettings& settings = {}) {
  k.validate();
  g.validate();
  const Vec3& r1 = d1.position();
  const Vec3& r2 = d2.position();
  g.require_inside(r1, "dipole-1 position");
  g.require_inside(r2, "dipole-2 position");
  if (!(norm(r2 - r1) > 0.0)) throw DegenerateSeparation("dipole positions coincide at " + to_string(r1));
  const double wall_tol = 1e-12 * g.min_side();
  const bool on_wall = g.wall_distance(r1) <= wall_tol || g.wall_distance(r2) <= wall_tol;

  // The Green function depends on |w| only; cache one tensor per direction
  // and distinct |w|.
  using Cached = std::optional<GreenTensor>;
  std::map<double, Cached> cache21, cache12;
  auto lookup = [&](std::map<double, Cached>& cache, double omega, const Vec3& field,
                    const Vec3& source) -> const Cached& {
    const double key = std::abs(omega);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Cached value;
    try {
      value = green_tensor(field, source, key, g, settings, k);
    } catch (const ResonanceGuard&) {
      value.reset();
    }
    return cache.emplace(key, std::move(value)).first->second;
  };

  InteractionTable table;
  const std::size_t n1 = d1.levels();
  const std::size_t n2 = d2.levels();
  table.terms.reserve(n1 * n1 * n2 * n2);
  for (std::size_t u = 0; u < n2; ++u)
    for (std::size_t v = 0; v < n2; ++v)
      for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n1; ++b) {
          InteractionTerm t;
          t.u = u, t.v = v, t.a = a, t.b = b;
          t.omega21 = transition_frequency(d1, {a, b}, k);
          t.omega12 = transition_frequency(d2, {u, v}, k);
          t.term_class = classify({a, b}, t.omega21, {u, v}, t.omega12);
          t.wall_warning = on_wall;
          const Vec3& m1 = d1.moment(a, b);
          const Vec3& m2 = d2.moment(u, v);

          const Cached& g21 = lookup(cache21, t.omega21, r2, r1);
          if (g21) {
            const CavityValue c = contract(*g21, m2, m1, k);
            t.v21 = c.total, t.v21_image = c.image, t.v21_mode = c.mode, t.tail21 = c.tail;
          } else {
            t.status21 = TermStatus::ResonanceGuard;
          }
          const Cached& g12 = lookup(cache12, t.omega12, r1, r2);
          if (g12) {
            const CavityValue c = contract(*g12, m1, m2, k);
            t.v12 = c.total, t.v12_image = c.image, t.v12_mode = c.mode, t.tail12 = c.tail;
          } else {
            t.status12 = TermStatus::ResonanceGuard;
          }
          if (t.ok()) {
            t.vsym = 0.5 * (t.v21 + t.v12);
            if (!std::isfinite(t.vsym))
              throw DegenerateSeparation("non-finite interaction for a dipole on the cavity wall");
          } else {
            t.vsym = std::numeric_limits<double>::quiet_NaN();
            if (t.status21 != TermStatus::Ok) t.v21 = std::numeric_limits<double>::quiet_NaN();
            if (t.status12 != TermStatus::Ok) t.v12 = std::numeric_limits<double>::quiet_NaN();
          }
          table.terms.push_back(t);
        }
  return table;
}

/// Near-resonant mode estimate together with its ratio to the Ewald value.
inline NearResonantEstimate near_resonant_diagnostic(const Dipole& d1, const Dipole& d2, LevelPair pair1,
                                                     LevelPair pair2, double omega, const CavityGeometry& g,
                                                     const Constants& k, double band,
                                                     const EwaldSettings& settings = {}) {
  const double reference =
      v_cavity(d1.moment(pair1), d2.moment(pair2), d1.position(), d2.position(), omega, g, k, settings).total;
  const double k_max = std::abs(omega / k.c) + band;
  return near_resonant_estimate(d1, d2, pair1, pair2, omega, g, k, band, k_max, reference);
}

/// Short-range sign check of the spectral contribution: a static pair at the
/// box centre must reproduce the free-space dipolar energy. Returns the ratio
/// V_cavity / V_static.
/// Kc is set to 1/R so the spectral half carries most of the near field and a
/// flipped sign cannot hide behind the image half.
inline double spectral_sign_probe(const CavityGeometry& g, const Constants& k, double spectral_sign = 1.0) {
  const double R = 0.1 * g.min_side();
  const Vec3 r1{0.5 * g.Lx, 0.5 * g.Ly, 0.5 * g.Lz};
  const Vec3 r2 = r1 + ex * R;
  EwaldSettings s;
  s.kc = 1.0 / R;
  EwaldParams p = resolve(s, g, 0.0);
  p.spectral_sign = spectral_sign;
  const double vc = contract(green_tensor(r2, r1, 0.0, g, p, k), ez, ez, k).total;
  return vc / v_static(ez, ez, r1, r2, k);
}

}  // namespace cavdd
