#pragma once

// Embedded invariant checks, runnable from an installed binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cavdd/cavity_modes.hpp"
#include "cavdd/effective_coupling.hpp"
#include "cavdd/ewald.hpp"

namespace cavdd::cli {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SelftestOptions {
  std::uint64_t seed = 12345;
  /// Negative control: multiply the spectral part by -1.
  bool flip_spectral_sign = false;
  /// Negative control: scale Kc in the invariance check while keeping the
  /// truncation chosen for the default Kc.
  std::optional<double> kc_scale;
};

namespace detail {

// Gauss-Legendre nodes and weights on [a, b] by Newton iteration on P_n.
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (a + b) - 0.5 * (b - a) * z;
    w[static_cast<std::size_t>(i)] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double mat_rel(const Mat3& a, const Mat3& b) {
  Mat3 d{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) d[i][j] = a[i][j] - b[i][j];
  return max_abs(d) / max_abs(b);
}

inline Vec3 random_point(std::mt19937_64& rng, const CavityGeometry& g, double margin) {
  std::uniform_real_distribution<double> u(margin, 1.0 - margin);
  return {u(rng) * g.Lx, u(rng) * g.Ly, u(rng) * g.Lz};
}

// Mixed second differences d2_p d1_n G^s from components(), Richardson
// extrapolated from steps h and h/2.
inline std::array<Mat3, 3> fd_mixed(const CavityGreen& green, const Vec3& r2, const Vec3& r1, double h) {
  auto at = [&](double step) {
    std::array<Mat3, 3> D{};
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t n = 0; n < 3; ++n) {
        const Vec3 dp = axis_vector(p) * step;
        const Vec3 dn = axis_vector(n) * step;
        const auto pp = green.components(r2 + dp, r1 + dn).gA;
        const auto pm = green.components(r2 + dp, r1 - dn).gA;
        const auto mp = green.components(r2 - dp, r1 + dn).gA;
        const auto mm = green.components(r2 - dp, r1 - dn).gA;
        for (std::size_t s = 0; s < 3; ++s) D[s][p][n] = (pp[s] - pm[s] - mp[s] + mm[s]) / (4.0 * step * step);
      }
    return D;
  };
  const auto a = at(h);
  const auto b = at(0.5 * h);
  std::array<Mat3, 3> D{};
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t n = 0; n < 3; ++n) D[s][p][n] = (4.0 * b[s][p][n] - a[s][p][n]) / 3.0;
  return D;
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest(const SelftestOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  const Constants k;
  const CavityGeometry g(1.0, 1.2, 0.9);
  const double omega = 7.3;
  const double sign = opt.flip_spectral_sign ? -1.0 : 1.0;
  std::vector<CheckResult> out;

  auto params_for = [&](EwaldSettings s) {
    EwaldParams p = resolve(s, g, omega / k.c);
    p.spectral_sign = sign;
    return p;
  };

  // Kc invariance of the full tensor.
  {
    const EwaldParams base = params_for({});
    std::vector<EwaldParams> variants;
    if (opt.kc_scale) {
      EwaldParams p = base;
      p.kc = base.kc * *opt.kc_scale;
      variants.push_back(p);
    } else {
      for (double f : {0.5, 2.0}) {
        EwaldSettings s;
        s.kc = base.kc * f;
        variants.push_back(params_for(s));
      }
    }
    const CavityGreen g0(g, omega, base, k);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Vec3 r1 = detail::random_point(rng, g, 0.1);
      const Vec3 r2 = detail::random_point(rng, g, 0.1);
      const Mat3 t0 = g0.tensor(r2, r1).T;
      for (const auto& p : variants)
        worst = std::max(worst, detail::mat_rel(CavityGreen(g, omega, p, k).tensor(r2, r1).T, t0));
    }
    out.push_back({"kc_invariance", worst, 1e-8, worst <= 1e-8});
  }

  // Short-range static limit, sensitive to the sign of the spectral part.
  {
    const double ratio = spectral_sign_probe(g, k, sign);
    const double dev = std::abs(ratio - 1.0);
    out.push_back({"free_space_limit", dev, 0.02, dev <= 0.02});
  }

  // Tangential components vanish on each wall.
  {
    const CavityGreen green(g, omega, params_for({}), k);
    const Vec3 src = detail::random_point(rng, g, 0.2);
    double interior = 0.0;
    for (double v : green.components(detail::random_point(rng, g, 0.2), src).gA)
      interior = std::max(interior, std::abs(v));
    double worst = 0.0;
    for (std::size_t axis = 0; axis < 3; ++axis)
      for (double wall : {0.0, g.side(axis)}) {
        Vec3 r = detail::random_point(rng, g, 0.1);
        r[axis] = wall;
        const auto ga = green.components(r, src).gA;
        for (std::size_t s = 0; s < 3; ++s)
          if (s != axis) worst = std::max(worst, std::abs(ga[s]) / interior);
      }
    out.push_back({"boundary_conditions", worst, 1e-10, worst <= 1e-10});
  }

  // Analytic curl-curl tensor against finite differences of the Green function.
  {
    const CavityGreen green(g, omega, params_for({}), k);
    double worst = 0.0;
    for (int c = 0; c < 2; ++c) {
      const Vec3 r1 = detail::random_point(rng, g, 0.15);
      Vec3 r2 = detail::random_point(rng, g, 0.15);
      if (norm(r2 - r1) < 0.2) r2 = r1 + Vec3{0.2, 0.05, -0.03};
      const Mat3 Ta = green.tensor(r2, r1).T;
      const Mat3 Tf = cavdd::detail::curl_curl(detail::fd_mixed(green, r2, r1, 1e-3));
      worst = std::max(worst, detail::mat_rel(Tf, Ta));
    }
    out.push_back({"fd_tensor", worst, 1e-6, worst <= 1e-6});
  }

  // Gamma tends to 1/(q^2 - k^2) for large Kc.
  {
    double worst = 0.0;
    for (double kk : {0.3, 2.0, 7.3, 15.0})
      for (double q : {1.0, 4.0, 9.7, 21.0}) {
        const double exact = 1.0 / (q * q - kk * kk);
        worst = std::max(worst, detail::rel(gamma_cutoff(kk, q, 1e6), exact));
      }
    out.push_back({"gamma_limit", worst, 1e-8, worst <= 1e-8});
  }

  // Per-component orthonormality by separable Gauss-Legendre quadrature.
  {
    std::uniform_int_distribution<int> idx(0, 4);
    std::vector<double> xs[3], ws[3];
    for (std::size_t a = 0; a < 3; ++a) detail::gauss_legendre(24, 0.0, g.side(a), xs[a], ws[a]);
    double worst = 0.0;
    for (int c = 0; c < 4; ++c) {
      ModeIndex m1, m2;
      do m1 = {idx(rng), idx(rng), idx(rng)}; while (m1.degenerate());
      if (c % 2 == 0) m2 = m1;
      else do m2 = {idx(rng), idx(rng), idx(rng)}; while (m2.degenerate() || m2 == m1);
      for (std::size_t s = 0; s < 3; ++s) {
        double integral = 0.0;
        for (std::size_t i = 0; i < xs[0].size(); ++i)
          for (std::size_t j = 0; j < xs[1].size(); ++j)
            for (std::size_t l = 0; l < xs[2].size(); ++l) {
              const Vec3 r{xs[0][i], xs[1][j], xs[2][l]};
              integral += ws[0][i] * ws[1][j] * ws[2][l] * mode_function(m1, r, g)[s] * mode_function(m2, r, g)[s];
            }
        // A component with a zero index on another axis vanishes identically.
        bool vanishes = false;
        for (std::size_t a = 0; a < 3; ++a) vanishes = vanishes || (a != s && m1[a] == 0);
        const double expected = (m1 == m2 && !vanishes) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(integral - expected));
      }
    }
    out.push_back({"orthonormality", worst, 1e-6, worst <= 1e-6});
  }

  // First-order condition of the single-mode elimination.
  {
    std::uniform_real_distribution<double> w(0.5, 3.0), gg(-0.2, 0.2);
    double worst = 0.0;
    for (int c = 0; c < 20; ++c) {
      SingleModeSystem s;
      s.omega1 = w(rng), s.omega2 = w(rng), s.nu = w(rng) + 3.5;
      s.g1 = {gg(rng), gg(rng)}, s.g2 = {gg(rng), gg(rng)};
      worst = std::max(worst, first_order_residual(s));
    }
    out.push_back({"fn_residual", worst, 1e-14, worst <= 1e-14});
  }
  return out;
}

}  // namespace cavdd::cli
