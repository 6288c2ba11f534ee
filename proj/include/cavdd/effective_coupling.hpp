#pragma once

// Second-order elimination of a single shared field mode (Froehlich-Nakajima /
// Schrieffer-Wolff type) for two two-level dipoles:
//
//   H0 = w1 s1+ s1- + w2 s2+ s2- + nu a+ a
//   V  = g1 s1+ a + g2 s2+ a + h.c.
//
// The generator S = A s1+ a + B s2+ a - h.c. removes V at first order when
// V + [H0, S] = 0, leaving the exchange coupling beta and the mode-dependent
// level shifts xi_1, xi_2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "cavdd/core.hpp"

namespace cavdd {

using complex = std::complex<double>;

struct SingleModeSystem {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double nu = 0.0;
  complex g1{};
  complex g2{};
  /// Minimum |w_alpha - nu|; defaults to 1e-9 max(|w1|, |w2|, |nu|).
  std::optional<double> detune_guard;

  double guard() const {
    return detune_guard.value_or(1e-9 * std::max({std::abs(omega1), std::abs(omega2), std::abs(nu)}));
  }

  void validate() const {
    if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(nu) || !std::isfinite(g1.real()) ||
        !std::isfinite(g1.imag()) || !std::isfinite(g2.real()) || !std::isfinite(g2.imag()))
      throw ValidationError("single-mode system has non-finite parameters");
    const double tol = guard();
    if (std::abs(omega1 - nu) <= tol || std::abs(omega2 - nu) <= tol)
      throw ResonanceGuard("mode elimination requires both dipoles detuned from the mode");
  }
};

struct FnResult {
  complex beta;   ///< coefficient of s1+ s2- (h.c. carries conj(beta))
  double xi1 = 0.0;
  double xi2 = 0.0;
  complex A;      ///< generator coefficient of s1+ a
  complex B;      ///< generator coefficient of s2+ a
};

inline FnResult fn_transform(const SingleModeSystem& s) {
  s.validate();
  const double d1 = s.omega1 - s.nu;
  const double d2 = s.omega2 - s.nu;
  FnResult r;
  r.beta = 0.5 * (s.g1 * std::conj(s.g2) / d1 + s.g2 * std::conj(s.g1) / d2);
  r.xi1 = std::norm(s.g1) / d1;
  r.xi2 = std::norm(s.g2) / d2;
  r.A = s.g1 / (s.nu - s.omega1);
  r.B = s.g2 / (s.nu - s.omega2);
  return r;
}

/// Coefficients of V + [H0, S] on {s1+ a, s2+ a, a+ s1-, a+ s2-} for a given
/// generator, using [H0, s_alpha+ a] = (w_alpha - nu) s_alpha+ a and
/// [H0, a+ s_alpha-] = (nu - w_alpha) a+ s_alpha-.
inline std::array<complex, 4> first_order_coefficients(const SingleModeSystem& s, complex A, complex B) {
  const double d1 = s.omega1 - s.nu;
  const double d2 = s.omega2 - s.nu;
  // S carries -conj(A) a+ s1-, so its commutator term is -conj(A) (nu - w1).
  return {s.g1 + d1 * A, s.g2 + d2 * B, std::conj(s.g1) - std::conj(A) * (-d1),
          std::conj(s.g2) - std::conj(B) * (-d2)};
}

/// Max coefficient magnitude of V + [H0, S] for an explicit generator.
inline double first_order_residual(const SingleModeSystem& s, complex A, complex B) {
  double r = 0.0;
  for (const complex& c : first_order_coefficients(s, A, B)) r = std::max(r, std::abs(c));
  return r;
}

/// Residual for the generator returned by fn_transform; zero up to rounding.
inline double first_order_residual(const SingleModeSystem& s) {
  const FnResult f = fn_transform(s);
  return first_order_residual(s, f.A, f.B);
}

/// Convention for turning a mode coupling zeta (as used by the mode sums)
/// into a single-mode amplitude in frequency units: g = zeta c / sqrt(2 hbar nu).
/// With it, g1 g2 / (w - nu) matches c^2 zeta_2 zeta_1 / (2w (w - c|k|)) at
/// nu = w. Only used for that comparison; not a derived normalization.
inline double coupling_from_zeta(double zeta_value, double nu, const Constants& k) {
  if (!(nu > 0.0)) throw ValidationError("mode frequency must be positive");
  return zeta_value * k.c / std::sqrt(2.0 * k.hbar * nu);
}

}  // namespace cavdd
