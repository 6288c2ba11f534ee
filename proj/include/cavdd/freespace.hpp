#pragma once

// Closed-form interactions between magnetic dipoles in unbounded space.

#include <cmath>

#include "cavdd/core.hpp"
#include "cavdd/interaction_table.hpp"

namespace cavdd {

/// Separation data for a retarded kernel: eta = w R / c, R = |r2 - r1| and
/// the unit vector e_R pointing from dipole 1 to dipole 2.
struct RetardedKernel {
  double eta = 0.0;
  double R = 0.0;
  Vec3 e_R;

  static RetardedKernel make(const Vec3& r1, const Vec3& r2, double omega, const Constants& k) {
    require_finite(r1, "r1");
    require_finite(r2, "r2");
    const Vec3 d = r2 - r1;
    const double R = norm(d);
    if (!(R > 0.0)) throw DegenerateSeparation("dipole positions coincide at " + to_string(r1));
    return {omega * R / k.c, R, d / R};
  }
};

namespace detail {

// (mu0 / 4 pi R^3) [ (m1.m2) A - 3 (m1.e)(m2.e) B ]
inline double dipolar_form(const Vec3& m1, const Vec3& m2, const RetardedKernel& q, const Constants& k,
                           double A, double B) {
  const double prefactor = k.mu0 / (4.0 * pi * q.R * q.R * q.R);
  return prefactor * (dot(m1, m2) * A - 3.0 * dot(m1, q.e_R) * dot(m2, q.e_R) * B);
}

}  // namespace detail

/// Static dipolar energy (mu0 / 4 pi R^3)[m1.m2 - 3 (m1.e_R)(m2.e_R)].
inline double v_static(const Vec3& m1, const Vec3& m2, const Vec3& r1, const Vec3& r2, const Constants& k) {
  const auto q = RetardedKernel::make(r1, r2, 0.0, k);
  return detail::dipolar_form(m1, m2, q, k, 1.0, 1.0);
}

/// Retarded single-frequency interaction. Reduces bit-for-bit to v_static at
/// omega = 0 and is even in omega.
inline double v_retarded(const Vec3& m1, const Vec3& m2, const Vec3& r1, const Vec3& r2, double omega,
                         const Constants& k) {
  const auto q = RetardedKernel::make(r1, r2, omega, k);
  const double eta = q.eta;
  const double c = std::cos(eta);
  const double s = eta * std::sin(eta);
  const double A = (1.0 - eta * eta) * c + s;
  const double B = (1.0 - eta * eta / 3.0) * c + s;
  return detail::dipolar_form(m1, m2, q, k, A, B);
}

/// Scalar free-space vector-potential Green function cos(kR) / (4 pi R);
/// the tensor is this value times the identity.
inline double green_A_free(const Vec3& r, const Vec3& rp, double omega, const Constants& k) {
  require_finite(r, "field point");
  require_finite(rp, "source point");
  const double R = norm(r - rp);
  if (!(R > 0.0)) throw DegenerateSeparation("field and source point coincide at " + to_string(r));
  return std::cos(omega / k.c * R) / (4.0 * pi * R);
}

/// Every coefficient V^{uv,ab} for two dipoles in free space, each direction
/// evaluated at the frequency of the radiating transition, plus their mean.
inline InteractionTable pair_interaction_free(const Dipole& d1, const Dipole& d2, const Constants& k) {
  k.validate();
  const Vec3& r1 = d1.position();
  const Vec3& r2 = d2.position();
  if (!(norm(r2 - r1) > 0.0)) throw DegenerateSeparation("dipole positions coincide at " + to_string(r1));

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
          const Vec3& m1 = d1.moment(a, b);
          const Vec3& m2 = d2.moment(u, v);
          t.v21 = v_retarded(m1, m2, r1, r2, t.omega21, k);
          t.v12 = v_retarded(m2, m1, r2, r1, t.omega12, k);
          t.vsym = 0.5 * (t.v21 + t.v12);
          table.terms.push_back(t);
        }
  return table;
}

}  // namespace cavdd
