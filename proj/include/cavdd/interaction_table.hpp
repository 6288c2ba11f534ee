#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cavdd/core.hpp"

namespace cavdd {

/// Which kind of operator product tau_2^{uv} tau_1^{ab} a term multiplies.
enum class TermClass {
  Permanent,            ///< u == v and a == b: static dipoles, w = 0 both ways
  PermanentTransition,  ///< exactly one side is a permanent moment
  Resonant,             ///< co-rotating transitions with w_ab^(1) = -w_uv^(2)
  NonResonant,          ///< co-rotating (raising x lowering) with unequal gaps
  CounterRotating,      ///< two raising or two lowering transitions
};

inline std::string_view to_string(TermClass c) {
  switch (c) {
    case TermClass::Permanent: return "permanent";
    case TermClass::PermanentTransition: return "permanent_transition";
    case TermClass::Resonant: return "resonant";
    case TermClass::NonResonant: return "non_resonant";
    case TermClass::CounterRotating: return "counter_rotating";
  }
  return "unknown";
}

inline TermClass classify(LevelPair p1, double w1, LevelPair p2, double w2) {
  const bool perm1 = p1.a == p1.b;
  const bool perm2 = p2.a == p2.b;
  if (perm1 && perm2) return TermClass::Permanent;
  if (perm1 || perm2) return TermClass::PermanentTransition;
  const double scale = std::max(std::abs(w1), std::abs(w2));
  if (std::abs(w1 + w2) <= 1e-9 * scale) return TermClass::Resonant;
  if (w1 * w2 < 0.0) return TermClass::NonResonant;
  return TermClass::CounterRotating;
}

enum class TermStatus { Ok, ResonanceGuard };

inline std::string_view to_string(TermStatus s) { return s == TermStatus::Ok ? "ok" : "resonance_guard"; }

/// One coefficient V^{uv,ab} of tau_2^{uv} tau_1^{ab}.
struct InteractionTerm {
  std::size_t u = 0, v = 0;  ///< dipole-2 level pair
  std::size_t a = 0, b = 0;  ///< dipole-1 level pair
  TermClass term_class = TermClass::Permanent;
  double omega21 = 0.0;  ///< w_ab^(1): frequency of the field radiated by dipole 1
  double omega12 = 0.0;  ///< w_uv^(2): frequency of the field radiated by dipole 2
  double v21 = 0.0;      ///< V_{2<-1}^{uv,ab}(w_ab^(1))
  double v12 = 0.0;      ///< V_{1<-2}^{ab,uv}(w_uv^(2))
  double vsym = 0.0;     ///< (v21 + v12) / 2

  // Cavity-only diagnostics; NaN for free-space tables.
  double v21_image = std::numeric_limits<double>::quiet_NaN();
  double v21_mode = std::numeric_limits<double>::quiet_NaN();
  double v12_image = std::numeric_limits<double>::quiet_NaN();
  double v12_mode = std::numeric_limits<double>::quiet_NaN();
  double tail21 = std::numeric_limits<double>::quiet_NaN();
  double tail12 = std::numeric_limits<double>::quiet_NaN();

  TermStatus status21 = TermStatus::Ok;
  TermStatus status12 = TermStatus::Ok;
  bool wall_warning = false;  ///< a dipole sits on a wall

  bool ok() const { return status21 == TermStatus::Ok && status12 == TermStatus::Ok; }
};

/// Term table in lexicographic (u, v, a, b) order.
struct InteractionTable {
  std::vector<InteractionTerm> terms;

  /// Sum of the symmetrized coefficients over terms that evaluated cleanly.
  double symmetrized_total() const {
    double s = 0.0;
    for (const auto& t : terms)
      if (t.ok()) s += t.vsym;
    return s;
  }

  std::size_t failed_count() const {
    std::size_t n = 0;
    for (const auto& t : terms) n += t.ok() ? 0 : 1;
    return n;
  }

  const InteractionTerm* find(std::size_t u, std::size_t v, std::size_t a, std::size_t b) const {
    for (const auto& t : terms)
      if (t.u == u && t.v == v && t.a == a && t.b == b) return &t;
    return nullptr;
  }
};

}  // namespace cavdd
