#pragma once

// Evaluation of single points and sweeps, and CSV rendering.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cavdd/cli/config.hpp"
#include "cavdd/ewald.hpp"
#include "cavdd/freespace.hpp"

namespace cavdd::cli {

inline constexpr const char* version = "0.1.0";
inline constexpr const char* workers_env = "CAVDD_WORKERS";

struct Row {
  double sweep_value = 0.0;
  InteractionTerm term;
  double v0_free = 0.0;
  double vw21_free = 0.0;
  double vw12_free = 0.0;
};

struct RunResult {
  std::vector<Row> rows;   // every term, unfiltered
  std::size_t failed = 0;  // terms with a tripped resonance guard
};

/// Dipoles for one sample, with positions and (for frequency sweeps) level
/// scale applied. A frequency sweep rescales both dipoles' levels by w / w_ref,
/// w_ref being dipole 1's level spread, so dipole 1's gap equals the sample.
inline std::pair<Dipole, Dipole> sample_dipoles(const RunConfig& cfg, int i) {
  auto [r1, r2] = sample_positions(cfg, i);
  DipoleSpec s1 = cfg.dipoles[0];
  DipoleSpec s2 = cfg.dipoles[1];
  s1.position = r1;
  s2.position = r2;
  if (cfg.sweep && cfg.sweep->variable == SweepVariable::Frequency) {
    const Dipole ref = make_dipole(cfg.dipoles[0], cfg.constants, "dipoles[0]");
    const double w_ref = (ref.energies().back() - ref.energies().front()) / cfg.constants.hbar;
    const double f = cfg.sweep->value(i) / w_ref;
    for (double& e : s1.levels) e *= f;
    for (double& e : s2.levels) e *= f;
  }
  return {make_dipole(s1, cfg.constants, "dipoles[0]"), make_dipole(s2, cfg.constants, "dipoles[1]")};
}

inline std::vector<Row> evaluate(const RunConfig& cfg, const Dipole& d1, const Dipole& d2, double sweep_value) {
  const Constants& k = cfg.constants;
  const InteractionTable table = cfg.geometry ? pair_interaction_cavity(d1, d2, *cfg.geometry, k, cfg.ewald)
                                              : pair_interaction_free(d1, d2, k);
  std::vector<Row> rows;
  rows.reserve(table.terms.size());
  const Vec3& r1 = d1.position();
  const Vec3& r2 = d2.position();
  for (const auto& t : table.terms) {
    Row r;
    r.sweep_value = sweep_value;
    r.term = t;
    const Vec3& m1 = d1.moment(t.a, t.b);
    const Vec3& m2 = d2.moment(t.u, t.v);
    r.v0_free = v_static(m1, m2, r1, r2, k);
    r.vw21_free = v_retarded(m1, m2, r1, r2, t.omega21, k);
    r.vw12_free = v_retarded(m2, m1, r2, r1, t.omega12, k);
    rows.push_back(r);
  }
  return rows;
}

/// Worker count: explicit request, then config, then the environment, then
/// the hardware.
inline unsigned resolve_workers(int requested, const RunConfig& cfg) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (cfg.workers > 0) return static_cast<unsigned>(cfg.workers);
  if (const char* env = std::getenv(workers_env)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ConfigError(workers_env, std::string("expected a positive integer, got \"") + env + "\"");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline RunResult run_single(const RunConfig& cfg) {
  validate(cfg);
  const Dipole d1 = make_dipole(cfg.dipoles[0], cfg.constants, "dipoles[0]");
  const Dipole d2 = make_dipole(cfg.dipoles[1], cfg.constants, "dipoles[1]");
  RunResult out;
  out.rows = evaluate(cfg, d1, d2, 0.0);
  for (const auto& r : out.rows) out.failed += r.term.ok() ? 0 : 1;
  return out;
}

/// Evaluates every sweep sample with a bounded pool. Rows come back in sample
/// order whatever the completion order. All sample positions are checked
/// before any evaluation starts.
inline RunResult run_sweep(const RunConfig& cfg, unsigned workers) {
  validate(cfg);
  if (!cfg.sweep) throw ConfigError("sweep", "required for a sweep run");
  const int n = cfg.sweep->samples;
  std::vector<std::vector<Row>> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        const auto [d1, d2] = sample_dipoles(cfg, i);
        results[static_cast<std::size_t>(i)] = evaluate(cfg, d1, d2, cfg.sweep->value(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunResult out;
  for (auto& rs : results)
    for (auto& r : rs) {
      out.failed += r.term.ok() ? 0 : 1;
      out.rows.push_back(std::move(r));
    }
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string cell(const Row& r, const std::string& col) {
  const InteractionTerm& t = r.term;
  if (col == "sweep_value") return format_double(r.sweep_value);
  if (col == "u") return std::to_string(t.u);
  if (col == "v") return std::to_string(t.v);
  if (col == "a") return std::to_string(t.a);
  if (col == "b") return std::to_string(t.b);
  if (col == "class") return std::string(to_string(t.term_class));
  if (col == "status21") return std::string(to_string(t.status21));
  if (col == "status12") return std::string(to_string(t.status12));
  if (col == "omega21") return format_double(t.omega21);
  if (col == "omega12") return format_double(t.omega12);
  if (col == "v21") return format_double(t.v21);
  if (col == "v12") return format_double(t.v12);
  if (col == "vsym") return format_double(t.vsym);
  if (col == "v21_image") return format_double(t.v21_image);
  if (col == "v21_mode") return format_double(t.v21_mode);
  if (col == "v12_image") return format_double(t.v12_image);
  if (col == "v12_mode") return format_double(t.v12_mode);
  if (col == "tail21") return format_double(t.tail21);
  if (col == "tail12") return format_double(t.tail12);
  if (col == "v0_free") return format_double(r.v0_free);
  if (col == "vw21_free") return format_double(r.vw21_free);
  if (col == "vw12_free") return format_double(r.vw12_free);
  if (col == "wall_warning") return t.wall_warning ? "1" : "0";
  throw ConfigError("output.columns", "unknown column \"" + col + "\"");
}

inline std::vector<std::string> selected_columns(const RunConfig& cfg) {
  std::vector<std::string> cols;
  for (const auto& c : cfg.output.columns.empty() ? output_columns() : cfg.output.columns)
    if (c != "sweep_value" || cfg.sweep) cols.push_back(c);
  return cols;
}

inline bool keep_row(const RunConfig& cfg, const Dipole& d1, const Dipole& d2, const Row& r) {
  const auto& cls = cfg.output.classes;
  if (!cls.empty() && std::find(cls.begin(), cls.end(), r.term.term_class) == cls.end()) return false;
  if (cfg.output.skip_zero_moments) {
    const Vec3 zero{};
    if (d1.moment(r.term.a, r.term.b) == zero || d2.moment(r.term.u, r.term.v) == zero) return false;
  }
  return true;
}

/// Rows that survive the output filters, and how many of them failed.
struct EmittedCount {
  std::size_t rows = 0;
  std::size_t failed = 0;
};

inline EmittedCount count_emitted(const RunConfig& cfg, const RunResult& result) {
  const Dipole d1 = make_dipole(cfg.dipoles[0], cfg.constants, "dipoles[0]");
  const Dipole d2 = make_dipole(cfg.dipoles[1], cfg.constants, "dipoles[1]");
  EmittedCount c;
  for (const auto& r : result.rows)
    if (keep_row(cfg, d1, d2, r)) {
      ++c.rows;
      c.failed += r.term.ok() ? 0 : 1;
    }
  return c;
}

/// Writes metadata, header and the filtered rows. Identical inputs give
/// identical bytes; nothing run-specific (time, host, worker count) is written.
inline void write_csv(std::ostream& os, const RunConfig& cfg, const RunResult& result,
                      const std::string& mode_label) {
  const Constants& k = cfg.constants;
  os << "# cavdd " << version << "\n";
  os << "# config_hash fnv1a64:" << hash_string(config_hash(cfg)) << "\n";
  os << "# constants c=" << format_double(k.c) << " mu0=" << format_double(k.mu0)
     << " hbar=" << format_double(k.hbar) << "\n";
  if (cfg.geometry)
    os << "# geometry Lx=" << format_double(cfg.geometry->Lx) << " Ly=" << format_double(cfg.geometry->Ly)
       << " Lz=" << format_double(cfg.geometry->Lz) << "\n";
  else
    os << "# geometry free_space\n";
  os << "# run " << mode_label << "\n";
  if (cfg.sweep)
    os << "# sweep variable=" << to_string(cfg.sweep->variable) << " axis=" << detail::axis_name(cfg.sweep->axis)
       << " samples=" << cfg.sweep->samples << "\n";
  if (!cfg.description.empty()) {
    std::string line;
    for (char c : cfg.description) {
      if (c == '\n') {
        os << "# " << line << "\n";
        line.clear();
      } else {
        line += c;
      }
    }
    if (!line.empty()) os << "# " << line << "\n";
  }

  const auto cols = selected_columns(cfg);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";

  // Filters need the moment data of the sample the row came from; level
  // structure does not change along a sweep, so the base dipoles suffice.
  const Dipole d1 = make_dipole(cfg.dipoles[0], k, "dipoles[0]");
  const Dipole d2 = make_dipole(cfg.dipoles[1], k, "dipoles[1]");
  for (const auto& r : result.rows) {
    if (!keep_row(cfg, d1, d2, r)) continue;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cell(r, cols[i]);
    os << "\n";
  }
}

/// Mode table dump: one row per non-degenerate mode up to k_max.
inline void write_mode_table(std::ostream& os, const CavityGeometry& g, double k_max) {
  const ModeTable table(g, k_max);
  os << "# cavdd " << version << "\n";
  os << "# geometry Lx=" << format_double(g.Lx) << " Ly=" << format_double(g.Ly) << " Lz=" << format_double(g.Lz)
     << "\n";
  os << "# k_max " << format_double(k_max) << " modes=" << table.size() << "\n";
  os << "m,n,p,k\n";
  for (const Mode& m : table.modes())
    os << m.idx.m << "," << m.idx.n << "," << m.idx.p << "," << format_double(m.k) << "\n";
}

}  // namespace cavdd::cli
