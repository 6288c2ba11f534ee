// cavdd: dipole-dipole interaction in a rectangular cavity from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cavdd/cli/config.hpp"
#include "cavdd/cli/presets.hpp"
#include "cavdd/cli/runner.hpp"
#include "cavdd/cli/selftest.hpp"

namespace {

using namespace cavdd;
using namespace cavdd::cli;

enum Exit { kOk = 0, kConfig = 2, kGuard = 3, kSelftest = 4 };

int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return kOk;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return kConfig;
  }
  out << text;
  return out ? kOk : kConfig;
}

// The spectral half must reproduce the static dipolar limit before any
// cavity numbers are trusted.
bool sign_check(const RunConfig& cfg) {
  if (!cfg.geometry) return true;
  const double ratio = spectral_sign_probe(*cfg.geometry, cfg.constants);
  if (std::abs(ratio - 1.0) <= 0.02) return true;
  std::cerr << "error: startup sign check failed, V_cav/V_static = " << ratio << "\n";
  return false;
}

int run(const RunConfig& cfg, const std::string& out_flag, int workers, const std::string& label) {
  if (!sign_check(cfg)) return kSelftest;
  const RunResult result = cfg.sweep ? run_sweep(cfg, resolve_workers(workers, cfg)) : run_single(cfg);
  std::ostringstream os;
  write_csv(os, cfg, result, label);
  const int rc = emit(os.str(), out_flag.empty() ? cfg.output.path : out_flag);
  if (rc != kOk) return rc;
  const EmittedCount n = count_emitted(cfg, result);
  if (n.failed > 0) {
    std::cerr << "warning: " << n.failed << " of " << n.rows << " reported terms hit the resonance guard\n";
    if (n.failed == n.rows) return kGuard;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic dipole-dipole interaction in a rectangular cavity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  std::string config_path, out_path, preset_name;
  int workers = 0;
  std::uint64_t seed = 12345;
  double kmax = 0.0;
  bool flip = false, dump = false;
  double kc_scale = 0.0;

  auto* single = app.add_subcommand("single", "evaluate one configuration");
  single->add_option("--config", config_path, "run configuration (JSON)")->required();
  single->add_option("--out", out_path, "CSV output path (default: config output.path or stdout)");
  single->add_option("--workers", workers, "worker threads");

  auto* sweep = app.add_subcommand("sweep", "evaluate the configured sweep");
  sweep->add_option("--config", config_path, "run configuration (JSON)")->required();
  sweep->add_option("--out", out_path, "CSV output path");
  sweep->add_option("--workers", workers, "worker threads (default: config, then CAVDD_WORKERS, then cores)")
      ->check(CLI::PositiveNumber);

  auto* modes = app.add_subcommand("modes", "dump the cavity mode table");
  modes->add_option("--config", config_path, "configuration providing the geometry (default: unit cube)");
  modes->add_option("--kmax", kmax, "wavenumber cutoff")->required()->check(CLI::PositiveNumber);
  modes->add_option("--out", out_path, "CSV output path");

  auto* selftest = app.add_subcommand("selftest", "run the embedded invariant checks");
  selftest->add_option("--seed", seed, "seed for randomized configurations");
  selftest->add_flag("--flip-spectral-sign", flip, "negative control: invert the mode contribution");
  selftest->add_option("--kc-scale", kc_scale, "negative control: scale Kc without reselecting truncation")
      ->check(CLI::PositiveNumber);

  auto* pre = app.add_subcommand("preset", "run a built-in scenario");
  pre->add_option("name", preset_name, "fig2a ... fig2g")->required();
  pre->add_option("--out", out_path, "CSV output path");
  pre->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  pre->add_flag("--dump-config", dump, "print the preset configuration instead of running it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*single || *sweep) {
      const RunConfig cfg = load_config(config_path);
      if (*sweep && !cfg.sweep) throw ConfigError("sweep", "the sweep subcommand needs a sweep section");
      if (*single && cfg.sweep) throw ConfigError("sweep", "the single subcommand does not take a sweep section");
      return run(cfg, out_path, workers, *single ? "single" : "sweep");
    }
    if (*modes) {
      CavityGeometry g = CavityGeometry::cube(1.0);
      if (!config_path.empty()) {
        const RunConfig cfg = load_config(config_path);
        if (!cfg.geometry) throw ConfigError("geometry", "the modes subcommand needs a geometry");
        g = *cfg.geometry;
      }
      std::ostringstream os;
      write_mode_table(os, g, kmax);
      return emit(os.str(), out_path);
    }
    if (*selftest) {
      SelftestOptions opt;
      opt.seed = seed;
      opt.flip_spectral_sign = flip;
      if (kc_scale > 0.0) opt.kc_scale = kc_scale;
      bool ok = true;
      for (const auto& c : run_selftest(opt)) {
        std::printf("%-20s %s  measured %.3e  threshold %.1e\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.measured, c.threshold);
        ok = ok && c.pass;
      }
      std::printf("selftest %s\n", ok ? "passed" : "FAILED");
      return ok ? kOk : kSelftest;
    }
    if (*pre) {
      const RunConfig cfg = preset(preset_name);
      if (dump) return emit(serialize(cfg), out_path);
      return run(cfg, out_path, workers, "preset " + preset_name);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const OutsideGeometry& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DegenerateSeparation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResonanceGuard& e) {
    std::cerr << "resonance guard: " << e.what() << "\n";
    return kGuard;
  }
  return kOk;
}
