#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cavdd/cli/config.hpp"
#include "cavdd/cli/presets.hpp"
#include "cavdd/cli/runner.hpp"
#include "cavdd/cli/selftest.hpp"

using namespace cavdd;
using namespace cavdd::cli;

namespace fs = std::filesystem;

namespace {

const char* kBase = R"({
  "geometry": {"Lx": 1, "Ly": 1, "Lz": 1},
  "dipoles": [
    {"position": [0.4, 0.5, 0.5], "energies": [0, 20], "moments": [[[0,0,0],[0,0,1]], [[0,0,1],[0,0,0]]]},
    {"position": [0.6, 0.5, 0.5], "energies": [0, 20], "moments": [[[0,0,0],[0,0,1]], [[0,0,1],[0,0,0]]]}
  ]
})";

json base() { return json::parse(kBase); }

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string csv(const RunConfig& cfg, const RunResult& r) {
  std::ostringstream os;
  write_csv(os, cfg, r, "test");
  return os.str();
}

RunConfig small_sweep() {
  json j = base();
  j["sweep"] = {{"variable", "separation"}, {"axis", "x"}, {"from", 0.05}, {"to", 0.3}, {"samples", 6}};
  j["dipoles"][1]["position"] = {0.4, 0.5, 0.5};
  j["ewald"] = {{"target_tail", 1e-10}};
  return parse_config(j);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cavdd_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(CAVDD_BINARY) + " " + args + " > " + scratch("stdout.txt").string() +
                          " 2> " + scratch("stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Config, ParsesMinimalDocument) {
  const RunConfig cfg = parse_config(base());
  ASSERT_TRUE(cfg.geometry);
  EXPECT_EQ(cfg.geometry->Lx, 1.0);
  EXPECT_EQ(cfg.dipoles[1].position, (Vec3{0.6, 0.5, 0.5}));
  EXPECT_FALSE(cfg.sweep);
  EXPECT_EQ(cfg.constants, Constants{});
}

TEST(Config, UnknownKeysAreErrors) {
  json j = base();
  j["geometry"]["Lw"] = 1;
  EXPECT_NE(error_of(j).find("geometry"), std::string::npos);
  EXPECT_NE(error_of(j).find("Lw"), std::string::npos);
  j = base();
  j["colour"] = "blue";
  EXPECT_NE(error_of(j).find("colour"), std::string::npos);
  j = base();
  j["dipoles"][0]["spin"] = 1;
  EXPECT_NE(error_of(j).find("dipoles[0]"), std::string::npos);
}

TEST(Config, MissingAndMistypedFieldsNameTheField) {
  json j = base();
  j["geometry"].erase("Lz");
  EXPECT_NE(error_of(j).find("geometry.Lz"), std::string::npos);
  j = base();
  j["geometry"]["Lx"] = "one";
  EXPECT_NE(error_of(j).find("geometry.Lx"), std::string::npos);
  j = base();
  j["dipoles"][1].erase("position");
  EXPECT_NE(error_of(j).find("dipoles[1].position"), std::string::npos);
  j = base();
  j["dipoles"][0]["moments"][0][1] = {0, 1};
  EXPECT_NE(error_of(j).find("dipoles[0].moments[0][1]"), std::string::npos);
  j = base();
  j["dipoles"][0]["moments"][0][1] = {0, 1, 0};
  EXPECT_NE(error_of(j).find("dipoles[0]"), std::string::npos);  // not Hermitian
  j = base();
  j["dipoles"][0]["frequencies"] = {0, 1};
  EXPECT_NE(error_of(j).find("exactly one"), std::string::npos);
  EXPECT_THROW(parse_config_text("{\"dipoles\": ["), ConfigError);
}

TEST(Config, PhysicalValidation) {
  json j = base();
  j["dipoles"][1]["position"] = {0.6, 0.5, 1.5};
  EXPECT_NE(error_of(j).find("dipoles[1].position"), std::string::npos);
  j = base();
  j["constants"] = {{"c", -1}};
  EXPECT_NE(error_of(j).find("constants"), std::string::npos);
  j = base();
  j["ewald"] = {{"kc", 0}};
  EXPECT_NE(error_of(j).find("ewald.kc"), std::string::npos);
  j = base();
  j["output"] = {{"columns", {"vsym", "bogus"}}};
  EXPECT_NE(error_of(j).find("bogus"), std::string::npos);
  j = base();
  j["output"] = {{"classes", {"sideways"}}};
  EXPECT_NE(error_of(j).find("output.classes"), std::string::npos);
}

TEST(Config, SweepSampleOutsideCavityNamesTheSample) {
  json j = base();
  j["sweep"] = {{"variable", "separation"}, {"axis", "x"}, {"from", 0.1}, {"to", 0.9}, {"samples", 5}};
  const std::string e = error_of(j);
  // r2 = 0.4 + x leaves the box from x = 0.7 on: samples 3 and 4.
  EXPECT_NE(e.find("sample 3"), std::string::npos) << e;
}

TEST(Config, SweepValidation) {
  json j = base();
  j["sweep"] = {{"variable", "separation"}, {"from", 0.2}, {"to", 0.1}, {"samples", 5}};
  EXPECT_NE(error_of(j).find("sweep"), std::string::npos);
  j["sweep"] = {{"variable", "spin"}, {"from", 0.1}, {"to", 0.2}, {"samples", 5}};
  EXPECT_NE(error_of(j).find("sweep.variable"), std::string::npos);
  j["sweep"] = {{"variable", "offset"}, {"axis", "w"}, {"from", 0.1}, {"to", 0.2}, {"samples", 5}};
  EXPECT_NE(error_of(j).find("sweep.axis"), std::string::npos);
  j["sweep"] = {{"variable", "offset"}, {"from", 0.1}, {"to", 0.2}, {"samples", 1}};
  EXPECT_NE(error_of(j).find("sweep.samples"), std::string::npos);
}

TEST(Config, RoundTripsEveryPreset) {
  for (const auto& name : preset_names()) {
    const RunConfig cfg = preset(name);
    const RunConfig back = parse_config_text(serialize(cfg));
    EXPECT_EQ(back, cfg) << name;
    EXPECT_EQ(serialize(back), serialize(cfg)) << name;
  }
}

TEST(Config, RoundTripsOptionalFields) {
  json j = base();
  j["description"] = "two lines\nof text";
  j["constants"] = {{"c", 2.0}, {"mu0", 0.5}, {"hbar", 3.0}};
  j["ewald"] = {{"kc", 1.5}, {"image_range", 2}, {"mode_cutoff", 40.0}, {"resonance_tol", 1e-5}};
  j["output"] = {{"path", "out.csv"}, {"columns", {"u", "vsym"}}, {"classes", {"resonant"}}};
  j["workers"] = 3;
  j["dipoles"][0].erase("energies");
  j["dipoles"][0]["frequencies"] = {0.0, 7.0};
  const RunConfig cfg = parse_config(j);
  EXPECT_EQ(parse_config_text(serialize(cfg)), cfg);
  EXPECT_TRUE(parse_config_text(serialize(cfg)).dipoles[0].levels_are_frequencies);
}

TEST(Config, HashIgnoresWorkersAndOutputPath) {
  RunConfig a = preset("fig2a");
  RunConfig b = a;
  b.workers = 7;
  b.output.path = "elsewhere.csv";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.dipoles[0].position.x += 1e-9;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hash_string(config_hash(a)).size(), 16u);
  EXPECT_EQ(config_hash(a), config_hash(parse_config_text(serialize(a))));
}

TEST(Presets, UnknownNameListsChoices) {
  try {
    preset("fig3");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fig2a"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------

TEST(Runner, FreeSpaceSingleMatchesStaticFormula) {
  json j = base();
  j.erase("geometry");
  j["dipoles"][0] = {{"position", {0, 0, 0}}, {"energies", {0}}, {"moments", {{{0, 0, 1}}}}};
  j["dipoles"][1] = {{"position", {0.7, 0, 0}}, {"energies", {0}}, {"moments", {{{0, 0, 1}}}}};
  const RunConfig cfg = parse_config(j);
  const RunResult r = run_single(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].term.vsym, v_static(ez, ez, {0, 0, 0}, {0.7, 0, 0}, Constants{}));
  EXPECT_EQ(r.rows[0].term.vsym, r.rows[0].v0_free);
  const std::string text = csv(cfg, r);
  EXPECT_NE(text.find("# geometry free_space"), std::string::npos);
  EXPECT_NE(text.find(format_double(r.rows[0].term.vsym)), std::string::npos);
}

TEST(Runner, CsvIsIdenticalAcrossWorkerCounts) {
  const RunConfig cfg = small_sweep();
  const std::string one = csv(cfg, run_sweep(cfg, 1));
  EXPECT_EQ(csv(cfg, run_sweep(cfg, 3)), one);
  EXPECT_EQ(csv(cfg, run_sweep(cfg, 8)), one);
  EXPECT_EQ(one.rfind("# cavdd", 0), 0u);
}

TEST(Runner, CsvLayout) {
  const RunConfig cfg = small_sweep();
  const std::string text = csv(cfg, run_sweep(cfg, 2));
  std::istringstream in(text);
  std::string line, header;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line[0] == '#') continue;
    if (header.empty()) {
      header = line;
      continue;
    }
    ++rows;
  }
  EXPECT_EQ(header.rfind("sweep_value,u,v,a,b,class", 0), 0u);
  EXPECT_EQ(rows, 6u * 16u);
  EXPECT_NE(text.find("1.0000000000000001e-01"), std::string::npos);
}

TEST(Runner, OutputFilters) {
  RunConfig cfg = small_sweep();
  cfg.output.skip_zero_moments = true;
  cfg.output.classes = {TermClass::Resonant};
  cfg.output.columns = {"sweep_value", "class", "vsym"};
  const RunResult r = run_sweep(cfg, 1);
  const std::string text = csv(cfg, r);
  EXPECT_NE(text.find("\nsweep_value,class,vsym\n"), std::string::npos);
  std::size_t n = 0;
  for (std::size_t p = text.find(",resonant,"); p != std::string::npos; p = text.find(",resonant,", p + 1)) ++n;
  EXPECT_EQ(n, 6u * 2u);
  EXPECT_EQ(text.find("counter_rotating"), std::string::npos);
  const EmittedCount c = count_emitted(cfg, r);
  EXPECT_EQ(c.rows, 12u);
  EXPECT_EQ(c.failed, 0u);
}

TEST(Runner, ResonantTermProducesFlaggedRow) {
  json j = base();
  const double w = std::sqrt(2.0) * pi;
  j["dipoles"][0]["energies"] = {0.0, w};
  const RunConfig cfg = parse_config(j);
  const RunResult r = run_single(cfg);
  EXPECT_GT(r.failed, 0u);
  EXPECT_LT(r.failed, r.rows.size());
  const std::string text = csv(cfg, r);
  EXPECT_NE(text.find("resonance_guard"), std::string::npos);
  EXPECT_NE(text.find(",nan,"), std::string::npos);
}

TEST(Runner, WorkerResolution) {
  RunConfig cfg = small_sweep();
  ::unsetenv(workers_env);
  EXPECT_EQ(resolve_workers(5, cfg), 5u);
  EXPECT_GE(resolve_workers(0, cfg), 1u);
  ::setenv(workers_env, "3", 1);
  EXPECT_EQ(resolve_workers(0, cfg), 3u);
  cfg.workers = 2;
  EXPECT_EQ(resolve_workers(0, cfg), 2u);
  cfg.workers = 0;
  ::setenv(workers_env, "lots", 1);
  EXPECT_THROW(resolve_workers(0, cfg), ConfigError);
  ::unsetenv(workers_env);
}

TEST(Runner, FrequencySweepScalesLevels) {
  json j = base();
  j["sweep"] = {{"variable", "frequency"}, {"from", 5.0}, {"to", 10.0}, {"samples", 3}};
  const RunConfig cfg = parse_config(j);
  const auto [d1, d2] = sample_dipoles(cfg, 1);
  EXPECT_DOUBLE_EQ(d1.energies()[1], 7.5);
  EXPECT_DOUBLE_EQ(d2.energies()[1], 7.5);
}

TEST(Runner, OffsetSweepMovesBothDipoles) {
  json j = base();
  j["sweep"] = {{"variable", "offset"}, {"axis", "z"}, {"from", 0.1}, {"to", 0.9}, {"samples", 3}};
  const RunConfig cfg = parse_config(j);
  const auto [r1, r2] = sample_positions(cfg, 0);
  EXPECT_DOUBLE_EQ(r1.z, 0.1);
  EXPECT_DOUBLE_EQ(r2.z, 0.1);
  EXPECT_DOUBLE_EQ(r2.x - r1.x, 0.2);
}

TEST(Runner, ModeTableDump) {
  std::ostringstream os;
  write_mode_table(os, CavityGeometry::cube(1.0), 5.0);
  const std::string text = os.str();
  EXPECT_NE(text.find("m,n,p,k\n0,1,1,4.4428829381583"), std::string::npos);
  EXPECT_NE(text.find("modes=3"), std::string::npos);
}

TEST(Selftest, PassesAndNegativeControlsFail) {
  for (const auto& c : run_selftest()) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
  SelftestOptions flip;
  flip.flip_spectral_sign = true;
  bool any_fail = false;
  for (const auto& c : run_selftest(flip)) any_fail = any_fail || !c.pass;
  EXPECT_TRUE(any_fail);
}

// ---------------------------------------------------------------------------

TEST(Binary, ExitCodes) {
  const fs::path good = scratch("good.json"), bad = scratch("bad.json"), guard = scratch("guard.json");
  write_file(good, kBase);
  json b = base();
  b["geometry"]["Lw"] = 2;
  write_file(bad, b.dump());
  json g = base();
  const double w = std::sqrt(2.0) * pi;
  g["dipoles"][0]["energies"] = {0.0, w};
  g["dipoles"][1]["energies"] = {0.0, w};
  g["output"] = {{"skip_zero_moments", true}};
  write_file(guard, g.dump());

  EXPECT_EQ(run_binary("single --config " + good.string()), 0);
  EXPECT_NE(slurp(scratch("stdout.txt")).find("# run single"), std::string::npos);
  EXPECT_EQ(run_binary("single --config " + bad.string()), 2);
  EXPECT_NE(slurp(scratch("stderr.txt")).find("Lw"), std::string::npos);
  EXPECT_EQ(run_binary("sweep --config " + good.string()), 2);
  EXPECT_EQ(run_binary("single --config " + scratch("missing.json").string()), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);
  EXPECT_EQ(run_binary("single --config " + guard.string()), 3);
  EXPECT_EQ(run_binary("selftest --flip-spectral-sign"), 4);
  EXPECT_EQ(run_binary("selftest"), 0);
}

TEST(Binary, PresetOutputIsByteIdentical) {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  EXPECT_EQ(run_binary("preset fig2d --workers 1 --out " + a.string()), 0);
  EXPECT_EQ(run_binary("preset fig2d --workers 2 --out " + b.string()), 0);
  const std::string x = slurp(a);
  EXPECT_FALSE(x.empty());
  EXPECT_EQ(x, slurp(b));
}

TEST(Binary, DumpedPresetReloads) {
  const fs::path p = scratch("fig2f.json");
  EXPECT_EQ(run_binary("preset fig2f --dump-config --out " + p.string()), 0);
  EXPECT_EQ(load_config(p.string()), preset("fig2f"));
}

TEST(Binary, ModesSubcommand) {
  const fs::path p = scratch("modes.csv");
  EXPECT_EQ(run_binary("modes --kmax 5 --out " + p.string()), 0);
  EXPECT_NE(slurp(p).find("1,1,0,"), std::string::npos);
  EXPECT_EQ(run_binary("modes"), 2);
}
