#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "vortexlab/harness.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {
const char* kSmall = R"([model]
nu = 0.2
M = 0
omega0 = gauss(0.5, 0.5, 0.15)
g = 1
[heat]
grid_g = 64
[particles]
n = 8
seed = 4
[pde]
pde_j = 16
pde_dt = 0.01
[output]
divisions = 2
pde_grid = 33
[sweep]
n_list = 8, 16
seeds = 3
norms = l2, sup
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("vortexlab_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const std::string& text, const std::string& name = "run.ini") {
  write_file(dir / name, text);
  return dir / name;
}

CommandOptions options(const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config_path = config.string();
  o.out_dir = out;
  return o;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}
}  // namespace

TEST_CASE("config parsing and resolution") {
  const HarnessConfig cfg = resolve_config(ConfigText::parse(kSmall));
  CHECK(cfg.sim.nu == 0.2);
  CHECK(cfg.sim.speed_bound == 0.0);
  CHECK_FALSE(cfg.auto_speed_bound);
  CHECK(cfg.sim.n == 8);
  CHECK(cfg.sim.grid_g == 64);
  CHECK(cfg.pde.modes == 16);
  CHECK(cfg.n_list == std::vector<int>{8, 16});
  CHECK(cfg.seeds() == std::vector<std::uint64_t>{4, 5, 6});
  REQUIRE(cfg.norms.size() == 2);
  CHECK(cfg.norms[1].kind == NormSpec::Kind::sup);
  CHECK(cfg.resolved.at("heat.epsilon_c") == "0.5");
  CHECK(cfg.resolved.at("domain.domain") == "unit_square");
  CHECK(resolve_config(ConfigText::parse(kSmall), 99).sim.seed == 99);

  const HarnessConfig autom = resolve_config(ConfigText::parse(replace(kSmall, "M = 0", "M = auto")));
  CHECK(autom.auto_speed_bound);
  CHECK(std::isinf(autom.pde.speed_bound));

  const ConfigText quoted = ConfigText::parse("[model]\nomega0 = \"x + y\"\n");
  CHECK(quoted.entries.at("model.omega0") == "x + y");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(resolve_config(ConfigText::parse(std::string(kSmall) + "[heat]\nbogus = 1\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(ConfigText::parse(replace(kSmall, "g = 1\n", ""))), MissingKeyError);
  try {
    resolve_config(ConfigText::parse(replace(kSmall, "nu = 0.2\n", "")));
    FAIL("expected a missing key");
  } catch (const MissingKeyError& e) {
    CHECK(e.key() == "model.nu");
    CHECK(std::string(e.what()) == "missing required config key: model.nu");
  }
  CHECK_THROWS_AS(resolve_config(ConfigText::parse(replace(kSmall, "n = 8", "n = eight"))), ConfigError);
  CHECK_THROWS_AS(resolve_config(ConfigText::parse(replace(kSmall, "g = 1", "g = sin("))), ConfigError);
  CHECK_THROWS_AS(ConfigText::parse("nu = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigText::load("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("fingerprints") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  const std::map<std::string, std::string> e{{"b", "2"}, {"a", "1"}};
  CHECK(canonical_text(e) == "a=1\nb=2\n");
  CHECK(fingerprint(e).size() == 16);

  const HarnessConfig a = resolve_config(ConfigText::parse(kSmall));
  const HarnessConfig spaced = resolve_config(ConfigText::parse(
      "# comment\n" + replace(replace(kSmall, "nu = 0.2", "nu   =   0.2  "), "[heat]", "\n[heat]")));
  CHECK(a.fingerprint() == spaced.fingerprint());
  const HarnessConfig other_seed = resolve_config(ConfigText::parse(kSmall), 7);
  CHECK(a.fingerprint() != other_seed.fingerprint());
  CHECK(a.pde_fingerprint() == other_seed.pde_fingerprint());
  const HarnessConfig other_nu = resolve_config(ConfigText::parse(replace(kSmall, "nu = 0.2", "nu = 0.3")));
  CHECK(a.pde_fingerprint() != other_nu.pde_fingerprint());
}

TEST_CASE("simulate writes a fingerprinted run directory") {
  TempDir tmp("simulate");
  const std::string text = replace(kSmall, "n = 8", "n = 8\ndump_particles = true");
  const fs::path cfg_path = write_config(tmp.path, text);
  std::ostringstream out, err;
  CommandOptions o = options(cfg_path, tmp.path / "out");
  o.seed = 11;
  REQUIRE(cmd_simulate(o, out, err) == 0);
  const HarnessConfig cfg = resolve_config(ConfigText::parse(text), 11);
  const fs::path dir = tmp.path / "out" / cfg.fingerprint();
  for (int k = 0; k <= 2; ++k) {
    const Snapshot s = read_snapshot(dir / snapshot_name(k));
    CHECK(s.header.seed == 11);
    CHECK(s.header.kind == "particle");
    CHECK(s.header.time == doctest::Approx(0.5 * k));
    CHECK(s.header.grid == 64);
    CHECK(s.header.n == 8);
  }
  CHECK(fs::exists(dir / "record.csv"));
  CHECK(fs::exists(dir / "particles.txt"));
  const CsvTable rec = parse_csv(read_file(dir / "record.csv"));
  CHECK(rec.rows.size() == 3);

  // the same seed reproduces the same bytes
  const std::string first = read_file(dir / "t_2.snap");
  REQUIRE(cmd_simulate(o, out, err) == 0);
  CHECK(read_file(dir / "t_2.snap") == first);
}

TEST_CASE("simulate failures are recorded") {
  TempDir tmp("simulate_fail");
  const std::string text = replace(kSmall, "grid_g = 64", "grid_g = 16");
  std::ostringstream out, err;
  CHECK(cmd_simulate(options(write_config(tmp.path, text), tmp.path / "out"), out, err) == 1);
  const fs::path dir = tmp.path / "out" / resolve_config(ConfigText::parse(text)).fingerprint();
  CHECK(read_file(dir / "error.txt").find("grid too coarse") != std::string::npos);
}

TEST_CASE("pde echoes the config and reuses its cache") {
  TempDir tmp("pde");
  const std::string text = std::string("; leading comment\r\n") + kSmall;
  const fs::path cfg_path = write_config(tmp.path, text);
  std::ostringstream out1, out2, err;
  REQUIRE(cmd_pde(options(cfg_path, tmp.path / "out"), out1, err) == 0);
  const HarnessConfig cfg = resolve_config(ConfigText::parse(text));
  const fs::path dir = tmp.path / "out" / ("pde_" + cfg.pde_fingerprint());
  CHECK(read_file(dir / "config.echo") == text);
  CHECK(read_file(dir / "summary.txt").find("velocity_bound=") == 0);
  CHECK(read_snapshot(dir / "t_0.snap").header.kind == "pde");
  CHECK(out1.str().find("(cached)") == std::string::npos);
  const std::string coeffs = read_file(dir / "coefficients.txt");

  REQUIRE(cmd_pde(options(cfg_path, tmp.path / "out"), out2, err) == 0);
  CHECK(out2.str().find("(cached)") != std::string::npos);
  CHECK(read_file(dir / "coefficients.txt") == coeffs);

  // a cached solution parses back to the same numbers
  const PdeReference cached = ensure_pde_reference(cfg, tmp.path / "out");
  CHECK(cached.from_cache);
  const PdeSolution fresh = solve(cfg.pde);
  REQUIRE(cached.solution.coefficients.size() == fresh.coefficients.size());
  CHECK(cached.solution.coefficients.back() == fresh.coefficients.back());
  CHECK(cached.solution.velocity_bound == fresh.velocity_bound);

  // a change to a PDE key lands in a new directory
  const std::string changed = replace(text, "pde_dt = 0.01", "pde_dt = 0.005");
  std::ostringstream out3;
  REQUIRE(cmd_pde(options(write_config(tmp.path, changed, "b.ini"), tmp.path / "out"), out3, err) == 0);
  CHECK(out3.str().find("(cached)") == std::string::npos);
  CHECK(fs::exists(tmp.path / "out" / ("pde_" + resolve_config(ConfigText::parse(changed)).pde_fingerprint())));
  CHECK_THROWS_AS(parse_pde_cache("garbage"), FormatError);
}

TEST_CASE("converge summaries match their rows") {
  TempDir tmp("converge");
  std::ostringstream out, err;
  REQUIRE(cmd_converge(options(write_config(tmp.path, kSmall), tmp.path / "out"), out, err) == 0);
  const CsvTable t = parse_csv(read_file(tmp.path / "out" / "results.csv"));
  REQUIRE(t.header.size() == 4 + 3 + 3);
  CHECK(t.header[3] == "sup_over_time_error");
  CHECK(t.header.back() == "status");
  CHECK(t.rows.size() == 2 * 3 * 2 + 2 * 2 * 2);
  CHECK(fs::exists(tmp.path / "out" / "timings.csv"));

  for (const std::string n : {"8", "16"}) {
    for (const std::string norm : {"l2", "sup"}) {
      std::vector<double> v;
      double mean = NAN, sd = NAN;
      for (const auto& r : t.rows) {
        if (r[0] != n || r[2] != norm) continue;
        if (r[1] == "mean") mean = parse_double(r[3]);
        else if (r[1] == "std") sd = parse_double(r[3]);
        else v.push_back(parse_double(r[3]));
      }
      REQUIRE(v.size() == 3);
      double m = 0.0;
      for (double x : v) m += x;
      m /= 3;
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      s = std::sqrt(s / 2);
      CHECK(std::abs(mean - m) <= 1e-12 * m);
      CHECK(std::abs(sd - s) <= 1e-12 * std::max(s, m));
    }
  }
}

TEST_CASE("an injected seed failure leaves the other rows intact") {
  TempDir tmp("fail_seed");
  const std::string text = replace(kSmall, "norms = l2, sup", "norms = l2\nfail_seeds = 5");
  std::ostringstream out, err;
  CHECK(cmd_converge(options(write_config(tmp.path, text), tmp.path / "out"), out, err) == 1);
  CHECK(err.str().find("seed=5") != std::string::npos);
  const CsvTable t = parse_csv(read_file(tmp.path / "out" / "results.csv"));
  int failed = 0, ok = 0;
  for (const auto& r : t.rows) {
    if (r[1] == "mean" || r[1] == "std") {
      CHECK(r.back() == "summary 2/3");
      CHECK(std::isfinite(parse_double(r[3])));
    } else if (r[1] == "5") {
      ++failed;
      CHECK(r.back().rfind("failed: injected failure", 0) == 0);
      CHECK(std::isnan(parse_double(r[3])));
    } else {
      ++ok;
      CHECK(r.back() == "ok");
    }
  }
  CHECK(failed == 2);
  CHECK(ok == 4);
}

TEST_CASE("zero data give exactly zero errors") {
  TempDir tmp("zero");
  std::string text = replace(kSmall, "omega0 = gauss(0.5, 0.5, 0.15)", "omega0 = 0");
  text = replace(text, "g = 1", "g = 0");
  text = replace(text, "M = 0", "M = auto");
  const HarnessConfig cfg = resolve_config(ConfigText::parse(text));
  const PdeReference ref = ensure_pde_reference(cfg, tmp.path);
  CHECK(effective_speed_bound(cfg, &ref) == 0.0);
  const SweepResult s = run_sweep(cfg, ref.solution, 0.0, 2);
  for (const auto& r : s.results.rows) {
    for (std::size_t c = 3; c + 1 < r.size(); ++c) CHECK(r[c] == "0");
  }
}

TEST_CASE("csv format and parse") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "x,y"}, {"\"q\"", ""}};
  const std::string text = format_csv(t);
  CHECK(text == "a,b\n1,\"x,y\"\n\"\"\"q\"\"\",\n");
  const CsvTable back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL("expected a field count error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("a,b\n\"open,2\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(""), FormatError);
}

TEST_CASE("number and snapshot formats") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  CHECK(parse_double("inf") == INFINITY);
  CHECK(std::isnan(parse_double("nan")));
  CHECK(parse_double("0.10000000000000001") == 0.1);
  CHECK_THROWS_AS(parse_double("1.0x"), FormatError);

  ScalarField f(NodeGrid(4));
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.1 * i - 0.7;
  SnapshotHeader h;
  h.grid = 4;
  h.speed_bound = INFINITY;
  const std::string text = format_snapshot(h, f);
  CHECK(text.rfind("# snapshot kind=particle", 0) == 0);
  const Snapshot s = parse_snapshot(text);
  CHECK(s.field.values == f.values);
  CHECK(std::isinf(s.header.speed_bound));

  CHECK_THROWS_AS(parse_snapshot(""), FormatError);
  CHECK_THROWS_AS(parse_snapshot("0 1 2\n"), FormatError);
  const std::string header = text.substr(0, text.find('\n') + 1);
  CHECK_THROWS_AS(parse_snapshot(header + "1 2 3 4\n"), FormatError);
  CHECK_THROWS_AS(parse_snapshot(header + "1 2 3\n1 2 3 4\n1 2 3 4\n1 2 3 4\n"), FormatError);
  CHECK_THROWS_AS(parse_snapshot(header + "1 2 3 4 5\n1 2 3 4\n1 2 3 4\n1 2 3 4\n"), FormatError);
  CHECK(snapshot_name(7) == "t_7.snap");
}
