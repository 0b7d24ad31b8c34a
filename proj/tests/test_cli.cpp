#include <clocale>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <locale>
#include <random>
#include <sstream>

#include "doctest.h"
#include "persuade/cli.hpp"
#include "persuade/io.hpp"

using namespace persuade;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("persuade_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

io::json match_problem() {
  return io::json::parse(R"({"states":["L","R"],"actions":["l","r"],"times":[0,0.1,0.2,0.3],"prior":[0.7,0.3],
    "u":[[[1,0.9,0.8,0.7],[0,-0.1,-0.2,-0.3]],[[0,-0.1,-0.2,-0.3],[1,0.9,0.8,0.7]]],
    "v":[[[0,0,0,0],[1,1,1,1]],[[0,0,0,0],[1,1,1,1]]]})");
}

std::string field_of(const io::json& cfg) {
  try {
    cli::parse_config(cfg);
  } catch (const InputError& e) {
    return e.field();
  }
  return "";
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(PERSUADE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("fmt: 17 significant digits, round trip") {
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  CHECK(io::fmt(1.0) == "1");
  CHECK(io::fmt(-1.0 / 3.0) == "-0.33333333333333331");
  CHECK(io::fmt(NAN) == "nan");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double x = U(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::fmt(x)) == x);
    char ref[64];
    std::snprintf(ref, sizeof ref, "%.17g", x);  // C locale here
    CHECK(io::fmt(x) == std::string(ref));
  }
}

TEST_CASE("fmt: decimal point ignores the locale") {
  std::locale old = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  const char* c_old = std::setlocale(LC_NUMERIC, nullptr);
  std::string saved = c_old ? c_old : "C";
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");  // may be unavailable; the facet above still applies
  CHECK(io::fmt(1.5) == "1.5");
  io::Table t;
  t.header = {"x"};
  t.add({0.25});
  CHECK(io::to_csv(t) == "x\r\n0.25\r\n");
  CHECK(io::dump_json(io::json{{"a", 0.5}}, 0) == "{\"a\":0.5}");
  std::setlocale(LC_NUMERIC, saved.c_str());
  std::locale::global(old);
}

TEST_CASE("csv: empty table is header only; quoting round-trips") {
  io::Table t;
  t.header = {"t", "alpha"};
  CHECK(io::to_csv(t) == "t,alpha\r\n");
  io::Table q;
  q.header = {"name", "note"};
  q.rows = {{"a,b", "say \"hi\""}, {"line\nbreak", ""}};
  auto rows = io::parse_csv(io::to_csv(q));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "a,b");
  CHECK(rows[1][1] == "say \"hi\"");
  CHECK(rows[2][0] == "line\nbreak");
  CHECK(rows[2][1] == "");
  auto dir = scratch("csv");
  io::emit_csv(t, (dir / "e.csv").string());
  CHECK(io::read_text_file((dir / "e.csv").string()) == "t,alpha\r\n");
  CHECK_THROWS(io::emit_csv(t, (dir / "missing" / "x.csv").string()));
}

TEST_CASE("json: sorted keys and exact distribution round trip") {
  io::json j{{"zeta", 1}, {"alpha", {{"b", 2}, {"a", 1}}}};
  CHECK(io::dump_json(j, 0) == "{\"alpha\":{\"a\":1,\"b\":2},\"zeta\":1}");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  BeliefTimeDistribution f;
  f.times = {0.0, 1.0 / 3.0, 0.7, 1.1};
  for (int i = 0; i < 20; ++i) {
    double p = U(rng);
    f.atoms.push_back({{p, 1.0 - p}, static_cast<std::size_t>(i % 4), U(rng) / 7.0});
  }
  auto back = io::distribution_from_json(io::json::parse(io::dump_json(io::to_json(f))), f.times);
  REQUIRE(back.atoms.size() == f.atoms.size());
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    CHECK(back.atoms[i].belief == f.atoms[i].belief);  // bitwise
    CHECK(back.atoms[i].time == f.atoms[i].time);
    CHECK(back.atoms[i].weight == f.atoms[i].weight);
  }
  auto bad = io::to_json(f);
  bad[0]["time"] = 0.5;
  CHECK_THROWS_AS(io::distribution_from_json(bad, f.times), InputError);
}

TEST_CASE("json: problem and process converters") {
  Primitives p = io::primitives_from_json(match_problem());
  CHECK(p.n_states() == 2);
  CHECK(p.u[1][1][3] == doctest::Approx(0.7));
  auto again = io::primitives_from_json(io::json::parse(io::dump_json(io::to_json(p))));
  CHECK(again.u == p.u);
  auto j = match_problem();
  j["prior"] = {0.6, 0.3};
  try {
    io::primitives_from_json(j);
    FAIL("accepted a prior summing to 0.9");
  } catch (const InputError& e) {
    CHECK(e.field() == "prior");
  }
  j = match_problem();
  j["extra"] = 1;
  CHECK_THROWS_AS(io::primitives_from_json(j), InputError);

  GoalpostsSpec s;
  auto res = goalposts_strategies(s, 0.1, 20);
  auto proc = io::process_from_json(io::json::parse(io::dump_json(io::to_json(res.inch))));
  REQUIRE(proc.nodes.size() == res.inch.nodes.size());
  for (std::size_t i = 0; i < proc.nodes.size(); ++i) {
    CHECK(proc.nodes[i].belief == res.inch.nodes[i].belief);
    CHECK(proc.nodes[i].children == res.inch.nodes[i].children);
  }
}

TEST_CASE("config: discriminant, unknown keys, schema errors") {
  CHECK(field_of({{"kind", "coase"}}) == "");
  CHECK(field_of({{"kind", "nope"}}) == "kind");
  CHECK(field_of({{"grid", 3}}) == "kind");
  CHECK(field_of({{"kind", "coase"}, {"dt", 0.1}}) == "dt");
  CHECK(field_of({{"kind", "goalposts"}, {"prior", {0.2, 0.7}}}) == "prior");
  CHECK(field_of({{"kind", "goalposts"}, {"tol", -1.0}}) == "tol");
  CHECK(field_of({{"kind", "grid"}, {"problem", "/nonexistent/problem.json"}}) == "problem");
  CHECK(field_of({{"kind", "coase"}, {"seed", "abc"}}) == "seed");
  auto c = cli::parse_config({{"kind", "goalposts"}, {"seed", 42}});
  CHECK(c.out == "report.json");
  CHECK(c.seed == 42);
}

TEST_CASE("run: grid with invalid prior names prior") {
  auto dir = scratch("prior");
  auto prob = match_problem();
  prob["prior"] = {0.6, 0.3};
  auto cfg = cli::parse_config({{"kind", "grid"}, {"problem", prob}, {"out", (dir / "s.json").string()}});
  try {
    cli::run(cfg);
    FAIL("ran with an invalid prior");
  } catch (const InputError& e) {
    CHECK(e.field() == "prior");
  }
}

TEST_CASE("run: goalposts emits two path tables and DC1 verdicts") {
  auto dir = scratch("goalposts");
  auto cfg = cli::parse_config({{"kind", "goalposts"}, {"dt", 0.05}, {"out", (dir / "report.json").string()}});
  auto m = cli::run(cfg);
  CHECK(fs::exists(dir / "report_teleport.csv"));
  CHECK(fs::exists(dir / "report_inch.csv"));
  CHECK(fs::exists(dir / "report.manifest.json"));
  std::map<std::string, std::string> v;
  for (const auto& r : m.verdicts) v[r.name] = r.verdict;
  CHECK(v["inch_dc1"] == "PASS");
  CHECK(v["teleport_dc1"] == "FAIL");
  CHECK(v["inch_zero_surplus"] == "PASS");
  CHECK(m.all_pass());
  auto rows = io::parse_csv(io::read_text_file((dir / "report_inch.csv").string()));
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t", "expected_x", "reveal_xl", "reveal_xh"});
}

TEST_CASE("run: binary log example with LP cross-check") {
  auto dir = scratch("binary");
  auto cfg = cli::parse_config({{"kind", "binary"},
                                {"mu0", 0.4},
                                {"dv", 0.4},
                                {"h_r", "log(1)"},
                                {"h_ell", "log(0.5)"},
                                {"verify_lp", 0.01},
                                {"out", (dir / "strategy.json").string()}});
  auto m = cli::run(cfg);
  CHECK(fs::exists(dir / "strategy.json"));
  CHECK(fs::exists(dir / "strategy_paths.csv"));
  bool saw_lp = false;
  for (const auto& r : m.verdicts) {
    CHECK(r.verdict == "PASS");
    if (r.name == "lp_crosscheck") saw_lp = true;
  }
  CHECK(saw_lp);
  auto strat = io::read_json_file((dir / "strategy.json").string());
  CHECK(strat["case"] == "case2.2");
  auto bad = cfg;
  bad.payload["h_r"] = "cubic(2)";
  CHECK_THROWS_AS(cli::run(bad), InputError);
}

TEST_CASE("run: identical config and seed give identical manifests") {
  auto dir = scratch("determinism");
  io::json base{{"kind", "grid"}, {"problem", match_problem()}, {"samples", 50}, {"seed", 99},
                {"out", (dir / "sol.json").string()}};
  auto m1 = cli::run(cli::parse_config(base));
  std::string first = io::dump_json(m1.to_json(false));
  std::string art = io::read_text_file((dir / "sol_draws.csv").string());
  auto m2 = cli::run(cli::parse_config(base));
  CHECK(io::dump_json(m2.to_json(false)) == first);
  CHECK(io::read_text_file((dir / "sol_draws.csv").string()) == art);
  base["seed"] = 100;
  auto m3 = cli::run(cli::parse_config(base));
  CHECK(m3.config_hash != m1.config_hash);
}

TEST_CASE("executable: exit codes and thread cap") {
  auto dir = scratch("exe");
  const std::string out = (dir / "c.json").string();
  CHECK(run_cli("coase --strict --out " + out) == 0);
  CHECK(fs::exists(dir / "c.manifest.json"));
  CHECK(run_cli("coase --no-such-flag --out " + out) != 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") != 0);
  std::string bad = (dir / "bad.json").string();
  io::emit_json({{"kind", "goalposts"}, {"prior", {0.5, 0.4}}}, bad);
  CHECK(run_cli("run --config " + bad) == 2);
  std::string cmd = "PERSUADE_THREADS=1 " + std::string(PERSUADE_CLI_PATH) + " coase --out " + out +
                    " > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(cli::apply_thread_env() >= 0);
}
