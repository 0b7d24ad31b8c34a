// Scenario runner: config parsing, dispatch, verifiers, artifacts and the
// run manifest. The `persuade` executable is a thin wrapper over main().
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "persuade/io.hpp"

namespace persuade::cli {

using io::json;

inline constexpr const char* kVersion = "0.1.0";

/// Common keys: kind, seed, tol, strict, out. Everything else is the
/// kind-specific payload; unknown keys are rejected.
struct ScenarioConfig {
  std::string kind;  // grid | binary | censorship | goalposts | consistency | coase
  json payload = json::object();
  double tol = 1e-6;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string out;       // primary artifact; siblings derive from its stem
  std::string base_dir = ".";  // relative file references resolve here

  json canonical() const;
};

/// Throws InputError naming the offending key ("kind", "prior", "grid.belief_grid", ...).
ScenarioConfig parse_config(const json& j, const std::string& base_dir = ".");

struct VerifierResult {
  std::string name;
  std::string verdict;  // PASS | FAIL | INCONCLUSIVE
  double metric = 0.0;
  double tol = 0.0;
  std::string expect = "PASS";  // a counterexample check expects FAIL
};

struct RunManifest {
  std::string config_hash;
  std::string version = kVersion;
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> wall_times;
  std::vector<std::pair<std::string, std::string>> artifacts;  // path, content hash
  std::vector<VerifierResult> verdicts;
  std::string manifest_path;

  bool all_pass() const;
  /// `with_timing = false` drops wall times (the reproducible part).
  json to_json(bool with_timing = true) const;
};

/// Runs one scenario, writes artifacts and the manifest next to `out`.
RunManifest run(const ScenarioConfig& cfg);

/// Caps OpenMP threads from PERSUADE_THREADS when set; returns the cap or 0.
int apply_thread_env();

/// Command-line entry. Exit codes: 0 ok, 1 verifier failure under --strict,
/// 2 input error, 3 other runtime error.
int main(int argc, char** argv);

}  // namespace persuade::cli
