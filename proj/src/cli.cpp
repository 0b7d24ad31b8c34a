#include "persuade/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <regex>
#include <set>

#include "CLI11.hpp"
#include "persuade/binary.hpp"
#include "persuade/censorship.hpp"
#include "persuade/consistency.hpp"
#include "persuade/oracle.hpp"
#include "persuade/saddle.hpp"

namespace fs = std::filesystem;

namespace persuade::cli {

namespace {

const std::map<std::string, std::set<std::string>>& kind_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"grid", {"problem", "belief_grid", "method", "distribution", "samples", "saddle_iters"}},
      {"binary", {"mu0", "dv", "v_ell", "h_ell", "h_r", "verify_lp", "samples"}},
      {"censorship", {"prior", "r", "theta_bar", "samples"}},
      {"goalposts", {"x_l", "x_h", "R", "c", "r", "r_p", "prior", "dt", "belief_grid"}},
      {"consistency", {"process", "problem", "belief_grid"}},
      {"coase", {"grid", "mu0", "u_dirac", "v_dirac", "kappa"}},
  };
  return k;
}

const std::map<std::string, std::string>& default_out() {
  static const std::map<std::string, std::string> d{
      {"grid", "solution.json"},     {"binary", "strategy.json"},
      {"censorship", "policy.csv"},  {"goalposts", "report.json"},
      {"consistency", "consistency.json"}, {"coase", "coase.json"},
  };
  return d;
}

template <class T>
T get(const ScenarioConfig& c, const std::string& key, T fallback) {
  if (!c.payload.contains(key)) return fallback;
  try {
    return c.payload.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(c.kind + "." + key, "wrong type");
  }
}

std::string resolve(const ScenarioConfig& c, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? path : (fs::path(c.base_dir) / p).string();
}

// Inline object or a path to a JSON file.
json load_ref(const ScenarioConfig& c, const std::string& key) {
  if (!c.payload.contains(key)) throw InputError(c.kind + "." + key, "missing");
  const json& v = c.payload.at(key);
  if (v.is_string()) return io::read_json_file(resolve(c, v.get<std::string>()));
  return v;
}

std::string sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

DelayGain parse_gain(const std::string& spec, const std::string& field) {
  static const std::regex re(R"(\s*(linear|log|power|poly)\s*\(([^)]*)\)\s*)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) throw InputError(field, "expected linear(k), log(k), power(k,p) or poly(c1,...)");
  std::vector<double> a;
  std::stringstream ss(m[2].str());
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      a.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      throw InputError(field, "bad coefficient '" + tok + "'");
    }
  }
  const std::string fam = m[1].str();
  auto need = [&](std::size_t n) {
    if (a.size() != n) throw InputError(field, fam + " takes " + std::to_string(n) + " argument(s)");
  };
  if (fam == "linear") return need(1), DelayGain::linear(a[0]);
  if (fam == "log") return need(1), DelayGain::log(a[0]);
  if (fam == "power") return need(2), DelayGain::power(a[0], a[1]);
  if (a.empty()) throw InputError(field, "poly needs coefficients");
  return DelayGain::poly(a);
}

PriorDensity parse_prior_density(const ScenarioConfig& c, const std::string& spec) {
  static const std::regex beta(R"(\s*beta\s*\(\s*([^,]+),([^)]+)\)\s*)");
  static const std::regex lin(R"(\s*linear\s*\(([^)]+)\)\s*)");
  std::smatch m;
  try {
    if (spec == "uniform") return PriorDensity::uniform();
    if (std::regex_match(spec, m, beta)) return PriorDensity::beta(std::stod(m[1].str()), std::stod(m[2].str()));
    if (std::regex_match(spec, m, lin)) return PriorDensity::linear(std::stod(m[1].str()));
  } catch (const std::invalid_argument&) {
    throw InputError("prior", "bad number in '" + spec + "'");
  }
  const std::string path = resolve(c, spec);
  if (!fs::exists(path)) throw InputError("prior", "not a known family and no such table file: " + spec);
  auto rows = io::parse_csv(io::read_text_file(path));
  std::vector<double> x, pdf;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 2) throw InputError("prior", "table rows need x,pdf");
    try {
      x.push_back(std::stod(rows[i][0]));
      pdf.push_back(std::stod(rows[i][1]));
    } catch (const std::exception&) {
      throw InputError("prior", "bad number in table row " + std::to_string(i));
    }
  }
  return PriorDensity::table(x, pdf);
}

VerifierResult verdict(std::string name, bool ok, double metric, double tol, std::string expect = "PASS") {
  return {std::move(name), ok ? "PASS" : "FAIL", metric, tol, std::move(expect)};
}

json cert_json(const DualCertificate& d) {
  return json{{"lambda", d.lambda}, {"b", d.b}, {"a", d.a}, {"value", d.value}};
}

json atoms_law(const BeliefTimeDistribution& f) { return io::to_json(f); }

class Runner {
 public:
  explicit Runner(const ScenarioConfig& c) : cfg(c) {
    man.kind = c.kind;
    man.seed = c.seed;
    man.config_hash = io::hash_hex(io::dump_json(c.canonical(), 0));
  }

  void write_json(const json& j, const std::string& path) {
    std::string text = io::dump_json(j);
    io::emit_json(j, path);
    man.artifacts.push_back({path, io::hash_hex(text)});
  }
  void write_csv(const io::Table& t, const std::string& path) {
    io::emit_csv(t, path);
    man.artifacts.push_back({path, io::hash_hex(io::to_csv(t))});
  }
  template <class F>
  auto timed(const std::string& stage, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    man.wall_times.push_back(
        {stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    return r;
  }

  void grid();
  void binary();
  void censorship();
  void goalposts();
  void consistency();
  void coase();

  const ScenarioConfig& cfg;
  RunManifest man;
};

void Runner::grid() {
  Primitives P = io::primitives_from_json(load_ref(cfg, "problem"));
  const std::size_t points = get<std::size_t>(cfg, "belief_grid", 101);
  const std::string method = get<std::string>(cfg, "method", "lp");
  if (method != "lp" && method != "saddle") throw InputError("grid.method", "lp or saddle");
  GridProblem gp = GridProblem::build(P, simplex_grid(P.n_states(), points));
  LpSolution lp = timed("lp", [&] { return solve_relaxed(gp); });
  if (lp.status != LpStatus::optimal)
    throw std::runtime_error(std::string("relaxed LP not optimal: ") + to_string(lp.status));

  json out;
  BeliefTimeDistribution f = lp.f;
  if (cfg.payload.contains("distribution")) {
    f = io::distribution_from_json(load_ref(cfg, "distribution"), P.times);
    const double ev = expected_V(f, gp.iu);
    man.verdicts.push_back(
        verdict("value_matches_lp", std::abs(ev - lp.objective) <= cfg.tol, std::abs(ev - lp.objective), cfg.tol));
    out["value"] = ev;
    out["lp_value"] = lp.objective;
  }
  auto occ = occ_residuals(f, gp.iu);
  double min_occ = 0.0;
  for (double r : occ) min_occ = std::min(min_occ, r);
  man.verdicts.push_back(verdict("occ", min_occ >= -cfg.tol, min_occ, cfg.tol));

  if (method == "saddle") {
    SaddleConfig sc;
    sc.tol = std::max(cfg.tol, 1e-9);
    sc.max_iters = get<long>(cfg, "saddle_iters", sc.max_iters);
    SaddleReport rep = timed("saddle", [&] { return solve_saddle(gp, sc); });
    FocReport foc = verify_foc(gp, rep.primal, rep.certificate, 1e-6);
    out = json{{"Lambda", rep.certificate.lambda},
               {"b", rep.certificate.b},
               {"a", rep.certificate.a},
               {"f", atoms_law(rep.primal)},
               {"value", rep.value},
               {"upper_bound", rep.upper_bound},
               {"gap", rep.duality_gap},
               {"lp_value", lp.objective},
               {"iterations", rep.iterations},
               {"status", rep.status},
               {"foc", {{"max_violation", foc.max_violation},
                        {"support_residual", foc.support_residual},
                        {"min_occ", foc.min_occ},
                        {"comp_slackness", foc.comp_slackness},
                        {"pass", foc.pass}}}};
    man.verdicts.push_back(verdict("duality_gap", rep.duality_gap <= 1e-4, rep.duality_gap, 1e-4));
    man.verdicts.push_back(verdict("lp_crosscheck", std::abs(rep.value - lp.objective) <= 1e-4,
                                   std::abs(rep.value - lp.objective), 1e-4));
    man.verdicts.push_back(verdict("foc", foc.pass, foc.max_violation, 1e-6));
  } else {
    FocReport foc = timed("foc", [&] { return verify_foc(gp, f, lp.duals, 1e-6); });
    std::vector<double> bt;
    for (std::size_t k : lp.binding_times) bt.push_back(P.times[k]);
    if (!cfg.payload.contains("distribution")) out["value"] = lp.objective;
    out["status"] = to_string(lp.status);
    out["f"] = atoms_law(f);
    out["duals"] = cert_json(lp.duals);
    out["binding_times"] = bt;
    out["occ"] = occ;
    out["foc"] = {{"max_violation", foc.max_violation}, {"support_residual", foc.support_residual},
                  {"comp_slackness", foc.comp_slackness}, {"pass", foc.pass}};
    man.verdicts.push_back(verdict("foc", foc.pass, foc.max_violation, 1e-6));
  }
  write_json(out, cfg.out);

  const std::size_t samples = get<std::size_t>(cfg, "samples", 0);
  if (samples > 0) {
    SimpleRecommendation rec = to_simple_recommendation(f, gp.iu);
    auto draws = simulate_paths(rec, samples, cfg.seed);
    io::Table t;
    t.header = {"draw", "time"};
    for (const auto& s : P.states) t.header.push_back("belief_" + s);
    for (std::size_t i = 0; i < draws.size(); ++i) {
      std::vector<double> row{static_cast<double>(i), P.times[draws[i].time]};
      row.insert(row.end(), draws[i].belief.begin(), draws[i].belief.end());
      t.add(row);
    }
    write_csv(t, sibling(cfg.out, "_draws.csv"));
  }
}

void Runner::binary() {
  BinaryPersuasionSpec s;
  s.mu0 = get<double>(cfg, "mu0", 0.4);
  s.v_ell = get<double>(cfg, "v_ell", 0.0);
  s.v_r = s.v_ell + get<double>(cfg, "dv", 1.0);
  s.h_ell = parse_gain(get<std::string>(cfg, "h_ell", "log(0.5)"), "binary.h_ell");
  s.h_r = parse_gain(get<std::string>(cfg, "h_r", "log(1)"), "binary.h_r");
  s.validate();
  SuspenseStrategy st = timed("select", [&] { return select_strategy(s); });
  FocResiduals r = foc_residuals(s, st.variant, st.t1, st.t2);
  json out{{"variant", to_string(st.variant)},
           {"kind", st.kind == StrategyKind::suspense ? "suspense" : "inconclusive"},
           {"case", st.case_tag},
           {"mirrored", st.flip},
           {"t1", st.t1},
           {"t2", st.t2},
           {"payoff", st.payoff},
           {"continuation_mass", st.p},
           {"continuation_belief", st.x},
           {"stop_belief_t1", st.y},
           {"terminal_belief", st.terminal_belief},
           {"certified", st.certified},
           {"h_ell", s.h_ell.describe()},
           {"h_r", s.h_r.describe()},
           {"foc", {{"res_a", r.res_a}, {"res_b", r.res_b}, {"res_inconclusive", r.res_inconclusive},
                    {"soc_local_t1", r.soc_local_t1}, {"soc_local_t2", r.soc_local_t2},
                    {"soc_global", r.soc_global_ok}}}};
  man.verdicts.push_back(verdict("certified", st.certified, std::abs(r.res_a), 1e-8));
  const double dt = get<double>(cfg, "verify_lp", 0.0);
  if (dt > 0.0) {
    double lp = timed("lp", [&] {
      GridProblem gp = GridProblem::build(binary_primitives(s, uniform_times(dt, st.t2 + 0.15)),
                                          simplex_lattice(2, 100));
      return solve_relaxed(gp).objective;
    });
    const double rel = std::abs(lp - st.payoff) / std::max(std::abs(st.payoff), 1e-12);
    out["lp_value"] = lp;
    out["lp_dt"] = dt;
    man.verdicts.push_back(verdict("lp_crosscheck", rel <= 0.01, rel, 0.01));
  }
  write_json(out, cfg.out);
  io::Table t;
  t.header = {"t", "mu_L", "mu_R", "targeting", "cdf_targeted", "terminal_atom"};
  for (const PathSample& p : path_samples(s, st, get<std::size_t>(cfg, "samples", 201)))
    t.add({p.t, p.mu_L, p.mu_R, p.targeting, p.cdf_targeted, p.terminal_atom});
  write_csv(t, sibling(cfg.out, "_paths.csv"));
}

void Runner::censorship() {
  CensorshipProblem prob;
  prob.prior = parse_prior_density(cfg, get<std::string>(cfg, "prior", "uniform"));
  prob.r = get<double>(cfg, "r", 1.0);
  prob.theta_bar = get<double>(cfg, "theta_bar", 0.5);
  prob.validate();
  CensorshipPolicy pol = timed("policy", [&] { return build_policy(prob); });
  IdentityReport id = timed("identities", [&] { return verify_identities(prob, pol, 1e-4, cfg.tol); });
  CensorshipFocReport foc = timed("foc", [&] { return verify_foc_censorship(prob, pol); });
  const std::size_t n = std::max<std::size_t>(get<std::size_t>(cfg, "samples", 201), 2);
  io::Table t;
  t.header = {"t", "alpha", "beta", "m_hat", "m_hat_minus_beta"};
  for (std::size_t i = 0; i < n; ++i) {
    const double s = pol.T * static_cast<double>(i) / static_cast<double>(n - 1);
    auto m = continuation_mean(prob, pol, s);
    const double mh = m ? *m : NAN;
    t.add({s, pol.alpha(s), pol.beta(s), mh, mh - pol.beta(s)});
  }
  write_csv(t, cfg.out);
  const double id_metric = std::max({id.forward_alpha, id.forward_beta, std::abs(id.no_upward),
                                     std::abs(id.indifference)});
  json rep{{"case", pol.case_tag},
           {"T", pol.T},
           {"T0", pol.T0},
           {"m_star", pol.m_star},
           {"theta_star", pol.theta_star},
           {"theta_star_upper_bound", theta_star_upper_bound(prob)},
           {"payoff", policy_payoff(prob, pol)},
           {"prior", prob.prior.name()},
           {"identities", {{"forward_alpha", id.forward_alpha}, {"forward_beta", id.forward_beta},
                           {"no_upward", id.no_upward}, {"indifference", id.indifference},
                           {"mhat_gap", id.mhat_gap}, {"skipped_window", id.skipped_window},
                           {"pass", id.pass}}},
           {"foc", {{"max_l", foc.max_l}, {"max_abs_support", foc.max_abs_support},
                    {"min_gamma_second_diff", foc.min_gamma_second_diff},
                    {"max_dl_dt_after_T", foc.max_dl_dt_after_T}, {"pass", foc.pass}}}};
  man.verdicts.push_back(verdict("identities", id.pass, id_metric, cfg.tol));
  man.verdicts.push_back(verdict("foc", foc.pass, foc.max_l, 1e-5));
  write_json(rep, sibling(cfg.out, "_report.json"));
}

void Runner::goalposts() {
  GoalpostsSpec s;
  s.x_l = get<double>(cfg, "x_l", s.x_l);
  s.x_h = get<double>(cfg, "x_h", s.x_h);
  s.R = get<double>(cfg, "R", s.R);
  s.c = get<double>(cfg, "c", s.c);
  s.r = get<double>(cfg, "r", s.r);
  s.r_p = get<double>(cfg, "r_p", s.r_p);
  s.prior = get<Belief>(cfg, "prior", s.prior);
  const double dt = get<double>(cfg, "dt", 0.025);
  GoalpostsResult res = timed("strategies", [&] {
    return goalposts_strategies(s, dt, get<std::size_t>(cfg, "belief_grid", 100));
  });
  const auto& iu = res.gp.iu;
  auto st = interim_surplus(res.teleport, iu), si = interim_surplus(res.inch, iu);
  Dc1Report dt_rep = timed("dc1_teleport", [&] { return verify_dc1(res.teleport, res.gp, cfg.tol); });
  Dc1Report di_rep = timed("dc1_inch", [&] { return verify_dc1(res.inch, res.gp, cfg.tol); });
  auto effort_json = [&](const FiniteBeliefProcess& p) {
    json a = json::array();
    for (const EffortAtom& e : effort_law(s, p, res.gp))
      a.push_back({{"state", e.state == 0 ? "x_l" : "x_h"}, {"effort", e.effort},
                   {"completes", e.completes}, {"mass", e.mass}});
    return a;
  };
  const double vt = process_value(res.teleport, iu), vi = process_value(res.inch, iu);
  json rep{{"tau_bar", s.tau_bar()},
           {"t_star", s.t_star()},
           {"mu_bar", s.mu_bar()},
           {"continuation_belief", s.continuation_belief()},
           {"reveal_mass", s.reveal_mass()},
           {"dt", dt},
           {"teleport", {{"value", vt}, {"max_surplus", st.max_surplus}, {"dc1", to_string(dt_rep.verdict)},
                         {"dc1_worst_gap", dt_rep.worst_gap}, {"effort", effort_json(res.teleport)},
                         {"outcome", atoms_law(res.teleport.outcome())}}},
           {"inch", {{"value", vi}, {"max_surplus", si.max_surplus}, {"dc1", to_string(di_rep.verdict)},
                     {"dc1_worst_gap", di_rep.worst_gap}, {"effort", effort_json(res.inch)},
                     {"outcome", atoms_law(res.inch.outcome())}}}};
  write_json(rep, cfg.out);
  for (auto [name, proc] : {std::pair{"_teleport.csv", &res.teleport}, std::pair{"_inch.csv", &res.inch}}) {
    io::Table t;
    t.header = {"t", "expected_x", "reveal_xl", "reveal_xh"};
    for (const GoalpostRow& r : goalposts_path(s, *proc)) t.add({r.t, r.expected_x, r.reveal_xl, r.reveal_xh});
    write_csv(t, sibling(cfg.out, name));
  }
  man.verdicts.push_back(verdict("inch_zero_surplus", si.max_surplus <= 1e-9, si.max_surplus, 1e-9));
  man.verdicts.push_back({"inch_dc1", to_string(di_rep.verdict), di_rep.worst_gap, cfg.tol, "PASS"});
  man.verdicts.push_back({"teleport_dc1", to_string(dt_rep.verdict), dt_rep.worst_gap, cfg.tol, "FAIL"});
  man.verdicts.push_back(verdict("same_principal_value", std::abs(vt - vi) <= 1e-9, std::abs(vt - vi), 1e-9));
}

void Runner::consistency() {
  FiniteBeliefProcess proc = io::process_from_json(load_ref(cfg, "process"));
  Primitives P = io::primitives_from_json(load_ref(cfg, "problem"));
  if (proc.times != P.times) throw InputError("consistency.process", "time grid differs from the problem's");
  GridProblem gp = GridProblem::build(P, simplex_grid(P.n_states(), get<std::size_t>(cfg, "belief_grid", 101)));
  auto sur = interim_surplus(proc, gp.iu);
  Dc1Report dc = timed("dc1", [&] { return verify_dc1(proc, gp, cfg.tol); });
  DeviationAudit au = timed("audit", [&] { return audit_deviations(proc, gp, cfg.tol); });
  json rep{{"value", process_value(proc, gp.iu)},
           {"surplus", {{"max", sur.max_surplus}, {"min", sur.min_surplus}, {"worst_node", sur.worst_node}}},
           {"dc1", {{"verdict", to_string(dc.verdict)}, {"worst_gap", dc.worst_gap}, {"worst_node", dc.worst_node}}},
           {"audit", {{"continue_to_stop", au.continue_to_stop}, {"principal", au.principal},
                      {"stop_to_continue", au.stop_to_continue},
                      {"responses_not_credible", au.responses_not_credible},
                      {"v_nondecreasing", au.v_nondecreasing}, {"pass", au.pass}}}};
  try {
    FiniteBeliefProcess z = timed("zero_surplus", [&] { return make_zero_surplus(proc, gp.iu); });
    auto zs = interim_surplus(z, gp.iu);
    rep["zero_surplus"] = {{"process", io::to_json(z)}, {"value", process_value(z, gp.iu)},
                           {"max_surplus", zs.max_surplus}};
    Dc1Report zd = verify_dc1(z, gp, cfg.tol);
    rep["zero_surplus"]["dc1"] = to_string(zd.verdict);
  } catch (const InputError& e) {
    rep["zero_surplus"] = {{"error", e.what()}};
  }
  man.verdicts.push_back(verdict("zero_surplus", sur.max_surplus <= 1e-9, sur.max_surplus, 1e-9));
  man.verdicts.push_back({"dc1", to_string(dc.verdict), dc.worst_gap, cfg.tol, "PASS"});
  man.verdicts.push_back(verdict("deviation_audit", au.pass, std::max({au.continue_to_stop, au.principal,
                                                                       au.stop_to_continue}), cfg.tol));
  write_json(rep, cfg.out);
}

void Runner::coase() {
  CoaseSpec s;
  s.grid = get<std::size_t>(cfg, "grid", s.grid);
  s.mu0 = get<double>(cfg, "mu0", s.mu0);
  s.u_dirac = get<std::vector<double>>(cfg, "u_dirac", s.u_dirac);
  s.v_dirac = get<std::vector<double>>(cfg, "v_dirac", s.v_dirac);
  s.kappa = get<std::vector<double>>(cfg, "kappa", s.kappa);
  CoaseResult r = timed("solve", [&] { return coase_demo(s); });
  json split = json::array();
  for (std::size_t i = 0; i < r.first_split.size(); ++i)
    split.push_back({{"belief", r.first_split[i].first}, {"prob", r.first_split[i].second},
                     {"agent_stops", static_cast<bool>(r.stops_first[i])}});
  json out{{"first_split", split},
           {"full_reveal_at_1", r.full_reveal_at_1},
           {"principal_value", r.principal_value},
           {"agent_value", r.agent_value},
           {"max_principal_gain", r.max_principal_gain},
           {"max_agent_gain", r.max_agent_gain},
           {"interior_continue_gain", r.interior_continue_gain}};
  write_json(out, cfg.out);
  man.verdicts.push_back(verdict("full_reveal_at_1", r.full_reveal_at_1, 0.0, 0.0));
  man.verdicts.push_back(verdict("principal_deviation", r.max_principal_gain <= 1e-9, r.max_principal_gain, 1e-9));
  man.verdicts.push_back(verdict("agent_deviation", r.max_agent_gain <= 1e-9, r.max_agent_gain, 1e-9));
}

}  // namespace

json ScenarioConfig::canonical() const {
  json j = payload;
  j["kind"] = kind;
  j["seed"] = seed;
  j["tol"] = tol;
  j["strict"] = strict;
  j["out"] = out;
  return j;
}

ScenarioConfig parse_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw InputError("config", "expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw InputError("kind", "missing or not a string");
  ScenarioConfig c;
  c.kind = j["kind"].get<std::string>();
  c.base_dir = base_dir;
  auto it = kind_keys().find(c.kind);
  if (it == kind_keys().end()) throw InputError("kind", "unknown kind '" + c.kind + "'");
  for (auto e = j.begin(); e != j.end(); ++e) {
    const std::string& k = e.key();
    try {
      if (k == "kind") continue;
      if (k == "seed") c.seed = e.value().get<std::uint64_t>();
      else if (k == "tol") c.tol = e.value().get<double>();
      else if (k == "strict") c.strict = e.value().get<bool>();
      else if (k == "out") c.out = e.value().get<std::string>();
      else if (it->second.count(k)) c.payload[k] = e.value();
      else throw InputError(k, "unknown key for kind '" + c.kind + "'");
    } catch (const json::exception&) {
      throw InputError(k, "wrong type");
    }
  }
  if (!(c.tol > 0.0) || !std::isfinite(c.tol)) throw InputError("tol", "must be positive");
  if (c.out.empty()) c.out = default_out().at(c.kind);
  // Prior vectors are checked up front so the error names the key.
  if (c.payload.contains("prior") && c.payload["prior"].is_array()) {
    double s = 0.0;
    for (const auto& x : c.payload["prior"]) {
      if (!x.is_number() || !(x.get<double>() >= 0.0)) throw InputError("prior", "entries must be numbers >= 0");
      s += x.get<double>();
    }
    if (std::abs(s - 1.0) > 1e-9) throw InputError("prior", "must sum to 1 (got " + io::fmt(s) + ")");
  }
  for (const char* ref : {"problem", "process", "distribution"})
    if (c.payload.contains(ref) && c.payload[ref].is_string()) {
      fs::path p(c.payload[ref].get<std::string>());
      if (!p.is_absolute()) p = fs::path(base_dir) / p;
      if (!fs::exists(p)) throw InputError(ref, "file not found: " + p.string());
    }
  return c;
}

bool RunManifest::all_pass() const {
  for (const auto& v : verdicts)
    if (v.verdict != v.expect) return false;
  return true;
}

json RunManifest::to_json(bool with_timing) const {
  json arts = json::array();
  for (const auto& [p, h] : artifacts) arts.push_back({{"path", p}, {"hash", h}});
  json ver = json::array();
  for (const auto& v : verdicts)
    ver.push_back({{"name", v.name}, {"verdict", v.verdict}, {"expect", v.expect}, {"metric", v.metric}, {"tol", v.tol}});
  json j{{"config_hash", config_hash}, {"version", version}, {"kind", kind}, {"seed", seed},
         {"artifacts", arts},          {"verdicts", ver},   {"all_pass", all_pass()}};
  if (with_timing) {
    json w = json::object();
    for (const auto& [k, s] : wall_times) w[k] = s;
    j["wall_times"] = w;
  }
  return j;
}

RunManifest run(const ScenarioConfig& cfg) {
  Runner r(cfg);
  if (!fs::path(cfg.out).parent_path().empty()) fs::create_directories(fs::path(cfg.out).parent_path());
  if (cfg.kind == "grid") r.grid();
  else if (cfg.kind == "binary") r.binary();
  else if (cfg.kind == "censorship") r.censorship();
  else if (cfg.kind == "goalposts") r.goalposts();
  else if (cfg.kind == "consistency") r.consistency();
  else if (cfg.kind == "coase") r.coase();
  else throw InputError("kind", "unknown kind '" + cfg.kind + "'");
  r.man.manifest_path = sibling(cfg.out, ".manifest.json");
  io::emit_json(r.man.to_json(), r.man.manifest_path);
  return r.man;
}

int apply_thread_env() {
  const char* env = std::getenv("PERSUADE_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "warning: ignoring PERSUADE_THREADS='" << env << "'\n";
    return 0;
  }
  omp_set_num_threads(static_cast<int>(n));
  return static_cast<int>(n);
}

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Dynamic persuasion solvers and verifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool strict = false;
  app.add_option("--out", out, "Primary output file (siblings and manifest derive from it)");
  app.add_option("--tol", tol, "Verifier tolerance");
  app.add_option("--seed", seed, "64-bit seed for all randomness");
  app.add_flag("--strict", strict, "Exit 1 when a verifier disagrees with its expected verdict");

  json cfg = json::object();
  std::string base = ".";
  std::string config_path, problem, params, process, solution, prior = "uniform";
  std::string h_ell = "log(0.5)", h_r = "log(1)", method = "lp";
  std::size_t belief_grid = 101, samples = 201;
  double mu0 = 0.4, dv = 1.0, v_ell = 0.0, verify_lp = 0.0, r = 1.0, theta_bar = 0.5, dt = 0.025;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario config file");
  run_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "Relaxed LP oracle on a belief grid");
  solve->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
  solve->add_option("--belief-grid", belief_grid);
  solve->add_option("--samples", samples, "Monte Carlo draws of the simple recommendation (0 = none)")
      ->default_val(0);

  auto* saddle = app.add_subcommand("saddle", "Subgradient saddle-point solver");
  saddle->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
  saddle->add_option("--belief-grid", belief_grid);

  auto* vfoc = app.add_subcommand("verify-foc", "First-order conditions of a given distribution");
  vfoc->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
  vfoc->add_option("--solution", solution, "JSON with an 'f' array, or the array itself")
      ->required()
      ->check(CLI::ExistingFile);
  vfoc->add_option("--belief-grid", belief_grid);

  auto* bin = app.add_subcommand("binary", "Binary-state suspense / targeting strategy");
  bin->add_option("--mu0", mu0);
  bin->add_option("--dv", dv);
  bin->add_option("--v-ell", v_ell);
  bin->add_option("--h-ell", h_ell, "linear(k) | log(k) | power(k,p) | poly(c1,c2,...)");
  bin->add_option("--h-r", h_r);
  bin->add_option("--verify-lp", verify_lp, "LP cross-check time step (0 = off)");
  bin->add_option("--samples", samples);

  auto* cen = app.add_subcommand("censorship", "Tail censorship policy");
  cen->add_option("--prior", prior, "uniform | beta(a,b) | linear(s) | table.csv");
  cen->add_option("--r", r);
  cen->add_option("--theta-bar", theta_bar);
  cen->add_option("--samples", samples);

  auto* gpc = app.add_subcommand("goalposts", "Teleporting vs inching goalposts");
  gpc->add_option("--params", params)->check(CLI::ExistingFile);
  gpc->add_option("--dt", dt);
  gpc->add_option("--belief-grid", belief_grid)->default_val(100);

  auto* con = app.add_subcommand("consistency", "Surplus, DC1 and deviation audit of a process");
  con->add_option("--process", process)->required()->check(CLI::ExistingFile);
  con->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
  con->add_option("--belief-grid", belief_grid);

  auto* coa = app.add_subcommand("coase", "Two-period experiment-selection game");
  coa->add_option("--params", params)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "run") {
      cfg = io::read_json_file(config_path);
      base = fs::path(config_path).parent_path().string();
      if (base.empty()) base = ".";
    } else if (name == "solve" || name == "saddle" || name == "verify-foc") {
      cfg = {{"kind", "grid"}, {"problem", problem}, {"belief_grid", belief_grid}};
      if (name == "saddle") cfg["method"] = "saddle";
      if (name == "solve" && samples > 0) cfg["samples"] = samples;
      if (name == "verify-foc") {
        json s = io::read_json_file(solution);
        cfg["distribution"] = s.is_object() && s.contains("f") ? s["f"] : s;
      }
    } else if (name == "binary") {
      cfg = {{"kind", "binary"}, {"mu0", mu0}, {"dv", dv}, {"v_ell", v_ell}, {"h_ell", h_ell},
             {"h_r", h_r}, {"samples", samples}};
      if (verify_lp > 0.0) cfg["verify_lp"] = verify_lp;
    } else if (name == "censorship") {
      cfg = {{"kind", "censorship"}, {"prior", prior}, {"r", r}, {"theta_bar", theta_bar}, {"samples", samples}};
    } else if (name == "goalposts" || name == "coase") {
      cfg = params.empty() ? json::object() : io::read_json_file(params);
      if (!cfg.is_object()) throw InputError("params", "expected a JSON object");
      cfg["kind"] = name;
      if (name == "goalposts") {
        cfg["dt"] = dt;
        cfg["belief_grid"] = belief_grid;
      }
    } else if (name == "consistency") {
      cfg = {{"kind", "consistency"}, {"process", process}, {"problem", problem}, {"belief_grid", belief_grid}};
    }
    if (!out.empty()) cfg["out"] = out;
    if (app.count("--tol")) cfg["tol"] = tol;
    if (app.count("--seed")) cfg["seed"] = seed;
    if (strict) cfg["strict"] = true;

    ScenarioConfig sc = parse_config(cfg, base);
    RunManifest m = run(sc);
    for (const auto& v : m.verdicts)
      std::cout << v.name << ": " << v.verdict << " (metric " << io::fmt(v.metric) << ", expect " << v.expect
                << ")\n";
    for (const auto& [p, h] : m.artifacts) std::cout << "wrote " << p << "\n";
    std::cout << "manifest " << m.manifest_path << "\n";
    return (sc.strict && !m.all_pass()) ? 1 : 0;
  } catch (const InputError& e) {
    std::cerr << "input error [" << e.field() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace persuade::cli
