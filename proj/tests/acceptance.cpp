// Acceptance run: one PASS/FAIL line per criterion, item details indented
// below it. Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "persuade/binary.hpp"
#include "persuade/censorship.hpp"
#include "persuade/consistency.hpp"
#include "persuade/oracle.hpp"
#include "persuade/saddle.hpp"
#include "test_util.hpp"

using namespace persuade;

namespace {

struct Item {
  std::string what;
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Item> items;

  void check(const std::string& what, bool ok, const char* fmt = "", ...) __attribute__((format(printf, 4, 5)));
  bool pass() const {
    return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.ok; });
  }
};

void Criterion::check(const std::string& what, bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  items.push_back({what, ok, buf});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- oracles

// Agent's best action at mu and time k, principal-best among exact ties.
// Read straight off the payoff tensors; no waiting option (single-time use).
double static_V(const Primitives& p, const Belief& mu, std::size_t k) {
  double best_u = -1e300, best_v = -1e300;
  for (std::size_t a = 0; a < p.n_actions(); ++a) {
    double u = 0.0, v = 0.0;
    for (std::size_t s = 0; s < p.n_states(); ++s) {
      u += mu[s] * p.u[s][a][k];
      v += mu[s] * p.v[s][a][k];
    }
    if (u > best_u + 1e-12) {
      best_u = u;
      best_v = v;
    } else if (u > best_u - 1e-12) {
      best_v = std::max(best_v, v);
    }
  }
  return best_v;
}

// Concave envelope at the prior by enumerating every splitting of the prior
// into at most |states| lattice points.
double brute_cav(const Primitives& p, const std::vector<Belief>& pts, std::size_t k) {
  const Belief& m = p.prior;
  std::vector<double> V(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) V[i] = static_V(p, pts[i], k);
  double best = -1e300;
  const std::size_t n = pts.size();
  if (p.n_states() == 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double a = pts[i][1], b = pts[j][1];
        if (a > m[1] + 1e-12 || b < m[1] - 1e-12) continue;
        if (b - a < 1e-12) {
          if (std::abs(a - m[1]) < 1e-12) best = std::max(best, V[i]);
          continue;
        }
        double w = (b - m[1]) / (b - a);
        best = std::max(best, w * V[i] + (1.0 - w) * V[j]);
      }
    return best;
  }
  // Three states: barycentric weights in the (x1, x2) chart.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t l = j; l < n; ++l) {
        const double ax = pts[i][1], ay = pts[i][2];
        const double bx = pts[j][1] - ax, by = pts[j][2] - ay;
        const double cx = pts[l][1] - ax, cy = pts[l][2] - ay;
        const double px = m[1] - ax, py = m[2] - ay;
        const double det = bx * cy - by * cx;
        double wj, wl;
        if (std::abs(det) > 1e-14) {
          wj = (px * cy - py * cx) / det;
          wl = (bx * py - by * px) / det;
        } else {
          continue;  // degenerate triples are covered by pairs below
        }
        double wi = 1.0 - wj - wl;
        if (wi < -1e-12 || wj < -1e-12 || wl < -1e-12) continue;
        best = std::max(best, wi * V[i] + wj * V[j] + wl * V[l]);
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // Segment through the prior.
      double dx = pts[j][1] - pts[i][1], dy = pts[j][2] - pts[i][2];
      double px = m[1] - pts[i][1], py = m[2] - pts[i][2];
      double len2 = dx * dx + dy * dy;
      if (len2 < 1e-14) {
        if (std::abs(px) + std::abs(py) < 1e-12) best = std::max(best, V[i]);
        continue;
      }
      double s = (px * dx + py * dy) / len2;
      if (s < -1e-12 || s > 1 + 1e-12) continue;
      if (std::abs(px - s * dx) + std::abs(py - s * dy) > 1e-12) continue;
      best = std::max(best, (1.0 - s) * V[i] + s * V[j]);
    }
  return best;
}

Primitives random_static(std::mt19937_64& rng, std::size_t nS, std::size_t nA, std::size_t nT,
                         const std::vector<Belief>& lattice, double cost = -1.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Primitives p;
  for (std::size_t s = 0; s < nS; ++s) p.states.push_back("s" + std::to_string(s));
  for (std::size_t a = 0; a < nA; ++a) p.actions.push_back("a" + std::to_string(a));
  for (std::size_t k = 0; k < nT; ++k) p.times.push_back(0.1 * static_cast<double>(k));
  // Interior lattice prior so the brute force sees the same point set.
  do {
    p.prior = lattice[rng() % lattice.size()];
  } while (*std::min_element(p.prior.begin(), p.prior.end()) < 0.05);
  p.u.assign(nS, std::vector<std::vector<double>>(nA, std::vector<double>(nT)));
  p.v = p.u;
  if (cost < 0) cost = 0.3 + U(rng);
  for (std::size_t s = 0; s < nS; ++s)
    for (std::size_t a = 0; a < nA; ++a) {
      const double bu = U(rng), bv = U(rng), sv = 0.2 + U(rng);
      for (std::size_t k = 0; k < nT; ++k) {
        p.u[s][a][k] = bu - cost * p.times[k];
        p.v[s][a][k] = bv - sv * p.times[k];
      }
    }
  return p;
}

double atom_mass(const BeliefTimeDistribution& f, const Belief& b, std::size_t k) {
  double m = 0.0;
  for (const Atom& a : f.atoms) {
    double d = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s) d = std::max(d, std::abs(a.belief[s] - b[s]));
    if (a.time == k && d < 1e-9) m += a.weight;
  }
  return m;
}

double law_distance(const BeliefTimeDistribution& a, const BeliefTimeDistribution& b) {
  double d = 0.0;
  for (const Atom& x : a.atoms)
    d = std::max(d, std::abs(atom_mass(a, x.belief, x.time) - atom_mass(b, x.belief, x.time)));
  for (const Atom& x : b.atoms)
    d = std::max(d, std::abs(atom_mass(a, x.belief, x.time) - atom_mass(b, x.belief, x.time)));
  return d;
}

BinaryPersuasionSpec log_spec(double dv, double kr, double kl) {
  BinaryPersuasionSpec s;
  s.mu0 = 0.4;
  s.v_ell = 0.0;
  s.v_r = dv;
  s.h_r = DelayGain::log(kr);
  s.h_ell = DelayGain::log(kl);
  return s;
}

// ---------------------------------------------------------------- criteria

Criterion c1_duality() {
  Criterion c{1, "duality/FOC suite", {}};
  std::mt19937_64 rng(20240601);
  double worst_diff = 0.0, worst_time = 0.0, worst_foc = 0.0;
  int foc_ok = 0, n = 20;
  for (int i = 0; i < n; ++i) {
    const std::size_t nS = 2 + i % 2, nA = 2 + (i / 2) % 2, nT = 6 + i % 5;
    Primitives P = testutil::random_primitives(rng, nS, nA, nT);
    auto gp = GridProblem::build(P, simplex_grid(nS, 101));
    auto lp = solve_relaxed(gp);
    auto foc = verify_foc(gp, lp.f, lp.duals, 1e-6);
    auto t0 = std::chrono::steady_clock::now();
    auto sr = solve_saddle(gp);
    const double dt = seconds_since(t0);
    worst_diff = std::max(worst_diff, std::abs(lp.objective - sr.value));
    worst_time = std::max(worst_time, dt);
    worst_foc = std::max(worst_foc, foc.max_violation);
    if (foc.pass && lp.status == LpStatus::optimal) ++foc_ok;
  }
  c.check("saddle value = LP value (20 instances)", worst_diff <= 1e-4, "max diff %.3g (tol 1e-4)", worst_diff);
  c.check("FOC with LP duals", foc_ok == n, "%d/%d pass, max violation %.3g (tol 1e-6)", foc_ok, n, worst_foc);
  c.check("saddle runtime", worst_time <= 5.0, "slowest %.2f s (limit 5 s)", worst_time);
  return c;
}

Criterion c2_static() {
  Criterion c{2, "static reduction", {}};
  {
    // Grids need two times; a prohibitive waiting cost makes the second one dead.
    Primitives p = match_model(0.3, {0.0, 1.0}, 100.0);
    auto gp = GridProblem::build(p, simplex_lattice(2, 100));
    double v = solve_relaxed(gp).objective;
    c.check("match model mu0=0.3 value 0.6", std::abs(v - 0.6) <= 1e-9, "LP %.12f", v);
  }
  std::mt19937_64 rng(77);
  double worst = 0.0;
  int n = 0;
  for (std::size_t nS : {2, 2, 2, 3, 3})
    for (std::size_t nA : {2, 3}) {
      auto lat = simplex_lattice(nS, nS == 2 ? 40 : 10);
      Primitives p = random_static(rng, nS, nA, 2, lat, 100.0);
      auto gp = GridProblem::build(p, lat);
      double lp = solve_relaxed(gp).objective;
      worst = std::max(worst, std::abs(lp - brute_cav(p, lat, 0)));
      ++n;
    }
  c.check("single-time LP = brute-force concavification", worst <= 1e-9, "%d instances, max diff %.3g", n, worst);
  double worst_late = 0.0, worst_cav = 0.0;
  n = 0;
  for (std::size_t nS : {2, 2, 3})
    for (std::size_t nA : {2, 3}) {
      auto lat = simplex_lattice(nS, nS == 2 ? 40 : 10);
      Primitives p = random_static(rng, nS, nA, 6, lat);
      auto gp = GridProblem::build(p, lat);
      auto sol = solve_relaxed(gp);
      for (const Atom& a : sol.f.atoms)
        if (a.time > 0) worst_late = std::max(worst_late, a.weight);
      worst_cav = std::max(worst_cav, std::abs(sol.objective - brute_cav(p, lat, 0)));
      ++n;
    }
  c.check("impatient principal: no mass after time 0", worst_late <= 1e-9, "%d instances, max late weight %.3g", n,
          worst_late);
  c.check("impatient principal: value = time-0 concavification", worst_cav <= 1e-9, "max diff %.3g", worst_cav);
  return c;
}

Criterion c3_binary() {
  Criterion c{3, "binary closed forms", {}};
  auto t0 = std::chrono::steady_clock::now();
  BinaryPersuasionSpec s = log_spec(0.4, 1.0, 0.5);
  SuspenseStrategy st = select_strategy(s);
  c.check("case 2.2 suspense-ell, certified",
          st.case_tag == "case2.2" && st.variant == Variant::suspense_ell && st.certified, "%s %s t1=%.6f t2=%.6f",
          st.case_tag.c_str(), to_string(st.variant), st.t1, st.t2);
  auto gp = GridProblem::build(binary_primitives(s, uniform_times(0.01, st.t2 + 0.15)), simplex_lattice(2, 100));
  double lp = solve_relaxed(gp).objective;
  double rel = std::abs(lp - st.payoff) / std::abs(st.payoff);
  c.check("payoff vs LP (dt 0.01, 101 beliefs)", rel <= 0.01, "closed form %.8f, LP %.8f, rel %.3g", st.payoff, lp,
          rel);
  FocResiduals r = foc_residuals(s, st.variant, st.t1, st.t2);
  const bool b_ok = st.t1 > 0 ? std::abs(r.res_b) <= 1e-8 : r.res_b >= -1e-8;
  c.check("FOC (a) t2, (b) t1, (c) local SOC", std::abs(r.res_a) <= 1e-8 && b_ok && r.soc_local_t1 && r.soc_local_t2,
          "res_a %.3g, res_b %.3g (t1=0, one-sided), soc %d/%d", r.res_a, r.res_b, r.soc_local_t1, r.soc_local_t2);
  // Interior t1 makes (b) an equality.
  BinaryPersuasionSpec s2 = log_spec(0.7, 1.0, 0.95);
  SuspenseStrategy st2 = select_strategy(s2);
  FocResiduals r2 = foc_residuals(s2, st2.variant, st2.t1, st2.t2);
  c.check("FOC interior window", std::abs(r2.res_a) <= 1e-8 && std::abs(r2.res_b) <= 1e-8 && st2.t1 > 0,
          "t1=%.6f res_a %.3g res_b %.3g", st2.t1, r2.res_a, r2.res_b);
  BinaryPersuasionSpec lin = log_spec(0.0, 1.0, 1.0);
  lin.h_ell = lin.h_r = DelayGain::linear(1.0);
  double psi_err = 0.0;
  for (double t : {0.0, 0.1, 0.25, 0.5, 0.75, 0.99}) psi_err = std::max(psi_err, std::abs(psi(lin, Variant::suspense_ell, t, 1.0) - 1.0));
  c.check("Psi = 1 for equal linear gains", psi_err <= 1e-10, "max |Psi-1| %.3g", psi_err);
  double el = seconds_since(t0);
  c.check("runtime", el <= 30.0, "%.2f s (limit 30 s)", el);
  return c;
}

Criterion c4_time_risk() {
  Criterion c{4, "time-risk properties", {}};
  {
    auto T = uniform_times(0.05, 3.0);
    Primitives p = match_model(0.3, T, 1.0);
    for (std::size_t th = 0; th < 2; ++th)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t k = 0; k < T.size(); ++k) {
          const double t = T[k];
          p.u[th][a][k] = (th == a ? 1.0 : 0.0) * std::exp(-t) - 0.2 * t;
          p.v[th][a][k] = (a == 1 ? 1.0 : 0.5) * std::exp(0.6 * t);
        }
    auto gp = GridProblem::build(p, simplex_lattice(2, 100));
    auto sol = solve_relaxed(gp);
    auto d = time_risk_diagnostics(gp, sol.f);
    std::size_t last = 0;
    for (const Atom& a : sol.f.atoms)
      if (a.weight > 1e-12) last = std::max(last, a.time);
    auto occ = occ_residuals(sol.f, gp.iu);
    double worst = 0.0;
    for (std::size_t k = 0; k < last && k < occ.size(); ++k) worst = std::max(worst, std::abs(occ[k]));
    c.check("convex instance detected", d.convex_in_t, "convex_in_t=%d", d.convex_in_t);
    c.check("OC-C binds for all t < last stop", worst <= 1e-6 && last > 0, "last stop t=%.2f, max |G| %.3g", T[last],
            worst);
  }
  {
    auto T = uniform_times(0.05, 2.0);
    Primitives q = match_model(0.3, T, 1.0);
    for (std::size_t th = 0; th < 2; ++th)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t k = 0; k < T.size(); ++k) {
          const double t = T[k];
          q.u[th][a][k] = (th == a ? 1.0 : 0.0) - 0.2 * t - 0.3 * t * t;
          q.v[th][a][k] = (a == 1 ? 1.0 : 0.0) + std::log(1.0 + t);
        }
    auto gp = GridProblem::build(q, simplex_lattice(2, 100));
    auto sol = solve_relaxed(gp);
    auto d = time_risk_diagnostics(gp, sol.f);
    std::set<std::size_t> times;
    for (const Atom& a : sol.f.atoms)
      if (a.weight > 1e-12) times.insert(a.time);
    c.check("concave instance detected", d.concave_in_t, "concave_in_t=%d", d.concave_in_t);
    c.check("support times collapse to one grid step", times.size() == 1, "%zu distinct times, first t=%.2f",
            times.size(), times.empty() ? -1.0 : T[*times.begin()]);
  }
  return c;
}

Criterion c5_censorship() {
  Criterion c{5, "tail censorship", {}};
  auto t0 = std::chrono::steady_clock::now();
  CensorshipProblem p;
  p.r = 1.0;
  p.theta_bar = 0.9;
  auto tr = backward_integrate(p);
  c.check("backward initial derivatives (0, -2)", tr.da[0] == 0.0 && tr.db[0] == -2.0, "(%.17g, %.17g)", tr.da[0],
          tr.db[0]);
  double ub = theta_star_upper_bound(p);
  c.check("theta* upper bound 0.75", std::abs(ub - 0.75) <= 1e-12, "%.15f", ub);
  auto pol = build_policy(p);
  auto id = verify_identities(p, pol, 1e-4, 1e-6);
  double worst = std::max({id.forward_alpha, id.forward_beta, id.no_upward, id.indifference});
  c.check("identity residuals at step 1e-4", id.pass && worst <= 1e-6,
          "forward %.3g/%.3g, no-upward %.3g, indifference %.3g", id.forward_alpha, id.forward_beta, id.no_upward,
          id.indifference);
  double pay = policy_payoff(p, pol);
  auto g = discretize_for_oracle(p, 21, 9, pol.T);
  double lp = solve_relaxed(g.gp).objective;
  double rel = (lp - pay) / std::abs(pay);
  c.check("21x9 oracle within 3% of policy payoff", std::abs(rel) <= 0.03, "policy %.6g, LP %.6g, rel %+.1f%%", pay, lp,
          100.0 * rel);
  double el = seconds_since(t0);
  c.check("runtime", el <= 20.0, "%.2f s (limit 20 s)", el);
  return c;
}

Criterion c6_goalposts() {
  Criterion c{6, "goalposts", {}};
  auto t0 = std::chrono::steady_clock::now();
  GoalpostsSpec s;
  const double mu_bar_cf = (std::exp(1.0) - 1.0) / 2.5;
  c.check("tau_bar = ln 3.5", std::abs(s.tau_bar() - std::log(3.5)) <= 1e-9, "%.12f", s.tau_bar());
  c.check("t* = 2 - ln 3.5", std::abs(s.t_star() - (2.0 - std::log(3.5))) <= 1e-9, "%.12f", s.t_star());
  c.check("mu_bar = (e-1)/2.5", std::abs(s.mu_bar() - mu_bar_cf) <= 1e-9, "%.12f", s.mu_bar());
  const double stated = (0.8 - mu_bar_cf) / (1.0 - mu_bar_cf);
  c.check("initial x_h reveal mass = (0.8-mu_bar)/(1-mu_bar)", std::abs(s.reveal_mass() - stated) <= 1e-9,
          "model %.9f vs %.9f", s.reveal_mass(), stated);

  auto res = goalposts_strategies(s, 0.025);
  const auto& gp = res.gp;
  auto sol = solve_relaxed(gp);
  double lp_reveal = atom_mass(sol.f, {0.0, 1.0}, 0);
  c.check("LP optimum agrees with the model reveal mass", std::abs(lp_reveal - s.reveal_mass()) <= 1e-6,
          "LP %.9f", lp_reveal);
  double law = law_distance(res.teleport.outcome(), res.inch.outcome());
  c.check("identical outcome laws", law <= 1e-6, "max atom diff %.3g", law);
  auto et = effort_law(s, res.teleport, gp), ei = effort_law(s, res.inch, gp);
  bool eff = et.size() == ei.size();
  for (std::size_t i = 0; eff && i < et.size(); ++i)
    eff = et[i].state == ei[i].state && std::abs(et[i].effort - ei[i].effort) <= 1e-9 &&
          et[i].completes == ei[i].completes && std::abs(et[i].mass - ei[i].mass) <= 1e-6;
  c.check("identical (state, effort) laws", eff, "%zu atoms", et.size());
  double vt = process_value(res.teleport, gp.iu), vi = process_value(res.inch, gp.iu);
  c.check("identical principal payoffs", std::abs(vt - vi) <= 1e-9, "%.12f vs %.12f", vt, vi);
  auto si = interim_surplus(res.inch, gp.iu);
  c.check("inch zero surplus", si.max_surplus <= 1e-9 && si.min_surplus >= -1e-9, "max %.3g", si.max_surplus);
  auto di = verify_dc1(res.inch, gp);
  c.check("inch DC1", di.verdict == Verdict::pass, "%s, worst gap %.3g", to_string(di.verdict), di.worst_gap);
  auto st = interim_surplus(res.teleport, gp.iu);
  const int sk = res.teleport.nodes[st.worst_node].k;
  c.check("teleport has surplus at an interior node", st.max_surplus > 1e-9 && sk > 0,
          "max %.4g at node %zu (t=%.3f)", st.max_surplus, st.worst_node, sk >= 0 ? res.times[sk] : -1.0);
  auto dt = verify_dc1(res.teleport, gp);
  const int dk = res.teleport.nodes[dt.worst_node].k;
  c.check("teleport fails DC1 at an interior node", dt.verdict == Verdict::fail && dk > 0,
          "%s, gap %.4g at t=%.3f", to_string(dt.verdict), dt.worst_gap, dk >= 0 ? res.times[dk] : -1.0);
  double el = seconds_since(t0);
  c.check("runtime", el <= 30.0, "%.2f s (limit 30 s)", el);
  return c;
}

Criterion c7_invariance() {
  Criterion c{7, "limited-commitment invariance", {}};
  std::mt19937_64 rng(31337);
  double worst_law = 0.0, worst_val = 0.0, worst_surplus = 0.0;
  int n = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t nS = 2 + rep % 2, nA = 2 + (rep / 2) % 2, nT = 4 + rep % 3;
    Primitives P = testutil::random_primitives(rng, nS, nA, nT);
    auto gp = GridProblem::build(P, simplex_lattice(nS, nS == 2 ? 20 : 8));
    auto sol = solve_relaxed(gp);
    if (sol.status != LpStatus::optimal) continue;
    auto proc = process_from_distribution(sol.f, P.prior);
    auto z = make_zero_surplus(proc, gp.iu);
    z.validate(1e-9);
    worst_law = std::max(worst_law, law_distance(proc.outcome(), z.outcome()));
    worst_val = std::max(worst_val, std::abs(process_value(z, gp.iu) - process_value(proc, gp.iu)));
    auto s = interim_surplus(z, gp.iu);
    worst_surplus = std::max({worst_surplus, s.max_surplus, -s.min_surplus});
    ++n;
  }
  c.check("10 optimal instances processed", n == 10, "%d", n);
  c.check("(mu_tau, tau) law preserved", worst_law <= 1e-9, "max diff %.3g", worst_law);
  c.check("E[V] preserved", worst_val <= 1e-9, "max diff %.3g", worst_val);
  c.check("zero surplus at every node", worst_surplus <= 1e-9, "max |surplus| %.3g", worst_surplus);
  return c;
}

Criterion c8_coase() {
  Criterion c{8, "Coase demo", {}};
  auto r = coase_demo(CoaseSpec{});
  c.check("immediate full revelation", r.full_reveal_at_1, "split into %zu atoms, principal value %.6f",
          r.first_split.size(), r.principal_value);
  c.check("one-shot deviation gains", r.max_principal_gain <= 1e-9 && r.max_agent_gain <= 1e-9,
          "principal %.3g, agent %.3g", r.max_principal_gain, r.max_agent_gain);
  return c;
}

Criterion c9_convergence() {
  Criterion c{9, "discretization convergence", {}};
  struct Inst {
    const char* name;
    BinaryPersuasionSpec spec;
  };
  BinaryPersuasionSpec b = log_spec(0.9, 0.5, 1.0);
  for (const Inst& in : {Inst{"log gains, dv 0.4", log_spec(0.4, 1.0, 0.5)}, Inst{"substitutes, dv 0.9", b}}) {
    SuspenseStrategy st = select_strategy(in.spec);
    const double H = std::ceil((st.t2 + 0.1) / 0.08) * 0.08;
    std::vector<double> vals;
    for (double dt : {0.08, 0.04, 0.02, 0.01}) {
      auto gp = GridProblem::build(binary_primitives(in.spec, uniform_times(dt, H)), simplex_lattice(2, 100));
      vals.push_back(solve_relaxed(gp).objective);
    }
    double d1 = std::abs(vals[1] - vals[0]), d2 = std::abs(vals[2] - vals[1]), d3 = std::abs(vals[3] - vals[2]);
    c.check(std::string(in.name) + " (" + st.case_tag + ")", d1 > d2 && d2 > d3, "diffs %.3e > %.3e > %.3e", d1, d2,
            d3);
  }
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> all{c1_duality, c2_static,     c3_binary,      c4_time_risk, c5_censorship,
                                              c6_goalposts, c7_invariance, c8_coase, c9_convergence};
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Criterion c{static_cast<int>(i + 1), "(aborted)", {}};
    try {
      c = all[i]();
    } catch (const std::exception& e) {
      c.check("completed", false, "threw: %s", e.what());
    }
    const bool ok = c.pass();
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds_since(t0));
    for (const auto& it : c.items)
      std::printf("    [%s] %s: %s\n", it.ok ? "ok" : "FAIL", it.what.c_str(), it.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed == 0 ? 0 : 1;
}
