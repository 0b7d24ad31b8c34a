#include "persuade/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>

namespace persuade {

namespace {

bool same_belief(const Belief& a, const Belief& b, double tol) {
  for (std::size_t s = 0; s < a.size(); ++s)
    if (std::abs(a[s] - b[s]) > tol) return false;
  return true;
}

Belief mix(const Belief& a, const Belief& b, double w) {  // w a + (1 - w) b
  Belief out(a.size());
  for (std::size_t s = 0; s < a.size(); ++s) out[s] = w * a[s] + (1.0 - w) * b[s];
  return out;
}

std::string node_str(const FiniteBeliefProcess& p, std::size_t id) {
  std::ostringstream os;
  os << "node " << id << " (k=" << p.nodes[id].k << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- process

std::vector<std::size_t> FiniteBeliefProcess::by_time() const {
  std::vector<std::size_t> ids(nodes.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return nodes[a].k < nodes[b].k; });
  return ids;
}

void FiniteBeliefProcess::validate(double tol) const {
  if (nodes.empty() || nodes[0].k != -1 || nodes[0].stop)
    throw InputError("process", "node 0 must be a continue root at k = -1");
  const int K = static_cast<int>(times.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const ProcessNode& n = nodes[id];
    if (n.k >= K) throw InputError("process", node_str(*this, id) + " beyond the time grid");
    if (n.stop) {
      if (!n.children.empty()) throw InputError("process", node_str(*this, id) + " stops but has children");
      continue;
    }
    if (n.children.empty()) throw InputError("process", node_str(*this, id) + " continues without children");
    double sum = 0.0;
    Belief mean(n.belief.size(), 0.0);
    for (auto [c, p] : n.children) {
      if (c >= nodes.size() || nodes[c].k != n.k + 1)
        throw InputError("process", node_str(*this, id) + " has a child off the next period");
      if (p < -tol) throw InputError("process", node_str(*this, id) + " has a negative probability");
      sum += p;
      for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += p * nodes[c].belief[s];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("process", node_str(*this, id) + " kernel does not sum to 1");
    if (!same_belief(mean, n.belief, std::max(tol, 1e-12)))
      throw InputError("process", node_str(*this, id) + " children do not average to the parent");
  }
}

std::vector<double> FiniteBeliefProcess::reach() const {
  std::vector<double> r(nodes.size(), 0.0);
  if (nodes.empty()) return r;
  r[0] = 1.0;
  for (std::size_t id : by_time())
    for (auto [c, p] : nodes[id].children) r[c] += r[id] * p;
  return r;
}

BeliefTimeDistribution FiniteBeliefProcess::outcome(double merge_tol) const {
  BeliefTimeDistribution f;
  f.times = times;
  auto r = reach();
  for (std::size_t id : by_time()) {
    const ProcessNode& n = nodes[id];
    if (!n.stop || r[id] <= 0.0) continue;
    bool merged = false;
    for (Atom& a : f.atoms)
      if (a.time == static_cast<std::size_t>(n.k) && same_belief(a.belief, n.belief, merge_tol)) {
        a.weight += r[id];
        merged = true;
        break;
      }
    if (!merged) f.atoms.push_back({n.belief, static_cast<std::size_t>(n.k), r[id]});
  }
  return f;
}

std::size_t FiniteBeliefProcess::last_stop_time() const {
  auto r = reach();
  std::size_t last = 0;
  for (std::size_t id = 0; id < nodes.size(); ++id)
    if (nodes[id].stop && r[id] > 0.0) last = std::max(last, static_cast<std::size_t>(nodes[id].k));
  return last;
}

FiniteBeliefProcess process_from_distribution(const BeliefTimeDistribution& f, const Belief& prior) {
  FiniteBeliefProcess proc;
  proc.times = f.times;
  std::vector<Atom> atoms;
  double total = 0.0;
  for (const Atom& a : f.atoms)
    if (a.weight > 1e-12) {
      atoms.push_back(a);
      total += a.weight;
    }
  if (atoms.empty()) throw InputError("f", "no atoms");
  for (Atom& a : atoms) a.weight /= total;
  Belief mean(prior.size(), 0.0);
  for (const Atom& a : atoms)
    for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += a.weight * a.belief[s];
  if (!same_belief(mean, prior, 1e-8)) throw InputError("f", "atoms do not average to the prior");
  proc.nodes.push_back({-1, mean, false, {}});
  std::size_t parent = 0;
  double parent_mass = 1.0;
  const std::size_t K = f.times.size();
  for (std::size_t k = 0; k < K && parent_mass > 0.0; ++k) {
    double later = 0.0;
    Belief later_mean(prior.size(), 0.0);
    for (const Atom& a : atoms) {
      if (a.time == k) {
        proc.nodes.push_back({static_cast<int>(k), a.belief, true, {}});
        proc.nodes[parent].children.push_back({proc.nodes.size() - 1, a.weight / parent_mass});
      } else if (a.time > k) {
        later += a.weight;
        for (std::size_t s = 0; s < later_mean.size(); ++s) later_mean[s] += a.weight * a.belief[s];
      }
    }
    if (later <= 0.0) break;
    for (double& x : later_mean) x /= later;
    proc.nodes.push_back({static_cast<int>(k), later_mean, false, {}});
    proc.nodes[parent].children.push_back({proc.nodes.size() - 1, later / parent_mass});
    parent = proc.nodes.size() - 1;
    parent_mass = later;
  }
  // Re-centre each continue node on its children so the martingale holds to rounding.
  for (std::size_t id : [&] { auto v = proc.by_time(); std::reverse(v.begin(), v.end()); return v; }()) {
    ProcessNode& n = proc.nodes[id];
    if (n.stop) continue;
    Belief m(prior.size(), 0.0);
    double sum = 0.0;
    for (auto [c, p] : n.children) sum += p;
    for (auto& e : n.children) e.second /= sum;
    for (auto [c, p] : n.children)
      for (std::size_t s = 0; s < m.size(); ++s) m[s] += p * proc.nodes[c].belief[s];
    n.belief = m;
  }
  return proc;
}

// ---------------------------------------------------------------- surplus

namespace {

std::vector<double> node_values(const FiniteBeliefProcess& proc, const IndirectUtility& iu) {
  std::vector<double> val(proc.nodes.size(), 0.0);
  auto order = proc.by_time();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const ProcessNode& n = proc.nodes[*it];
    if (n.stop) {
      val[*it] = iu.U(n.belief, static_cast<std::size_t>(n.k));
    } else {
      double v = 0.0;
      for (auto [c, p] : n.children) v += p * val[c];
      val[*it] = v;
    }
  }
  return val;
}

std::vector<double> node_principal_values(const FiniteBeliefProcess& proc, const IndirectUtility& iu) {
  std::vector<double> val(proc.nodes.size(), 0.0);
  auto order = proc.by_time();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const ProcessNode& n = proc.nodes[*it];
    if (n.stop) {
      val[*it] = iu.V(n.belief, static_cast<std::size_t>(n.k));
    } else {
      double v = 0.0;
      for (auto [c, p] : n.children) v += p * val[c];
      val[*it] = v;
    }
  }
  return val;
}

}  // namespace

SurplusReport interim_surplus(const FiniteBeliefProcess& proc, const IndirectUtility& iu, double tol) {
  SurplusReport rep;
  rep.value = node_values(proc, iu);
  rep.surplus.assign(proc.nodes.size(), NAN);
  auto r = proc.reach();
  rep.max_surplus = 0.0;
  rep.min_surplus = 0.0;
  bool first = true;
  for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
    const ProcessNode& n = proc.nodes[id];
    if (n.stop || n.k < 0 || r[id] <= 0.0) continue;
    double s = rep.value[id] - iu.U(n.belief, static_cast<std::size_t>(n.k));
    rep.surplus[id] = s;
    if (first || s > rep.max_surplus) {
      rep.max_surplus = s;
      rep.worst_node = id;
    }
    rep.min_surplus = first ? s : std::min(rep.min_surplus, s);
    first = false;
  }
  rep.zero_surplus = rep.max_surplus <= tol;
  return rep;
}

double process_value(const FiniteBeliefProcess& proc, const IndirectUtility& iu) {
  auto r = proc.reach();
  double v = 0.0;
  for (std::size_t id = 0; id < proc.nodes.size(); ++id)
    if (proc.nodes[id].stop) v += r[id] * iu.V(proc.nodes[id].belief, static_cast<std::size_t>(proc.nodes[id].k));
  return v;
}

double solve_lambda(const IndirectUtility& iu, const Belief& mu, const Belief& mu_i, double u_i,
                    double C, std::size_t k) {
  // g is linear minus convex, hence concave; g(0) > 0, so {g > 0} is [0, root).
  auto g = [&](double lam) { return lam * u_i + (1.0 - lam) * C - iu.U(mix(mu_i, mu, lam), k); };
  if (!(g(0.0) > 0.0)) return 0.0;
  if (g(1.0) > 1e-12) return NAN;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

FiniteBeliefProcess make_zero_surplus(const FiniteBeliefProcess& in, const IndirectUtility& iu,
                                      double tol, std::vector<SplitRecord>* log) {
  in.validate(1e-10);
  FiniteBeliefProcess proc = in;
  std::vector<bool> alive(proc.nodes.size(), true);
  const int K = static_cast<int>(proc.times.size());
  for (int k = K - 2; k >= 0; --k) {
    auto val = node_values(proc, iu);
    auto r = proc.reach();
    std::vector<std::pair<double, std::size_t>> todo;
    for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
      const ProcessNode& n = proc.nodes[id];
      if (!alive[id] || n.stop || n.k != k || r[id] <= 0.0) continue;
      double s = val[id] - iu.U(n.belief, static_cast<std::size_t>(k));
      if (s > tol) todo.push_back({-s, id});
    }
    std::sort(todo.begin(), todo.end());
    for (auto [neg_s, id] : todo) {
      const ProcessNode node = proc.nodes[id];
      const double C = val[id];
      SplitRecord rec;
      rec.k = k;
      rec.mu = node.belief;
      std::vector<double> lam(node.children.size());
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const std::size_t ci = node.children[i].first;
        lam[i] = solve_lambda(iu, node.belief, proc.nodes[ci].belief, val[ci], C, static_cast<std::size_t>(k));
        if (!(lam[i] > 0.0))
          throw InputError("process", "no lambda root in (0, 1] at " + node_str(proc, id) +
                                          " (does the input solve the relaxed problem?)");
      }
      double S = 0.0;
      for (std::size_t i = 0; i < lam.size(); ++i) S += node.children[i].second / lam[i];
      std::vector<std::pair<std::size_t, double>> replacement;
      for (std::size_t i = 0; i < lam.size(); ++i) {
        const double p_i = node.children[i].second;
        if (p_i <= 0.0) continue;
        ProcessNode h;
        h.k = k;
        h.stop = false;
        h.belief = mix(proc.nodes[node.children[i].first].belief, node.belief, lam[i]);
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          double q = (1.0 - lam[i]) * node.children[j].second + (i == j ? lam[i] : 0.0);
          if (q > 0.0) h.children.push_back({node.children[j].first, q});
        }
        rec.lambda.push_back(lam[i]);
        rec.interim.push_back(h.belief);
        proc.nodes.push_back(std::move(h));
        alive.push_back(true);
        replacement.push_back({proc.nodes.size() - 1, (p_i / lam[i]) / S});
      }
      for (std::size_t pid = 0; pid < proc.nodes.size(); ++pid) {
        if (!alive[pid] || proc.nodes[pid].k != k - 1) continue;
        auto& ch = proc.nodes[pid].children;
        std::vector<std::pair<std::size_t, double>> next;
        for (auto [c, q] : ch) {
          if (c != id) {
            next.push_back({c, q});
            continue;
          }
          for (auto [h, w] : replacement) next.push_back({h, q * w});
        }
        ch = std::move(next);
      }
      alive[id] = false;
      val.resize(proc.nodes.size(), 0.0);
      for (auto [h, w] : replacement) val[h] = val[id];
      if (log) log->push_back(std::move(rec));
    }
  }
  // Compact: keep live nodes reachable from the root.
  std::vector<bool> keep(proc.nodes.size(), false);
  keep[0] = true;
  for (std::size_t id : proc.by_time())
    if (keep[id] && alive[id])
      for (auto [c, p] : proc.nodes[id].children)
        if (p > 0.0) keep[c] = true;
  std::vector<std::size_t> remap(proc.nodes.size(), 0);
  FiniteBeliefProcess out;
  out.times = proc.times;
  for (std::size_t id = 0; id < proc.nodes.size(); ++id)
    if (keep[id] && alive[id]) {
      remap[id] = out.nodes.size();
      out.nodes.push_back(proc.nodes[id]);
    }
  for (ProcessNode& n : out.nodes) {
    std::vector<std::pair<std::size_t, double>> ch;
    for (auto [c, p] : n.children)
      if (p > 0.0) ch.push_back({remap[c], p});
    n.children = std::move(ch);
  }
  return out;
}

// ---------------------------------------------------------------- DC1

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

// W at each (belief, k) request, computed in parallel; first error rethrown.
std::vector<double> batch_W(const GridProblem& gp, const std::vector<std::pair<Belief, std::size_t>>& req,
                            const OracleOptions& opt, bool parallel = true) {
  std::vector<double> out(req.size(), NAN);
  std::vector<std::string> err(req.size());
  const long n = static_cast<long>(req.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = interim_value_W(gp, req[i].first, req[i].second, opt);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (const auto& e : err)
    if (!e.empty()) throw InputError("W", e);
  return out;
}

}  // namespace

Dc1Report verify_dc1(const FiniteBeliefProcess& proc, const GridProblem& gp, double tol,
                     const OracleOptions& opt, bool parallel) {
  Dc1Report rep;
  rep.gap.assign(proc.nodes.size(), NAN);
  auto r = proc.reach();
  auto ev = node_principal_values(proc, gp.iu);
  std::vector<std::size_t> ids;
  std::vector<std::pair<Belief, std::size_t>> req;
  for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
    const ProcessNode& n = proc.nodes[id];
    if (n.stop || n.k < 0 || r[id] <= 0.0) continue;
    ids.push_back(id);
    req.push_back({n.belief, static_cast<std::size_t>(n.k)});
  }
  auto W = batch_W(gp, req, opt, parallel);
  rep.worst_gap = -INFINITY;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double g = W[i] - ev[ids[i]];
    rep.gap[ids[i]] = g;
    if (g > rep.worst_gap) {
      rep.worst_gap = g;
      rep.worst_node = ids[i];
    }
  }
  if (ids.empty()) rep.worst_gap = 0.0;
  if (rep.worst_gap <= tol)
    rep.verdict = Verdict::pass;
  else if (proc.last_stop_time() + 1 >= proc.times.size())
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = Verdict::fail;
  return rep;
}

bool v_nondecreasing_in_t(const GridProblem& gp, double tol) {
  for (std::size_t i = 0; i < gp.n_beliefs(); ++i)
    for (std::size_t t = 0; t + 1 < gp.n_times(); ++t)
      if (gp.Vtab[i][t + 1] < gp.Vtab[i][t] - tol) return false;
  return true;
}

DeviationAudit audit_deviations(const FiniteBeliefProcess& proc, const GridProblem& gp, double tol,
                                const OracleOptions& opt) {
  DeviationAudit a;
  auto sur = interim_surplus(proc, gp.iu, tol);
  a.continue_to_stop = std::max(0.0, -sur.min_surplus);
  auto dc = verify_dc1(proc, gp, tol, opt);
  a.principal = std::max(0.0, dc.worst_gap);
  auto r = proc.reach();
  std::vector<std::pair<Belief, std::size_t>> req;
  std::vector<double> vnext;
  a.stop_to_continue = -INFINITY;
  for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
    const ProcessNode& n = proc.nodes[id];
    if (!n.stop || r[id] <= 0.0 || n.k + 1 >= static_cast<int>(proc.times.size())) continue;
    const std::size_t k = static_cast<std::size_t>(n.k);
    a.stop_to_continue = std::max(a.stop_to_continue, gp.iu.U(n.belief, k + 1) - gp.iu.U(n.belief, k));
    bool dup = false;
    for (const auto& q : req)
      if (q.second == k + 1 && same_belief(q.first, n.belief, 1e-12)) dup = true;
    if (dup) continue;
    req.push_back({n.belief, k + 1});
    vnext.push_back(gp.iu.V(n.belief, k + 1));
  }
  if (!std::isfinite(a.stop_to_continue)) a.stop_to_continue = 0.0;
  auto W = batch_W(gp, req, opt);
  for (std::size_t i = 0; i < W.size(); ++i)
    if (W[i] > vnext[i] + tol) ++a.responses_not_credible;
  a.v_nondecreasing = v_nondecreasing_in_t(gp);
  a.pass = a.continue_to_stop <= tol && a.principal <= tol && a.stop_to_continue <= tol &&
           a.responses_not_credible == 0 && a.v_nondecreasing;
  return a;
}

// ---------------------------------------------------------------- goalposts

void GoalpostsSpec::validate() const {
  auto pos = [](double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) throw InputError(name, "must be positive");
  };
  pos(x_l, "x_l");
  pos(x_h, "x_h");
  pos(R, "R");
  pos(c, "c");
  pos(r, "r");
  pos(r_p, "r_p");
  if (!(x_h > x_l)) throw InputError("x_h", "must exceed x_l");
  if (prior.size() != 2 || prior[0] < 0.0 || prior[1] < 0.0 ||
      std::abs(prior[0] + prior[1] - 1.0) > 1e-9)
    throw InputError("prior", "must be a probability vector over (x_l, x_h)");
  const double tau = tau_bar();
  if (!(x_l < tau)) throw InputError("x_l", "x_l must be below tau_bar (easy task worth finishing)");
  if (!(x_h > tau)) throw InputError("x_h", "x_h must exceed tau_bar (hard task needs persuasion)");
  if (x_h - x_l > tau) throw InputError("x_h", "x_h - x_l must not exceed tau_bar");
  if (!(prior[0] < mu_bar())) throw InputError("prior", "prior(x_l) >= mu_bar: agent starts without news");
  if (!(prior[1] > continuation_belief()))
    throw InputError("prior", "prior(x_h) <= continuation belief: no initial revelation needed");
}

double GoalpostsSpec::tau_bar() const { return std::log((R + c) / c) / r; }

double GoalpostsSpec::mu_bar() const {
  return (c / R) * (1.0 - std::exp(-r * x_l)) / std::exp(-r * x_l);
}

double GoalpostsSpec::continuation_belief() const {
  const double A = R * std::exp(-r * x_l) - c * (1.0 - std::exp(-r * x_l));
  const double B = c * (1.0 - std::exp(-r * t_star()));
  return A / (A + B);
}

double GoalpostsSpec::reveal_mass() const {
  const double m = continuation_belief();
  return (prior[1] - m) / (1.0 - m);
}

std::vector<double> goalposts_times(const GoalpostsSpec& spec, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt", "must be positive");
  std::vector<double> special{0.0, spec.t_star(), spec.x_l, spec.x_h};
  std::vector<double> t;
  const long n = static_cast<long>(std::floor(spec.x_h / dt + 1e-9));
  for (long i = 0; i <= n; ++i) t.push_back(i * dt);
  for (double s : special) {
    bool snapped = false;
    for (double& x : t)
      if (std::abs(x - s) < 1e-9) {
        x = s;
        snapped = true;
      }
    if (!snapped) t.push_back(s);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  while (!t.empty() && t.back() > spec.x_h) t.pop_back();
  return t;
}

Primitives goalposts_primitives(const GoalpostsSpec& spec, const std::vector<double>& times) {
  Primitives P;
  P.states = {"x_l", "x_h"};
  P.actions = {"work"};
  P.times = times;
  P.prior = spec.prior;
  const std::size_t n = times.size();
  P.u.assign(2, std::vector<std::vector<double>>(1, std::vector<double>(n)));
  P.v = P.u;
  const double x[2] = {spec.x_l, spec.x_h};
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t k = 0; k < n; ++k) {
      const double t = times[k];
      P.u[s][0][k] = (t >= x[s] - 1e-12 ? std::exp(-spec.r * t) * spec.R : 0.0) -
                     spec.c * (1.0 - std::exp(-spec.r * t));
      P.v[s][0][k] = 1.0 - std::exp(-spec.r_p * t);
    }
  return P;
}

GoalpostsResult goalposts_strategies(const GoalpostsSpec& spec, double dt, std::size_t divisions) {
  spec.validate();
  GoalpostsResult res;
  res.times = goalposts_times(spec, dt);
  res.gp = GridProblem::build(goalposts_primitives(spec, res.times), simplex_lattice(2, divisions));
  const std::size_t ks = static_cast<std::size_t>(
      std::find(res.times.begin(), res.times.end(), spec.t_star()) - res.times.begin());
  const double m = spec.continuation_belief(), q = spec.reveal_mass();
  FiniteBeliefProcess& tp = res.teleport;
  tp.times = res.times;
  tp.nodes.push_back({-1, spec.prior, false, {}});
  tp.nodes.push_back({0, {0.0, 1.0}, true, {}});
  tp.nodes[0].children.push_back({1, q});
  std::size_t parent = 0;
  for (std::size_t k = 0; k < ks; ++k) {
    tp.nodes.push_back({static_cast<int>(k), {1.0 - m, m}, false, {}});
    tp.nodes[parent].children.push_back({tp.nodes.size() - 1, k == 0 ? 1.0 - q : 1.0});
    parent = tp.nodes.size() - 1;
  }
  tp.nodes.push_back({static_cast<int>(ks), {1.0, 0.0}, true, {}});
  tp.nodes[parent].children.push_back({tp.nodes.size() - 1, 1.0 - m});
  tp.nodes.push_back({static_cast<int>(ks), {0.0, 1.0}, true, {}});
  tp.nodes[parent].children.push_back({tp.nodes.size() - 1, m});
  tp.validate(1e-12);
  res.inch = make_zero_surplus(tp, res.gp.iu);
  return res;
}

std::vector<EffortAtom> effort_law(const GoalpostsSpec& spec, const FiniteBeliefProcess& proc,
                                   const GridProblem& gp) {
  std::vector<EffortAtom> law;
  auto r = proc.reach();
  const double x[2] = {spec.x_l, spec.x_h};
  for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
    const ProcessNode& n = proc.nodes[id];
    if (!n.stop || r[id] <= 0.0) continue;
    IndirectEval e = gp.iu.eval(n.belief, static_cast<std::size_t>(n.k));
    const double effort = proc.times[e.act_time];
    for (std::size_t s = 0; s < 2; ++s) {
      const double mass = r[id] * n.belief[s];
      if (mass <= 0.0) continue;
      const bool done = effort >= x[s] - 1e-12;
      auto it = std::find_if(law.begin(), law.end(), [&](const EffortAtom& a) {
        return a.state == s && std::abs(a.effort - effort) < 1e-12;
      });
      if (it == law.end())
        law.push_back({s, effort, done, mass});
      else
        it->mass += mass;
    }
  }
  std::sort(law.begin(), law.end(), [](const EffortAtom& a, const EffortAtom& b) {
    return a.state != b.state ? a.state < b.state : a.effort < b.effort;
  });
  return law;
}

std::vector<GoalpostRow> goalposts_path(const GoalpostsSpec& spec, const FiniteBeliefProcess& proc) {
  auto r = proc.reach();
  const std::size_t K = proc.times.size(), last = proc.last_stop_time();
  std::vector<double> num(K, 0.0), den(K, 0.0), rl(K, 0.0), rh(K, 0.0);
  for (std::size_t id = 0; id < proc.nodes.size(); ++id) {
    const ProcessNode& n = proc.nodes[id];
    if (n.k >= 0 && r[id] > 0.0 && n.belief[0] < 1.0 && !(n.stop && n.k == 0)) {
      num[n.k] += r[id] * (spec.x_l * n.belief[0] + spec.x_h * n.belief[1]);
      den[n.k] += r[id];
    }
    for (auto [c, p] : n.children) {
      const Belief& b = proc.nodes[c].belief;
      const std::size_t kc = static_cast<std::size_t>(proc.nodes[c].k);
      if (b[0] >= 1.0 && n.belief[0] < 1.0) rl[kc] += r[id] * p;
      if (b[1] >= 1.0 && n.belief[1] < 1.0) rh[kc] += r[id] * p;
    }
  }
  std::vector<GoalpostRow> rows;
  for (std::size_t k = 0; k <= last && k < K; ++k)
    rows.push_back({proc.times[k], den[k] > 0.0 ? num[k] / den[k] : NAN, rl[k], rh[k]});
  return rows;
}

// ---------------------------------------------------------------- Coase

double CoaseSpec::U(double mu, std::size_t t) const { return u_dirac[t] * std::max(mu, 1.0 - mu); }

double CoaseSpec::V(double mu, std::size_t t) const {
  return v_dirac[t] + kappa[t] * 4.0 * mu * (1.0 - mu);
}

void CoaseSpec::validate() const {
  const std::size_t P = u_dirac.size();
  if (P < 2 || v_dirac.size() != P || kappa.size() != P)
    throw InputError("coase", "u_dirac, v_dirac, kappa need equal length >= 2");
  if (grid < 3) throw InputError("coase", "grid needs >= 3 points");
  const double step = 1.0 / static_cast<double>(grid - 1);
  const double pos = mu0 / step;
  if (!(mu0 > 0.0 && mu0 < 1.0) || std::abs(pos - std::round(pos)) > 1e-9)
    throw InputError("coase", "mu0 must be an interior grid point");
  for (std::size_t t = 0; t + 1 < P; ++t) {
    if (std::abs(u_dirac[t + 1] - u_dirac[t]) > 1e-12)
      throw InputError("coase", "condition (i) fails: U(delta, t) is not constant in t");
    if (!(v_dirac[t + 1] < v_dirac[t]))
      throw InputError("coase", "condition (i) fails: V(delta, t) is not strictly decreasing");
  }
  for (std::size_t i = 1; i + 1 < grid; ++i) {
    const double mu = i * step;
    if (!(V(mu, P - 1) < v_dirac[P - 1]))
      throw InputError("coase", "condition (ii) fails: V(mu, T) >= E[V(delta, T)] at interior mu");
  }
}

CoaseResult coase_demo(const CoaseSpec& spec) {
  spec.validate();
  const std::size_t n = spec.grid, P = spec.u_dirac.size();
  const double step = 1.0 / static_cast<double>(n - 1);
  auto g = [&](std::size_t i) { return i * step; };
  const double eps = 1e-12;

  struct Split {
    std::size_t lo, hi;
    double w_hi;
  };
  // Best two-point split of phi at belief m; ties go to the lower agent value.
  auto best_split = [&](const std::vector<double>& phi, const std::vector<double>& alpha, std::size_t m,
                        double& pv, double& av) {
    Split best{m, m, 0.0};
    pv = phi[m];
    av = alpha[m];
    for (std::size_t i = 0; i <= m; ++i)
      for (std::size_t j = m; j < n; ++j) {
        if (i == j) continue;
        const double w = (g(m) - g(i)) / (g(j) - g(i));
        const double v = (1 - w) * phi[i] + w * phi[j];
        const double a = (1 - w) * alpha[i] + w * alpha[j];
        if (v > pv + eps || (v >= pv - eps && a < av - eps)) {
          pv = v;
          av = a;
          best = {i, j, w};
        }
      }
    return best;
  };

  CoaseResult res;
  // P_next / A_next: principal / agent values at the start of period t + 1.
  std::vector<double> Pn(n), An(n);
  std::vector<std::vector<bool>> stops(P, std::vector<bool>(n, true));
  std::vector<std::vector<double>> phis(P), alphas(P);
  for (std::size_t tt = P; tt-- > 0;) {
    std::vector<double> phi(n), alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = g(i);
      bool stop = true;
      if (tt + 1 < P) {
        const double us = spec.U(mu, tt), uc = An[i];
        if (uc > us + eps) stop = false;
        else if (uc >= us - eps) stop = spec.V(mu, tt) >= Pn[i];
        const double gain = stop ? uc - us : us - uc;
        res.max_agent_gain = std::max(res.max_agent_gain, gain);
      }
      stops[tt][i] = stop;
      phi[i] = stop ? spec.V(mu, tt) : Pn[i];
      alpha[i] = stop ? spec.U(mu, tt) : An[i];
      if (tt == 0 && i > 0 && i + 1 < n)
        res.interior_continue_gain = std::max(res.interior_continue_gain, An[i] - spec.U(mu, 0));
    }
    std::vector<double> Pt(n), At(n);
    for (std::size_t m = 0; m < n; ++m) {
      best_split(phi, alpha, m, Pt[m], At[m]);
      // Audit: no split, two-point or degenerate, beats the chosen one.
      double dev = phi[m] - Pt[m];
      for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = m + 1; j < n; ++j) {
          const double w = (g(m) - g(i)) / (g(j) - g(i));
          dev = std::max(dev, (1 - w) * phi[i] + w * phi[j] - Pt[m]);
        }
      res.max_principal_gain = std::max(res.max_principal_gain, dev);
    }
    phis[tt] = phi;
    alphas[tt] = alpha;
    Pn = Pt;
    An = At;
  }
  const std::size_t m0 = static_cast<std::size_t>(std::lround(spec.mu0 / step));
  double pv = 0.0, av = 0.0;
  Split s = best_split(phis[0], alphas[0], m0, pv, av);
  res.principal_value = pv;
  res.agent_value = av;
  if (s.lo == s.hi) {
    res.first_split = {{g(m0), 1.0}};
    res.stops_first = {stops[0][m0]};
  } else {
    res.first_split = {{g(s.lo), 1.0 - s.w_hi}, {g(s.hi), s.w_hi}};
    res.stops_first = {stops[0][s.lo], stops[0][s.hi]};
  }
  res.full_reveal_at_1 = res.first_split.size() == 2 && s.lo == 0 && s.hi == n - 1 &&
                         res.stops_first[0] && res.stops_first[1];
  return res;
}

}  // namespace persuade
