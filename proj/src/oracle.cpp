#include "persuade/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace persuade {

namespace {

double dot(const Belief& a, const Belief& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool same(const Belief& a, const Belief& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

struct Candidate {
  const Belief* mu;
  std::size_t k;
  double U;
  double V;
};

LpSolution solve_candidates(const IndirectUtility& iu, const std::vector<double>& times,
                            const std::vector<Candidate>& cand, const Belief& prior,
                            std::size_t k0, const OracleOptions& opt) {
  const std::size_t n = prior.size();
  const std::size_t J = times.size();
  const std::size_t m = cand.size();
  LpProblem lp;
  lp.c.resize(m);
  for (std::size_t j = 0; j < m; ++j) lp.c[j] = cand[j].V;
  lp.A_eq.assign(n, std::vector<double>(m, 0.0));
  lp.b_eq.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    lp.A_eq[0][j] = 1.0;
    for (std::size_t s = 0; s + 1 < n; ++s) lp.A_eq[s + 1][j] = (*cand[j].mu)[s];
  }
  lp.b_eq[0] = 1.0;
  for (std::size_t s = 0; s + 1 < n; ++s) lp.b_eq[s + 1] = prior[s];

  struct RowTag {
    std::size_t time;
    Belief coef;
  };
  std::vector<RowTag> tags;
  for (std::size_t t = k0; t + 1 < J; ++t) {
    for (Belief& c : iu.nondominated_coefs(t)) {
      std::vector<double> row(m, 0.0);
      bool any = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (cand[j].k <= t) continue;
        row[j] = cand[j].U - dot(c, *cand[j].mu);
        if (row[j] != 0.0) any = true;
      }
      if (!any) continue;
      lp.A_ge.push_back(std::move(row));
      lp.b_ge.push_back(0.0);
      tags.push_back({t, std::move(c)});
    }
  }

  LpResult r = solve_lp(lp, opt.lp);
  LpSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.f.times = times;
  if (r.status != LpStatus::optimal) return sol;
  sol.objective = r.value;
  for (std::size_t j = 0; j < m; ++j)
    if (r.x[j] > opt.support_tol) sol.f.atoms.push_back({*cand[j].mu, cand[j].k, r.x[j]});
  sol.f.compress();

  DualCertificate& d = sol.duals;
  d.a.assign(n, r.y_eq[0]);
  for (std::size_t s = 0; s + 1 < n; ++s) d.a[s] += r.y_eq[s + 1];
  std::vector<double> delta(J, 0.0);
  std::vector<Belief> beta(J, Belief(n, 0.0));
  for (std::size_t i = 0; i < tags.size(); ++i) {
    double lam = r.lambda_ge[i];
    if (lam == 0.0) continue;
    delta[tags[i].time] += lam;
    for (std::size_t s = 0; s < n; ++s) beta[tags[i].time][s] += lam * tags[i].coef[s];
  }
  d.lambda.assign(J + 1, 0.0);
  d.b.assign(J + 1, d.a);
  for (std::size_t k = 1; k < J; ++k) {
    d.lambda[k + 1] = d.lambda[k] + delta[k - 1];
    for (std::size_t s = 0; s < n; ++s) d.b[k + 1][s] = d.b[k][s] + beta[k - 1][s];
  }
  d.value = r.value;

  sol.occ = occ_residuals(sol.f, iu);
  for (std::size_t t = k0; t < sol.occ.size(); ++t)
    if (sol.occ[t] <= opt.binding_tol) sol.binding_times.push_back(t);
  return sol;
}

}  // namespace

GridProblem GridProblem::build(Primitives prim, std::vector<Belief> beliefs) {
  prim.validate();
  GridProblem gp;
  const std::size_t n = prim.n_states();
  std::vector<Belief> all;
  for (std::size_t s = 0; s < n; ++s) {
    Belief e(n, 0.0);
    e[s] = 1.0;
    all.push_back(e);
  }
  all.push_back(prim.prior);
  for (auto& b : beliefs) {
    if (b.size() != n) throw InputError("belief_grid", "dimension mismatch");
    all.push_back(std::move(b));
  }
  for (auto& b : all) {
    bool dup = std::any_of(gp.beliefs.begin(), gp.beliefs.end(),
                           [&](const Belief& c) { return same(b, c, 1e-12); });
    if (!dup) gp.beliefs.push_back(b);
  }
  gp.iu = IndirectUtility(prim);
  gp.prim = std::move(prim);
  const std::size_t J = gp.prim.n_times();
  gp.Utab.assign(gp.beliefs.size(), std::vector<double>(J));
  gp.Vtab = gp.Utab;
  for (std::size_t i = 0; i < gp.beliefs.size(); ++i)
    for (std::size_t k = 0; k < J; ++k) {
      IndirectEval e = gp.iu.eval(gp.beliefs[i], k);
      gp.Utab[i][k] = e.U;
      gp.Vtab[i][k] = e.V;
    }
  return gp;
}

std::size_t GridProblem::find(const Belief& mu, double tol) const {
  for (std::size_t i = 0; i < beliefs.size(); ++i)
    if (same(beliefs[i], mu, tol)) return i;
  return static_cast<std::size_t>(-1);
}

std::size_t GridProblem::add_belief(const Belief& mu) {
  std::size_t i = find(mu);
  if (i != static_cast<std::size_t>(-1)) return i;
  beliefs.push_back(mu);
  const std::size_t J = n_times();
  Utab.emplace_back(J);
  Vtab.emplace_back(J);
  for (std::size_t k = 0; k < J; ++k) {
    IndirectEval e = iu.eval(mu, k);
    Utab.back()[k] = e.U;
    Vtab.back()[k] = e.V;
  }
  return beliefs.size() - 1;
}

std::vector<Belief> simplex_lattice(std::size_t n_states, std::size_t divisions) {
  std::vector<Belief> out;
  if (n_states == 0) return out;
  std::vector<std::size_t> c(n_states, 0);
  // Enumerate compositions of `divisions` into n_states parts.
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == n_states) {
      c[pos] = left;
      Belief b(n_states);
      for (std::size_t s = 0; s < n_states; ++s)
        b[s] = divisions ? static_cast<double>(c[s]) / static_cast<double>(divisions) : 1.0;
      out.push_back(std::move(b));
      return;
    }
    for (std::size_t x = 0; x <= left; ++x) {
      c[pos] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, divisions);
  return out;
}

std::vector<Belief> simplex_grid(std::size_t n_states, std::size_t max_points) {
  if (n_states <= 1) return {Belief(n_states, 1.0)};
  auto count = [&](std::size_t d) {
    double c = 1.0;
    for (std::size_t i = 1; i < n_states; ++i)
      c = c * static_cast<double>(d + i) / static_cast<double>(i);
    return c;
  };
  std::size_t d = 1;
  while (count(d + 1) <= static_cast<double>(max_points)) ++d;
  return simplex_lattice(n_states, d);
}

LpSolution solve_columns(const GridProblem& gp, const std::vector<Column>& cols,
                         const Belief& prior, std::size_t k0, const OracleOptions& opt) {
  std::vector<Candidate> cand;
  cand.reserve(cols.size());
  for (auto [i, k] : cols)
    if (k >= k0) cand.push_back({&gp.beliefs[i], k, gp.Utab[i][k], gp.Vtab[i][k]});
  return solve_candidates(gp.iu, gp.prim.times, cand, prior, k0, opt);
}

LpSolution solve_relaxed(const GridProblem& gp, const OracleOptions& opt) {
  std::vector<Column> cols;
  for (std::size_t i = 0; i < gp.n_beliefs(); ++i)
    for (std::size_t k = 0; k < gp.n_times(); ++k) cols.emplace_back(i, k);
  return solve_columns(gp, cols, gp.prim.prior, 0, opt);
}

bool v_convex_on_grid(const GridProblem& gp, double tol) {
  const std::size_t B = gp.n_beliefs(), n = gp.prim.n_states();
  Belief mid(n);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = i + 1; j < B; ++j) {
      for (std::size_t s = 0; s < n; ++s) mid[s] = 0.5 * (gp.beliefs[i][s] + gp.beliefs[j][s]);
      std::size_t m = gp.find(mid, 1e-12);
      if (m == static_cast<std::size_t>(-1)) continue;
      for (std::size_t k = 0; k < gp.n_times(); ++k)
        if (gp.Vtab[m][k] > 0.5 * (gp.Vtab[i][k] + gp.Vtab[j][k]) + tol) return false;
    }
  return true;
}

LpSolution solve_revelation_reduced(const GridProblem& gp, const OracleOptions& opt) {
  if (!v_convex_on_grid(gp))
    throw InputError("v", "V is not convex in beliefs; use solve_relaxed");
  // Only degenerate stopping beliefs: pi(theta,t) = f(delta_theta, t).
  std::vector<Column> cols;
  const std::size_t n = gp.prim.n_states();
  for (std::size_t s = 0; s < n; ++s) {
    Belief e(n, 0.0);
    e[s] = 1.0;
    std::size_t i = gp.find(e);
    for (std::size_t k = 0; k < gp.n_times(); ++k) cols.emplace_back(i, k);
  }
  return solve_columns(gp, cols, gp.prim.prior, 0, opt);
}

double interim_value_W(const GridProblem& gp, const Belief& mu, std::size_t k,
                       const OracleOptions& opt) {
  const std::size_t n = mu.size();
  // Beliefs must live on the face spanned by supp(mu).
  auto on_face = [&](const Belief& b) {
    for (std::size_t s = 0; s < n; ++s)
      if (mu[s] <= 0.0 && b[s] > 0.0) return false;
    return true;
  };
  std::vector<Candidate> cand;
  std::vector<double> Uself(gp.n_times()), Vself(gp.n_times());
  bool present = false;
  for (std::size_t i = 0; i < gp.n_beliefs(); ++i) {
    if (!on_face(gp.beliefs[i])) continue;
    if (same(gp.beliefs[i], mu, 1e-12)) present = true;
    for (std::size_t t = k; t < gp.n_times(); ++t)
      cand.push_back({&gp.beliefs[i], t, gp.Utab[i][t], gp.Vtab[i][t]});
  }
  if (!present)
    for (std::size_t t = k; t < gp.n_times(); ++t) {
      IndirectEval e = gp.iu.eval(mu, t);
      cand.push_back({&mu, t, e.U, e.V});
    }
  LpSolution s = solve_candidates(gp.iu, gp.prim.times, cand, mu, k, opt);
  if (s.status != LpStatus::optimal)
    throw InputError("W", std::string("interim LP ") + to_string(s.status));
  return s.objective;
}

}  // namespace persuade
