#include "persuade/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace persuade {

namespace {

double dot(const Belief& a, const Belief& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Belief diff(const Belief& a, const Belief& b) {
  Belief d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Gradient of Phi at grid indices.
PhiEval phi_at_indices(const GridProblem& gp, const DualCertificate& c,
                       const std::vector<std::size_t>& nu, std::size_t mu, std::size_t k) {
  const std::size_t J = gp.n_times(), n = gp.prim.n_states();
  const Belief& m = gp.beliefs[mu];
  const Belief& p0 = gp.prim.prior;
  PhiEval out;
  out.g_lambda.assign(J + 1, 0.0);
  out.g_b.assign(J + 1, Belief(n, 0.0));
  double u0 = gp.iu.U(p0, 0);
  out.value = gp.Vtab[mu][k] + c.lambda[k + 1] * gp.Utab[mu][k] - c.lambda[0] * u0 -
              dot(c.b[k + 1], m) + dot(c.b[0], p0);
  out.g_lambda[k + 1] += gp.Utab[mu][k];
  out.g_lambda[0] -= u0;
  for (std::size_t s = 0; s < n; ++s) {
    out.g_b[k + 1][s] -= m[s];
    out.g_b[0][s] += p0[s];
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Belief& v = gp.beliefs[nu[j]];
    double uj = gp.Utab[nu[j]][j];
    out.value += dot(diff(c.b[j + 2], c.b[j + 1]), v) - (c.lambda[j + 2] - c.lambda[j + 1]) * uj;
    out.g_lambda[j + 2] -= uj;
    out.g_lambda[j + 1] += uj;
    for (std::size_t s = 0; s < n; ++s) {
      out.g_b[j + 2][s] += v[s];
      out.g_b[j + 1][s] -= v[s];
    }
  }
  return out;
}

// Per-(i,k) stopping part V + Lambda U - b.mu.
double stop_part(const GridProblem& gp, const DualCertificate& c, std::size_t i, std::size_t k) {
  return gp.Vtab[i][k] + c.lambda[k + 1] * gp.Utab[i][k] - dot(c.b[k + 1], gp.beliefs[i]);
}

double constant_part(const GridProblem& gp, const DualCertificate& c) {
  return -c.lambda[0] * gp.iu.U(gp.prim.prior, 0) + dot(c.b[0], gp.prim.prior);
}

}  // namespace

DualCertificate zero_certificate(const GridProblem& gp) {
  DualCertificate c;
  const std::size_t J = gp.n_times(), n = gp.prim.n_states();
  c.lambda.assign(J + 1, 0.0);
  c.b.assign(J + 1, Belief(n, 0.0));
  c.a.assign(n, 0.0);
  return c;
}

PhiEval eval_phi(const GridProblem& gp, const DualCertificate& c, const std::vector<Belief>& nu,
                 const Belief& mu, std::size_t k) {
  const std::size_t J = gp.n_times(), n = gp.prim.n_states();
  const Belief& p0 = gp.prim.prior;
  PhiEval out;
  out.g_lambda.assign(J + 1, 0.0);
  out.g_b.assign(J + 1, Belief(n, 0.0));
  IndirectEval e = gp.iu.eval(mu, k);
  double u0 = gp.iu.U(p0, 0);
  out.value = e.V + c.lambda[k + 1] * e.U - c.lambda[0] * u0 - dot(c.b[k + 1], mu) +
              dot(c.b[0], p0);
  out.g_lambda[k + 1] += e.U;
  out.g_lambda[0] -= u0;
  for (std::size_t s = 0; s < n; ++s) {
    out.g_b[k + 1][s] -= mu[s];
    out.g_b[0][s] += p0[s];
  }
  for (std::size_t j = 0; j < k && j < nu.size(); ++j) {
    double uj = gp.iu.U(nu[j], j);
    out.value += dot(diff(c.b[j + 2], c.b[j + 1]), nu[j]) - (c.lambda[j + 2] - c.lambda[j + 1]) * uj;
    out.g_lambda[j + 2] -= uj;
    out.g_lambda[j + 1] += uj;
    for (std::size_t s = 0; s < n; ++s) {
      out.g_b[j + 2][s] += nu[j][s];
      out.g_b[j + 1][s] -= nu[j][s];
    }
  }
  return out;
}

InnerResult inner_maximize(const GridProblem& gp, const DualCertificate& c, bool parallel,
                           double tie_tol) {
  const std::size_t J = gp.n_times(), B = gp.n_beliefs();
  const long JJ = static_cast<long>(J);
  const bool par = parallel && J * B > 4096;
  std::vector<double> s(J, 0.0);
  std::vector<std::size_t> nu_arg(J, 0);
#pragma omp parallel for schedule(static) if (par)
  for (long jl = 0; jl < JJ - 1; ++jl) {
    std::size_t j = static_cast<std::size_t>(jl);
    Belief beta = diff(c.b[j + 2], c.b[j + 1]);
    double delta = c.lambda[j + 2] - c.lambda[j + 1];
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < B; ++i) {
      double val = dot(beta, gp.beliefs[i]) - delta * gp.Utab[i][j];
      if (val > best) {
        best = val;
        arg = i;
      }
    }
    s[j] = best;
    nu_arg[j] = arg;
  }
  std::vector<double> prefix(J, 0.0);
  for (std::size_t k = 1; k < J; ++k) prefix[k] = prefix[k - 1] + s[k - 1];
  const double c0 = constant_part(gp, c);

  std::vector<double> vals(J * B);
  std::vector<double> best_k(J, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> arg_k(J, 0);
#pragma omp parallel for schedule(static) if (par)
  for (long kl = 0; kl < JJ; ++kl) {
    std::size_t k = static_cast<std::size_t>(kl);
    for (std::size_t i = 0; i < B; ++i) {
      double v = stop_part(gp, c, i, k) + prefix[k] + c0;
      vals[k * B + i] = v;
      if (v > best_k[k]) {
        best_k[k] = v;
        arg_k[k] = i;
      }
    }
  }
  InnerResult r;
  for (std::size_t k = 0; k < J; ++k)
    if (best_k[k] > r.value) {
      r.value = best_k[k];
      r.tau = k;
      r.belief = arg_k[k];
    }
  r.nu.assign(nu_arg.begin(), nu_arg.begin() + static_cast<long>(r.tau));
  for (std::size_t k = 0; k < J; ++k)
    for (std::size_t i = 0; i < B; ++i)
      if (vals[k * B + i] >= r.value - tie_tol) r.ties.emplace_back(i, k);
  return r;
}

double conjugate_term(const GridProblem& gp, const Belief& beta, double delta, std::size_t j) {
  const std::size_t n = beta.size();
  LpProblem lp;
  lp.c.assign(n + 2, 0.0);
  lp.c[n] = 1.0;
  lp.c[n + 1] = -1.0;
  lp.A_eq.push_back(std::vector<double>(n + 2, 0.0));
  for (std::size_t s = 0; s < n; ++s) lp.A_eq[0][s] = 1.0;
  lp.b_eq.push_back(1.0);
  for (const Belief& cp : gp.iu.nondominated_coefs(j)) {
    std::vector<double> row(n + 2, 0.0);
    for (std::size_t s = 0; s < n; ++s) row[s] = beta[s] - delta * cp[s];
    row[n] = -1.0;
    row[n + 1] = 1.0;
    lp.A_ge.push_back(std::move(row));
    lp.b_ge.push_back(0.0);
  }
  LpResult r = solve_lp(lp);
  if (r.status != LpStatus::optimal) return std::numeric_limits<double>::infinity();
  return r.value;
}

double dual_bound(const GridProblem& gp, const DualCertificate& c) {
  const std::size_t J = gp.n_times(), B = gp.n_beliefs();
  std::vector<double> prefix(J, 0.0);
  for (std::size_t j = 0; j + 1 < J; ++j) {
    Belief beta = diff(c.b[j + 2], c.b[j + 1]);
    double delta = c.lambda[j + 2] - c.lambda[j + 1];
    bool zero = delta == 0.0 && std::all_of(beta.begin(), beta.end(), [](double x) { return x == 0.0; });
    prefix[j + 1] = prefix[j] + (zero ? 0.0 : conjugate_term(gp, beta, delta, j));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < J; ++k)
    for (std::size_t i = 0; i < B; ++i) best = std::max(best, stop_part(gp, c, i, k) + prefix[k]);
  return best + constant_part(gp, c);
}

std::vector<double> project_monotone_nonneg(const std::vector<double>& x) {
  // Pool adjacent violators, then clip at zero.
  std::vector<double> val;
  std::vector<std::size_t> cnt;
  for (double v : x) {
    val.push_back(v);
    cnt.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      double w1 = static_cast<double>(cnt[cnt.size() - 2]), w2 = static_cast<double>(cnt.back());
      double merged = (val[val.size() - 2] * w1 + val.back() * w2) / (w1 + w2);
      std::size_t c = cnt[cnt.size() - 2] + cnt.back();
      val.pop_back();
      cnt.pop_back();
      val.back() = merged;
      cnt.back() = c;
    }
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t b = 0; b < val.size(); ++b)
    for (std::size_t r = 0; r < cnt[b]; ++r) out.push_back(std::max(0.0, val[b]));
  return out;
}

DualCertificate outer_step(const DualCertificate& c, const PhiEval& g, long k, double eta0) {
  double eta = eta0 / std::sqrt(static_cast<double>(std::max<long>(1, k)));
  DualCertificate out = c;
  std::vector<double> lam(c.lambda.size());
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = c.lambda[i] - eta * g.g_lambda[i];
  out.lambda = project_monotone_nonneg(lam);
  const std::size_t n = c.b.empty() ? 0 : c.b[0].size();
  for (std::size_t i = 2; i < c.b.size(); ++i)
    for (std::size_t s = 0; s < n; ++s) out.b[i][s] = c.b[i][s] - eta * g.g_b[i][s];
  if (c.b.size() >= 2)
    for (std::size_t s = 0; s < n; ++s) {
      double gb = g.g_b[0][s] + g.g_b[1][s];
      out.b[0][s] = c.b[0][s] - eta * gb;
      out.b[1][s] = out.b[0][s];
    }
  if (!out.b.empty()) out.a = out.b[0];
  return out;
}

SaddleReport solve_saddle(const GridProblem& gp, const SaddleConfig& cfg) {
  const std::size_t J = gp.n_times(), B = gp.n_beliefs();
  SaddleReport rep;
  DualCertificate cur = zero_certificate(gp);
  DualCertificate avg = cur;
  long avg_start = 1, avg_count = 0;
  std::vector<char> in_support(J * B, 0);
  std::vector<Column> support;
  auto add_col = [&](std::size_t i, std::size_t k) {
    if (!in_support[k * B + i]) {
      in_support[k * B + i] = 1;
      support.emplace_back(i, k);
    }
  };
  add_col(gp.find(gp.prim.prior), 0);

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  DualCertificate best = cur;
  LpSolution rec;
  long it = 1;
  for (; it <= cfg.max_iters; ++it) {
    InnerResult in = inner_maximize(gp, cur, cfg.parallel, cfg.support_eps);
    for (auto [i, k] : in.ties) add_col(i, k);
    PhiEval g = phi_at_indices(gp, cur, in.nu, in.belief, in.tau);
    cur = outer_step(cur, g, it, cfg.eta0);
    if (it >= 2 * avg_start) {
      avg_start = it;
      avg_count = 0;
    }
    ++avg_count;
    double w = 1.0 / static_cast<double>(avg_count);
    for (std::size_t j = 0; j <= J; ++j) {
      avg.lambda[j] += w * (cur.lambda[j] - avg.lambda[j]);
      for (std::size_t s = 0; s < avg.b[j].size(); ++s)
        avg.b[j][s] += w * (cur.b[j][s] - avg.b[j][s]);
    }
    avg.a = avg.b[0];
    if (it % cfg.check_every == 0 || it == cfg.max_iters) {
      for (const DualCertificate* c : {&avg, &cur}) {
        double d = dual_bound(gp, *c);
        if (d < ub) {
          ub = d;
          best = *c;
        }
      }
      rec = solve_columns(gp, support, gp.prim.prior, 0);
      if (rec.status == LpStatus::optimal) lb = std::max(lb, rec.objective);
      if (ub - lb < cfg.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.iterations = std::min(it, cfg.max_iters);
  rep.subgradient_gap = ub - lb;
  rep.status = rep.converged ? "converged" : "max_iters";

  if (!rep.converged && cfg.polish) {
    // Grow the recovered support by pricing grid columns at the restricted
    // LP's dual certificate.
    for (long round = 0; round < 500; ++round) {
      rec = solve_columns(gp, support, gp.prim.prior, 0);
      if (rec.status != LpStatus::optimal) break;
      ++rep.pricing_rounds;
      const DualCertificate& d = rec.duals;
      std::vector<std::pair<double, Column>> pos;
      for (std::size_t k = 0; k < J; ++k)
        for (std::size_t i = 0; i < B; ++i) {
          if (in_support[k * B + i]) continue;
          double rc = stop_part(gp, d, i, k);
          if (rc > 1e-10) pos.push_back({rc, {i, k}});
        }
      if (pos.empty()) break;
      std::sort(pos.begin(), pos.end(),
                [](const auto& x, const auto& y) { return x.first > y.first; });
      std::size_t take = std::min<std::size_t>(pos.size(), 50);
      for (std::size_t q = 0; q < take; ++q) add_col(pos[q].second.first, pos[q].second.second);
    }
    if (rec.status == LpStatus::optimal) {
      lb = rec.objective;
      double d = dual_bound(gp, rec.duals);
      if (d < ub) {
        ub = d;
        best = rec.duals;
      }
      if (ub - lb < cfg.tol) {
        rep.converged = true;
        rep.status = "converged_after_pricing";
      }
    }
  }
  rep.certificate = best;
  rep.certificate.a = best.b[0];
  rep.certificate.value = ub;
  rep.primal = rec.f;
  rep.value = lb;
  rep.upper_bound = ub;
  rep.duality_gap = ub - lb;
  if (rec.status == LpStatus::optimal)
    rep.foc_max_violation = verify_foc(gp, rec.f, rep.certificate).max_violation;
  return rep;
}

double lagrangian_derivative(const GridProblem& gp, const BeliefTimeDistribution& f,
                             const DualCertificate& c, const Belief& mu, std::size_t k,
                             GradientRule rule) {
  IndirectEval e = gp.iu.eval(mu, k);
  double l = e.V + c.lambda[k + 1] * e.U;
  if (rule == GradientRule::certificate) {
    l -= dot(diff(c.b[k + 1], c.b[0]), mu);
    return l;
  }
  for (std::size_t j = 0; j < k; ++j) {
    double delta = c.lambda[j + 2] - c.lambda[j + 1];
    if (delta == 0.0) continue;
    auto cont = continuation_belief(f, j);
    std::vector<Belief> grads =
        cont ? gp.iu.active_gradients(*cont, j) : gp.iu.active_gradients(mu, j);
    double g = -std::numeric_limits<double>::infinity();
    for (const Belief& gr : grads) g = std::max(g, dot(gr, mu));
    l -= delta * g;
  }
  return l;
}

FocReport verify_foc(const GridProblem& gp, const BeliefTimeDistribution& f,
                     const DualCertificate& c, double tol, GradientRule rule) {
  FocReport r;
  const std::size_t J = gp.n_times(), B = gp.n_beliefs(), n = gp.prim.n_states();
  // Shift a along the ones direction so that a.mu0 is the certificate's
  // value at f (zero shift for LP certificates).
  double ev = expected_V(f, gp.iu);
  double kappa = ev + c.lambda[0] * gp.iu.U(gp.prim.prior, 0) - dot(c.a, gp.prim.prior);
  Belief a = c.a;
  for (std::size_t s = 0; s < n; ++s) a[s] += kappa;
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < J; ++k)
    for (std::size_t i = 0; i < B; ++i) {
      double l = lagrangian_derivative(gp, f, c, gp.beliefs[i], k, rule);
      r.max_violation = std::max(r.max_violation, l - dot(a, gp.beliefs[i]));
    }
  r.support_residual = 0.0;
  for (const Atom& at : f.atoms) {
    if (at.weight <= 1e-12) continue;
    double l = lagrangian_derivative(gp, f, c, at.belief, at.time, rule);
    r.support_residual = std::max(r.support_residual, std::abs(l - dot(a, at.belief)));
  }
  auto occ = occ_residuals(f, gp.iu);
  r.min_occ = occ.empty() ? 0.0 : *std::min_element(occ.begin(), occ.end());
  r.comp_slackness = 0.0;
  for (std::size_t j = 0; j < occ.size(); ++j) r.comp_slackness += c.delta(j) * occ[j];
  r.pass = r.max_violation <= tol && r.support_residual <= tol && r.min_occ >= -tol &&
           std::abs(r.comp_slackness) <= tol;
  return r;
}

DiagnosticsReport time_risk_diagnostics(const GridProblem& gp, const BeliefTimeDistribution& f,
                                        double bind_tol) {
  DiagnosticsReport d;
  const std::size_t J = gp.n_times(), B = gp.n_beliefs();
  const auto& T = gp.prim.times;
  auto occ = occ_residuals(f, gp.iu);
  d.binding_mask.resize(occ.size());
  for (std::size_t k = 0; k < occ.size(); ++k) d.binding_mask[k] = occ[k] <= bind_tol;

  d.Jbar_V.assign(J - 1, -INFINITY);
  d.Junder_V.assign(J - 1, INFINITY);
  d.Jbar_U = d.Jbar_V;
  d.Junder_U = d.Junder_V;
  bool v_conc = true, u_conc = true, v_conv = true, u_conv = true;
  for (std::size_t i = 0; i < B; ++i) {
    for (std::size_t k = 0; k + 1 < J; ++k) {
      double h = T[k + 1] - T[k];
      double dv = (gp.Vtab[i][k + 1] - gp.Vtab[i][k]) / h;
      double du = (gp.Utab[i][k + 1] - gp.Utab[i][k]) / h;
      d.Jbar_V[k] = std::max(d.Jbar_V[k], dv);
      d.Junder_V[k] = std::min(d.Junder_V[k], dv);
      d.Jbar_U[k] = std::max(d.Jbar_U[k], du);
      d.Junder_U[k] = std::min(d.Junder_U[k], du);
    }
    for (std::size_t k = 1; k + 1 < J; ++k) {
      double h1 = T[k] - T[k - 1], h2 = T[k + 1] - T[k];
      double v2 = (gp.Vtab[i][k + 1] - gp.Vtab[i][k]) / h2 - (gp.Vtab[i][k] - gp.Vtab[i][k - 1]) / h1;
      double u2 = (gp.Utab[i][k + 1] - gp.Utab[i][k]) / h2 - (gp.Utab[i][k] - gp.Utab[i][k - 1]) / h1;
      if (v2 >= -1e-12) v_conc = false;
      if (u2 >= -1e-12) u_conc = false;
      if (v2 < -1e-12) v_conv = false;
      if (u2 < -1e-12) u_conv = false;
    }
  }
  d.concave_in_t = v_conc && u_conc;
  d.convex_in_t = v_conv && u_conv;

  std::size_t klo = J, khi = 0;
  for (const Atom& a : f.atoms) {
    if (a.weight <= 1e-12) continue;
    klo = std::min(klo, a.time);
    khi = std::max(khi, a.time);
  }
  if (klo == J) klo = khi = 0;
  d.t_low = T[klo];
  d.t_high = T[khi];
  // Preimage of Jbar: largest grid time whose Jbar >= target.
  auto inverse = [&](const std::vector<double>& jbar, double target) {
    double t = T[klo];
    for (std::size_t k = 0; k < jbar.size(); ++k)
      if (jbar[k] >= target - 1e-12) t = std::max(t, T[k]);
    return t;
  };
  std::size_t kq = std::min(klo, J - 2);
  d.window_bound = std::max(inverse(d.Jbar_V, d.Junder_V[kq]), inverse(d.Jbar_U, d.Junder_U[kq]));
  d.window_ok = !d.concave_in_t || d.t_high <= d.window_bound + 1e-12;
  d.binds_through_t_high = true;
  for (std::size_t k = 0; k < occ.size() && k <= khi; ++k)
    if (!d.binding_mask[k]) d.binds_through_t_high = false;
  return d;
}

}  // namespace persuade
