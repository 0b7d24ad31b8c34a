// Min-max over shadow prices, the FOC verifier and time-risk diagnostics.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "persuade/oracle.hpp"

namespace persuade {

struct PhiEval {
  double value = 0.0;
  std::vector<double> g_lambda;  // d Phi / d lambda[0..J]
  std::vector<Belief> g_b;       // d Phi / d b[0..J]
};

/// Phi(nu, mu, tau) with tau a grid index k; nu holds interim beliefs for
/// grid times 0..k-1.
PhiEval eval_phi(const GridProblem& gp, const DualCertificate& cert,
                 const std::vector<Belief>& nu, const Belief& mu, std::size_t k);

DualCertificate zero_certificate(const GridProblem& gp);

struct InnerResult {
  double value = -1e300;
  std::size_t belief = 0;          // grid index of mu*
  std::size_t tau = 0;             // grid time index
  std::vector<std::size_t> nu;     // grid index of nu_j, j < tau
  std::vector<Column> ties;        // all (mu,tau) within tie_tol of the max
};

/// Grid enumeration of the inner maximization. `parallel` splits the
/// enumeration over tau; the reduction order is fixed.
InnerResult inner_maximize(const GridProblem& gp, const DualCertificate& cert,
                           bool parallel = true, double tie_tol = 1e-9);

/// max over the simplex of beta.nu - delta U(nu,t_j), by a small LP.
double conjugate_term(const GridProblem& gp, const Belief& beta, double delta, std::size_t j);

/// Upper bound on the grid LP value: the inner maximum with exact
/// interim terms.
double dual_bound(const GridProblem& gp, const DualCertificate& cert);

/// Projection onto {x nondecreasing, x >= 0}.
std::vector<double> project_monotone_nonneg(const std::vector<double>& x);

DualCertificate outer_step(const DualCertificate& cert, const PhiEval& sub, long k,
                           double eta0 = 1.0);

struct SaddleConfig {
  double tol = 1e-5;
  long max_iters = 200000;
  double eta0 = 1.0;
  double support_eps = 1e-3;
  long check_every = 5000;
  bool polish = true;
  bool parallel = true;
};

struct SaddleReport {
  DualCertificate certificate;
  BeliefTimeDistribution primal;
  double value = 0.0;            // recovered primal value
  double upper_bound = 0.0;      // exact dual bound at the certificate
  double duality_gap = 0.0;
  double subgradient_gap = 0.0;  // gap before dual polishing
  double foc_max_violation = 0.0;
  long iterations = 0;
  long pricing_rounds = 0;
  bool converged = false;
  std::string status;
};

SaddleReport solve_saddle(const GridProblem& gp, const SaddleConfig& cfg = {});

enum class GradientRule {
  certificate,  // use the certificate's b increments
  selection,    // pick a subgradient of U at the continuation belief
};

struct FocReport {
  double max_violation = 0.0;     // max over grid of l - a.mu
  double support_residual = 0.0;  // max over supp f of |l - a.mu|
  double min_occ = 0.0;           // min OC-C residual
  double comp_slackness = 0.0;    // sum_t dLambda_t G(f)(t)
  bool pass = false;
};

/// l(mu,t) = V + Lambda(t) U - (gradient terms).mu at any belief.
double lagrangian_derivative(const GridProblem& gp, const BeliefTimeDistribution& f,
                             const DualCertificate& cert, const Belief& mu, std::size_t k,
                             GradientRule rule);

FocReport verify_foc(const GridProblem& gp, const BeliefTimeDistribution& f,
                     const DualCertificate& cert, double tol = 1e-6,
                     GradientRule rule = GradientRule::certificate);

struct DiagnosticsReport {
  std::vector<bool> binding_mask;  // over T°
  std::vector<double> Jbar_V, Junder_V, Jbar_U, Junder_U;  // forward differences
  double t_low = 0.0, t_high = 0.0;
  double window_bound = 0.0;
  bool concave_in_t = false;
  bool convex_in_t = false;
  bool window_ok = true;
  bool binds_through_t_high = false;
};

DiagnosticsReport time_risk_diagnostics(const GridProblem& gp, const BeliefTimeDistribution& f,
                                        double bind_tol = 1e-6);

}  // namespace persuade
