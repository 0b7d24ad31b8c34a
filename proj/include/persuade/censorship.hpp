// Continuum-state tail censorship: backward ODE system, policy cases,
// identity and multiplier checks, and a finite-state discretisation.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "persuade/model.hpp"
#include "persuade/oracle.hpp"

namespace persuade {

/// Prior density on [0,1] with tabulated cdf and first moment (Simpson,
/// 2^12 panels, normalised).
class PriorDensity {
 public:
  static PriorDensity uniform();
  static PriorDensity beta(double a, double b);
  /// 1 + slope (x - 1/2), |slope| < 2.
  static PriorDensity linear(double slope);
  /// Piecewise-linear interpolation through (x, pdf) nodes spanning [0,1].
  static PriorDensity table(std::vector<double> x, std::vector<double> pdf);

  double pdf(double x) const;
  double cdf(double x) const;
  double moment(double x) const;  // int_0^x theta mu(theta) dtheta
  double mean() const { return moment(1.0); }
  const std::string& name() const { return name_; }
  /// Throws InputError("prior", ...) when the density vanishes or is not finite.
  void validate() const;

 private:
  PriorDensity(std::string name, std::function<double(double)> f);
  double raw_pdf(double x) const { return f_(x) / norm_; }
  std::string name_;
  std::function<double(double)> f_;
  double norm_ = 1.0;
  std::vector<double> cdf_, mom_;  // at nodes k / kPanels
};

struct CensorshipProblem {
  PriorDensity prior = PriorDensity::uniform();
  double r = 1.0;
  double theta_bar = 0.5;
  void validate() const;
};

/// Solution of the backward system from (a,b) = (0,1); dense output by
/// cubic Hermite interpolation between accepted RK4 steps.
struct BackwardTrajectory {
  std::vector<double> t, a, b, da, db;
  double T0 = 0.0;
  double m_star = 0.0;       // b at termination
  std::string stop_reason;   // "target", "a_half", "b_half", "underflow"
  std::pair<double, double> at(double s) const;
};

/// `stop_target` in (1/2, 1] stops when b falls to it.
BackwardTrajectory backward_integrate(const CensorshipProblem& prob,
                                      std::optional<double> stop_target = std::nullopt,
                                      double tol = 1e-10);

struct CensorshipPolicy {
  int case_tag = 0;
  double T = 0.0;
  double T0 = 0.0;          // termination time of the untargeted run
  double m_star = 0.0;
  double theta_star = 0.0;  // beta(0) in cases 2/3
  BackwardTrajectory traj;  // alpha(t) = a(T - t), beta(t) = b(T - t)

  double alpha(double t) const;
  double beta(double t) const;
};

CensorshipPolicy build_policy(const CensorshipProblem& prob);

/// Upper end of the interval that contains theta*.
double theta_star_upper_bound(const CensorshipProblem& prob);

/// E[theta | theta < alpha(t) or theta > beta(t)]; empty when the tail mass
/// is below 1e-12.
std::optional<double> continuation_mean(const CensorshipProblem& prob,
                                        const CensorshipPolicy& pol, double t);

struct IdentityReport {
  double forward_alpha = 0.0;   // |alpha' - ODE|
  double forward_beta = 0.0;
  double no_upward = 0.0;       // (alpha - beta) dM(alpha) - P d beta
  double indifference = 0.0;    // P r mhat + (1/2 - alpha) dM(alpha)/dt
  double mhat_gap = 0.0;        // |mhat - beta| on [0, T - 1e-3]
  double skipped_window = 0.0;  // length near a singular endpoint left out
  bool pass = false;
};
IdentityReport verify_identities(const CensorshipProblem& prob, const CensorshipPolicy& pol,
                                 double step = 1e-4, double tol = 1e-6);

/// Same checks with beta shifted by `beta_shift` (sensitivity probe).
IdentityReport verify_identities_shifted(const CensorshipProblem& prob,
                                         const CensorshipPolicy& pol, double beta_shift,
                                         double step = 1e-4, double tol = 1e-6);

/// Re-integrates the forward system from (alpha(t0), beta(t0)) to T and
/// returns max(|alpha(T)|, |beta(T) - 1|).
double forward_anchor_gap(const CensorshipProblem& prob, const CensorshipPolicy& pol);

/// E[(m0 - m) 1{m < 1/2}] > 1 - m0.
bool existence_sufficient(const CensorshipProblem& prob, double m0);

struct CensorshipFocReport {
  double max_l = 0.0;             // over the (m,t) grid
  double max_abs_support = 0.0;   // on (alpha(t),t), (beta(t),t), [alpha0,beta0]x{0}
  double min_gamma_second_diff = 0.0;
  double max_dl_dt_after_T = 0.0;
  bool pass = false;
};
CensorshipFocReport verify_foc_censorship(const CensorshipProblem& prob,
                                          const CensorshipPolicy& pol, double tol = 1e-5);

/// Multiplier pieces, exposed for tests.
double censorship_lambda(const CensorshipProblem& prob, const CensorshipPolicy& pol, double t);
double censorship_lagrangian(const CensorshipProblem& prob, const CensorshipPolicy& pol,
                             double m, double t);

/// E[V] of the policy: sum over states of (theta - theta_bar) * revelation time.
double policy_payoff(const CensorshipProblem& prob, const CensorshipPolicy& pol);

struct CensorshipGrid {
  std::vector<double> thetas;   // conditional means of equal-mass bins
  std::vector<double> weights;
  GridProblem gp;
};
/// Finite-state version: actions {risky, safe}, u = e^{-rt}(theta or 1/2),
/// v = (theta - theta_bar) t, nT equally spaced times on [0, horizon].
/// Beliefs are the vertices (plus the prior).
CensorshipGrid discretize_for_oracle(const CensorshipProblem& prob, std::size_t n_theta,
                                     std::size_t n_times, double horizon);

/// Integrated-cdf test: the marginal over posterior means of f is a
/// mean-preserving contraction of the discrete prior.
bool is_mean_preserving_contraction(const CensorshipGrid& g, const BeliefTimeDistribution& f,
                                    double tol = 1e-9);

}  // namespace persuade
