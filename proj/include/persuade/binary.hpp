// Binary-state persuasion with delay gains: suspense / targeting strategies,
// payoffs, first-order residuals, case selection and grid export.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "persuade/model.hpp"

namespace persuade {

/// Delay-gain function h with h(0) = 0.
struct DelayGain {
  enum class Family { linear, log, power, poly };
  Family family = Family::linear;
  double k = 0.0;                // scale (linear slope, log/power multiplier)
  double p = 1.0;                // power exponent
  std::vector<double> coef;      // poly: coef[i] multiplies t^(i+1)

  static DelayGain linear(double slope);
  static DelayGain log(double k);                 // k ln(1+t)
  static DelayGain power(double k, double p);     // k((1+t)^p - 1)
  static DelayGain poly(std::vector<double> c);   // sum c_i t^(i+1)

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  std::string describe() const;
};

/// mu0 = P(R); normalisation c(t) = t. Valid when either the spec or its
/// mirror has mu0 in (0, 1/2) and v_r >= v_ell.
struct BinaryPersuasionSpec {
  double mu0 = 0.4;
  double v_ell = 0.0;
  double v_r = 1.0;
  DelayGain h_ell;
  DelayGain h_r;

  void validate() const;
  /// Relabel states and actions.
  BinaryPersuasionSpec mirrored() const;
};

enum class StrategyKind { suspense, inconclusive };

enum class Variant { suspense_ell, suspense_r, inconclusive_ell, inconclusive_r, static_kg_ell, static_kg_r };
const char* to_string(Variant v);

/// Everything is computed in an "ell-targeting frame": beliefs are P(R) in
/// the frame, which is the original labelling (flip = false) or the
/// relabelled one (flip = true).
struct SuspenseStrategy {
  Variant variant = Variant::static_kg_ell;
  StrategyKind kind = StrategyKind::suspense;
  bool flip = false;
  double t1 = 0.0, t2 = 0.0;
  double m = 0.0;       // prior in the frame
  double p = 0.0;       // mass continuing past t1 (p_plus for inconclusive)
  double x = 0.0;       // continuation belief at t1 (frame)
  double y = 0.0;       // ell-stop belief at t1 (frame)
  double A = 0.0;       // suspense-path normaliser
  double terminal_belief = 0.0;  // original P(R) at t2 on the no-revelation path
  double payoff = 0.0;
  std::string case_tag;          // which branch of the selection produced it
  bool certified = false;
  std::string status;            // CERTIFIED / UNCERTIFIED
};

/// Builds a strategy from its parameters; throws InputError on domain
/// violations.
SuspenseStrategy make_strategy(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2);

/// (mu^L_t, mu^R_t) in original P(R) coordinates, t in [0, t1].
std::pair<double, double> suspense_paths(const BinaryPersuasionSpec& spec, Variant v, double t1,
                                         double t2, double t);

/// Continuing belief on the targeting stage, original coordinates.
double targeting_path(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2, double t);

struct JointCdf {
  double targeted_by_t = 0.0;  // P(tau <= t, a = revealed-state action)
  double terminal_atom = 0.0;  // P(tau = t2, a = other action)
};
JointCdf joint_stopping_cdf(const SuspenseStrategy& s, double t);
JointCdf joint_stopping_cdf(const BinaryPersuasionSpec& spec, double t1, double t2, double t);

double payoff_suspense(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2);

/// Psi(t, t2) for the variant's targeting direction.
double psi(const BinaryPersuasionSpec& spec, Variant v, double t, double t2);

struct FocResiduals {
  double res_a = 0.0;            // t2 condition, original orientation
  double res_b = 0.0;            // t1 condition (>= 0, = 0 when t1 > 0)
  double res_inconclusive = 0.0; // Delta v + Delta h(t2) - h_r'(t2) + 2 Psi (frame)
  bool soc_local_t1 = false;
  bool soc_local_t2 = false;
  bool soc_global_ok = false;
};
FocResiduals foc_residuals(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2,
                           double horizon = -1.0);

struct SelectOptions {
  double tol = 1e-10;       // bisection tolerance on times
  double cert_tol = 1e-8;   // residual tolerance for certification
  double horizon = -1.0;    // sign/concavity test horizon; < 0 picks a default
};

/// Case-selection procedure for concave delay gains with single-signed
/// Delta h'. Throws InputError when the preconditions fail.
SuspenseStrategy select_strategy(const BinaryPersuasionSpec& spec, const SelectOptions& opt = {});

/// Suspense/targeting strategy as a belief-time distribution on the grid
/// {0, dt, 2dt, ...} up to `horizon` (defaults to t2).
BeliefTimeDistribution export_grid_distribution(const BinaryPersuasionSpec& spec,
                                                const SuspenseStrategy& s, double dt,
                                                double horizon = -1.0);

/// States {L, R}, actions {l, r}, u = 1{match} - t, v = v_a + h_a(t).
Primitives binary_primitives(const BinaryPersuasionSpec& spec, const std::vector<double>& times);

std::vector<double> uniform_times(double dt, double horizon);

struct PathSample {
  double t, mu_L, mu_R, targeting, cdf_targeted, terminal_atom;
};
/// Samples for plotting: suspense paths on [0, t1], targeting path and cdf
/// on [t1, t2]. NaN marks values that are undefined at t.
std::vector<PathSample> path_samples(const BinaryPersuasionSpec& spec, const SuspenseStrategy& s,
                                     std::size_t n);

/// Adaptive Simpson quadrature.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int depth = 50);

}  // namespace persuade

#include "persuade/detail/simpson.hpp"
