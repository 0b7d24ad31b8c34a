// Limited commitment: belief processes as DAGs, interim surplus, the
// zero-surplus transformation, DC1 certification, moving-goalposts and a
// two-period Coase game.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "persuade/model.hpp"
#include "persuade/oracle.hpp"

namespace persuade {

/// Node of a belief process. Node 0 is the root: k = -1 and the prior.
/// Continue nodes at grid time k point to children at k + 1 with
/// conditional probabilities; stop nodes have no children. Children may be
/// shared (the future after a node does not depend on how it was reached).
struct ProcessNode {
  int k = -1;
  Belief belief;
  bool stop = false;
  std::vector<std::pair<std::size_t, double>> children;
};

struct FiniteBeliefProcess {
  std::vector<double> times;
  std::vector<ProcessNode> nodes;

  /// Throws InputError("process", ...) on a broken kernel or martingale.
  void validate(double tol = 1e-12) const;
  /// Reach probability of every node.
  std::vector<double> reach() const;
  /// Law of (mu_tau, tau), equal beliefs merged.
  BeliefTimeDistribution outcome(double merge_tol = 1e-12) const;
  /// Largest grid index carrying a reachable stop node.
  std::size_t last_stop_time() const;
  /// Node ids sorted by (k, id).
  std::vector<std::size_t> by_time() const;
};

/// Simple-recommendation chain: at each time the stop atoms of f plus one
/// continue node at the conditional mean of the remaining atoms.
FiniteBeliefProcess process_from_distribution(const BeliefTimeDistribution& f, const Belief& prior);

struct SurplusReport {
  std::vector<double> value;    // stop: U(mu, t_k); continue: E[U(mu_tau, tau) | node]
  std::vector<double> surplus;  // continue nodes with k >= 0, NaN elsewhere
  double max_surplus = 0.0;
  double min_surplus = 0.0;
  std::size_t worst_node = 0;
  bool zero_surplus = true;
};
SurplusReport interim_surplus(const FiniteBeliefProcess& proc, const IndirectUtility& iu,
                              double tol = 1e-9);

/// Expected principal payoff E[V(mu_tau, tau)].
double process_value(const FiniteBeliefProcess& proc, const IndirectUtility& iu);

struct SplitRecord {
  int k = 0;
  Belief mu;
  std::vector<double> lambda;
  std::vector<Belief> interim;
};

/// Removes interim surplus backward in time. Throws InputError("process", ...)
/// when some lambda equation has no root in (0, 1].
FiniteBeliefProcess make_zero_surplus(const FiniteBeliefProcess& proc, const IndirectUtility& iu,
                                      double tol = 1e-12, std::vector<SplitRecord>* log = nullptr);

/// Solves lambda u_i + (1 - lambda) C = U(lambda mu_i + (1 - lambda) mu, t_k)
/// for the smallest root in (0, 1], where u_i is the value of child i (its
/// U at t_{k+1} once it has no surplus) and C the node's continuation value.
/// NaN when there is none.
double solve_lambda(const IndirectUtility& iu, const Belief& mu, const Belief& mu_i, double u_i,
                    double C, std::size_t k);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct Dc1Report {
  Verdict verdict = Verdict::pass;
  std::vector<double> gap;  // W - E[V | node] on continue nodes, NaN elsewhere
  double worst_gap = 0.0;
  std::size_t worst_node = 0;
};
/// Condition DC1 at every reachable continue node with k >= 0. Processes
/// whose stops reach the last grid time are INCONCLUSIVE when they would fail.
/// `parallel = false` is the serial reference of the per-node W solves.
Dc1Report verify_dc1(const FiniteBeliefProcess& proc, const GridProblem& gp, double tol = 1e-6,
                     const OracleOptions& opt = {}, bool parallel = true);

/// One-shot deviation audit for the three deviation classes.
struct DeviationAudit {
  double continue_to_stop = 0.0;   // max gain from stopping at a continue node
  double principal = 0.0;          // max W - E[V] at continue nodes
  double stop_to_continue = 0.0;   // max U(mu, t_{k+1}) - U(mu, t_k) at stop nodes
  std::size_t responses_not_credible = 0;  // stop nodes where W(mu, k+1) > V(mu, k+1)
  bool v_nondecreasing = false;
  bool pass = false;
};
DeviationAudit audit_deviations(const FiniteBeliefProcess& proc, const GridProblem& gp,
                                double tol = 1e-6, const OracleOptions& opt = {});

/// True when V(mu, t) is nondecreasing in t at every grid belief.
bool v_nondecreasing_in_t(const GridProblem& gp, double tol = 1e-12);

// ------------------------------------------------------------ goalposts

/// Two task difficulties x_l < x_h; prior over (x_l, x_h).
struct GoalpostsSpec {
  double x_l = 1.0, x_h = 2.0, R = 2.5, c = 1.0, r = 1.0, r_p = 0.8;
  Belief prior{0.2, 0.8};

  void validate() const;
  /// e^{-r tau} R - c (1 - e^{-r tau}) = 0.
  double tau_bar() const;
  /// (c / R)(1 - e^{-r x_l}) / e^{-r x_l}: P(x_l) at which working to x_l
  /// without further news breaks even.
  double mu_bar() const;
  double t_star() const { return x_h - tau_bar(); }
  /// P(x_h) on the continuation branch that makes the time-0 obedience
  /// constraint bind when the state is revealed in [t*, x_l].
  double continuation_belief() const;
  /// Probability of revealing x_h at time 0.
  double reveal_mass() const;
};

/// Uniform grid of step dt on [0, x_h] merged with {t*, x_l, x_h}.
std::vector<double> goalposts_times(const GoalpostsSpec& spec, double dt);

/// One action "work": acting at s pays u = 1{s >= x} e^{-rs} R - c(1 - e^{-rs})
/// and v = 1 - e^{-r_p s}.
Primitives goalposts_primitives(const GoalpostsSpec& spec, const std::vector<double>& times);

struct GoalpostsResult {
  std::vector<double> times;
  GridProblem gp;
  FiniteBeliefProcess teleport;  // split at 0, full revelation at t*
  FiniteBeliefProcess inch;      // make_zero_surplus(teleport)
};
GoalpostsResult goalposts_strategies(const GoalpostsSpec& spec, double dt,
                                     std::size_t belief_divisions = 100);

struct EffortAtom {
  std::size_t state = 0;
  double effort = 0.0;   // time the agent works until
  bool completes = false;
  double mass = 0.0;
};
/// Joint law of (state, effort) implied by a process.
std::vector<EffortAtom> effort_law(const GoalpostsSpec& spec, const FiniteBeliefProcess& proc,
                                   const GridProblem& gp);

struct GoalpostRow {
  double t = 0.0;
  double expected_x = 0.0;  // E[x] on the no-news branch
  double reveal_xl = 0.0;   // mass first learning x_l at t
  double reveal_xh = 0.0;
};
std::vector<GoalpostRow> goalposts_path(const GoalpostsSpec& spec, const FiniteBeliefProcess& proc);

// ------------------------------------------------------------ Coase game

/// Binary states, belief grid {i / (grid - 1)}, periods 1..P.
/// U(mu, t) = u_dirac[t] max(mu, 1 - mu); V(mu, t) = v_dirac[t] + kappa[t] 4 mu (1 - mu).
struct CoaseSpec {
  std::size_t grid = 21;
  double mu0 = 0.5;
  std::vector<double> u_dirac{1.0, 1.0};
  std::vector<double> v_dirac{1.0, 0.0};
  std::vector<double> kappa{0.5, -0.25};

  double U(double mu, std::size_t t) const;
  double V(double mu, std::size_t t) const;
  /// Throws InputError("coase", ...) when the impatience or final-revelation
  /// condition fails on the grid.
  void validate() const;
};

struct CoaseResult {
  std::vector<std::pair<double, double>> first_split;  // (belief, probability)
  std::vector<bool> stops_first;                       // agent's choice per atom
  bool full_reveal_at_1 = false;
  double principal_value = 0.0;
  double agent_value = 0.0;
  double max_principal_gain = 0.0;  // best one-shot deviation, all periods and beliefs
  double max_agent_gain = 0.0;
  double interior_continue_gain = 0.0;  // max A_2(mu) - U(mu, 1) over interior mu
};
CoaseResult coase_demo(const CoaseSpec& spec);

}  // namespace persuade
