// Problem primitives, indirect utilities and belief-time distributions.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace persuade {

using Belief = std::vector<double>;
using Tensor3 = std::vector<std::vector<std::vector<double>>>;

/// Thrown for malformed inputs. `field()` names the offending key.
class InputError : public std::invalid_argument {
 public:
  InputError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Tolerances {
  double feasibility = 1e-9;
  double arithmetic = 1e-12;
};

/// States, actions, a time grid, the prior and payoff tensors u,v indexed
/// [state][action][time].
struct Primitives {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<double> times;
  Belief prior;
  Tensor3 u;
  Tensor3 v;

  std::size_t n_states() const { return states.size(); }
  std::size_t n_actions() const { return actions.size(); }
  std::size_t n_times() const { return times.size(); }

  /// Throws InputError naming the first invalid field.
  void validate() const;
};

/// One linear piece of U: acting with `action` at grid time `time`.
struct Piece {
  std::size_t action = 0;
  std::size_t time = 0;
  Belief ucoef;  // u(., a, s)
  Belief vcoef;  // v(., a, s)
};

struct IndirectEval {
  double U = 0.0;
  double V = 0.0;
  std::size_t action = 0;
  std::size_t act_time = 0;
};

/// U(mu,t) = max over (a, s >= t) of u(.,a,s).mu, and V the principal-best
/// value over the agent's argmax set.
class IndirectUtility {
 public:
  IndirectUtility() = default;
  explicit IndirectUtility(const Primitives& prim, double tie_tol = 1e-12);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_times() const { return n_times_; }

  IndirectEval eval(const Belief& mu, std::size_t k) const;
  double U(const Belief& mu, std::size_t k) const;
  double V(const Belief& mu, std::size_t k) const { return eval(mu, k).V; }

  /// Pieces with s >= t_k.
  std::vector<const Piece*> pieces(std::size_t k) const;
  /// Pieces active at t_k that are not componentwise dominated by another
  /// active piece (dominated pieces give implied OC-C rows).
  std::vector<Belief> nondominated_coefs(std::size_t k) const;
  /// Coefficient vectors of pieces attaining U(mu,t_k) within tol.
  std::vector<Belief> active_gradients(const Belief& mu, std::size_t k,
                                       double tol = 1e-9) const;

  /// HD-1 extension; z = 0 gives 0.
  double hd1(const std::vector<double>& z, std::size_t k) const;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_times_ = 0;
  double tie_tol_ = 1e-12;
  std::vector<Piece> pieces_;       // sorted by time
  std::vector<std::size_t> start_;  // first piece index with time >= k
};

struct Atom {
  Belief belief;
  std::size_t time = 0;  // grid index
  double weight = 0.0;
};

/// Finite-support distribution over (belief, grid time).
struct BeliefTimeDistribution {
  std::vector<double> times;
  std::vector<Atom> atoms;

  double total_mass() const;
  Belief mean() const;
  /// Throws InputError when weights/prior consistency fail.
  void validate(const Belief& prior, double tol = 1e-9) const;
  /// Merges atoms with equal time and beliefs within tol.
  void compress(double tol = 1e-12);
};

/// E_f[mu | tau > t_k]; empty when survival mass <= 1e-12.
std::optional<Belief> continuation_belief(const BeliefTimeDistribution& f,
                                          std::size_t k);

/// G(f)(t_k) for k in T° (all grid indices but the last).
std::vector<double> occ_residuals(const BeliefTimeDistribution& f,
                                  const IndirectUtility& iu);

double expected_V(const BeliefTimeDistribution& f, const IndirectUtility& iu);

struct StopOutcome {
  Belief belief;
  double prob = 0.0;  // conditional on stopping at this time
};

struct SimpleRecommendation {
  std::vector<double> times;
  std::vector<std::optional<Belief>> continuation;  // mu-hat per time
  std::vector<std::vector<StopOutcome>> stop_kernel;
  std::vector<double> stop_mass;  // unconditional P(tau = t_k)
  std::vector<double> survival;   // P(tau > t_k)

  /// Rebuilds the belief-time distribution.
  BeliefTimeDistribution to_distribution() const;
};

/// Throws InputError("time", ...) naming the first violating time.
SimpleRecommendation to_simple_recommendation(const BeliefTimeDistribution& f,
                                              const IndirectUtility& iu,
                                              double tol = 1e-9);

struct Draw {
  std::size_t belief_index = 0;  // index into the stop kernel at `time`
  Belief belief;
  std::size_t time = 0;
};

std::vector<Draw> simulate_paths(const SimpleRecommendation& rec, std::size_t n,
                                 std::uint64_t seed);

/// Binary match model: states (L,R), actions (l,r), u = 1{match} - c*t,
/// v(.,r,.) = v_r, v(.,l,.) = v_l.
Primitives match_model(double mu_r, std::vector<double> times, double cost_slope = 1.0,
                       double v_l = 0.0, double v_r = 1.0);

}  // namespace persuade
