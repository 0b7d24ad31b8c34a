// Grid LP for the relaxed problem, the revelation-reduced LP and W.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "persuade/lp.hpp"
#include "persuade/model.hpp"

namespace persuade {

/// Primitives tabulated on a finite belief grid.
struct GridProblem {
  Primitives prim;
  IndirectUtility iu;
  std::vector<Belief> beliefs;
  std::vector<std::vector<double>> Utab;  // [belief][time]
  std::vector<std::vector<double>> Vtab;

  /// Adds the simplex vertices and the prior when missing; drops duplicates.
  static GridProblem build(Primitives prim, std::vector<Belief> beliefs);
  std::size_t n_beliefs() const { return beliefs.size(); }
  std::size_t n_times() const { return prim.n_times(); }
  /// Index of a belief on the grid (within tol), or npos.
  std::size_t find(const Belief& mu, double tol = 1e-12) const;
  /// Adds a belief (no-op when present) and returns its index.
  std::size_t add_belief(const Belief& mu);
};

/// Lattice points of the simplex with step 1/divisions.
std::vector<Belief> simplex_lattice(std::size_t n_states, std::size_t divisions);
/// Largest lattice with at most max_points points.
std::vector<Belief> simplex_grid(std::size_t n_states, std::size_t max_points);

/// Dual objects on indices 0..J: index 0 is the pre-time level and index
/// k+1 belongs to grid time k.  b[1] is tied to b[0]; a == b[0].
struct DualCertificate {
  std::vector<double> lambda;
  std::vector<Belief> b;
  Belief a;
  double value = 0.0;

  /// OC-C multiplier at grid time k in T°.
  double delta(std::size_t k) const { return lambda[k + 2] - lambda[k + 1]; }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  BeliefTimeDistribution f;
  double objective = 0.0;
  std::vector<std::size_t> binding_times;
  std::vector<double> occ;  // OC-C residuals over T°
  DualCertificate duals;
  long iterations = 0;
};

struct OracleOptions {
  LpOptions lp;
  double binding_tol = 1e-7;
  double support_tol = 1e-12;
};

/// Column (belief index, time index).
using Column = std::pair<std::size_t, std::size_t>;

/// Relaxed problem over the given columns, times >= k0 and the given prior.
LpSolution solve_columns(const GridProblem& gp, const std::vector<Column>& cols,
                         const Belief& prior, std::size_t k0,
                         const OracleOptions& opt = {});

LpSolution solve_relaxed(const GridProblem& gp, const OracleOptions& opt = {});

/// Full revelation with delay: variables pi(theta,t) with sum_t pi = mu0.
/// Throws InputError when some V(.,t) is not convex on the grid.
LpSolution solve_revelation_reduced(const GridProblem& gp, const OracleOptions& opt = {});

/// Relaxed problem restricted to times >= t_k with prior mu.
double interim_value_W(const GridProblem& gp, const Belief& mu, std::size_t k,
                       const OracleOptions& opt = {});

/// True when V(.,t) is convex at every grid midpoint triple.
bool v_convex_on_grid(const GridProblem& gp, double tol = 1e-9);

}  // namespace persuade
