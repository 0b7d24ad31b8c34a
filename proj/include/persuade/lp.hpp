// Dense two-phase simplex.
#pragma once

#include <cstddef>
#include <vector>

namespace persuade {

/// maximize c.x  s.t.  A_eq x = b_eq,  A_ge x >= b_ge,  x >= 0.
struct LpProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> A_eq;
  std::vector<double> b_eq;
  std::vector<std::vector<double>> A_ge;
  std::vector<double> b_ge;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

enum class Pricing {
  bland,          // smallest-index entering and leaving variables
  dantzig_bland,  // largest reduced cost; Bland during degenerate runs
};

struct LpOptions {
  Pricing pricing = Pricing::dantzig_bland;
  double pivot_tol = 1e-9;
  double opt_tol = 1e-10;
  double feas_tol = 1e-9;
  long max_iterations = 2000000;
  int degenerate_run = 50;
};

/// Multipliers satisfy, for every column j,
///   c_j - y_eq.A_eq[:,j] + lambda_ge.A_ge[:,j] <= opt_tol  (= 0 when basic),
/// with lambda_ge >= 0 and value = y_eq.b_eq - lambda_ge.b_ge.
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> y_eq;
  std::vector<double> lambda_ge;
  long iterations = 0;
};

LpResult solve_lp(const LpProblem& lp, const LpOptions& opt = {});

}  // namespace persuade
