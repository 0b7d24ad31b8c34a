// Serial vs OpenMP timings for the two parallel kernels: the saddle inner
// maximisation and the per-node W solves behind DC1.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "CLI11.hpp"
#include "persuade/cli.hpp"
#include "persuade/consistency.hpp"
#include "persuade/saddle.hpp"

using namespace persuade;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

Primitives bench_problem(std::size_t nS, std::size_t nA, std::size_t nT, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Primitives p;
  for (std::size_t s = 0; s < nS; ++s) p.states.push_back("s" + std::to_string(s));
  for (std::size_t a = 0; a < nA; ++a) p.actions.push_back("a" + std::to_string(a));
  for (std::size_t k = 0; k < nT; ++k) p.times.push_back(static_cast<double>(k) / static_cast<double>(nT - 1));
  p.prior.assign(nS, 1.0 / static_cast<double>(nS));
  p.u.assign(nS, std::vector<std::vector<double>>(nA, std::vector<double>(nT)));
  p.v = p.u;
  for (std::size_t s = 0; s < nS; ++s)
    for (std::size_t a = 0; a < nA; ++a) {
      const double bu = U(rng), bv = U(rng), sv = U(rng) - 0.3;
      for (std::size_t k = 0; k < nT; ++k) {
        p.u[s][a][k] = bu - 0.5 * p.times[k];
        p.v[s][a][k] = bv + sv * p.times[k];
      }
    }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  persuade::cli::apply_thread_env();
  CLI::App app{"persuade kernel benchmarks"};
  int reps = 3;
  std::size_t divisions = 60, times = 30;
  double dt = 0.025;
  app.add_option("--reps", reps);
  app.add_option("--divisions", divisions, "simplex lattice divisions (3 states)");
  app.add_option("--times", times);
  app.add_option("--dt", dt, "goalposts grid step");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-26s %12s %12s %9s %12s\n", "kernel", "serial_s", "parallel_s", "speedup", "max_diff");

  {
    GridProblem gp = GridProblem::build(bench_problem(3, 3, times, 1), simplex_lattice(3, divisions));
    DualCertificate cert = zero_certificate(gp);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < cert.lambda.size(); ++j) {
      acc += 0.3 * U(rng);
      cert.lambda[j] = acc;
    }
    InnerResult a, b;
    double ts = best_of(reps, [&] { a = inner_maximize(gp, cert, false); });
    double tp = best_of(reps, [&] { b = inner_maximize(gp, cert, true); });
    std::printf("%-26s %12.4f %12.4f %9.2f %12.3g\n", "saddle.inner_maximize", ts, tp, ts / tp,
                std::abs(a.value - b.value));
  }
  {
    GoalpostsSpec s;
    auto res = goalposts_strategies(s, dt);
    Dc1Report a, b;
    double ts = best_of(reps, [&] { a = verify_dc1(res.inch, res.gp, 1e-6, {}, false); });
    double tp = best_of(reps, [&] { b = verify_dc1(res.inch, res.gp, 1e-6, {}, true); });
    double diff = 0.0;
    for (std::size_t i = 0; i < a.gap.size(); ++i)
      if (!std::isnan(a.gap[i])) diff = std::max(diff, std::abs(a.gap[i] - b.gap[i]));
    std::printf("%-26s %12.4f %12.4f %9.2f %12.3g\n", "consistency.verify_dc1", ts, tp, ts / tp, diff);
  }
  return 0;
}
