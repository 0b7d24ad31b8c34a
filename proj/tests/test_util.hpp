// Shared helpers for unit and acceptance tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "persuade/model.hpp"
#include "persuade/oracle.hpp"

namespace testutil {

// Random action-form primitives. Agent payoffs drift down with s so that
// waiting is costly, with state/action noise on top.
inline persuade::Primitives random_primitives(std::mt19937_64& rng, std::size_t nS,
                                              std::size_t nA, std::size_t nT) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  persuade::Primitives p;
  for (std::size_t s = 0; s < nS; ++s) p.states.push_back("s" + std::to_string(s));
  for (std::size_t a = 0; a < nA; ++a) p.actions.push_back("a" + std::to_string(a));
  for (std::size_t k = 0; k < nT; ++k) p.times.push_back(static_cast<double>(k) / static_cast<double>(nT - 1));
  p.prior.resize(nS);
  double tot = 0.0;
  for (auto& x : p.prior) {
    x = 0.2 + U(rng);
    tot += x;
  }
  for (auto& x : p.prior) x /= tot;
  // Force an exact sum of one.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nS; ++i) s += p.prior[i];
  p.prior[nS - 1] = 1.0 - s;
  p.u.assign(nS, std::vector<std::vector<double>>(nA, std::vector<double>(nT)));
  p.v = p.u;
  double cost = 0.2 + 0.8 * U(rng);
  double vdrift = -0.5 + 1.5 * U(rng);
  for (std::size_t th = 0; th < nS; ++th)
    for (std::size_t a = 0; a < nA; ++a) {
      double base_u = U(rng);
      double base_v = U(rng);
      double slope_v = vdrift * U(rng);
      for (std::size_t k = 0; k < nT; ++k) {
        double t = p.times[k];
        p.u[th][a][k] = base_u - cost * t + 0.05 * (U(rng) - 0.5);
        p.v[th][a][k] = base_v + slope_v * t;
      }
    }
  return p;
}

}  // namespace testutil
