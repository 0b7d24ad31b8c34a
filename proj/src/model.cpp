#include "persuade/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace persuade {

namespace {

double dot(const Belief& a, const Belief& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_tensor(const Tensor3& t, const Primitives& p, const char* name) {
  if (t.size() != p.n_states())
    throw InputError(name, "first dimension must equal the number of states");
  for (const auto& row : t) {
    if (row.size() != p.n_actions())
      throw InputError(name, "second dimension must equal the number of actions");
    for (const auto& col : row) {
      if (col.size() != p.n_times())
        throw InputError(name, "third dimension must equal the number of times");
      for (double x : col)
        if (!std::isfinite(x)) throw InputError(name, "entries must be finite");
    }
  }
}

}  // namespace

void Primitives::validate() const {
  if (states.empty()) throw InputError("states", "must be nonempty");
  if (actions.empty()) throw InputError("actions", "must be nonempty");
  if (times.size() < 2) throw InputError("times", "need at least two grid times");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0)
      throw InputError("times", "must be finite and nonnegative");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw InputError("times", "must be strictly increasing");
  }
  if (prior.size() != states.size())
    throw InputError("prior", "length must equal the number of states");
  double s = 0.0;
  for (double p : prior) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("prior", "entries must be >= 0");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InputError("prior", "must sum to 1");
  check_tensor(u, *this, "u");
  check_tensor(v, *this, "v");
}

IndirectUtility::IndirectUtility(const Primitives& prim, double tie_tol)
    : n_states_(prim.n_states()), n_times_(prim.n_times()), tie_tol_(tie_tol) {
  if (prim.n_actions() == 0) throw InputError("actions", "empty action set");
  for (std::size_t k = 0; k < n_times_; ++k) {
    for (std::size_t a = 0; a < prim.n_actions(); ++a) {
      Piece p;
      p.action = a;
      p.time = k;
      p.ucoef.resize(n_states_);
      p.vcoef.resize(n_states_);
      for (std::size_t s = 0; s < n_states_; ++s) {
        p.ucoef[s] = prim.u[s][a][k];
        p.vcoef[s] = prim.v[s][a][k];
      }
      pieces_.push_back(std::move(p));
    }
  }
  start_.resize(n_times_ + 1);
  for (std::size_t k = 0; k <= n_times_; ++k) start_[k] = k * prim.n_actions();
}

IndirectEval IndirectUtility::eval(const Belief& mu, std::size_t k) const {
  IndirectEval best;
  best.U = -INFINITY;
  best.V = -INFINITY;
  for (std::size_t i = start_[k]; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    double uu = dot(p.ucoef, mu);
    if (uu > best.U + tie_tol_) {
      best.U = uu;
      best.V = dot(p.vcoef, mu);
      best.action = p.action;
      best.act_time = p.time;
    } else if (uu >= best.U - tie_tol_) {
      double vv = dot(p.vcoef, mu);
      if (vv > best.V) {
        best.V = vv;
        best.action = p.action;
        best.act_time = p.time;
      }
      best.U = std::max(best.U, uu);
    }
  }
  return best;
}

double IndirectUtility::U(const Belief& mu, std::size_t k) const {
  double best = -INFINITY;
  for (std::size_t i = start_[k]; i < pieces_.size(); ++i)
    best = std::max(best, dot(pieces_[i].ucoef, mu));
  return best;
}

std::vector<const Piece*> IndirectUtility::pieces(std::size_t k) const {
  std::vector<const Piece*> out;
  for (std::size_t i = start_[k]; i < pieces_.size(); ++i) out.push_back(&pieces_[i]);
  return out;
}

std::vector<Belief> IndirectUtility::nondominated_coefs(std::size_t k) const {
  std::vector<Belief> out;
  auto dominated = [&](const Belief& a, const Belief& b) {
    // a <= b componentwise
    for (std::size_t s = 0; s < a.size(); ++s)
      if (a[s] > b[s]) return false;
    return true;
  };
  for (std::size_t i = start_[k]; i < pieces_.size(); ++i) {
    const Belief& c = pieces_[i].ucoef;
    bool drop = false;
    for (std::size_t j = start_[k]; j < pieces_.size() && !drop; ++j) {
      if (j == i) continue;
      const Belief& d = pieces_[j].ucoef;
      if (dominated(c, d) && (!dominated(d, c) || j < i)) drop = true;
    }
    if (!drop) out.push_back(c);
  }
  return out;
}

std::vector<Belief> IndirectUtility::active_gradients(const Belief& mu, std::size_t k,
                                                      double tol) const {
  double u = U(mu, k);
  std::vector<Belief> out;
  for (std::size_t i = start_[k]; i < pieces_.size(); ++i) {
    if (dot(pieces_[i].ucoef, mu) >= u - tol) {
      const Belief& c = pieces_[i].ucoef;
      bool dup = std::any_of(out.begin(), out.end(), [&](const Belief& d) {
        for (std::size_t s = 0; s < c.size(); ++s)
          if (std::abs(c[s] - d[s]) > 1e-15) return false;
        return true;
      });
      if (!dup) out.push_back(c);
    }
  }
  return out;
}

double IndirectUtility::hd1(const std::vector<double>& z, std::size_t k) const {
  double mass = std::accumulate(z.begin(), z.end(), 0.0);
  if (mass <= 0.0) return 0.0;
  // U is a max of linear pieces, so the extension is the same max on z.
  return U(z, k);
}

double BeliefTimeDistribution::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

Belief BeliefTimeDistribution::mean() const {
  if (atoms.empty()) return {};
  Belief m(atoms.front().belief.size(), 0.0);
  for (const auto& a : atoms)
    for (std::size_t s = 0; s < m.size(); ++s) m[s] += a.weight * a.belief[s];
  return m;
}

void BeliefTimeDistribution::validate(const Belief& prior, double tol) const {
  for (const auto& a : atoms) {
    if (a.weight < -tol) throw InputError("weight", "negative weight");
    if (a.time >= times.size()) throw InputError("time", "not on the grid");
    if (a.belief.size() != prior.size())
      throw InputError("belief", "dimension mismatch");
    double s = 0.0;
    for (double x : a.belief) {
      if (x < -tol) throw InputError("belief", "negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw InputError("belief", "must sum to 1");
  }
  if (std::abs(total_mass() - 1.0) > tol) throw InputError("weight", "must sum to 1");
  Belief m = mean();
  for (std::size_t s = 0; s < prior.size(); ++s)
    if (std::abs(m[s] - prior[s]) > tol)
      throw InputError("prior", "distribution mean differs from the prior");
}

void BeliefTimeDistribution::compress(double tol) {
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (a.weight <= 0.0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const Atom& b) {
      if (b.time != a.time) return false;
      for (std::size_t s = 0; s < a.belief.size(); ++s)
        if (std::abs(a.belief[s] - b.belief[s]) > tol) return false;
      return true;
    });
    if (it == out.end())
      out.push_back(a);
    else
      it->weight += a.weight;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Atom& x, const Atom& y) { return x.time < y.time; });
  atoms = std::move(out);
}

std::optional<Belief> continuation_belief(const BeliefTimeDistribution& f, std::size_t k) {
  if (f.atoms.empty()) return std::nullopt;
  std::size_t n = f.atoms.front().belief.size();
  Belief m(n, 0.0);
  double mass = 0.0;
  for (const auto& a : f.atoms) {
    if (a.time <= k) continue;
    mass += a.weight;
    for (std::size_t s = 0; s < n; ++s) m[s] += a.weight * a.belief[s];
  }
  if (mass <= 1e-12) return std::nullopt;
  for (double& x : m) x /= mass;
  return m;
}

std::vector<double> occ_residuals(const BeliefTimeDistribution& f,
                                  const IndirectUtility& iu) {
  std::size_t J = f.times.size();
  std::size_t n = iu.n_states();
  std::vector<double> res(J > 0 ? J - 1 : 0, 0.0);
  for (std::size_t k = 0; k + 1 < J; ++k) {
    double tail = 0.0;
    std::vector<double> z(n, 0.0);
    for (const auto& a : f.atoms) {
      if (a.time <= k) continue;
      tail += a.weight * iu.U(a.belief, a.time);
      for (std::size_t s = 0; s < n; ++s) z[s] += a.weight * a.belief[s];
    }
    res[k] = tail - iu.hd1(z, k);
  }
  return res;
}

double expected_V(const BeliefTimeDistribution& f, const IndirectUtility& iu) {
  double s = 0.0;
  for (const auto& a : f.atoms) s += a.weight * iu.V(a.belief, a.time);
  return s;
}

BeliefTimeDistribution SimpleRecommendation::to_distribution() const {
  BeliefTimeDistribution f;
  f.times = times;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (const auto& o : stop_kernel[k])
      f.atoms.push_back({o.belief, k, o.prob * stop_mass[k]});
  return f;
}

SimpleRecommendation to_simple_recommendation(const BeliefTimeDistribution& f,
                                              const IndirectUtility& iu, double tol) {
  auto res = occ_residuals(f, iu);
  for (std::size_t k = 0; k < res.size(); ++k)
    if (res[k] < -tol)
      throw InputError("time", "OC-C violated at t=" + std::to_string(f.times[k]) +
                                   " (residual " + std::to_string(res[k]) + ")");
  SimpleRecommendation rec;
  std::size_t J = f.times.size();
  rec.times = f.times;
  rec.continuation.resize(J);
  rec.stop_kernel.resize(J);
  rec.stop_mass.assign(J, 0.0);
  rec.survival.assign(J, 0.0);
  for (const auto& a : f.atoms) rec.stop_mass[a.time] += a.weight;
  for (const auto& a : f.atoms)
    if (rec.stop_mass[a.time] > 0.0)
      rec.stop_kernel[a.time].push_back({a.belief, a.weight / rec.stop_mass[a.time]});
  double total = f.total_mass();
  double cum = 0.0;
  for (std::size_t k = 0; k < J; ++k) {
    cum += rec.stop_mass[k];
    rec.survival[k] = std::max(0.0, total - cum);
    rec.continuation[k] = continuation_belief(f, k);
  }
  return rec;
}

std::vector<Draw> simulate_paths(const SimpleRecommendation& rec, std::size_t n,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Draw> out;
  out.reserve(n);
  std::size_t J = rec.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    double alive = 1.0;
    std::size_t k = 0;
    for (; k < J; ++k) {
      double hazard = alive > 0.0 ? rec.stop_mass[k] / alive : 1.0;
      if (k + 1 == J || unif(rng) < hazard) break;
      alive -= rec.stop_mass[k];
    }
    k = std::min(k, J - 1);
    const auto& kern = rec.stop_kernel[k];
    Draw d;
    d.time = k;
    if (!kern.empty()) {
      double x = unif(rng), c = 0.0;
      std::size_t j = 0;
      for (; j + 1 < kern.size(); ++j) {
        c += kern[j].prob;
        if (x < c) break;
      }
      d.belief_index = j;
      d.belief = kern[j].belief;
    }
    out.push_back(std::move(d));
  }
  return out;
}

Primitives match_model(double mu_r, std::vector<double> times, double cost_slope,
                       double v_l, double v_r) {
  Primitives p;
  p.states = {"L", "R"};
  p.actions = {"l", "r"};
  p.times = std::move(times);
  p.prior = {1.0 - mu_r, mu_r};
  std::size_t J = p.times.size();
  p.u.assign(2, std::vector<std::vector<double>>(2, std::vector<double>(J)));
  p.v = p.u;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t k = 0; k < J; ++k) {
        p.u[s][a][k] = (s == a ? 1.0 : 0.0) - cost_slope * p.times[k];
        p.v[s][a][k] = a == 1 ? v_r : v_l;
      }
  return p;
}

}  // namespace persuade
