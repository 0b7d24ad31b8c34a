#include "persuade/censorship.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "persuade/detail/simpson.hpp"

namespace persuade {

namespace {

constexpr int kPanels = 4096;
constexpr double kHalfGuard = 1e-8;
// Caps the step so Hermite dense output stays accurate to ~1e-9 in value.
constexpr double kMaxStep = 5e-4;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

double simpson(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

}  // namespace

// ---------------------------------------------------------------- prior

PriorDensity::PriorDensity(std::string name, std::function<double(double)> f)
    : name_(std::move(name)), f_(std::move(f)) {
  const double h = 1.0 / kPanels;
  cdf_.assign(kPanels + 1, 0.0);
  mom_.assign(kPanels + 1, 0.0);
  auto xf = [this](double x) { return x * f_(x); };
  for (int i = 0; i < kPanels; ++i) {
    double a = i * h, b = (i + 1) * h;
    cdf_[i + 1] = cdf_[i] + simpson(f_, a, b);
    mom_[i + 1] = mom_[i] + simpson(xf, a, b);
  }
  norm_ = cdf_.back();
  if (!(norm_ > 0.0) || !std::isfinite(norm_)) norm_ = 1.0;  // validate() reports it
  for (int i = 0; i <= kPanels; ++i) {
    cdf_[i] /= norm_;
    mom_[i] /= norm_;
  }
}

PriorDensity PriorDensity::uniform() {
  return PriorDensity("uniform", [](double) { return 1.0; });
}

PriorDensity PriorDensity::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("prior", "beta parameters must be positive");
  return PriorDensity("beta(" + fmt(a) + "," + fmt(b) + ")", [a, b](double x) {
    return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0);
  });
}

PriorDensity PriorDensity::linear(double slope) {
  if (!(std::abs(slope) < 2.0)) throw InputError("prior", "linear slope must satisfy |s| < 2");
  return PriorDensity("linear(" + fmt(slope) + ")",
                      [slope](double x) { return 1.0 + slope * (x - 0.5); });
}

PriorDensity PriorDensity::table(std::vector<double> x, std::vector<double> pdf) {
  if (x.size() < 2 || x.size() != pdf.size())
    throw InputError("prior", "table needs >= 2 (x, pdf) rows of equal length");
  if (std::abs(x.front()) > 1e-12 || std::abs(x.back() - 1.0) > 1e-12)
    throw InputError("prior", "table must span [0, 1]");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(pdf[i]) || pdf[i] < 0.0)
      throw InputError("prior", "table entries must be finite, pdf >= 0");
    if (i > 0 && !(x[i] > x[i - 1])) throw InputError("prior", "table x must increase");
  }
  return PriorDensity("table", [x, pdf](double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i + 1 >= x.size()) return pdf.back();
    double w = (t - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * pdf[i] + w * pdf[i + 1];
  });
}

double PriorDensity::pdf(double x) const { return raw_pdf(std::clamp(x, 0.0, 1.0)); }

double PriorDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  int i = std::min(kPanels - 1, static_cast<int>(x * kPanels));
  double a = static_cast<double>(i) / kPanels;
  return cdf_[i] + simpson(f_, a, x) / norm_;
}

double PriorDensity::moment(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return mom_.back();
  int i = std::min(kPanels - 1, static_cast<int>(x * kPanels));
  double a = static_cast<double>(i) / kPanels;
  auto xf = [this](double s) { return s * f_(s); };
  return mom_[i] + simpson(xf, a, x) / norm_;
}

void PriorDensity::validate() const {
  for (int i = 0; i <= 2 * kPanels; ++i) {
    double x = static_cast<double>(i) / (2 * kPanels);
    double p = f_(x) / norm_;
    if (!std::isfinite(p)) throw InputError("prior", "density not finite at x=" + fmt(x));
    if (p <= 1e-8) throw InputError("prior", "density vanishes at x=" + fmt(x));
  }
}

void CensorshipProblem::validate() const {
  prior.validate();
  if (!std::isfinite(r) || !(r > 0.0)) throw InputError("r", "must be positive");
  if (!std::isfinite(theta_bar) || theta_bar < 0.0 || theta_bar > 1.0)
    throw InputError("theta_bar", "must lie in [0, 1]");
}

// ---------------------------------------------------------------- integrator

namespace {

using State = std::array<double, 2>;

struct Rhs {
  const CensorshipProblem* prob;
  double sign;  // +1 backward system, -1 forward system
  State operator()(const State& y) const {
    const double a = y[0], b = y[1];
    if (!(a < 0.5) || !std::isfinite(a) || !std::isfinite(b)) return {NAN, NAN};
    const PriorDensity& p = prob->prior;
    const double P = std::max(0.0, p.cdf(a) + 1.0 - p.cdf(b));
    const double da = P / (p.pdf(a) * (0.5 - a)) * prob->r * b;
    const double db = -(b - a) / (0.5 - a) * prob->r * b;
    return {sign * da, sign * db};
  }
};

State rk4(const Rhs& f, const State& y, double h) {
  auto add = [](const State& u, const State& v, double c) {
    return State{u[0] + c * v[0], u[1] + c * v[1]};
  };
  State k1 = f(y);
  State k2 = f(add(y, k1, 0.5 * h));
  State k3 = f(add(y, k2, 0.5 * h));
  State k4 = f(add(y, k3, h));
  return {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

bool finite(const State& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

// Adaptive RK4 (step doubling) from t0 towards t_end. `valid` marks states
// before every event; steps that leave it are halved until h < 1e-14, which
// pins the event time.
template <class Valid>
std::string integrate(const Rhs& f, State y, double t0, double t_end, double tol, Valid valid,
                      BackwardTrajectory& out) {
  double t = t0, h = 1e-4;
  auto push = [&](double s, const State& z) {
    State d = f(z);
    out.t.push_back(s);
    out.a.push_back(z[0]);
    out.b.push_back(z[1]);
    out.da.push_back(d[0]);
    out.db.push_back(d[1]);
  };
  push(t, y);
  for (long it = 0; it < 50'000'000; ++it) {
    if (t >= t_end) return "end";
    h = std::min({h, t_end - t, kMaxStep});
    State y1 = rk4(f, y, h);
    State yh = rk4(f, y, 0.5 * h);
    State y2 = finite(yh) && valid(yh) ? rk4(f, yh, 0.5 * h) : State{NAN, NAN};
    if (!finite(y1) || !finite(y2) || !valid(y1) || !valid(y2)) {
      if (h < 1e-14) return "event";
      h *= 0.5;
      continue;
    }
    double err = std::max(std::abs(y2[0] - y1[0]), std::abs(y2[1] - y1[1])) / 15.0;
    if (err > tol) {
      if (h < 1e-16) return "underflow";
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    t += h;
    y = y2;
    push(t, y);
    double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
    h *= std::clamp(grow, 0.2, 4.0);
  }
  return "underflow";
}

double hermite(double t0, double t1, double y0, double y1, double d0, double d1, double s) {
  const double h = t1 - t0;
  if (h <= 0.0) return y0;
  const double u = (s - t0) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

}  // namespace

std::pair<double, double> BackwardTrajectory::at(double s) const {
  if (t.empty()) return {0.0, 1.0};
  if (s <= t.front()) return {a.front(), b.front()};
  if (s >= t.back()) return {a.back(), b.back()};
  std::size_t i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), s) - t.begin()) - 1;
  double av = hermite(t[i], t[i + 1], a[i], a[i + 1], da[i], da[i + 1], s);
  double bv = hermite(t[i], t[i + 1], b[i], b[i + 1], db[i], db[i + 1], s);
  // Keep the interpolant inside the segment's range (derivatives blow up near a = 1/2).
  av = std::clamp(av, std::min(a[i], a[i + 1]), std::max(a[i], a[i + 1]));
  bv = std::clamp(bv, std::min(b[i], b[i + 1]), std::max(b[i], b[i + 1]));
  return {av, bv};
}

BackwardTrajectory backward_integrate(const CensorshipProblem& prob,
                                      std::optional<double> stop_target, double tol) {
  prob.validate();
  if (stop_target && !(*stop_target > 0.5 && *stop_target <= 1.0))
    throw InputError("stop_target", "must lie in (1/2, 1]");
  BackwardTrajectory tr;
  Rhs f{&prob, 1.0};
  const double target = stop_target ? *stop_target : 0.5 + kHalfGuard;
  if (stop_target && *stop_target >= 1.0) {
    tr.t = {0.0};
    tr.a = {0.0};
    tr.b = {1.0};
    State d = f({0.0, 1.0});
    tr.da = {d[0]};
    tr.db = {d[1]};
    tr.stop_reason = "target";
    tr.m_star = 1.0;
    return tr;
  }
  auto valid = [&](const State& y) {
    return y[0] < 0.5 - kHalfGuard && y[1] > target;
  };
  std::string why = integrate(f, {0.0, 1.0}, 0.0, 10.0 / prob.r, tol, valid, tr);
  tr.T0 = tr.t.back();
  tr.m_star = tr.b.back();
  if (why == "event") {
    // Which constraint the next step would have broken.
    State nxt = rk4(f, {tr.a.back(), tr.b.back()}, 1e-13);
    const bool a_hit = !finite(nxt) || nxt[0] >= 0.5 - kHalfGuard || tr.a.back() > 0.5 - 1e-6;
    if (stop_target && tr.b.back() - *stop_target < 1e-6 && !a_hit)
      tr.stop_reason = "target";
    else if (a_hit)
      tr.stop_reason = "a_half";
    else
      tr.stop_reason = "b_half";
  } else {
    tr.stop_reason = why == "end" ? "underflow" : why;
  }
  return tr;
}

// ---------------------------------------------------------------- policy

double CensorshipPolicy::alpha(double t) const {
  return traj.at(T - std::clamp(t, 0.0, T)).first;
}
double CensorshipPolicy::beta(double t) const {
  return traj.at(T - std::clamp(t, 0.0, T)).second;
}

CensorshipPolicy build_policy(const CensorshipProblem& prob) {
  prob.validate();
  CensorshipPolicy pol;
  BackwardTrajectory base = backward_integrate(prob);
  if (base.stop_reason == "underflow")
    throw InputError("prior", "backward system stalled (density too small near a = " +
                                  fmt(base.a.back()) + ")");
  pol.T0 = base.T0;
  pol.m_star = base.stop_reason == "b_half" ? 0.5 : base.m_star;
  const double tb = prob.theta_bar;
  if (tb >= pol.m_star && tb > 0.5) {
    pol.case_tag = 1;
    pol.traj = backward_integrate(prob, tb);
    pol.theta_star = pol.m_star;
  } else if (base.stop_reason == "a_half") {
    pol.case_tag = 2;
    pol.traj = base;
    pol.theta_star = pol.m_star;
  } else {
    pol.case_tag = 3;
    pol.traj = base;
    pol.theta_star = 0.5;
  }
  pol.T = pol.traj.t.back();
  return pol;
}

double theta_star_upper_bound(const CensorshipProblem& prob) {
  const PriorDensity& p = prob.prior;
  return (1.0 + p.moment(0.5)) / (1.0 + p.cdf(0.5));
}

std::optional<double> continuation_mean(const CensorshipProblem& prob,
                                        const CensorshipPolicy& pol, double t) {
  const PriorDensity& p = prob.prior;
  const double a = pol.alpha(t), b = pol.beta(t);
  const double P = p.cdf(a) + 1.0 - p.cdf(b);
  if (P < 1e-12) return std::nullopt;
  return (p.moment(a) + p.mean() - p.moment(b)) / P;
}

// ---------------------------------------------------------------- identities

IdentityReport verify_identities_shifted(const CensorshipProblem& prob,
                                         const CensorshipPolicy& pol, double beta_shift,
                                         double step, double tol) {
  IdentityReport rep;
  const PriorDensity& p = prob.prior;
  const double r = prob.r, T = pol.T;
  auto al = [&](double t) { return pol.alpha(t); };
  auto be = [&](double t) { return pol.beta(t) + beta_shift; };
  // Near alpha(0) = 1/2, alpha ~ 1/2 - c sqrt(t) and the central-difference
  // error h^2 |alpha'''| / 6 ~ h^2 (1/2 - alpha) / (16 t^3). Start where that
  // estimate drops below tol / 10; the skipped layer is reported.
  double t_start = step;
  if (0.5 - al(0.0) < 0.05) {
    auto too_rough = [&](double t) {
      return 0.5 - al(t) < 0.05 || step * step * (0.5 - al(t)) / (16.0 * t * t * t) > 0.1 * tol;
    };
    double lo = 0.0, hi = T;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (too_rough(mid) ? lo : hi) = mid;
    }
    t_start = std::max(step, hi);
    rep.skipped_window = hi;
  }
  const long n = static_cast<long>(std::floor(T / step));
  for (long i = 1; i < n; ++i) {
    const double t = i * step;
    if (t < t_start) continue;
    const double a = al(t), b = be(t);
    const double da = (al(t + step) - al(t - step)) / (2 * step);
    const double db = (be(t + step) - be(t - step)) / (2 * step);
    const double P = p.cdf(a) + 1.0 - p.cdf(b);
    const double mu = p.pdf(a);
    rep.forward_alpha = std::max(rep.forward_alpha, std::abs(da + P / (mu * (0.5 - a)) * r * b));
    rep.forward_beta = std::max(rep.forward_beta, std::abs(db - (b - a) / (0.5 - a) * r * b));
    rep.no_upward = std::max(rep.no_upward, std::abs((a - b) * mu * da - P * db));
    const double mhat = P > 1e-12 ? (p.moment(a) + p.mean() - p.moment(b)) / P : b;
    rep.indifference = std::max(rep.indifference, std::abs(P * r * mhat + (0.5 - a) * mu * da));
  }
  for (double t = 0.0; t <= T - 1e-3; t += step) {
    const double a = al(t), b = be(t);
    const double P = p.cdf(a) + 1.0 - p.cdf(b);
    if (P < 1e-12) continue;
    const double mhat = (p.moment(a) + p.mean() - p.moment(b)) / P;
    rep.mhat_gap = std::max(rep.mhat_gap, std::abs(mhat - b));
  }
  rep.pass = rep.forward_alpha <= tol && rep.forward_beta <= tol && rep.no_upward <= tol &&
             rep.indifference <= tol && rep.mhat_gap <= tol;
  return rep;
}

IdentityReport verify_identities(const CensorshipProblem& prob, const CensorshipPolicy& pol,
                                 double step, double tol) {
  return verify_identities_shifted(prob, pol, 0.0, step, tol);
}

double forward_anchor_gap(const CensorshipProblem& prob, const CensorshipPolicy& pol) {
  if (pol.T <= 0.0) return 0.0;
  double t0 = 0.0;
  if (0.5 - pol.alpha(0.0) < 1e-3) {
    double lo = 0.0, hi = pol.T;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (0.5 - pol.alpha(mid) < 1e-3 ? lo : hi) = mid;
    }
    t0 = hi;
  }
  Rhs f{&prob, -1.0};
  BackwardTrajectory fw;
  integrate(f, {pol.alpha(t0), pol.beta(t0)}, t0, pol.T, 1e-12,
            [](const State& y) { return y[0] < 0.5; }, fw);
  return std::max(std::abs(fw.a.back()), std::abs(fw.b.back() - 1.0));
}

bool existence_sufficient(const CensorshipProblem& prob, double m0) {
  if (!(m0 > 0.5 && m0 <= 1.0)) throw InputError("m0", "must lie in (1/2, 1]");
  const PriorDensity& p = prob.prior;
  const double lhs = m0 * p.cdf(0.5) - p.moment(0.5);
  return lhs > 1.0 - m0;
}

// ---------------------------------------------------------------- multipliers

namespace {

struct Multipliers {
  const CensorshipProblem* prob;
  const CensorshipPolicy* pol;
  std::vector<double> ts, I;  // I(t) = int_0^t (1 - theta_bar / beta)
  double jump = 0.0;          // Lambda(0+) in case 3
  // Gamma tables along the support.
  std::vector<double> gb_m, gb_v, ga_m, ga_v;

  double L(double t) const {  // Lambda(t) e^{-rt}
    const double tb = prob->theta_bar, r = prob->r;
    if (t > pol->T) return (1.0 - tb) / r;
    if (t <= 0.0 && pol->case_tag != 1) return 0.0;
    const double b = pol->beta(t);
    return (b - tb) / (r * b);
  }
  double Iof(double t) const {
    const double T = pol->T;
    double extra = 0.0;
    if (t > T) {
      extra = (t - T) * (1.0 - prob->theta_bar);
      t = T;
    }
    if (ts.size() < 2) return extra;
    double u = t / T * (ts.size() - 1);
    std::size_t i = std::min(ts.size() - 2, static_cast<std::size_t>(u));
    double w = u - i;
    return (1 - w) * I[i] + w * I[i + 1] + extra;
  }
  double H(double m, double t) const {
    double h = (m - prob->theta_bar) * t + L(t) * (std::max(m, 0.5) - m) - m * Iof(t);
    if (pol->case_tag == 3 && t > 0.0) h += (m - 0.5) * jump;
    return h;
  }
  double dH_upper(double t) const {  // d/dm on m > 1/2, t > 0 limit
    return t - Iof(t) + (pol->case_tag == 3 ? jump : 0.0);
  }
  double dH_lower(double t) const {
    double l = t > 0.0 || pol->case_tag == 1 ? L(t) : L(1e-300);
    return t - Iof(t) - l + (pol->case_tag == 3 ? jump : 0.0);
  }
  static double interp(const std::vector<double>& x, const std::vector<double>& y, double m) {
    // x sorted ascending
    if (m <= x.front()) return y.front();
    if (m >= x.back()) return y.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), m) - x.begin()) - 1;
    double w = (m - x[i]) / (x[i + 1] - x[i]);
    return (1 - w) * y[i] + w * y[i + 1];
  }
  double Gamma(double m) const {
    const double a0 = pol->alpha(0.0), b0 = pol->beta(0.0);
    if (m > b0) return interp(gb_m, gb_v, m);
    if (m < a0) return interp(ga_m, ga_v, m);
    return 0.0;
  }
  double l(double m, double t) const { return H(m, t) - Gamma(m); }
};

Multipliers make_multipliers(const CensorshipProblem& prob, const CensorshipPolicy& pol) {
  Multipliers M{&prob, &pol, {}, {}, 0.0, {}, {}, {}, {}};
  const double T = pol.T, tb = prob.theta_bar;
  const std::size_t N = 40000;
  if (T <= 0.0) return M;
  M.ts.resize(N + 1);
  M.I.assign(N + 1, 0.0);
  std::vector<double> bet(N + 1), alp(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    M.ts[i] = T * static_cast<double>(i) / N;
    bet[i] = pol.beta(M.ts[i]);
    alp[i] = pol.alpha(M.ts[i]);
  }
  for (std::size_t i = 0; i < N; ++i) {
    double tm = 0.5 * (M.ts[i] + M.ts[i + 1]);
    double g = 1.0 - tb / pol.beta(tm);
    double g0 = 1.0 - tb / bet[i], g1 = 1.0 - tb / bet[i + 1];
    M.I[i + 1] = M.I[i] + (M.ts[i + 1] - M.ts[i]) / 6.0 * (g0 + 4 * g + g1);
  }
  if (pol.case_tag == 3) M.jump = (bet[0] - tb) / (prob.r * bet[0]);
  // Gamma' along beta (ascending in t) and alpha (descending in t).
  M.gb_m.push_back(bet[0]);
  M.gb_v.push_back(0.0);
  M.ga_m.push_back(alp[0]);
  M.ga_v.push_back(0.0);
  double gprev_b = M.dH_upper(0.0), gprev_a = M.dH_lower(0.0);
  for (std::size_t i = 1; i <= N; ++i) {
    double gb = M.dH_upper(M.ts[i]), ga = M.dH_lower(M.ts[i]);
    double vb = M.gb_v.back() + 0.5 * (gb + gprev_b) * (bet[i] - bet[i - 1]);
    double va = M.ga_v.back() + 0.5 * (ga + gprev_a) * (alp[i] - alp[i - 1]);
    if (bet[i] > M.gb_m.back()) {
      M.gb_m.push_back(bet[i]);
      M.gb_v.push_back(vb);
    }
    if (alp[i] < M.ga_m.back()) {
      M.ga_m.push_back(alp[i]);
      M.ga_v.push_back(va);
    }
    gprev_b = gb;
    gprev_a = ga;
  }
  std::reverse(M.ga_m.begin(), M.ga_m.end());
  std::reverse(M.ga_v.begin(), M.ga_v.end());
  return M;
}

}  // namespace

double censorship_lambda(const CensorshipProblem& prob, const CensorshipPolicy& pol, double t) {
  Multipliers M{&prob, &pol, {}, {}, 0.0, {}, {}, {}, {}};
  return M.L(t) * std::exp(prob.r * t);
}

double censorship_lagrangian(const CensorshipProblem& prob, const CensorshipPolicy& pol,
                             double m, double t) {
  return make_multipliers(prob, pol).l(m, t);
}

CensorshipFocReport verify_foc_censorship(const CensorshipProblem& prob,
                                          const CensorshipPolicy& pol, double tol) {
  CensorshipFocReport rep;
  Multipliers M = make_multipliers(prob, pol);
  const double T = pol.T;
  rep.max_l = -INFINITY;
  const int nm = 200, nt = 200;
  for (int k = 0; k <= nt; ++k) {
    double t = (T + 1.0) * k / nt;
    for (int j = 0; j <= nm; ++j) rep.max_l = std::max(rep.max_l, M.l(static_cast<double>(j) / nm, t));
  }
  for (int k = 0; k <= 400; ++k) {
    double t = T * k / 400.0;
    if (t > 0.0) {
      rep.max_abs_support = std::max(rep.max_abs_support, std::abs(M.l(pol.alpha(t), t)));
      rep.max_abs_support = std::max(rep.max_abs_support, std::abs(M.l(pol.beta(t), t)));
    }
  }
  const double a0 = pol.alpha(0.0), b0 = pol.beta(0.0);
  for (int j = 0; j <= 50; ++j) {
    double m = a0 + (b0 - a0) * j / 50.0;
    rep.max_abs_support = std::max(rep.max_abs_support, std::abs(M.l(m, 0.0)));
  }
  rep.min_gamma_second_diff = INFINITY;
  const int ng = 400;
  for (int j = 1; j < ng; ++j) {
    double m = static_cast<double>(j) / ng, h = 1.0 / ng;
    double d2 = M.Gamma(m + h) - 2 * M.Gamma(m) + M.Gamma(m - h);
    rep.min_gamma_second_diff = std::min(rep.min_gamma_second_diff, d2);
  }
  rep.max_dl_dt_after_T = -INFINITY;
  for (int k = 0; k < 20; ++k) {
    double t = T + 0.05 * (k + 1), h = 1e-4;
    for (int j = 0; j <= 20; ++j) {
      double m = j / 20.0;
      double d = (M.l(m, t + h) - M.l(m, t - h)) / (2 * h);
      rep.max_dl_dt_after_T = std::max(rep.max_dl_dt_after_T, d);
    }
  }
  rep.pass = rep.max_l <= tol && rep.max_abs_support <= tol &&
             rep.min_gamma_second_diff >= -1e-8 && rep.max_dl_dt_after_T <= 1e-9;
  return rep;
}

double policy_payoff(const CensorshipProblem& prob, const CensorshipPolicy& pol) {
  const PriorDensity& p = prob.prior;
  const double tb = prob.theta_bar, T = pol.T;
  const int N = 40000;
  double acc = 0.0;
  for (int i = 0; i < N && T > 0.0; ++i) {
    double t0 = T * i / N, t1 = T * (i + 1) / N;
    double b0 = pol.beta(t0), b1 = pol.beta(t1), a0 = pol.alpha(t0), a1 = pol.alpha(t1);
    acc += 0.5 * (t0 * (b0 - tb) + t1 * (b1 - tb)) * (p.cdf(b1) - p.cdf(b0));
    acc += 0.5 * (t0 * (a0 - tb) + t1 * (a1 - tb)) * (p.cdf(a0) - p.cdf(a1));
  }
  return acc;
}

// ---------------------------------------------------------------- oracle

CensorshipGrid discretize_for_oracle(const CensorshipProblem& prob, std::size_t n_theta,
                                     std::size_t n_times, double horizon) {
  prob.validate();
  if (n_theta < 2 || n_theta > 41) throw InputError("n_theta", "must lie in [2, 41]");
  if (n_times < 2 || n_times > 16) throw InputError("n_times", "must lie in [2, 16]");
  if (!(horizon > 0.0)) throw InputError("horizon", "must be positive");
  const PriorDensity& p = prob.prior;
  std::vector<double> q(n_theta + 1, 0.0);
  q.back() = 1.0;
  for (std::size_t i = 1; i < n_theta; ++i) {
    double target = static_cast<double>(i) / n_theta, lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      (p.cdf(mid) < target ? lo : hi) = mid;
    }
    q[i] = 0.5 * (lo + hi);
  }
  CensorshipGrid g;
  Primitives prim;
  for (std::size_t i = 0; i < n_theta; ++i) {
    double w = p.cdf(q[i + 1]) - p.cdf(q[i]);
    g.weights.push_back(w);
    g.thetas.push_back((p.moment(q[i + 1]) - p.moment(q[i])) / w);
    prim.states.push_back("theta" + std::to_string(i));
  }
  double s = 0.0;
  for (double w : g.weights) s += w;
  for (double& w : g.weights) w /= s;
  prim.actions = {"risky", "safe"};
  for (std::size_t k = 0; k < n_times; ++k)
    prim.times.push_back(horizon * static_cast<double>(k) / (n_times - 1));
  prim.prior = g.weights;
  prim.u.assign(n_theta, std::vector<std::vector<double>>(2, std::vector<double>(n_times)));
  prim.v = prim.u;
  for (std::size_t i = 0; i < n_theta; ++i)
    for (std::size_t k = 0; k < n_times; ++k) {
      const double t = prim.times[k], disc = std::exp(-prob.r * t);
      prim.u[i][0][k] = disc * g.thetas[i];
      prim.u[i][1][k] = disc * 0.5;
      prim.v[i][0][k] = prim.v[i][1][k] = (g.thetas[i] - prob.theta_bar) * t;
    }
  g.gp = GridProblem::build(std::move(prim), {});
  return g;
}

bool is_mean_preserving_contraction(const CensorshipGrid& g, const BeliefTimeDistribution& f,
                                    double tol) {
  std::vector<std::pair<double, double>> G;  // (mean, weight)
  for (const Atom& a : f.atoms) {
    double m = 0.0;
    for (std::size_t s = 0; s < a.belief.size(); ++s) m += a.belief[s] * g.thetas[s];
    G.push_back({m, a.weight});
  }
  auto CF = [&](double x) {
    double c = 0.0;
    for (std::size_t i = 0; i < g.thetas.size(); ++i) c += g.weights[i] * std::max(0.0, x - g.thetas[i]);
    return c;
  };
  auto CG = [&](double x) {
    double c = 0.0;
    for (auto [m, w] : G) c += w * std::max(0.0, x - m);
    return c;
  };
  double meanF = 0.0, meanG = 0.0;
  for (std::size_t i = 0; i < g.thetas.size(); ++i) meanF += g.weights[i] * g.thetas[i];
  for (auto [m, w] : G) meanG += w * m;
  if (std::abs(meanF - meanG) > tol) return false;
  std::vector<double> pts = g.thetas;
  for (auto [m, w] : G) pts.push_back(m);
  for (double x : pts)
    if (CG(x) > CF(x) + tol) return false;
  return true;
}

}  // namespace persuade
