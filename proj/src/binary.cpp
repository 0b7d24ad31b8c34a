#include "persuade/binary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace persuade {

// ---------------------------------------------------------------- delay gains

DelayGain DelayGain::linear(double slope) {
  DelayGain h;
  h.family = Family::linear;
  h.k = slope;
  return h;
}

DelayGain DelayGain::log(double k) {
  DelayGain h;
  h.family = Family::log;
  h.k = k;
  return h;
}

DelayGain DelayGain::power(double k, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InputError("h.p", "power exponent must be positive");
  DelayGain h;
  h.family = Family::power;
  h.k = k;
  h.p = p;
  return h;
}

DelayGain DelayGain::poly(std::vector<double> c) {
  for (double x : c)
    if (!std::isfinite(x)) throw InputError("h.coef", "coefficients must be finite");
  DelayGain h;
  h.family = Family::poly;
  h.coef = std::move(c);
  return h;
}

double DelayGain::value(double t) const {
  switch (family) {
    case Family::linear: return k * t;
    case Family::log: return k * std::log1p(t);
    case Family::power: return k * (std::pow(1.0 + t, p) - 1.0);
    case Family::poly: {
      double s = 0.0;
      for (std::size_t i = coef.size(); i-- > 0;) s = s * t + coef[i];
      return s * t;
    }
  }
  return 0.0;
}

double DelayGain::d1(double t) const {
  switch (family) {
    case Family::linear: return k;
    case Family::log: return k / (1.0 + t);
    case Family::power: return k * p * std::pow(1.0 + t, p - 1.0);
    case Family::poly: {
      double s = 0.0;
      for (std::size_t i = coef.size(); i-- > 0;) s = s * t + static_cast<double>(i + 1) * coef[i];
      return s;
    }
  }
  return 0.0;
}

double DelayGain::d2(double t) const {
  switch (family) {
    case Family::linear: return 0.0;
    case Family::log: return -k / ((1.0 + t) * (1.0 + t));
    case Family::power: return k * p * (p - 1.0) * std::pow(1.0 + t, p - 2.0);
    case Family::poly: {
      double s = 0.0;
      for (std::size_t i = coef.size(); i-- > 1;)
        s = s * t + static_cast<double>((i + 1) * i) * coef[i];
      return s;
    }
  }
  return 0.0;
}

std::string DelayGain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case Family::linear: os << "linear(" << k << ")"; break;
    case Family::log: os << "log(" << k << ")"; break;
    case Family::power: os << "power(" << k << "," << p << ")"; break;
    case Family::poly:
      os << "poly(";
      for (std::size_t i = 0; i < coef.size(); ++i) os << (i ? "," : "") << coef[i];
      os << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------- spec

void BinaryPersuasionSpec::validate() const {
  if (!std::isfinite(mu0) || !(mu0 > 0.0) || !(mu0 < 1.0) || mu0 == 0.5)
    throw InputError("mu0", "must lie in (0, 1/2) (or its mirror (1/2, 1))");
  if (!std::isfinite(v_ell) || !std::isfinite(v_r)) throw InputError("v", "must be finite");
  const bool canon = mu0 < 0.5 && v_r >= v_ell;
  const bool mirror = mu0 > 0.5 && v_ell >= v_r;
  if (!canon && !mirror)
    throw InputError("v_r", "need v_r >= v_ell when mu0 < 1/2 (labels may be mirrored)");
  for (const DelayGain* h : {&h_ell, &h_r}) {
    if (!std::isfinite(h->k)) throw InputError("h.k", "must be finite");
    if (h->family == DelayGain::Family::power && !(h->p > 0.0))
      throw InputError("h.p", "power exponent must be positive");
  }
}

BinaryPersuasionSpec BinaryPersuasionSpec::mirrored() const {
  BinaryPersuasionSpec m = *this;
  m.mu0 = 1.0 - mu0;
  std::swap(m.v_ell, m.v_r);
  std::swap(m.h_ell, m.h_r);
  return m;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::suspense_ell: return "suspense_ell";
    case Variant::suspense_r: return "suspense_r";
    case Variant::inconclusive_ell: return "inconclusive_ell";
    case Variant::inconclusive_r: return "inconclusive_r";
    case Variant::static_kg_ell: return "static_kg_ell";
    case Variant::static_kg_r: return "static_kg_r";
  }
  return "?";
}

// ---------------------------------------------------------------- frame

namespace {

constexpr double kQuadTol = 1e-10;
const double kLn2 = std::log(2.0);

// ell-targeting frame: the targeted (revealed) state is L, the terminal
// action is r, beliefs are P(R).
struct Frame {
  bool flip = false;
  double m = 0.0;
  double vl = 0.0, vr = 0.0;
  const DelayGain* hl = nullptr;
  const DelayGain* hr = nullptr;

  double dv() const { return vr - vl; }
  double dh(double t) const { return hr->value(t) - hl->value(t); }
  double dh1(double t) const { return hr->d1(t) - hl->d1(t); }
  double orig(double mu) const { return flip ? 1.0 - mu : mu; }
  double cap() const { return std::min(2.0 * m, 1.0); }
  // Largest t1 for which suspense can hand over a belief <= 1.
  double t1_max() const { return std::min(m, 1.0 - m); }
  // mu*^{-1}_{t1}(1) for suspense; t1 itself once x reaches 1.
  double bound(double t1) const {
    if (t1 >= t1_max()) return t1;
    return t1 + std::log((cap() - t1) / m);
  }
};

Frame frame_of(const BinaryPersuasionSpec& s, bool flip) {
  Frame f;
  f.flip = flip;
  if (!flip) {
    f.m = s.mu0;
    f.vl = s.v_ell;
    f.vr = s.v_r;
    f.hl = &s.h_ell;
    f.hr = &s.h_r;
  } else {
    f.m = 1.0 - s.mu0;
    f.vl = s.v_r;
    f.vr = s.v_ell;
    f.hl = &s.h_r;
    f.hr = &s.h_ell;
  }
  return f;
}

bool variant_flip(Variant v) {
  return v == Variant::suspense_r || v == Variant::inconclusive_r || v == Variant::static_kg_r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double psi_frame(const Frame& f, double t, double t2) {
  const DelayGain* hl = f.hl;
  double integral = adaptive_simpson([&](double s) { return std::exp(t - s) * hl->d1(s); }, t, t2,
                                     kQuadTol);
  return integral + std::exp(t - t2) * f.hr->d1(t2);
}

// Principal-best value when the agent is indifferent at belief 1/2.
double stop_value(const Frame& f, double belief, double t, bool ell) {
  const double l = f.vl + f.hl->value(t), r = f.vr + f.hr->value(t);
  if (std::abs(belief - 0.5) <= 1e-12) return std::max(l, r);
  return ell ? l : r;
}

SuspenseStrategy build(const Frame& f, StrategyKind kind, double t1, double t2) {
  if (!std::isfinite(t1) || t1 < 0.0) throw InputError("t1", "must be finite and >= 0");
  if (!std::isfinite(t2) || t2 < t1) throw InputError("t2", "must satisfy t2 >= t1");
  SuspenseStrategy s;
  s.kind = kind;
  s.flip = f.flip;
  s.t1 = t1;
  s.t2 = t2;
  s.m = f.m;
  const double extra = std::max(2.0 * f.m - 1.0, 0.0);
  if (kind == StrategyKind::suspense) {
    if (t1 > 0.0 && t1 >= f.t1_max())
      throw InputError("t1", "suspense window must satisfy t1 < " + fmt(f.t1_max()) +
                                 " (prior of the targeted frame)");
    s.p = f.cap() - t1;
    s.x = f.m / s.p;
    s.y = 0.0;
    const double b = t1 - std::log(s.x);
    if (t2 > b + 1e-12)
      throw InputError("t2", "beyond the targeting bound t1 - ln mu^R_t1 = " + fmt(b));
  } else {
    if (t2 - t1 >= kLn2)
      throw InputError("t2", "inconclusive targeting needs t2 - t1 < ln 2");
    s.x = std::exp(t1 - t2);
    s.p = (t1 + extra) / (2.0 * s.x - 1.0);
    if (s.p > 1.0 + 1e-12)
      throw InputError("t1", "continuation mass p_plus exceeds 1");
    s.p = std::min(s.p, 1.0);
    s.y = s.p < 1.0 ? (f.m - s.p * s.x) / (1.0 - s.p) : 0.0;
    if (s.y < -1e-12 || s.y > 0.5 + 1e-12)
      throw InputError("t2", "stopping belief at t1 leaves [0, 1/2]: " + fmt(s.y));
    s.y = std::clamp(s.y, 0.0, 0.5);
  }
  s.A = t1 > 0.0 ? (0.5 - s.y) * (2.0 * s.x - 1.0) / (s.x - s.y) : 0.0;
  const double term = std::min(1.0, s.x * std::exp(t2 - t1));
  s.terminal_belief = f.orig(term);

  const DelayGain* hl = f.hl;
  const double vl = f.vl;
  double integral = adaptive_simpson(
      [&](double t) { return std::exp(t1 - t) * (vl + hl->value(t)); }, t1, t2, kQuadTol);
  double pay = s.p * (integral + std::exp(t1 - t2) * stop_value(f, term, t2, false));
  if (s.p < 1.0) pay += (1.0 - s.p) * stop_value(f, s.y, t1, true);
  s.payoff = pay;

  const bool is_static = t2 == 0.0 &&
                         (kind == StrategyKind::suspense) == (f.m < 0.5);
  if (is_static)
    s.variant = f.flip ? Variant::static_kg_r : Variant::static_kg_ell;
  else if (kind == StrategyKind::suspense)
    s.variant = f.flip ? Variant::suspense_r : Variant::suspense_ell;
  else
    s.variant = f.flip ? Variant::inconclusive_r : Variant::inconclusive_ell;
  return s;
}

StrategyKind kind_of(Variant v, const Frame& f) {
  switch (v) {
    case Variant::suspense_ell:
    case Variant::suspense_r: return StrategyKind::suspense;
    case Variant::inconclusive_ell:
    case Variant::inconclusive_r: return StrategyKind::inconclusive;
    default: return f.m < 0.5 ? StrategyKind::suspense : StrategyKind::inconclusive;
  }
}

Frame frame_for(const BinaryPersuasionSpec& spec, Variant v) {
  spec.validate();
  return frame_of(spec, variant_flip(v));
}

struct FrameFoc {
  double res_a = 0.0, res_b = 0.0, res_inc = 0.0, psi12 = 0.0;
  bool soc_t1 = false, soc_t2 = false, soc_global = false;
};

FrameFoc foc_frame(const Frame& f, double t1, double t2, double horizon) {
  FrameFoc r;
  r.psi12 = psi_frame(f, t1, t2);
  r.res_a = f.dv() + f.dh(t2) - f.hr->d1(t2);
  r.res_b = r.psi12 - f.hl->d1(t1);
  r.res_inc = r.res_a + 2.0 * r.psi12;
  const double eps = 1e-12;
  r.soc_t1 = f.hl->d2(t1) * t1 <= eps;
  r.soc_t2 = f.hr->d2(t2) <= f.dh1(t2) + eps;
  if (horizon < 0.0) horizon = f.bound(std::min(t1, f.t1_max())) + 1.0;
  horizon = std::max(horizon, t2);
  bool ok = true;
  const int n = 400;
  for (int i = 0; i <= n && ok; ++i) {
    double t = horizon * i / n;
    if (t < t1) {
      ok = f.hl->d2(t) <= eps && f.hr->d2(t) <= eps;
    } else {
      double lam_prime = psi_frame(f, t, t2) - f.hl->d1(t);
      ok = std::max(f.hr->d2(t), 0.0) <= lam_prime + 1e-9;
    }
  }
  r.soc_global = ok;
  return r;
}

template <class G>
double bisect(G&& g, double lo, double hi, double tol) {
  // g(lo) and g(hi) have opposite signs; returns a point within tol of a root.
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if ((gm >= 0.0) == (glo >= 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct FrameSelection {
  SuspenseStrategy s;
  FrameFoc foc;
};

FrameSelection select_in_frame(const Frame& f, const SelectOptions& opt, double horizon) {
  const double tol = std::min(opt.tol, 1e-12);
  auto F = [&](double t1, double t2) { return psi_frame(f, t1, t2) - f.hl->d1(t1); };
  auto t1star = [&](double t2) {
    if (F(0.0, t2) >= 0.0) return 0.0;
    // e^{-t1} F increases in t1 and F(t2, t2) = Delta h'(t2) >= 0.
    return bisect([&](double t1) { return F(t1, t2) >= 0.0 ? 1.0 : -1.0; }, 0.0, t2, tol);
  };
  auto g = [&](double t2) { return f.bound(t1star(t2)) - t2; };
  const double b0 = f.bound(0.0);
  double t2hat = g(b0) >= 0.0 ? b0
                              : bisect([&](double t2) { return g(t2) >= 0.0 ? 1.0 : -1.0; }, 0.0,
                                       b0, tol);
  double t1hat = t1star(t2hat);
  t2hat = std::min(t2hat, f.bound(t1hat));

  const double dv = f.dv();
  const double hr0 = f.hr->d1(0.0);
  const double up = f.hr->d1(t2hat) - f.dh(t2hat);
  const double lo = up - 2.0 * psi_frame(f, t1hat, t2hat);

  FrameSelection out;
  std::string tag;
  double t1 = 0.0, t2 = 0.0;
  StrategyKind kind = StrategyKind::suspense;
  if (dv >= lo && dv <= up) {
    tag = "case1";
    t1 = t1hat;
    t2 = t2hat;
  } else if (dv > up) {
    if (dv >= hr0) {
      tag = "case2.1";
    } else {
      tag = "case2.2";
      t2 = bisect([&](double t) { return f.hr->d1(t) - f.dh(t) - dv; }, 0.0, t2hat, tol);
      t1 = t1star(t2);
    }
  } else {
    kind = StrategyKind::inconclusive;
    if (dv <= -hr0) {
      tag = "case3.1";
    } else {
      tag = "case3.2";
      t2 = bisect(
          [&](double t) {
            double a = t1star(t);
            return f.hr->d1(t) - 2.0 * psi_frame(f, a, t) - f.dh(t) - dv;
          },
          0.0, t2hat, tol);
      t1 = t1star(t2);
    }
  }
  if (kind == StrategyKind::suspense) t2 = std::min(t2, f.bound(t1));
  out.s = build(f, kind, t1, t2);
  out.s.case_tag = tag;
  out.foc = foc_frame(f, t1, t2, horizon);

  const double ct = opt.cert_tol;
  const FrameFoc& r = out.foc;
  bool b_ok = r.res_b >= -ct && (t1 == 0.0 || std::abs(r.res_b) <= ct);
  bool soc = r.soc_t1 && r.soc_t2 && r.soc_global;
  bool first = false;
  if (tag == "case2.1" || tag == "case3.1") {
    first = std::abs(dv) >= std::max(f.hr->d1(0.0), f.hl->d1(0.0)) - ct;
    b_ok = true;
  } else if (tag == "case1") {
    first = r.res_a >= -2.0 * r.psi12 - ct && r.res_a <= ct;
  } else if (tag == "case2.2") {
    first = std::abs(r.res_a) <= ct;
  } else {
    first = std::abs(r.res_inc) <= ct;
  }
  out.s.certified = first && b_ok && soc;
  out.s.status = out.s.certified ? "CERTIFIED" : "UNCERTIFIED";
  return out;
}

double default_horizon(const BinaryPersuasionSpec& spec) {
  double h = 0.0;
  for (bool flip : {false, true}) h = std::max(h, frame_of(spec, flip).bound(0.0));
  return h + 1.0;
}

}  // namespace

// ---------------------------------------------------------------- public API

SuspenseStrategy make_strategy(const BinaryPersuasionSpec& spec, Variant v, double t1,
                               double t2) {
  Frame f = frame_for(spec, v);
  return build(f, kind_of(v, f), t1, t2);
}

std::pair<double, double> suspense_paths(const BinaryPersuasionSpec& spec, Variant v, double t1,
                                         double t2, double t) {
  Frame f = frame_for(spec, v);
  SuspenseStrategy s = build(f, kind_of(v, f), t1, t2);
  if (!(t >= 0.0) || t > t1 + 1e-15) throw InputError("t", "must lie in [0, t1]");
  double a = s.y, b = s.x;
  if (t1 > 0.0) {
    a = s.y + (t1 - t) * (0.5 - s.y) / s.A;
    b = s.x - (t1 - t) * (s.x - 0.5) / s.A;
  }
  if (!f.flip) return {a, b};
  return {1.0 - b, 1.0 - a};
}

double targeting_path(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2,
                      double t) {
  Frame f = frame_for(spec, v);
  SuspenseStrategy s = build(f, kind_of(v, f), t1, t2);
  if (t < t1 - 1e-15 || t > t2 + 1e-15) throw InputError("t", "must lie in [t1, t2]");
  return f.orig(std::min(1.0, s.x * std::exp(t - t1)));
}

JointCdf joint_stopping_cdf(const SuspenseStrategy& s, double t) {
  JointCdf c;
  c.terminal_atom = s.p * std::exp(s.t1 - s.t2);
  if (t < s.t1) return c;
  const double tt = std::min(t, s.t2);
  c.targeted_by_t = 1.0 - s.p * std::exp(s.t1 - tt);
  return c;
}

JointCdf joint_stopping_cdf(const BinaryPersuasionSpec& spec, double t1, double t2, double t) {
  return joint_stopping_cdf(make_strategy(spec, Variant::suspense_ell, t1, t2), t);
}

double payoff_suspense(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2) {
  return make_strategy(spec, v, t1, t2).payoff;
}

double psi(const BinaryPersuasionSpec& spec, Variant v, double t, double t2) {
  return psi_frame(frame_of(spec, variant_flip(v)), t, t2);
}

FocResiduals foc_residuals(const BinaryPersuasionSpec& spec, Variant v, double t1, double t2,
                           double horizon) {
  Frame f = frame_of(spec, variant_flip(v));
  FrameFoc r = foc_frame(f, t1, t2, horizon);
  FocResiduals out;
  // Frame res_a is Delta v_f + Delta h_f - h_{r,f}'; relabelling flips the sign.
  out.res_a = f.flip ? -r.res_a : r.res_a;
  out.res_b = r.res_b;
  out.res_inconclusive = r.res_inc;
  out.soc_local_t1 = r.soc_t1;
  out.soc_local_t2 = r.soc_t2;
  out.soc_global_ok = r.soc_global;
  return out;
}

SuspenseStrategy select_strategy(const BinaryPersuasionSpec& spec, const SelectOptions& opt) {
  spec.validate();
  const double H = opt.horizon > 0.0 ? opt.horizon : default_horizon(spec);
  const int n = 2000;
  bool pos = false, neg = false;
  for (int i = 0; i <= n; ++i) {
    double t = H * i / n;
    if (spec.h_ell.d2(t) > 1e-12) throw InputError("h_ell", "not concave at t=" + fmt(t));
    if (spec.h_r.d2(t) > 1e-12) throw InputError("h_r", "not concave at t=" + fmt(t));
    if (spec.h_ell.d1(t) < 0.0) throw InputError("h_ell", "decreasing at t=" + fmt(t));
    if (spec.h_r.d1(t) < 0.0) throw InputError("h_r", "decreasing at t=" + fmt(t));
    double d = spec.h_r.d1(t) - spec.h_ell.d1(t);
    if (d > 1e-14) pos = true;
    if (d < -1e-14) neg = true;
  }
  if (pos && neg)
    throw InputError("h", "Delta h' changes sign on [0, " + fmt(H) +
                              "]; no closed form, use the saddle solver");
  if (pos) return select_in_frame(frame_of(spec, false), opt, H).s;
  if (neg) return select_in_frame(frame_of(spec, true), opt, H).s;
  // Equal marginal gains: both directions qualify; keep the better, ell on ties.
  FrameSelection a = select_in_frame(frame_of(spec, false), opt, H);
  FrameSelection b = select_in_frame(frame_of(spec, true), opt, H);
  return b.s.payoff > a.s.payoff + 1e-12 ? b.s : a.s;
}

std::vector<double> uniform_times(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt", "must be positive");
  const long n = std::max(1L, std::lround(std::ceil(horizon / dt - 1e-9)));
  std::vector<double> t(n + 1);
  for (long k = 0; k <= n; ++k) t[k] = k * dt;
  return t;
}

BeliefTimeDistribution export_grid_distribution(const BinaryPersuasionSpec& spec,
                                                const SuspenseStrategy& s, double dt,
                                                double horizon) {
  Frame f = frame_of(spec, s.flip);
  const long k1 = std::lround(s.t1 / dt);
  long k2 = std::lround(s.t2 / dt);
  const double t1 = k1 * dt;
  SuspenseStrategy g;
  for (;; --k2) {
    if (k2 < k1) throw InputError("dt", "grid cannot host the strategy");
    try {
      g = build(f, s.kind, t1, k2 * dt);
      break;
    } catch (const InputError&) {
      // snapped t2 overshot the targeting bound; step back
    }
  }
  BeliefTimeDistribution out;
  out.times = uniform_times(dt, std::max(horizon, k2 * dt));
  auto belief = [&](double frame_mu) {
    double r = f.orig(frame_mu);
    return Belief{1.0 - r, r};
  };
  if (g.p < 1.0) out.atoms.push_back({belief(g.y), static_cast<std::size_t>(k1), 1.0 - g.p});
  for (long k = k1 + 1; k <= k2; ++k) {
    double w = g.p * (std::exp(-(k - 1 - k1) * dt) - std::exp(-(k - k1) * dt));
    out.atoms.push_back({belief(0.0), static_cast<std::size_t>(k), w});
  }
  const double survive = g.p * std::exp(-(k2 - k1) * dt);
  const double term = std::min(1.0, g.x * std::exp((k2 - k1) * dt));
  if (survive > 0.0) out.atoms.push_back({belief(term), static_cast<std::size_t>(k2), survive});
  out.compress();
  return out;
}

Primitives binary_primitives(const BinaryPersuasionSpec& spec, const std::vector<double>& times) {
  spec.validate();
  Primitives p;
  p.states = {"L", "R"};
  p.actions = {"l", "r"};
  p.times = times;
  p.prior = {1.0 - spec.mu0, spec.mu0};
  const std::size_t J = times.size();
  p.u.assign(2, std::vector<std::vector<double>>(2, std::vector<double>(J)));
  p.v = p.u;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t k = 0; k < J; ++k) {
        const double t = times[k];
        p.u[s][a][k] = (s == a ? 1.0 : 0.0) - t;
        p.v[s][a][k] = a == 0 ? spec.v_ell + spec.h_ell.value(t) : spec.v_r + spec.h_r.value(t);
      }
  p.validate();
  return p;
}

std::vector<PathSample> path_samples(const BinaryPersuasionSpec& spec, const SuspenseStrategy& s,
                                     std::size_t n) {
  Frame f = frame_of(spec, s.flip);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<PathSample> out;
  const std::size_t steps = s.t2 > 0.0 ? std::max<std::size_t>(n, 2) - 1 : 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    double t = steps ? s.t2 * static_cast<double>(i) / static_cast<double>(steps) : 0.0;
    PathSample row{t, nan, nan, nan, nan, nan};
    if (t <= s.t1) {
      double a = s.y, b = s.x;
      if (s.t1 > 0.0) {
        a = s.y + (s.t1 - t) * (0.5 - s.y) / s.A;
        b = s.x - (s.t1 - t) * (s.x - 0.5) / s.A;
      }
      row.mu_L = f.flip ? 1.0 - b : a;
      row.mu_R = f.flip ? 1.0 - a : b;
    }
    if (t >= s.t1) {
      row.targeting = f.orig(std::min(1.0, s.x * std::exp(t - s.t1)));
      JointCdf c = joint_stopping_cdf(s, t);
      row.cdf_targeted = c.targeted_by_t;
      row.terminal_atom = c.terminal_atom;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace persuade
