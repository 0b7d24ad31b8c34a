#include <cmath>
#include <random>

#include "doctest.h"
#include "persuade/binary.hpp"
#include "persuade/oracle.hpp"

using namespace persuade;

namespace {

BinaryPersuasionSpec base_spec(double mu0 = 0.4) {
  BinaryPersuasionSpec s;
  s.mu0 = mu0;
  s.v_ell = 0.0;
  s.v_r = 1.0;
  s.h_ell = DelayGain::linear(0.0);
  s.h_r = DelayGain::linear(0.0);
  return s;
}

BinaryPersuasionSpec log_spec(double dv, double kr = 1.0, double kl = 0.5) {
  BinaryPersuasionSpec s = base_spec();
  s.v_r = dv;
  s.h_r = DelayGain::log(kr);
  s.h_ell = DelayGain::log(kl);
  return s;
}

double lp_value(const BinaryPersuasionSpec& s, double dt, double horizon) {
  GridProblem gp = GridProblem::build(binary_primitives(s, uniform_times(dt, horizon)),
                                      simplex_lattice(2, 100));
  return solve_relaxed(gp).objective;
}

// Trapezoid reference for E[v] from the joint stopping law, written from
// scratch (no shared code with the library's quadrature).
double payoff_reference(const BinaryPersuasionSpec& s, double t1, double t2, double q) {
  const int n = 200000;
  double acc = 0.0, h = (t2 - t1) / n;
  for (int i = 0; i <= n; ++i) {
    double t = t1 + i * h;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * q * std::exp(t1 - t) * (s.v_ell + s.h_ell.value(t));
  }
  acc *= h;
  return (1.0 - q) * (s.v_ell + s.h_ell.value(t1)) + acc +
         q * std::exp(t1 - t2) * (s.v_r + s.h_r.value(t2));
}

}  // namespace

TEST_CASE("delay gain derivatives agree with finite differences") {
  std::vector<DelayGain> hs = {DelayGain::linear(0.7), DelayGain::log(1.3),
                               DelayGain::power(2.0, 0.5), DelayGain::poly({1.0, -0.2, 0.03})};
  for (const auto& h : hs) {
    CHECK(h.value(0.0) == 0.0);
    for (double t : {0.1, 0.5, 1.7}) {
      const double e = 1e-5;
      CHECK(h.d1(t) == doctest::Approx((h.value(t + e) - h.value(t - e)) / (2 * e)).epsilon(1e-7));
      CHECK(h.d2(t) == doctest::Approx((h.d1(t + e) - h.d1(t - e)) / (2 * e)).epsilon(1e-6));
    }
  }
}

TEST_CASE("suspense paths") {
  BinaryPersuasionSpec s = base_spec(0.4);
  auto [l, r] = suspense_paths(s, Variant::suspense_ell, 0.2, 0.3, 0.2);
  CHECK(l == doctest::Approx(0.0));
  CHECK(r == doctest::Approx(2.0 / 3.0));
  auto [l0, r0] = suspense_paths(s, Variant::suspense_ell, 0.2, 0.3, 0.0);
  CHECK(l0 == doctest::Approx(0.4));
  CHECK(r0 == doctest::Approx(0.4 * 0.8 / 0.6));
  // Closed forms at interior times.
  for (double t : {0.05, 0.13}) {
    auto [a, b] = suspense_paths(s, Variant::suspense_ell, 0.2, 0.3, t);
    CHECK(a == doctest::Approx(0.4 * (0.2 - t) / 0.2));
    CHECK(b == doctest::Approx(0.4 * (1 - 0.2 + t) / (0.8 - 0.2)));
    auto [c, d] = suspense_paths(s, Variant::suspense_r, 0.2, 0.3, t);
    CHECK(c == doctest::Approx(((1 + t - 0.2) * 0.4 - t) / 0.8));
    CHECK(d == doctest::Approx((1 + t - (2 + t - 0.2) * 0.4) / (1 + 0.2 - 0.8)));
  }
  auto [lr, rr] = suspense_paths(s, Variant::suspense_r, 0.2, 0.3, 0.2);
  CHECK(lr == doctest::Approx(0.25));
  CHECK(rr == doctest::Approx(1.0));
  // Zero-surplus twist hazards: a' = -(b-a)/(2b-1), b' = (b-a)/(1-2a).
  for (Variant v : {Variant::suspense_ell, Variant::suspense_r}) {
    const double t = 0.1, e = 1e-6;
    auto [a, b] = suspense_paths(s, v, 0.2, 0.3, t);
    auto [ap, bp] = suspense_paths(s, v, 0.2, 0.3, t + e);
    auto [am, bm] = suspense_paths(s, v, 0.2, 0.3, t - e);
    // the L path of the ell variant and the R path of the r variant drift to certainty
    double da = (ap - am) / (2 * e), db = (bp - bm) / (2 * e);
    CHECK(da == doctest::Approx(-(b - a) / (2 * b - 1)).epsilon(1e-6));
    CHECK(db == doctest::Approx((b - a) / (1 - 2 * a)).epsilon(1e-6));
  }
  // Inconclusive paths from the stated normaliser and p_plus.
  {
    const double t1 = 0.1, t2 = 0.4, mu0 = 0.4;
    double xr = std::exp(-(t2 - t1));
    double pp = t1 / (2 * std::exp(t1 - t2) - 1);
    double yl = 0.5 * (2 * mu0 - t1 - pp) / (1 - pp);
    double A = t1 * (0.5 - yl) / (mu0 - yl);
    SuspenseStrategy st = make_strategy(s, Variant::inconclusive_ell, t1, t2);
    CHECK(st.p == doctest::Approx(pp));
    CHECK(st.A == doctest::Approx(A));
    auto [a, b] = suspense_paths(s, Variant::inconclusive_ell, t1, t2, 0.04);
    CHECK(a == doctest::Approx(yl + (t1 - 0.04) / A * (0.5 - yl)));
    CHECK(b == doctest::Approx(xr - (t1 - 0.04) / A * (xr - 0.5)));
    auto [a0, b0] = suspense_paths(s, Variant::inconclusive_ell, t1, t2, 0.0);
    CHECK(a0 == doctest::Approx(mu0));
    (void)b0;
  }
}

TEST_CASE("binary domain errors name the violated bound") {
  BinaryPersuasionSpec s = base_spec(0.4);
  try {
    suspense_paths(s, Variant::suspense_ell, 0.45, 0.5, 0.1);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.field() == "t1");
  }
  try {
    targeting_path(s, Variant::suspense_ell, 0.2, 0.2 + std::log(1.5) + 0.01, 0.3);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(e.field() == "t2");
    CHECK(std::string(e.what()).find("t1 - ln mu^R_t1") != std::string::npos);
  }
  BinaryPersuasionSpec bad = base_spec(0.4);
  bad.v_r = -1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = base_spec(0.5);
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("targeting paths and joint stopping law") {
  BinaryPersuasionSpec s = base_spec(0.4);
  const double t2 = 0.2 + std::log(1.4);
  CHECK(targeting_path(s, Variant::suspense_ell, 0.2, t2, 0.2 + std::log(1.2)) ==
        doctest::Approx(0.8));
  CHECK(targeting_path(s, Variant::suspense_ell, 0.2, t2, 0.2) == doctest::Approx(2.0 / 3.0));
  // r-targeting from mu^L_t1 = 0.25.
  for (double t : {0.2, 0.3, 0.45})
    CHECK(targeting_path(s, Variant::suspense_r, 0.2, 0.45, t) ==
          doctest::Approx(1 - 0.75 * std::exp(t - 0.2)));
  JointCdf c = joint_stopping_cdf(s, 0.2, t2, 0.2);
  CHECK(c.targeted_by_t == doctest::Approx(0.4));
  JointCdf e = joint_stopping_cdf(s, 0.2, t2, t2);
  CHECK(e.targeted_by_t + e.terminal_atom == doctest::Approx(1.0));
  CHECK(e.terminal_atom == doctest::Approx(0.6 * std::exp(0.2 - t2)));
}

TEST_CASE("suspense payoffs") {
  BinaryPersuasionSpec s = base_spec(0.4);
  CHECK(payoff_suspense(s, Variant::suspense_ell, 0.0, std::log(1.2)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(payoff_suspense(s, Variant::suspense_ell, 0.0, 0.0) == doctest::Approx(0.8));
  BinaryPersuasionSpec g = log_spec(0.4);
  g.v_ell = 0.1;
  g.v_r = 0.5;
  double p = payoff_suspense(g, Variant::suspense_ell, 0.15, 0.5);
  CHECK(p == doctest::Approx(payoff_reference(g, 0.15, 0.5, 0.8 - 0.15)).epsilon(1e-9));
  // r variant equals the ell formula after relabelling.
  double pr = payoff_suspense(g, Variant::suspense_r, 0.1, 0.3);
  CHECK(pr == doctest::Approx(payoff_suspense(g.mirrored(), Variant::suspense_ell, 0.1, 0.3)));
}

TEST_CASE("psi") {
  BinaryPersuasionSpec s = base_spec();
  s.h_ell = DelayGain::linear(1.0);
  s.h_r = DelayGain::linear(1.0);
  for (double t : {0.0, 0.3, 0.9}) CHECK(psi(s, Variant::suspense_ell, t, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  BinaryPersuasionSpec g = log_spec(0.4);
  CHECK(psi(g, Variant::suspense_ell, 0.7, 0.7) == doctest::Approx(g.h_r.d1(0.7)));
  g.h_ell = DelayGain::linear(0.0);
  CHECK(psi(g, Variant::suspense_ell, 0.2, 0.9) ==
        doctest::Approx(std::exp(0.2 - 0.9) * g.h_r.d1(0.9)));
}

TEST_CASE("first-order residuals") {
  BinaryPersuasionSpec s = base_spec();
  s.h_r = DelayGain::log(1.0);
  s.v_r = 0.5 - std::log(2.0);  // residuals do not require the sign normalisation
  FocResiduals r = foc_residuals(s, Variant::suspense_ell, 0.0, 1.0);
  CHECK(std::abs(r.res_a) <= 1e-12);
  BinaryPersuasionSpec lin = base_spec();
  for (double k : {0.5, 1.0, 2.0}) {
    lin.h_ell = lin.h_r = DelayGain::linear(k);
    FocResiduals q = foc_residuals(lin, Variant::suspense_ell, 0.1, 0.4);
    CHECK(std::abs(q.res_b) <= 1e-10);
  }
  // t1 = 0: one-sided.
  FocResiduals z = foc_residuals(log_spec(0.4), Variant::suspense_ell, 0.0, 0.5);
  CHECK(z.res_b >= 0.0);
}

TEST_CASE("case selection") {
  SUBCASE("static") {
    BinaryPersuasionSpec s = log_spec(1.5);
    SuspenseStrategy st = select_strategy(s);
    CHECK(st.variant == Variant::static_kg_ell);
    CHECK(st.t1 == 0.0);
    CHECK(st.t2 == 0.0);
    CHECK(st.certified);
    CHECK(st.payoff == doctest::Approx(0.8 * 1.5));
  }
  SUBCASE("interior t2, oracle cross-check") {
    BinaryPersuasionSpec s = log_spec(0.4);
    SuspenseStrategy st = select_strategy(s);
    CHECK(st.variant == Variant::suspense_ell);
    CHECK(st.case_tag == "case2.2");
    CHECK(st.certified);
    FocResiduals r = foc_residuals(s, st.variant, st.t1, st.t2);
    CHECK(std::abs(r.res_a) <= 1e-8);
    CHECK(r.res_b >= -1e-8);
    double lp = lp_value(s, 0.01, st.t2 + 0.15);
    CHECK(std::abs(lp - st.payoff) <= 0.01 * st.payoff);
  }
  SUBCASE("interior suspense window") {
    BinaryPersuasionSpec s = log_spec(0.7, 1.0, 0.95);
    SuspenseStrategy st = select_strategy(s);
    CHECK(st.case_tag == "case2.2");
    CHECK(st.t1 > 0.1);
    CHECK(st.certified);
    FocResiduals r = foc_residuals(s, st.variant, st.t1, st.t2);
    CHECK(std::abs(r.res_a) <= 1e-8);
    CHECK(std::abs(r.res_b) <= 1e-8);
    double lp = lp_value(s, 0.01, st.t2 + 0.15);
    CHECK(std::abs(lp - st.payoff) <= 0.01 * st.payoff);
  }
  SUBCASE("substitutes: r targeting and inconclusive") {
    for (double dv : {0.4, 0.9}) {
      BinaryPersuasionSpec s = log_spec(dv, 0.5, 1.0);
      SuspenseStrategy st = select_strategy(s);
      CHECK(st.flip);
      CHECK(st.certified);
      if (dv == 0.4) CHECK(st.variant == Variant::suspense_r);
      if (dv == 0.9) {
        CHECK(st.variant == Variant::inconclusive_r);
        CHECK(std::abs(foc_residuals(s, st.variant, st.t1, st.t2).res_inconclusive) <= 1e-8);
      }
      double lp = lp_value(s, 0.01, st.t2 + 0.15);
      CHECK(std::abs(lp - st.payoff) <= 0.01 * st.payoff);
    }
  }
  SUBCASE("mirrored spec") {
    for (double dv : {0.4, 1.5}) {
      BinaryPersuasionSpec s = log_spec(dv);
      SuspenseStrategy a = select_strategy(s);
      SuspenseStrategy b = select_strategy(s.mirrored());
      CHECK(a.payoff == doctest::Approx(b.payoff).epsilon(1e-12));
      CHECK(a.t1 == doctest::Approx(b.t1));
      CHECK(a.t2 == doctest::Approx(b.t2));
      CHECK(a.flip != b.flip);
      CHECK(a.terminal_belief == doctest::Approx(1.0 - b.terminal_belief));
    }
  }
  SUBCASE("refusals") {
    BinaryPersuasionSpec s = log_spec(0.4);
    s.h_ell = DelayGain::poly({0.5, 0.3});  // convex
    CHECK_THROWS_AS(select_strategy(s), InputError);
    BinaryPersuasionSpec c = log_spec(0.4);
    c.h_r = DelayGain::linear(0.6);  // Delta h' = 0.6 - 0.5/(1+t) changes sign? no: positive
    c.h_ell = DelayGain::log(0.9);   // 0.6 - 0.9/(1+t): negative near 0, positive later
    try {
      select_strategy(c);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(e.field() == "h");
    }
  }
}

TEST_CASE("grid export") {
  BinaryPersuasionSpec s = base_spec(0.4);
  SUBCASE("static") {
    BeliefTimeDistribution f = export_grid_distribution(s, make_strategy(s, Variant::static_kg_ell, 0, 0), 0.1);
    REQUIRE(f.atoms.size() == 2);
    for (const Atom& a : f.atoms) {
      CHECK(a.time == 0);
      if (a.belief[1] < 0.25) CHECK(a.weight == doctest::Approx(0.2));
      else {
        CHECK(a.belief[1] == doctest::Approx(0.5));
        CHECK(a.weight == doctest::Approx(0.8));
      }
    }
  }
  SUBCASE("suspense ell") {
    const double dt = 0.05, t1 = 0.2, t2 = 0.5;
    SuspenseStrategy st = make_strategy(s, Variant::suspense_ell, t1, t2);
    BeliefTimeDistribution f = export_grid_distribution(s, st, dt);
    f.validate({0.6, 0.4});
    double ell = 0.0;
    for (const Atom& a : f.atoms)
      if (a.belief[1] < 0.5) ell += a.weight;
    CHECK(ell == doctest::Approx(joint_stopping_cdf(st, t2).targeted_by_t).epsilon(1e-9));
    Primitives p = binary_primitives(s, f.times);
    IndirectUtility iu(p);
    for (double g : occ_residuals(f, iu)) CHECK(g >= -5 * dt);
    // obedience holds only up to the O(dt) discretisation slack
    SimpleRecommendation rec = to_simple_recommendation(f, iu, 5 * dt);
    for (std::size_t k = 4; k < f.times.size() - 1; ++k) {
      REQUIRE(rec.continuation[k].has_value());
      CHECK(std::abs((*rec.continuation[k])[1] -
                     targeting_path(s, Variant::suspense_ell, t1, t2, f.times[k])) <= 1e-9);
    }
    // Monte Carlo replay of the stopping law.
    const std::size_t n = 100000;
    auto draws = simulate_paths(rec, n, 7);
    for (double t : {0.3, 0.4}) {
      std::size_t hit = 0;
      for (const auto& d : draws)
        if (d.belief[1] < 0.5 && f.times[d.time] <= t + 1e-9) ++hit;
      double pr = joint_stopping_cdf(st, t).targeted_by_t;
      double sd = std::sqrt(pr * (1 - pr) / n);
      CHECK(std::abs(static_cast<double>(hit) / n - pr) <= 3 * sd);
    }
  }
  SUBCASE("r targeting terminal atom and zero-surplus discretisation") {
    const double dt = 0.001;
    SuspenseStrategy st = make_strategy(s, Variant::suspense_r, 0.1, 0.3);
    BeliefTimeDistribution f = export_grid_distribution(s, st, dt);
    double want = targeting_path(s, Variant::suspense_r, 0.1, 0.3, 0.3);
    bool found = false;
    for (const Atom& a : f.atoms)
      if (a.time == 300 && std::abs(a.belief[1] - want) <= 1e-9) found = true;
    CHECK(found);
    IndirectUtility iu(binary_primitives(s, f.times));
    auto g = occ_residuals(f, iu);
    for (std::size_t k = 100; k < g.size(); ++k) CHECK(std::abs(g[k]) <= 5 * dt);
  }
  SUBCASE("payoff is below the oracle plus the grid slack") {
    BinaryPersuasionSpec g = log_spec(0.4);
    const double dt = 0.05;
    for (auto [t1, t2] : {std::pair{0.0, 0.3}, std::pair{0.1, 0.5}, std::pair{0.2, 0.4}})
      CHECK(payoff_suspense(g, Variant::suspense_ell, t1, t2) <= lp_value(g, dt, 0.8) + 5 * dt);
  }
}
