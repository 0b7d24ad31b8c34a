#include "persuade/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace persuade {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Dense LU with partial pivoting; returns false when singular.
bool lu_solve(std::vector<double> A, std::size_t n, std::vector<double>& b, bool transpose) {
  // A is row-major n x n. For the transposed system we transpose first.
  if (transpose)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) std::swap(A[i * n + j], A[j * n + i]);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(A[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i * n + k]) > best) {
        best = std::abs(A[i * n + k]);
        p = i;
      }
    if (best < 1e-14) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
      std::swap(b[k], b[p]);
    }
    double piv = A[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double m = A[i * n + k] / piv;
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
      b[i] -= m * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= A[k * n + j] * b[j];
    b[k] = s / A[k * n + k];
  }
  return true;
}

class Tableau {
 public:
  Tableau(const LpProblem& lp, const LpOptions& opt) : opt_(opt) {
    n_ = lp.c.size();
    m_eq_ = lp.A_eq.size();
    m_ge_ = lp.A_ge.size();
    m_ = m_eq_ + m_ge_;
    sign_.assign(m_, 1.0);
    // Count artificials.
    std::vector<bool> need_art(m_, false);
    for (std::size_t i = 0; i < m_eq_; ++i) need_art[i] = true;
    for (std::size_t i = 0; i < m_ge_; ++i) need_art[m_eq_ + i] = lp.b_ge[i] > 0.0;
    n_art_ = static_cast<std::size_t>(std::count(need_art.begin(), need_art.end(), true));
    N_ = n_ + m_ge_ + n_art_;
    W_ = N_ + 1;
    T_.assign((m_ + 1) * W_, 0.0);
    basis_.assign(m_, 0);
    cost_.assign(N_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp.c[j];
    std::size_t art = n_ + m_ge_;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::vector<double>& row = i < m_eq_ ? lp.A_eq[i] : lp.A_ge[i - m_eq_];
      if (row.size() != n_) throw std::invalid_argument("LP row length mismatch");
      double b = i < m_eq_ ? lp.b_eq[i] : lp.b_ge[i - m_eq_];
      double sg = 1.0;
      if (i < m_eq_) {
        if (b < 0.0) sg = -1.0;
      } else if (!need_art[i]) {
        sg = -1.0;
      }
      sign_[i] = sg;
      double* r = &T_[i * W_];
      for (std::size_t j = 0; j < n_; ++j) r[j] = sg * row[j];
      if (i >= m_eq_) r[n_ + (i - m_eq_)] = -sg;
      r[N_] = sg * b;
      if (need_art[i]) {
        r[art] = 1.0;
        basis_[i] = art;
        ++art;
      } else {
        basis_[i] = n_ + (i - m_eq_);
      }
    }
    orig_ = T_;  // converted constraint matrix (rows 0..m-1 used)
  }

  LpResult run() {
    LpResult res;
    // Phase 1.
    if (n_art_ > 0) {
      std::vector<double> c1(N_, 0.0);
      for (std::size_t j = n_ + m_ge_; j < N_; ++j) c1[j] = -1.0;
      set_objective(c1);
      LpStatus s = iterate(N_, res.iterations);
      if (s == LpStatus::iteration_limit) {
        res.status = s;
        return res;
      }
      double infeas = T_[m_ * W_ + N_];  // = sum of artificials (stored as -z)
      double scale = 1.0;
      for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, std::abs(orig_[i * W_ + N_]));
      if (infeas > opt_.feas_tol * scale) {
        res.status = LpStatus::infeasible;
        return res;
      }
      drive_out_artificials();
    }
    set_objective(cost_);
    LpStatus s = iterate(n_ + m_ge_, res.iterations);
    res.status = s;
    if (s != LpStatus::optimal) return res;
    extract(res);
    return res;
  }

 private:
  void set_objective(const std::vector<double>& c) {
    double* z = &T_[m_ * W_];
    for (std::size_t j = 0; j < N_; ++j) z[j] = c[j];
    z[N_] = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* r = &T_[i * W_];
      for (std::size_t j = 0; j <= N_; ++j) z[j] -= cb * r[j];
    }
    obj_ = c;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* pr = &T_[r * W_];
    double inv = 1.0 / pr[q];
    for (std::size_t j = 0; j <= N_; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* ri = &T_[i * W_];
      double f = ri[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= N_; ++j) ri[j] -= f * pr[j];
      ri[q] = 0.0;
    }
    basis_[r] = q;
  }

  // Columns >= ncols never enter.
  LpStatus iterate(std::size_t ncols, long& iters) {
    int degenerate = 0;
    const double* z = &T_[m_ * W_];
    while (true) {
      if (iters >= opt_.max_iterations) return LpStatus::iteration_limit;
      bool bland = opt_.pricing == Pricing::bland || degenerate >= opt_.degenerate_run;
      std::size_t q = N_;
      double best = opt_.opt_tol;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (z[j] > best) {
          q = j;
          if (bland) break;
          best = z[j];
        }
      }
      if (q == N_) return LpStatus::optimal;
      std::size_t r = m_;
      double ratio = std::numeric_limits<double>::infinity();
      double rpiv = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        double a = T_[i * W_ + q];
        if (a <= opt_.pivot_tol) continue;
        double t = std::max(0.0, T_[i * W_ + N_]) / a;
        bool take = false;
        if (t < ratio - 1e-12) {
          take = true;
        } else if (t <= ratio + 1e-12) {
          take = bland ? basis_[i] < basis_[r] : a > rpiv;
        }
        if (take) {
          ratio = std::min(ratio, t);
          r = i;
          rpiv = a;
        }
      }
      if (r == m_) return LpStatus::unbounded;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      pivot(r, q);
      ++iters;
    }
  }

  void drive_out_artificials() {
    std::size_t first_art = n_ + m_ge_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_art) continue;
      const double* r = &T_[i * W_];
      std::size_t q = N_;
      double best = 1e-7;
      for (std::size_t j = 0; j < first_art; ++j)
        if (std::abs(r[j]) > best) {
          best = std::abs(r[j]);
          q = j;
        }
      if (q != N_) pivot(i, q);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  void extract(LpResult& res) {
    std::vector<double> xb(m_);
    for (std::size_t i = 0; i < m_; ++i) xb[i] = T_[i * W_ + N_];
    std::vector<double> pi(m_);
    for (std::size_t i = 0; i < m_; ++i) pi[i] = obj_[basis_[i]];
    // Re-solve with the original converted matrix for accuracy.
    std::vector<double> B(m_ * m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = 0; k < m_; ++k) B[i * m_ + k] = orig_[i * W_ + basis_[k]];
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs[i] = orig_[i * W_ + N_];
    bool ok = m_ == 0 || lu_solve(B, m_, rhs, false);
    bool ok2 = false;
    if (ok) {
      bool sane = true;
      for (std::size_t i = 0; i < m_; ++i)
        if (!(rhs[i] > -1e-7) || std::abs(rhs[i] - xb[i]) > 1e-6) sane = false;
      if (sane) {
        for (std::size_t i = 0; i < m_; ++i) xb[i] = std::max(0.0, rhs[i]);
        std::vector<double> y = pi;
        ok2 = lu_solve(B, m_, y, true);
        if (ok2) pi = y;
      }
    }
    if (!ok2) {
      // Duals from the reduced costs of each row's identity column.
      for (std::size_t i = 0; i < m_; ++i) pi[i] = -T_[m_ * W_ + identity_col(i)];
    }
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = xb[i];
    res.value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) res.value += cost_[j] * res.x[j];
    res.y_eq.assign(m_eq_, 0.0);
    res.lambda_ge.assign(m_ge_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double p = sign_[i] * pi[i];
      if (i < m_eq_)
        res.y_eq[i] = p;
      else
        res.lambda_ge[i - m_eq_] = std::max(0.0, -p);
    }
  }

  std::size_t identity_col(std::size_t i) const {
    // Slack with +1 coefficient or the row's artificial.
    if (i >= m_eq_ && sign_[i] < 0.0) return n_ + (i - m_eq_);
    std::size_t art = n_ + m_ge_;
    for (std::size_t k = 0; k < i; ++k)
      if (k < m_eq_ || sign_[k] > 0.0) ++art;
    return art;
  }

  LpOptions opt_;
  std::size_t n_ = 0, m_eq_ = 0, m_ge_ = 0, m_ = 0, n_art_ = 0, N_ = 0, W_ = 0;
  std::vector<double> T_, orig_, cost_, obj_, sign_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp, const LpOptions& opt) {
  if (lp.A_eq.size() != lp.b_eq.size() || lp.A_ge.size() != lp.b_ge.size())
    throw std::invalid_argument("LP right-hand side length mismatch");
  Tableau t(lp, opt);
  return t.run();
}

}  // namespace persuade
