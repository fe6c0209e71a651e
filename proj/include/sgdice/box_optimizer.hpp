// SPDX-License-Identifier: Apache-2.0
//
// Bound-constrained maximisation for smooth objectives with an exact
// gradient.
//
// Phase 1 is projected L-BFGS: the quasi-Newton direction is computed on
// the variables not held at a bound, and a backtracking search runs along
// the projection arc. Phase 2 polishes with projected Newton steps whose
// Hessian on the free set comes from finite differences of the gradient.
// Convergence is measured by the infinity norm of the projected gradient
// P(x + g) - x, relative to max(1, |f|).
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace sgdice {

struct BoxOptions {
  int max_iterations = 40000;
  int memory = 20;
  double tolerance = 1e-6;
  int max_newton_iterations = 40;  // per Newton phase
  int newton_after = 500;          // L-BFGS iterations per quasi-Newton phase
  int max_cycles = 20;             // L-BFGS + Newton rounds
  int threads = 1;                 // concurrent Hessian columns; f must be thread-safe
  double armijo = 1e-4;
};

struct BoxResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();  // relative
  int iterations = 0;
  int newton_iterations = 0;
  int evaluations = 0;
  int active_lower = 0;
  int active_upper = 0;
  bool converged = false;
};

namespace detail {

inline double clamp_to(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

inline double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g,
                                      const std::vector<double>& lo, const std::vector<double>& hi) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    m = std::max(m, std::abs(clamp_to(x[i] + g[i], lo[i], hi[i]) - x[i]));
  return m;
}

// Held at a bound with the gradient pointing out of the box.
inline bool is_active(double x, double g, double lo, double hi, double eps) {
  if (hi - lo <= 0.0) return true;
  return (x <= lo + eps && g <= 0.0) || (x >= hi - eps && g >= 0.0);
}

}  // namespace detail

/// Maximises f over lo <= x <= hi. `f(x, grad)` returns the value and fills the gradient.
template <class F>
BoxResult maximize_box(F&& f, std::vector<double> x, const std::vector<double>& lo,
                       const std::vector<double>& hi, const BoxOptions& opt = {}) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) x[i] = detail::clamp_to(x[i], lo[i], hi[i]);

  BoxResult res;
  std::vector<double> g(n), g_new(n), x_new(n), d(n);
  double fx = f(x, g);
  ++res.evaluations;
  auto rel_norm = [&](const std::vector<double>& xx, const std::vector<double>& gg, double v) {
    return detail::projected_gradient_norm(xx, gg, lo, hi) / std::max(1.0, std::abs(v));
  };
  auto finish = [&](bool converged) {
    res.x = x;
    res.value = fx;
    res.gradient_norm = rel_norm(x, g, fx);
    res.converged = converged;
    res.active_lower = res.active_upper = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (hi[i] - lo[i] <= 0.0) continue;
      if (x[i] <= lo[i] && g[i] <= 0.0) ++res.active_lower;
      if (x[i] >= hi[i] && g[i] >= 0.0) ++res.active_upper;
    }
    return res;
  };

  // Projected backtracking search along x + alpha * dir. On success x_new,
  // g_new and f_new hold the accepted point.
  double f_new = fx;
  auto line_search = [&](const std::vector<double>& dir, double alpha) {
    for (int k = 0; k < 60; ++k) {
      double lin = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x_new[i] = detail::clamp_to(x[i] + alpha * dir[i], lo[i], hi[i]);
        lin += g[i] * (x_new[i] - x[i]);
      }
      if (lin <= 0.0) {
        alpha *= 0.5;
        continue;
      }
      f_new = f(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new >= fx + opt.armijo * lin) return true;
      alpha *= 0.5;
    }
    return false;
  };
  auto accept = [&] {
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  };

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  auto forget = [&] {
    s_hist.clear();
    y_hist.clear();
    rho_hist.clear();
  };

  // Phase 1: projected L-BFGS for up to `budget` iterations.
  auto lbfgs = [&](int budget) {
    int stalls = 0;
    const int end = std::min(opt.max_iterations, res.iterations + budget);
    std::vector<char> active(n);
    while (res.iterations < end) {
      if (rel_norm(x, g, fx) < opt.tolerance) return;
      for (std::size_t i = 0; i < n; ++i) active[i] = detail::is_active(x[i], g[i], lo[i], hi[i], 1e-12);

      // Two-loop recursion restricted to the free variables.
      for (std::size_t i = 0; i < n; ++i) d[i] = active[i] ? 0.0 : g[i];
      const std::size_t m = s_hist.size();
      std::vector<double> alpha(m);
      for (std::size_t k = m; k-- > 0;) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (!active[i]) a += s_hist[k][i] * d[i];
        a *= rho_hist[k];
        alpha[k] = a;
        for (std::size_t i = 0; i < n; ++i)
          if (!active[i]) d[i] -= a * y_hist[k][i];
      }
      if (m > 0) {
        double sy = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sy += s_hist.back()[i] * y_hist.back()[i];
          yy += y_hist.back()[i] * y_hist.back()[i];
        }
        for (std::size_t i = 0; i < n; ++i) d[i] *= sy / yy;
      }
      for (std::size_t k = 0; k < m; ++k) {
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (!active[i]) b += y_hist[k][i] * d[i];
        b *= rho_hist[k];
        for (std::size_t i = 0; i < n; ++i)
          if (!active[i]) d[i] += s_hist[k][i] * (alpha[k] - b);
      }
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
      if (!(slope > 0.0)) {
        forget();
        for (std::size_t i = 0; i < n; ++i) d[i] = active[i] ? 0.0 : g[i];
      }
      double step = 1.0;
      if (s_hist.empty()) {
        double gmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) gmax = std::max(gmax, std::abs(d[i]));
        step = gmax > 0.0 ? std::min(1.0, 0.1 / gmax) : 1.0;
      }
      ++res.iterations;
      if (!line_search(d, step)) {
        if (s_hist.empty() && ++stalls > 2) return;
        forget();
        continue;
      }
      stalls = 0;
      std::vector<double> s(n), y(n);
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = x_new[i] - x[i];
        y[i] = g[i] - g_new[i];  // gradient change of -f
        sy += s[i] * y[i];
        yy += y[i] * y[i];
      }
      accept();
      if (sy > 1e-12 * yy && yy > 0.0) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > opt.memory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
    }
  };

  // Phase 2: projected Newton. The Hessian on the free set is built column by
  // column from forward differences of the gradient, symmetrised, and shifted
  // until the negated matrix is positive definite.
  auto newton = [&]() -> bool {  // true when stalled at round-off
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
      if (rel_norm(x, g, fx) < opt.tolerance) return false;
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
        if (!detail::is_active(x[i], g[i], lo[i], hi[i], 1e-9)) free.push_back(i);
      const auto nf = static_cast<Eigen::Index>(free.size());
      if (nf == 0) return false;
      Eigen::MatrixXd h(nf, nf);
      // Columns are independent; each worker owns a strided subset and its
      // own scratch, so the matrix does not depend on the thread count.
      auto columns = [&](int worker, int workers) {
        std::vector<double> xp = x, gp(n);
        for (Eigen::Index c = worker; c < nf; c += workers) {
          const std::size_t j = free[static_cast<std::size_t>(c)];
          double step = 1e-6 * std::max(1.0, std::abs(x[j]));
          if (x[j] + step > hi[j]) step = -step;
          xp[j] = x[j] + step;
          f(xp, gp);
          xp[j] = x[j];
          for (Eigen::Index r = 0; r < nf; ++r) {
            const std::size_t i = free[static_cast<std::size_t>(r)];
            h(r, c) = (gp[i] - g[i]) / step;
          }
        }
      };
      const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(nf)));
      if (workers == 1) {
        columns(0, 1);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(columns, w, workers);
        for (auto& t : pool) t.join();
      }
      res.evaluations += static_cast<int>(nf);
      const Eigen::MatrixXd neg = -0.5 * (h + h.transpose());
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index r = 0; r < nf; ++r) rhs[r] = g[free[static_cast<std::size_t>(r)]];
      const double scale = std::max(1e-300, neg.diagonal().cwiseAbs().maxCoeff());
      Eigen::VectorXd dir;
      for (double tau = 0.0; tau < 1e12 * scale; tau = tau == 0.0 ? 1e-10 * scale : 10.0 * tau) {
        Eigen::LLT<Eigen::MatrixXd> llt(neg + tau * Eigen::MatrixXd::Identity(nf, nf));
        if (llt.info() != Eigen::Success) continue;
        dir = llt.solve(rhs);
        if (dir.allFinite()) break;
        dir.resize(0);
      }
      if (dir.size() != nf) return false;
      std::fill(d.begin(), d.end(), 0.0);
      for (Eigen::Index r = 0; r < nf; ++r) d[free[static_cast<std::size_t>(r)]] = dir[r];
      ++res.newton_iterations;
      if (!line_search(d, 1.0)) return false;
      const double gain = f_new - fx;
      accept();
      // At the floating-point floor a step no longer changes f meaningfully.
      if (gain <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx))) return true;
    }
    return false;
  };

  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    lbfgs(opt.newton_after);
    const bool stalled = newton();
    if (stalled || rel_norm(x, g, fx) < opt.tolerance || res.iterations >= opt.max_iterations) break;
    forget();
  }
  return finish(rel_norm(x, g, fx) < opt.tolerance);
}

}  // namespace sgdice
