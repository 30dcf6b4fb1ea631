/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file lagsel.hpp
 * @brief ARIMA(p,d,q) fitting by conditional sum of squares, AIC, and the
 *        (p,q) grid search that picks the lag-feature count.
 *
 * Model on the d-times differenced series w, in mean form:
 *
 *     e_t = (w_t - mu) - sum_i phi_i (w_{t-i} - mu) - sum_j theta_j e_{t-j}
 *
 * with e_t = 0 for the first `warmup` positions. Coefficients minimize
 * sum e_t^2 with BFGS. AIC = n_eff ln(sigma2) + 2 (p + q + 1).
 */

#pragma once

#include <tcast/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tcast::lagsel {

struct ArimaOrder {
  std::size_t p = 0;
  std::size_t d = 0;
  std::size_t q = 0;

  std::size_t n_params() const noexcept { return p + q + 1; }
  bool operator==(const ArimaOrder&) const = default;
};

inline std::string to_string(const ArimaOrder& o) {
  return "(" + std::to_string(o.p) + "," + std::to_string(o.d) + "," + std::to_string(o.q) + ")";
}

struct ArimaFit {
  ArimaOrder order;
  std::vector<double> ar_coeffs;
  std::vector<double> ma_coeffs;
  double intercept = 0.0;
  std::vector<double> residuals;
  double sigma2 = 0.0;
  double aic = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t n_eff = 0;
  std::size_t warmup = 0;
  int iterations = 0;
  /// Mean squared residual on the standardized series, before and after
  /// optimization.
  double css_initial = 0.0;
  double css_final = 0.0;
  /// AR polynomial roots outside the unit circle / MA likewise. Reported,
  /// never enforced.
  bool stationary = true;
  bool invertible = true;
};

// ---------------------------------------------------------------------------
// Differencing
// ---------------------------------------------------------------------------

inline std::vector<double> difference(std::span<const double> s, std::size_t d) {
  require(s.size() > d, Errc::InsufficientData, "series length must exceed differencing order");
  std::vector<double> w(s.begin(), s.end());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t t = 0; t + 1 < w.size(); ++t) w[t] = w[t + 1] - w[t];
    w.pop_back();
  }
  return w;
}

/// First element of each intermediate differencing level 0..d-1; together
/// with the d-fold difference these reconstruct the original.
inline std::vector<double> difference_heads(std::span<const double> s, std::size_t d) {
  std::vector<double> heads;
  std::vector<double> w(s.begin(), s.end());
  for (std::size_t k = 0; k < d; ++k) {
    heads.push_back(w.front());
    w = difference(w, 1);
  }
  return heads;
}

inline std::vector<double> undifference(std::span<const double> w, std::span<const double> heads) {
  std::vector<double> cur(w.begin(), w.end());
  for (std::size_t k = heads.size(); k-- > 0;) {
    std::vector<double> up(cur.size() + 1);
    up[0] = heads[k];
    for (std::size_t t = 0; t < cur.size(); ++t) up[t + 1] = up[t] + cur[t];
    cur = std::move(up);
  }
  return cur;
}

inline std::vector<double> undifference(std::span<const double> w, double head) {
  const double h[1] = {head};
  return undifference(w, std::span<const double>(h, 1));
}

// ---------------------------------------------------------------------------
// CSS objective
// ---------------------------------------------------------------------------

namespace detail {

/// Parameter vector layout: [mu, phi_1..phi_p, theta_1..theta_q].
struct Css {
  std::span<const double> w;
  std::size_t p, q, warmup;

  std::size_t n_eff() const noexcept { return w.size() - warmup; }

  /// Residuals for t >= warmup (earlier positions are zero by definition).
  std::vector<double> residuals(std::span<const double> x) const {
    const double mu = x[0];
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = warmup; t < w.size(); ++t) {
      double v = w[t] - mu;
      for (std::size_t i = 1; i <= p; ++i) v -= x[i] * (w[t - i] - mu);
      for (std::size_t j = 1; j <= q && j <= t; ++j) v -= x[p + j] * e[t - j];
      e[t] = v;
    }
    return std::vector<double>(e.begin() + static_cast<std::ptrdiff_t>(warmup), e.end());
  }

  double value(std::span<const double> x) const {
    const auto e = residuals(x);
    double ss = 0.0;
    for (double v : e) ss += v * v;
    const double f = ss / static_cast<double>(e.size());
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  }

  /// Objective and exact gradient. The gradient runs the residual recursion
  /// backwards (adjoint form): lambda_t = 2 e_t / N - sum_j theta_j lambda_{t+j}.
  double value_and_gradient(std::span<const double> x, std::vector<double>& g) const {
    const std::size_t np = 1 + p + q;
    const std::size_t n = w.size();
    const double mu = x[0];
    double phi_sum = 0.0;
    for (std::size_t i = 1; i <= p; ++i) phi_sum += x[i];

    std::vector<double> e(n, 0.0);
    double ss = 0.0;
    for (std::size_t t = warmup; t < n; ++t) {
      double v = w[t] - mu;
      for (std::size_t i = 1; i <= p; ++i) v -= x[i] * (w[t - i] - mu);
      for (std::size_t j = 1; j <= q && j <= t; ++j) v -= x[p + j] * e[t - j];
      e[t] = v;
      ss += v * v;
    }
    const double inv = 1.0 / static_cast<double>(n - warmup);
    const double f = ss * inv;
    g.assign(np, 0.0);
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();

    std::vector<double> lam(n, 0.0);
    for (std::size_t t = n; t-- > warmup;) {
      double l = 2.0 * e[t] * inv;
      for (std::size_t j = 1; j <= q && t + j < n; ++j) l -= x[p + j] * lam[t + j];
      lam[t] = l;
      g[0] += l * (phi_sum - 1.0);
      for (std::size_t i = 1; i <= p; ++i) g[i] -= l * (w[t - i] - mu);
      for (std::size_t j = 1; j <= q && j <= t; ++j) g[p + j] -= l * e[t - j];
    }
    for (double gk : g)
      if (!std::isfinite(gk)) {
        std::fill(g.begin(), g.end(), 0.0);
        return std::numeric_limits<double>::infinity();
      }
    return f;
  }
};

/// Levinson-Durbin solution of the Yule-Walker equations.
inline std::vector<double> yule_walker(std::span<const double> w, std::size_t p) {
  std::vector<double> phi(p, 0.0);
  if (p == 0) return phi;
  const std::size_t n = w.size();
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> r(p + 1, 0.0);
  for (std::size_t k = 0; k <= p && k < n; ++k) {
    for (std::size_t t = 0; t + k < n; ++t) r[k] += (w[t] - mean) * (w[t + k] - mean);
    r[k] /= static_cast<double>(n);
  }
  if (r[0] <= 0.0) return phi;

  std::vector<double> a(p + 1, 0.0), prev(p + 1, 0.0);
  double err = r[0];
  for (std::size_t k = 1; k <= p; ++k) {
    double acc = r[k];
    for (std::size_t j = 1; j < k; ++j) acc -= prev[j] * r[k - j];
    const double kappa = acc / err;
    a[k] = kappa;
    for (std::size_t j = 1; j < k; ++j) a[j] = prev[j] - kappa * prev[k - j];
    err *= (1.0 - kappa * kappa);
    prev = a;
    if (err <= 0.0) break;
  }
  for (std::size_t i = 0; i < p; ++i) phi[i] = a[i + 1];
  return phi;
}

/// True when all roots of 1 - sum c_i z^i lie outside the unit circle.
inline bool roots_outside_unit_circle(std::span<const double> c) {
  if (c.empty()) return true;
  const auto k = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) comp(0, i) = c[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(es.eigenvalues()[i]) >= 1.0) return false;
  return true;
}

}  // namespace detail

/// Central-difference gradient of the CSS objective.
inline std::vector<double> css_numeric_gradient(std::span<const double> w, std::size_t p, std::size_t q,
                                                std::size_t warmup, std::span<const double> x, double h = 1e-6) {
  detail::Css css{w, p, q, warmup};
  std::vector<double> xp(x.begin(), x.end()), g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(x[k]));
    xp[k] = x[k] + step;
    const double fp = css.value(xp);
    xp[k] = x[k] - step;
    const double fm = css.value(xp);
    xp[k] = x[k];
    g[k] = (fp - fm) / (2.0 * step);
  }
  return g;
}

inline std::vector<double> css_analytic_gradient(std::span<const double> w, std::size_t p, std::size_t q,
                                                 std::size_t warmup, std::span<const double> x) {
  detail::Css css{w, p, q, warmup};
  std::vector<double> g;
  css.value_and_gradient(x, g);
  return g;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

enum class GradientMode { Analytic, Numeric };

struct FitOptions {
  /// Conditioning length; 0 = max(p, q). Must be >= max(p, q).
  std::size_t warmup = 0;
  int max_iterations = 500;
  double f_tol = 1e-10;
  double g_tol = 1e-8;
  GradientMode gradient = GradientMode::Analytic;
};

inline double aic_value(double sigma2, std::size_t n_eff, std::size_t n_params) {
  require(n_eff > 0, Errc::DegenerateFit, "no effective observations");
  require(sigma2 > 0.0, Errc::DegenerateFit, "innovation variance is zero");
  return static_cast<double>(n_eff) * std::log(sigma2) + 2.0 * static_cast<double>(n_params);
}

/// AIC of a fit; non-converged fits score +inf.
inline double aic(const ArimaFit& fit, std::size_t n_eff) {
  if (!fit.converged) return std::numeric_limits<double>::infinity();
  return aic_value(fit.sigma2, n_eff, fit.order.n_params());
}

inline ArimaFit fit_arima(std::span<const double> s, const ArimaOrder& order, const FitOptions& opts = {}) {
  require(order.p + order.q >= 1, Errc::ConfigError, "ARIMA order needs p + q >= 1");
  const auto w_raw = difference(s, order.d);
  const std::size_t m = w_raw.size();
  const std::size_t warmup = std::max({opts.warmup, order.p, order.q});
  require(m >= 10 * order.n_params() && m > warmup + 1, Errc::InsufficientData,
          "differenced length " + std::to_string(m) + " too short for order " + to_string(order));

  // Fit on the standardized series; map back afterwards.
  double mean = 0.0;
  for (double v : w_raw) mean += v;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : w_raw) var += (v - mean) * (v - mean);
  var /= static_cast<double>(m);
  const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
  std::vector<double> w(m);
  for (std::size_t t = 0; t < m; ++t) w[t] = (w_raw[t] - mean) / scale;

  const std::size_t np = order.n_params();
  detail::Css css{w, order.p, order.q, warmup};

  std::vector<double> x(np, 0.0);
  const auto phi0 = detail::yule_walker(w, order.p);
  std::copy(phi0.begin(), phi0.end(), x.begin() + 1);

  auto eval = [&](const std::vector<double>& at, std::vector<double>& g) {
    if (opts.gradient == GradientMode::Analytic) return css.value_and_gradient(at, g);
    g = css_numeric_gradient(w, order.p, order.q, warmup, at);
    return css.value(at);
  };

  std::vector<double> g(np), g_new(np), x_new(np), dir(np), s_vec(np), y_vec(np);
  double f = eval(x, g);
  if (!std::isfinite(f)) {
    // Yule-Walker start can be explosive for awkward orders; fall back to zero.
    std::fill(x.begin(), x.end(), 0.0);
    f = eval(x, g);
  }

  ArimaFit fit;
  fit.order = order;
  fit.warmup = warmup;
  fit.n_eff = m - warmup;
  fit.css_initial = f;

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < opts.g_tol) {
      converged = true;
      break;
    }
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(np));
    Eigen::VectorXd d = -H * gv;
    double slope = gv.dot(d);
    if (!(slope < 0.0)) {
      H.setIdentity();
      d = -gv;
      slope = gv.dot(d);
    }
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (step > 1e-14) {
      for (std::size_t k = 0; k < np; ++k) x_new[k] = x[k] + step * d[static_cast<Eigen::Index>(k)];
      f_new = css.value(x_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable descent left along a descent direction.
      converged = true;
      break;
    }
    f_new = eval(x_new, g_new);
    for (std::size_t k = 0; k < np; ++k) {
      s_vec[k] = x_new[k] - x[k];
      y_vec[k] = g_new[k] - g[k];
    }
    Eigen::Map<const Eigen::VectorXd> sv(s_vec.data(), static_cast<Eigen::Index>(np));
    Eigen::Map<const Eigen::VectorXd> yv(y_vec.data(), static_cast<Eigen::Index>(np));
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * yv;
      H += ((sy + yv.dot(Hy)) * rho * rho) * (sv * sv.transpose()) - rho * (Hy * sv.transpose() + sv * Hy.transpose());
    }
    const double df = f - f_new;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    if (df <= opts.f_tol * std::max(1.0, std::abs(f))) {
      converged = true;
      ++iter;
      break;
    }
  }

  fit.iterations = iter;
  fit.converged = converged && std::isfinite(f);
  fit.css_final = f;
  fit.intercept = mean + scale * x[0];
  fit.ar_coeffs.assign(x.begin() + 1, x.begin() + 1 + static_cast<std::ptrdiff_t>(order.p));
  fit.ma_coeffs.assign(x.begin() + 1 + static_cast<std::ptrdiff_t>(order.p), x.end());
  fit.residuals = css.residuals(x);
  for (auto& e : fit.residuals) e *= scale;
  fit.sigma2 = f * scale * scale;
  fit.stationary = detail::roots_outside_unit_circle(fit.ar_coeffs);
  std::vector<double> neg_ma(fit.ma_coeffs.size());
  std::transform(fit.ma_coeffs.begin(), fit.ma_coeffs.end(), neg_ma.begin(), [](double v) { return -v; });
  fit.invertible = detail::roots_outside_unit_circle(neg_ma);
  if (fit.converged && fit.sigma2 > 0.0) {
    fit.aic = aic_value(fit.sigma2, fit.n_eff, np);
  } else {
    fit.converged = false;
    fit.aic = std::numeric_limits<double>::infinity();
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridConfig {
  std::size_t p_min = 2, p_max = 24;
  std::size_t q_min = 2, q_max = 24;
  std::size_t d = 1;
  /// Condition every cell on the same number of leading observations
  /// (the grid's largest max(p, q)) so AICs share one estimation sample.
  bool common_sample = true;
  FitOptions fit{};
};

struct RankedOrder {
  ArimaOrder order;
  double aic = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool stationary = true;
  bool invertible = true;

  /// CSS residuals of a non-stationary or non-invertible fit are not
  /// one-step innovations, so its AIC is not comparable.
  bool viable() const noexcept { return converged && stationary && invertible && std::isfinite(aic); }
};

inline std::vector<RankedOrder> grid_search(std::span<const double> s, const GridConfig& cfg = {},
                                            const std::function<void(const RankedOrder&)>& on_fit = {}) {
  require(cfg.p_min <= cfg.p_max && cfg.q_min <= cfg.q_max, Errc::ConfigError, "empty ARIMA grid");
  const ArimaOrder largest{cfg.p_max, cfg.d, cfg.q_max};
  const auto m = s.size() > cfg.d ? s.size() - cfg.d : 0;
  require(m >= 10 * largest.n_params(), Errc::InsufficientData,
          "series too short for the largest grid order " + to_string(largest));

  FitOptions fo = cfg.fit;
  if (cfg.common_sample) fo.warmup = std::max({fo.warmup, cfg.p_max, cfg.q_max});

  std::vector<RankedOrder> out;
  for (std::size_t p = cfg.p_min; p <= cfg.p_max; ++p) {
    for (std::size_t q = cfg.q_min; q <= cfg.q_max; ++q) {
      if (p + q == 0) continue;
      const ArimaOrder o{p, cfg.d, q};
      const auto fit = fit_arima(s, o, fo);
      RankedOrder r{o, fit.aic, fit.converged, fit.stationary, fit.invertible};
      if (on_fit) on_fit(r);
      out.push_back(r);
    }
  }
  // Viable fits first, each group by ascending AIC.
  std::stable_sort(out.begin(), out.end(), [](const RankedOrder& a, const RankedOrder& b) {
    if (a.viable() != b.viable()) return a.viable();
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.order.p != b.order.p) return a.order.p < b.order.p;
    return a.order.q < b.order.q;
  });
  return out;
}

/// p of the best viable entry.
inline std::size_t select_lag_count(std::span<const RankedOrder> ranked) {
  require(!ranked.empty(), Errc::NoViableModel, "empty ranking");
  for (const auto& r : ranked)
    if (r.viable()) return r.order.p;
  fail(Errc::NoViableModel, "no ARIMA fit converged to a stationary, invertible model");
}

}  // namespace tcast::lagsel
