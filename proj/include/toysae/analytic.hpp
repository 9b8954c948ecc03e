#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "toysae/datagen.hpp"
#include "toysae/numeric.hpp"
#include "toysae/rng.hpp"
#include "toysae/rug.hpp"

namespace toysae {

// reduced description of one output unit: y(u) = ReLU(a·(u + ν) + b) with
// ν ~ N(0, σ²); the interference mean is already absorbed into b
struct MacroParams {
  double a = 1.0;
  double b = 0.0;
  double sigma = 0.0;
  double p = 0.05;
};

struct LossBreakdown {
  double total = 0.0;
  double l_off = 0.0;
  double l_on = 0.0;
};

// L_off = E[ReLU(a·ν + b)²]
inline double loss_off(const MacroParams& mp) {
  return relu_second_moment(mp.b, mp.a * mp.sigma);
}

namespace detail {

// E_ν[(u − ReLU(a·u + a·ν + b))²], closed form in the truncated moments
inline double on_integrand(double u, const MacroParams& mp) {
  double m = mp.a * u + mp.b;
  double s = mp.a * mp.sigma;
  return u * u - 2.0 * u * relu_mean(m, s) + relu_second_moment(m, s);
}

}  // namespace detail

// L_on = ∫₀¹ E_ν[(u − ReLU(a(u+ν)+b))²] du, panels split where a·u+b = 0
// (a genuine kink at σ=0, a sharp shoulder for small a·σ)
inline double loss_on(const MacroParams& mp, std::size_t n_nodes = 64) {
  auto f = [&](double u) { return detail::on_integrand(u, mp); };
  const double tol = 1e-11;
  if (mp.a > 0.0) {
    double kink = -mp.b / mp.a;
    if (kink > 0.0 && kink < 1.0)
      return integrate_adaptive(f, 0.0, kink, tol, n_nodes) +
             integrate_adaptive(f, kink, 1.0, tol, n_nodes);
  }
  return integrate_adaptive(f, 0.0, 1.0, tol, n_nodes);
}

inline LossBreakdown loss_total(const MacroParams& mp,
                                std::size_t n_nodes = 64) {
  LossBreakdown lb;
  lb.l_off = loss_off(mp);
  lb.l_on = loss_on(mp, n_nodes);
  lb.total = (1.0 - mp.p) * lb.l_off + mp.p * lb.l_on;
  return lb;
}

// Optimal gain for y = a·ReLU(x + ν + b) at fixed (b, σ, p): plain linear
// regression, a = E[x·R]/E[R²] with R = ReLU(x + ν + b).  The b here is the
// rescaled offset (inside the ReLU), i.e. MacroParams::b divided by a.
inline double a_opt(double b, double sigma, double p, bool* degenerate = nullptr) {
  if (degenerate) *degenerate = false;
  auto num_f = [&](double u) { return u * relu_mean(u + b, sigma); };
  auto den_f = [&](double u) { return relu_second_moment(u + b, sigma); };
  double num = p * integrate_adaptive(num_f, 0.0, 1.0, 1e-13);
  double den = (1.0 - p) * relu_second_moment(b, sigma) +
               p * integrate_adaptive(den_f, 0.0, 1.0, 1e-13);
  if (den <= 0.0 || num <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return num / den;
}

struct MacroOptimum {
  double a = 0.0;
  double b = 0.0;
  LossBreakdown loss;
};

// Global minimum over (a ≥ 0, b): coarse grid to escape the a≈0 basin, then
// alternating golden-section over b and the regression formula for a along
// the ray of fixed b/a.
inline MacroOptimum optimize_macro(double sigma, double p,
                                   std::size_t n_nodes = 64) {
  if (sigma < 0.0 || p <= 0.0 || p > 1.0)
    throw std::invalid_argument("optimize_macro: need sigma >= 0, p in (0,1]");
  MacroOptimum best;
  if (sigma == 0.0) {
    best.a = 1.0;
    best.b = 0.0;
    best.loss = LossBreakdown{};
    return best;
  }
  auto eval = [&](double a, double b) {
    return loss_total(MacroParams{a, b, sigma, p}, n_nodes);
  };

  best.a = 0.0;
  best.b = p / 2.0;  // a→0 fallback: constant output at the data mean
  best.loss = eval(best.a, best.b);
  const int na = 41, nb = 41;
  const double b_lo = -10.0 * sigma - 2.0, b_hi = 1.0;
  for (int ia = 0; ia < na; ++ia) {
    double a = std::pow(10.0, -6.0 + 7.2 * ia / (na - 1));  // 1e-6 .. ~16
    for (int ib = 0; ib <= nb; ++ib) {
      double b = ib < nb ? b_lo + (b_hi - b_lo) * ib / (nb - 1) : p / 2.0;
      LossBreakdown lb = eval(a, b);
      if (lb.total < best.loss.total) {
        best.a = a;
        best.b = b;
        best.loss = lb;
      }
    }
  }

  double a = best.a > 0.0 ? best.a : 1e-6;
  double b = best.b;
  double prev = best.loss.total;
  for (int iter = 0; iter < 80; ++iter) {
    // refine b by golden section in an expanding bracket around the incumbent
    double width = std::max(0.05, 0.5 * sigma);
    double lo = b - width, hi = b + width;
    auto fb = [&](double bb) { return eval(a, bb).total; };
    for (int grow = 0; grow < 8; ++grow) {
      double bb = golden_min(fb, lo, hi, 1e-12);
      if (bb - lo < 1e-9 * (hi - lo)) {
        lo -= (hi - lo);
        continue;
      }
      if (hi - bb < 1e-9 * (hi - lo)) {
        hi += (hi - lo);
        continue;
      }
      b = bb;
      break;
    }
    // refine a by the regression formula along the fixed-b/a ray
    if (a > 0.0) {
      double ratio = b / a;
      double a_new = a_opt(ratio, sigma, p);
      if (a_new > 0.0) {
        a = a_new;
        b = a_new * ratio;
      }
    }
    LossBreakdown lb = eval(a, b);
    if (lb.total < best.loss.total) {
      best.a = a;
      best.b = b;
      best.loss = lb;
    }
    if (std::fabs(prev - lb.total) < 1e-10) break;
    prev = lb.total;
  }
  return best;
}

struct RugCurvePoint {
  double r = 0.0;
  double loss = 0.0;  // per-feature
};

// per-feature analytic loss of the rug construction: σ saturates the bound
inline std::vector<RugCurvePoint> rug_loss_curve(
    double p, std::size_t n_s, const std::vector<std::size_t>& n_d_list) {
  std::vector<RugCurvePoint> out;
  out.reserve(n_d_list.size());
  for (std::size_t n_d : n_d_list) {
    double sigma = std::sqrt(sigma_lower_bound(p, n_s, n_d).bound_value);
    MacroOptimum opt = optimize_macro(sigma, p);
    out.push_back({static_cast<double>(n_d) / static_cast<double>(n_s),
                   opt.loss.total});
  }
  return out;
}

struct EmpiricalLoss {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo oracle for loss_total
inline EmpiricalLoss empirical_macro_loss(const MacroParams& mp,
                                          std::size_t n_samples,
                                          std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("empirical_macro_loss: n_samples >= 1");
  SplitMix64 rng(seed);
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    double u = rng.uniform();
    double x = u < mp.p ? u / mp.p : 0.0;
    double nu = rng.normal() * mp.sigma;
    double pre = mp.a * (x + nu) + mp.b;
    double y = pre > 0.0 ? pre : 0.0;
    double d = x - y;
    acc += d * d;
    acc2 += d * d * d * d;
  }
  EmpiricalLoss el;
  const double n = static_cast<double>(n_samples);
  el.mean = acc / n;
  double var = acc2 / n - el.mean * el.mean;
  el.std_error = var > 0.0 ? std::sqrt(var / n) : 0.0;
  return el;
}

// optimal affine rank-n_d reconstruction of isotropic sparse features
inline double linear_optimal_loss(double p, std::size_t n_s, std::size_t n_d) {
  if (n_d > n_s)
    throw std::invalid_argument("linear_optimal_loss: n_d > n_s");
  return static_cast<double>(n_s - n_d) * data_moments(p).variance;
}

struct ScalingRow {
  double p = 0.0;
  double loss = 0.0;
  double ratio_p2 = 0.0;   // L·r/p²
  double ratio_log = 0.0;  // L·r/(p²·log(1/p))
};

// high-sparsity probe at σ² = var(x)·(1/r − 1)
inline std::vector<ScalingRow> scaling_probe(const std::vector<double>& p_list,
                                             double r,
                                             std::size_t n_quad = 64) {
  if (r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("scaling_probe: need 0 < r < 1");
  std::vector<ScalingRow> rows;
  rows.reserve(p_list.size());
  for (double p : p_list) {
    double sigma = std::sqrt(data_moments(p).variance * (1.0 / r - 1.0));
    MacroOptimum opt = optimize_macro(sigma, p, n_quad);
    ScalingRow row;
    row.p = p;
    row.loss = opt.loss.total;
    row.ratio_p2 = opt.loss.total * r / (p * p);
    row.ratio_log = row.ratio_p2 / std::log(1.0 / p);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace toysae
