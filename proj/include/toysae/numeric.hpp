#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace toysae {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

// E[ReLU(z)] for z ~ N(mu, s²); s = 0 degenerates to max(0, mu)
inline double relu_mean(double mu, double s) {
  if (s <= 0.0) return mu > 0.0 ? mu : 0.0;
  double t = mu / s;
  return mu * normal_cdf(t) + s * normal_pdf(t);
}

// E[ReLU(z)²] = (mu²+s²)·Φ(mu/s) + mu·s·φ(mu/s)
inline double relu_second_moment(double mu, double s) {
  if (s <= 0.0) {
    double r = mu > 0.0 ? mu : 0.0;
    return r * r;
  }
  double t = mu / s;
  double v = (mu * mu + s * s) * normal_cdf(t) + mu * s * normal_pdf(t);
  return v > 0.0 ? v : 0.0;  // clip tiny negative round-off in the deep tail
}

// Gauss-Legendre nodes/weights on [-1,1], Newton on the Legendre recurrence
struct QuadRule {
  std::vector<double> nodes, weights;
};

inline const QuadRule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, QuadRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 -
                     (static_cast<double>(k) - 1.0) * p0) /
                    static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

template <typename F>
double integrate(F&& f, double lo, double hi, std::size_t n_nodes) {
  const QuadRule& rule = gauss_legendre(n_nodes);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

namespace detail {

template <typename F>
double integrate_rec(F& f, double lo, double hi, double whole, double tol,
                     std::size_t n_nodes, int depth) {
  double mid = 0.5 * (lo + hi);
  double left = integrate(f, lo, mid, n_nodes);
  double right = integrate(f, mid, hi, n_nodes);
  double err = std::fabs(left + right - whole);
  if (err < tol || depth >= 13) return left + right;
  return integrate_rec(f, lo, mid, left, 0.5 * tol, n_nodes, depth + 1) +
         integrate_rec(f, mid, hi, right, 0.5 * tol, n_nodes, depth + 1);
}

}  // namespace detail

// bisection-adaptive Gauss-Legendre; tol is an absolute error target
template <typename F>
double integrate_adaptive(F&& f, double lo, double hi, double tol = 1e-11,
                          std::size_t n_nodes = 24) {
  if (hi <= lo) return 0.0;
  double whole = integrate(f, lo, hi, n_nodes);
  return detail::integrate_rec(f, lo, hi, whole, tol, n_nodes, 0);
}

// golden-section minimum of a unimodal f on [lo, hi]
template <typename F>
double golden_min(F&& f, double lo, double hi, double tol = 1e-12) {
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace toysae
