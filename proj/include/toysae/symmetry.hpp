#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "toysae/datagen.hpp"
#include "toysae/model.hpp"

namespace toysae {

struct EffectiveStats {
  Matrix W;                              // W_out·W_in, n_s × n_s
  double diag_mean = 0.0;                // the fitted gain a
  double diag_var = 0.0;
  double bias_mean = 0.0;
  double bias_var = 0.0;
  std::vector<double> row_offdiag_mean;  // per-row μ_i before absorption
  std::vector<double> row_offdiag_sumsq;
  double delta_var_noise = 0.0;          // Δvar(ν) across rows
  double lyapunov = 0.0;
};

inline double population_variance(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

inline Matrix effective_matrix(const ToyModel& m) {
  return matmul(m.W_out, m.W_in);
}

inline double diag_fluctuation(const Matrix& W) {
  std::vector<double> d(W.rows());
  for (std::size_t i = 0; i < W.rows(); ++i) d[i] = W(i, i);
  return population_variance(d.data(), d.size());
}

inline double bias_fluctuation(const std::vector<double>& b) {
  return population_variance(b.data(), b.size());
}

inline std::vector<double> row_offdiag_sumsq(const Matrix& W) {
  std::vector<double> s(W.rows(), 0.0);
  for (std::size_t i = 0; i < W.rows(); ++i)
    for (std::size_t j = 0; j < W.cols(); ++j)
      if (j != i) s[i] += W(i, j) * W(i, j);
  return s;
}

// variance across rows of Var(ν_i) = var(x)·Σ_{j≠i} W_ij²
inline double offdiag_symmetry(const Matrix& W, double p) {
  const double vx = data_moments(p).variance;
  std::vector<double> v = row_offdiag_sumsq(W);
  for (double& s : v) s *= vx;
  return population_variance(v.data(), v.size());
}

// max_i Σ_{j≠i}|W_ij|³ / (Σ_{j≠i} W_ij²)^{3/2}; rows with no off-diagonal
// mass are excluded (NaN if every row is excluded)
inline double lyapunov_stat(const Matrix& W, std::size_t* excluded = nullptr) {
  double worst = -1.0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < W.rows(); ++i) {
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t j = 0; j < W.cols(); ++j) {
      if (j == i) continue;
      double w = std::fabs(W(i, j));
      s2 += w * w;
      s3 += w * w * w;
    }
    if (s2 == 0.0) {
      ++skipped;
      continue;
    }
    double ratio = s3 / (s2 * std::sqrt(s2));
    if (ratio > worst) worst = ratio;
  }
  if (excluded) *excluded = skipped;
  if (skipped > 0 && !excluded)
    std::fprintf(stderr,
                 "warning: lyapunov_stat skipped %zu all-zero off-diagonal "
                 "row(s)\n",
                 skipped);
  if (worst < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return worst;
}

inline EffectiveStats stats_report(const ToyModel& m, double p) {
  EffectiveStats st;
  st.W = effective_matrix(m);
  const std::size_t n = st.W.rows();
  std::vector<double> diag(n);
  st.row_offdiag_mean.assign(n, 0.0);
  st.row_offdiag_sumsq.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = st.W(i, i);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += st.W(i, j);
      sumsq += st.W(i, j) * st.W(i, j);
    }
    st.row_offdiag_mean[i] = n > 1 ? sum / static_cast<double>(n - 1) : 0.0;
    st.row_offdiag_sumsq[i] = sumsq;
  }
  st.diag_mean = 0.0;
  for (double d : diag) st.diag_mean += d;
  st.diag_mean /= static_cast<double>(n);
  st.diag_var = population_variance(diag.data(), n);
  st.bias_mean = 0.0;
  for (double v : m.b) st.bias_mean += v;
  if (!m.b.empty()) st.bias_mean /= static_cast<double>(m.b.size());
  st.bias_var = bias_fluctuation(m.b);
  st.delta_var_noise = offdiag_symmetry(st.W, p);
  std::size_t excluded = 0;
  st.lyapunov = lyapunov_stat(st.W, &excluded);
  return st;
}

}  // namespace toysae
