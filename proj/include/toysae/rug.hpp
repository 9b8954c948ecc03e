#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toysae/datagen.hpp"
#include "toysae/matrix.hpp"
#include "toysae/rng.hpp"

namespace toysae {

struct RugSpec {
  std::size_t m = 0;            // n_s = 2^m
  std::size_t n_d = 0;
  std::vector<std::size_t> S;   // column subset; empty = sample with seed
  std::uint64_t seed = 0;

  std::size_t n_s() const { return std::size_t{1} << m; }
};

struct SigmaBound {
  double p = 0.0;
  std::size_t n_s = 0, n_d = 0;
  double bound_value = 0.0;  // bound on σ², the per-row interference variance
};

struct NoiseStats {
  double variance = 0.0;  // mean over rows of Var(ν_i)
  double sigma = 0.0;
};

// Sylvester Hadamard, sign = parity of popcount(i AND j); exact ±1 entries
inline Matrix hadamard(std::size_t m) {
  if (m > 13) throw std::invalid_argument("hadamard: m > 13 exceeds memory budget");
  const std::size_t n = std::size_t{1} << m;
  Matrix H(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      H(i, j) = (std::popcount(i & j) & 1U) ? -1.0 : 1.0;
  return H;
}

// deterministic n_d-subset of {0..n_s-1}: partial Fisher-Yates with rejection
// draws, so the subset depends only on (m, n_d, seed)
inline std::vector<std::size_t> sample_subset(std::size_t n_s, std::size_t n_d,
                                              std::uint64_t seed) {
  std::vector<std::size_t> idx(n_s);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t k = 0; k < n_d; ++k) {
    std::size_t j = k + static_cast<std::size_t>(rng.below(n_s - k));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(n_d);
  return idx;
}

inline std::vector<std::size_t> resolve_subset(const RugSpec& spec) {
  const std::size_t n_s = spec.n_s();
  if (spec.n_d < 1 || spec.n_d > n_s)
    throw std::invalid_argument("rug: n_d outside [1, n_s]");
  if (spec.S.empty()) return sample_subset(n_s, spec.n_d, spec.seed);
  if (spec.S.size() != spec.n_d)
    throw std::invalid_argument("rug: |S| != n_d");
  for (std::size_t c : spec.S)
    if (c >= n_s) throw std::invalid_argument("rug: column index out of range");
  return spec.S;
}

// W_in rows are the selected Hadamard columns over √n_d; W_out = W_inᵀ
inline std::pair<Matrix, Matrix> factorize_rug(const RugSpec& spec) {
  const std::size_t n_s = spec.n_s();
  std::vector<std::size_t> S = resolve_subset(spec);
  Matrix H = hadamard(spec.m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n_d));
  Matrix W_in(spec.n_d, n_s);
  for (std::size_t k = 0; k < spec.n_d; ++k)
    for (std::size_t i = 0; i < n_s; ++i) W_in(k, i) = H(i, S[k]) * scale;
  Matrix W_out(n_s, spec.n_d);
  for (std::size_t i = 0; i < n_s; ++i)
    for (std::size_t k = 0; k < spec.n_d; ++k) W_out(i, k) = W_in(k, i);
  return {std::move(W_in), std::move(W_out)};
}

// R_ij = n_d⁻¹ Σ_{k∈S} H_ik H_jk — unit diagonal, rank n_d, R² = (n_s/n_d)R
inline Matrix persian_rug(const RugSpec& spec) {
  auto [W_in, W_out] = factorize_rug(spec);
  return matmul(W_out, W_in);
}

// σ² ≥ (4p−3p²)/12 · (n_s/n_d − 1)
inline SigmaBound sigma_lower_bound(double p, std::size_t n_s, std::size_t n_d) {
  if (n_d < 1 || n_d > n_s)
    throw std::invalid_argument("sigma_lower_bound: need 1 <= n_d <= n_s");
  SigmaBound sb;
  sb.p = p;
  sb.n_s = n_s;
  sb.n_d = n_d;
  sb.bound_value = data_moments(p).variance *
                   (static_cast<double>(n_s) / static_cast<double>(n_d) - 1.0);
  return sb;
}

// mean over rows of Var(ν_i) with rows normalized by their diagonal
inline NoiseStats noise_sigma(const Matrix& W, double p) {
  const std::size_t n = W.rows();
  const double vx = data_moments(p).variance;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = W(i, i);
    if (d == 0.0) throw std::invalid_argument("noise_sigma: zero diagonal entry");
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double w = W(i, j) / d;
      s += w * w;
    }
    acc += vx * s;
  }
  NoiseStats ns;
  ns.variance = acc / static_cast<double>(n);
  ns.sigma = std::sqrt(ns.variance);
  return ns;
}

// binary PGM, entries affinely mapped [min,max] → [0,255]
inline void write_pgm(const Matrix& M, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  double lo = M.data()[0], hi = M.data()[0];
  for (std::size_t k = 0; k < M.size(); ++k) {
    lo = std::min(lo, M.data()[k]);
    hi = std::max(hi, M.data()[k]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::fprintf(f, "P5\n%zu %zu\n255\n", M.cols(), M.rows());
  std::vector<unsigned char> row(M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      double t = (M(i, j) - lo) / span;
      row[j] = static_cast<unsigned char>(std::lround(t * 255.0));
    }
    std::fwrite(row.data(), 1, row.size(), f);
  }
  if (std::fclose(f) != 0)
    throw std::runtime_error("write_pgm: write failure on " + path);
}

}  // namespace toysae
