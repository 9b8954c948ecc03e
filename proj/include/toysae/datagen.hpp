#pragma once

#include <cstdint>
#include <stdexcept>

#include "toysae/matrix.hpp"
#include "toysae/rng.hpp"

namespace toysae {

struct DataConfig {
  double p = 0.05;          // feature-on probability
  std::size_t n_s = 1024;   // sparse dimension
  std::uint64_t seed = 0;
};

struct SparseBatch {
  Matrix data;     // n × n_s
  std::size_t n = 0;
};

struct DataMoments {
  double mean;
  double second_moment;
  double variance;
};

// E[x], E[x²], Var(x) for x = Bernoulli(p)·Uniform[0,1)
inline DataMoments data_moments(double p) {
  return {p / 2.0, p / 3.0, p / 3.0 - p * p / 4.0};
}

// One uniform draw per entry: u < p selects "on" and u/p is the value, so the
// stream position is independent of the realized sparsity pattern.
inline SparseBatch sample_batch(const DataConfig& cfg, std::size_t n) {
  if (cfg.p < 0.0 || cfg.p > 1.0)
    throw std::invalid_argument("sample_batch: p outside [0,1]");
  SparseBatch batch;
  batch.n = n;
  batch.data = Matrix(n, cfg.n_s);
  SplitMix64 rng(cfg.seed);
  double* out = batch.data.data();
  const std::size_t total = n * cfg.n_s;
  for (std::size_t k = 0; k < total; ++k) {
    double u = rng.uniform();
    out[k] = (u < cfg.p) ? u / cfg.p : 0.0;
  }
  return batch;
}

}  // namespace toysae
