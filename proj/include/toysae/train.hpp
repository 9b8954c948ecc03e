#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toysae/model.hpp"

namespace toysae {

struct TrainConfig {
  std::size_t batch_size = 1024;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t window = 100;     // blocked stopping-rule width
  std::size_t max_steps = 50000;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::size_t steps_taken = 0;
  double final_loss_per_feature = 0.0;
  std::vector<std::pair<std::size_t, double>> loss_trace;  // (step, block mean)
};

struct TrainDivergence : std::runtime_error {
  explicit TrainDivergence(std::size_t step)
      : std::runtime_error("training diverged (non-finite loss) at step " +
                           std::to_string(step)) {}
};

namespace detail {

class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& cfg)
      : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(double* w, const double* g, std::size_t n, std::size_t t) {
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t));
    for (std::size_t k = 0; k < n; ++k) {
      m_[k] = cfg_.adam_beta1 * m_[k] + (1.0 - cfg_.adam_beta1) * g[k];
      v_[k] = cfg_.adam_beta2 * v_[k] + (1.0 - cfg_.adam_beta2) * g[k] * g[k];
      w[k] -= cfg_.learning_rate * (m_[k] / c1) /
              (std::sqrt(v_[k] / c2) + cfg_.adam_eps);
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<double> m_, v_;
};

}  // namespace detail

// fresh i.i.d. batches evaluated with the model's own loss; used for the
// final report so the number is not an average over a moving trajectory
inline double eval_loss_per_feature(const ToyModel& model,
                                    const DataConfig& data_cfg,
                                    std::size_t batch_size,
                                    std::uint64_t eval_seed,
                                    std::size_t n_batches = 32) {
  SplitMix64 root(eval_seed);
  double acc = 0.0;
  for (std::size_t k = 0; k < n_batches; ++k) {
    DataConfig c = data_cfg;
    c.seed = root.derive(k).state();
    acc += loss(model, sample_batch(c, batch_size));
  }
  return acc / static_cast<double>(n_batches) /
         static_cast<double>(data_cfg.n_s);
}

// Adam on fresh batches.  Stops at the first block boundary (every `window`
// steps, from 2·window on) where the last window's mean batch loss is not
// below the previous window's, or at max_steps.
inline std::pair<ToyModel, TrainReport> train(const DataConfig& data_cfg,
                                              std::size_t n_d,
                                              const TrainConfig& cfg) {
  if (n_d < 1) throw std::invalid_argument("train: n_d must be >= 1");
  const std::size_t n_s = data_cfg.n_s;
  SplitMix64 root(cfg.seed);
  SplitMix64 init_rng = root.derive(0);
  SplitMix64 batch_seeds = root.derive(1);
  const std::uint64_t eval_seed = root.derive(2).state();

  ToyModel model;
  model.n_s = n_s;
  model.n_d = n_d;
  model.W_in = Matrix(n_d, n_s);
  model.W_out = Matrix(n_s, n_d);
  model.b.assign(n_s, 0.0);
  const double s_in = 1.0 / std::sqrt(static_cast<double>(n_s));
  const double s_out = 1.0 / std::sqrt(static_cast<double>(n_d));
  for (std::size_t k = 0; k < model.W_in.size(); ++k)
    model.W_in.data()[k] = s_in * init_rng.normal();
  for (std::size_t k = 0; k < model.W_out.size(); ++k)
    model.W_out.data()[k] = s_out * init_rng.normal();

  detail::Adam opt_in(model.W_in.size(), cfg);
  detail::Adam opt_out(model.W_out.size(), cfg);
  detail::Adam opt_b(model.b.size(), cfg);

  TrainReport report;
  Gradients g;
  double block_acc = 0.0;
  double prev_block = 0.0;
  bool have_prev = false;
  std::size_t step = 0;
  while (step < cfg.max_steps) {
    ++step;
    DataConfig c = data_cfg;
    c.seed = batch_seeds.derive(step).state();
    SparseBatch batch = sample_batch(c, cfg.batch_size);
    double L = loss_and_grad(model, batch, g);
    if (!std::isfinite(L)) throw TrainDivergence(step);
    opt_in.step(model.W_in.data(), g.dW_in.data(), model.W_in.size(), step);
    opt_out.step(model.W_out.data(), g.dW_out.data(), model.W_out.size(), step);
    opt_b.step(model.b.data(), g.db.data(), model.b.size(), step);
    block_acc += L;
    if (step % cfg.window == 0) {
      double block_mean = block_acc / static_cast<double>(cfg.window);
      block_acc = 0.0;
      report.loss_trace.emplace_back(step, block_mean);
      if (have_prev && block_mean >= prev_block) break;
      prev_block = block_mean;
      have_prev = true;
    }
  }
  report.steps_taken = step;
  report.final_loss_per_feature =
      eval_loss_per_feature(model, data_cfg, cfg.batch_size, eval_seed);
  return {std::move(model), std::move(report)};
}

}  // namespace toysae
