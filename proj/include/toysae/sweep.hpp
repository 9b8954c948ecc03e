#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "toysae/rng.hpp"
#include "toysae/rug.hpp"
#include "toysae/symmetry.hpp"
#include "toysae/train.hpp"

namespace toysae {

struct SweepRow {
  double p = 0.0;
  std::size_t n_s = 0, n_d = 0;
  double r = 0.0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double loss_per_feature = 0.0;
  double diag_mean = 0.0, diag_var = 0.0;
  double bias_mean = 0.0, bias_var = 0.0;
  double delta_var_noise = 0.0;
  double lyapunov = 0.0;
  double noise_sigma = 0.0;  // sqrt of mean row interference variance
  double sigma_bound = 0.0;  // sqrt of the closed-form bound
  std::string error;         // empty on success
};

inline const char* sweep_csv_header() {
  return "p,n_s,n_d,r,seed,steps,loss_per_feature,diag_mean,diag_var,"
         "bias_mean,bias_var,delta_var_noise,lyapunov,noise_sigma,sigma_bound,"
         "error";
}

inline std::string to_csv(const SweepRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.12g,%zu,%zu,%.12g,%llu,%zu,%.12g,%.12g,%.12g,%.12g,%.12g,"
                "%.12g,%.12g,%.12g,%.12g,%s",
                row.p, row.n_s, row.n_d, row.r,
                static_cast<unsigned long long>(row.seed), row.steps,
                row.loss_per_feature, row.diag_mean, row.diag_var,
                row.bias_mean, row.bias_var, row.delta_var_noise, row.lyapunov,
                row.noise_sigma, row.sigma_bound, row.error.c_str());
  return buf;
}

struct SweepCell {
  double p = 0.0;
  std::size_t n_s = 0, n_d = 0;
  std::uint64_t seed = 0;
};

// train one cell and collect every per-model statistic the CSV reports
inline SweepRow run_cell(const SweepCell& cell, const TrainConfig& base,
                         ToyModel* model_out = nullptr) {
  SweepRow row;
  row.p = cell.p;
  row.n_s = cell.n_s;
  row.n_d = cell.n_d;
  row.r = static_cast<double>(cell.n_d) / static_cast<double>(cell.n_s);
  row.seed = cell.seed;
  DataConfig dc{cell.p, cell.n_s, cell.seed};
  TrainConfig tc = base;
  tc.seed = cell.seed;
  auto [model, report] = train(dc, cell.n_d, tc);
  row.steps = report.steps_taken;
  row.loss_per_feature = report.final_loss_per_feature;
  EffectiveStats st = stats_report(model, cell.p);
  row.diag_mean = st.diag_mean;
  row.diag_var = st.diag_var;
  row.bias_mean = st.bias_mean;
  row.bias_var = st.bias_var;
  row.delta_var_noise = st.delta_var_noise;
  row.lyapunov = st.lyapunov;
  row.noise_sigma = noise_sigma(st.W, cell.p).sigma;
  row.sigma_bound =
      std::sqrt(sigma_lower_bound(cell.p, cell.n_s, cell.n_d).bound_value);
  if (model_out) *model_out = std::move(model);
  return row;
}

// bounded worker pool; cell order in the output is deterministic regardless
// of scheduling because rows are sorted before writing
inline std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells,
                                       const TrainConfig& base,
                                       std::size_t n_threads) {
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      try {
        rows[k] = run_cell(cells[k], base);
      } catch (const std::exception& e) {
        SweepRow& row = rows[k];
        row.p = cells[k].p;
        row.n_s = cells[k].n_s;
        row.n_d = cells[k].n_d;
        row.r = static_cast<double>(cells[k].n_d) /
                static_cast<double>(cells[k].n_s);
        row.seed = cells[k].seed;
        row.error = e.what();
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.n_s, a.p, a.r, a.seed) < std::tie(b.n_s, b.p, b.r, b.seed);
  });
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << sweep_csv_header() << "\n";
  for (const SweepRow& row : rows) out << to_csv(row) << "\n";
  if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace toysae
