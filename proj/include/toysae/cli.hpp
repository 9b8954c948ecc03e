#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toysae/analytic.hpp"
#include "toysae/config.hpp"
#include "toysae/rug.hpp"
#include "toysae/sweep.hpp"

namespace toysae {

namespace cli_detail {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 1;
};

inline void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "experiment config file")
      ->required();
  sub->add_option("--out", opts.out_dir, "output directory");
  sub->add_option("--seed", opts.seed, "override the config master seed")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  sub->add_option("--threads", opts.threads, "worker pool size");
}

inline std::string out_path(const CommonOpts& opts, const std::string& name) {
  return (std::filesystem::path(opts.out_dir) / name).string();
}

inline void ensure_out_dir(const CommonOpts& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + opts.out_dir);
}

inline TrainConfig train_config_from(const Config& cfg,
                                     const std::string& section) {
  TrainConfig tc;
  tc.batch_size = cfg.get_u64(section, "batch_size", tc.batch_size);
  tc.learning_rate = cfg.get_double(section, "learning_rate", tc.learning_rate);
  tc.adam_beta1 = cfg.get_double(section, "adam_beta1", tc.adam_beta1);
  tc.adam_beta2 = cfg.get_double(section, "adam_beta2", tc.adam_beta2);
  tc.adam_eps = cfg.get_double(section, "adam_eps", tc.adam_eps);
  tc.window = cfg.get_u64(section, "window", tc.window);
  tc.max_steps = cfg.get_u64(section, "max_steps", tc.max_steps);
  return tc;
}

inline std::size_t nd_from_r(double r, std::size_t n_s) {
  double nd = r * static_cast<double>(n_s);
  double rounded = std::round(nd);
  if (std::fabs(nd - rounded) > 1e-9 || rounded < 1.0)
    throw ConfigError("r = " + std::to_string(r) + " does not give an integer n_d at n_s = " +
                      std::to_string(n_s));
  return static_cast<std::size_t>(rounded);
}

inline std::uint64_t master_seed(const Config& cfg, const std::string& section,
                                 const CommonOpts& opts) {
  if (opts.seed_given) return opts.seed;
  return cfg.get_u64(section, "seed", 0);
}

inline int cmd_train(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  const double p = cfg.get_double("train", "p");
  const std::size_t n_s = cfg.get_u64("train", "n_s");
  const std::size_t n_d = cfg.get_u64("train", "n_d");
  TrainConfig tc = train_config_from(cfg, "train");
  SweepCell cell{p, n_s, n_d, master_seed(cfg, "train", opts)};
  ensure_out_dir(opts);
  ToyModel model;
  SweepRow row = run_cell(cell, tc, &model);
  save_model(model, out_path(opts, cfg.get_str("train", "model_file",
                                               "model.tmsw")));
  std::ofstream csv(out_path(opts, cfg.get_str("train", "csv_file", "train.csv")),
                    std::ios::binary);
  csv << sweep_csv_header() << "\n" << to_csv(row) << "\n";
  std::printf("%s\n%s\n", sweep_csv_header(), to_csv(row).c_str());
  return 0;
}

inline int cmd_sweep(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  const std::vector<double> p_list = cfg.get_double_list("sweep", "p_list");
  const auto n_s_list = cfg.get_u64_list("sweep", "n_s_list");
  const std::vector<double> r_list = cfg.get_double_list("sweep", "r_list");
  const std::uint64_t replicates = cfg.get_u64("sweep", "replicates", 1);
  const std::uint64_t master = master_seed(cfg, "sweep", opts);
  TrainConfig tc = train_config_from(cfg, "sweep");
  std::vector<SweepCell> cells;
  for (std::uint64_t n_s : n_s_list)
    for (double p : p_list)
      for (double r : r_list) {
        std::size_t n_d = nd_from_r(r, n_s);
        for (std::uint64_t rep = 0; rep < replicates; ++rep)
          cells.push_back({p, static_cast<std::size_t>(n_s), n_d,
                           cell_seed(master, p, n_s, n_d, rep)});
      }
  ensure_out_dir(opts);
  std::vector<SweepRow> rows = run_sweep(cells, tc, opts.threads);
  write_sweep_csv(rows, out_path(opts, cfg.get_str("sweep", "csv_file",
                                                   "sweep.csv")));
  std::printf("wrote %zu rows\n", rows.size());
  return 0;
}

inline int cmd_rug(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  const std::size_t n_s = cfg.get_u64("rug", "n_s");
  if (n_s == 0 || (n_s & (n_s - 1)) != 0)
    throw ConfigError("rug: n_s must be a power of two");
  RugSpec spec;
  spec.m = static_cast<std::size_t>(std::countr_zero(n_s));
  spec.n_d = cfg.get_u64("rug", "n_d");
  spec.seed = master_seed(cfg, "rug", opts);
  if (cfg.has("rug", "columns"))
    for (std::uint64_t c : cfg.get_u64_list("rug", "columns"))
      spec.S.push_back(static_cast<std::size_t>(c));
  const double p = cfg.get_double("rug", "p");
  Matrix R = persian_rug(spec);
  ensure_out_dir(opts);
  write_pgm(R, out_path(opts, cfg.get_str("rug", "image_file", "rug.pgm")));
  NoiseStats noise = noise_sigma(R, p);
  SigmaBound sb = sigma_lower_bound(p, n_s, spec.n_d);
  MacroOptimum opt = optimize_macro(std::sqrt(sb.bound_value), p);
  std::ofstream csv(out_path(opts, cfg.get_str("rug", "csv_file", "rug.csv")),
                    std::ios::binary);
  char line[160];
  std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g", noise.sigma,
                std::sqrt(sb.bound_value), opt.loss.total);
  csv << "sigma,bound,loss\n" << line << "\n";
  std::printf("sigma,bound,loss\n%s\n", line);
  return 0;
}

inline int cmd_compare(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  const double p = cfg.get_double("compare", "p");
  const std::size_t n_s = cfg.get_u64("compare", "n_s");
  const auto n_d_list = cfg.get_u64_list("compare", "n_d_list");
  const std::uint64_t master = master_seed(cfg, "compare", opts);
  TrainConfig tc = train_config_from(cfg, "compare");
  std::vector<SweepCell> cells;
  std::vector<std::size_t> nds;
  for (std::uint64_t n_d : n_d_list) {
    nds.push_back(static_cast<std::size_t>(n_d));
    cells.push_back({p, n_s, static_cast<std::size_t>(n_d),
                     cell_seed(master, p, n_s, n_d, 0)});
  }
  ensure_out_dir(opts);
  std::vector<SweepRow> rows = run_sweep(cells, tc, opts.threads);
  std::vector<RugCurvePoint> rug = rug_loss_curve(p, n_s, nds);
  const double vx = data_moments(p).variance;
  std::ofstream csv(out_path(opts, cfg.get_str("compare", "csv_file",
                                               "compare.csv")),
                    std::ios::binary);
  csv << "r,trained_loss,rug_loss,linear_loss\n";
  std::printf("r,trained_loss,rug_loss,linear_loss\n");
  for (const SweepRow& row : rows) {
    if (!row.error.empty())
      throw std::runtime_error("training cell failed: " + row.error);
    double rug_loss = 0.0;
    for (const RugCurvePoint& pt : rug)
      if (std::fabs(pt.r - row.r) < 1e-12) rug_loss = pt.loss;
    char line[160];
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g", row.r,
                  row.loss_per_feature, rug_loss, (1.0 - row.r) * vx);
    csv << line << "\n";
    std::printf("%s\n", line);
  }
  return 0;
}

inline int cmd_scaling(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  const std::vector<double> p_list = cfg.get_double_list("scaling", "p_list");
  const double r = cfg.get_double("scaling", "r");
  const std::size_t n_quad = cfg.get_u64("scaling", "n_quad", 64);
  std::vector<ScalingRow> rows = scaling_probe(p_list, r, n_quad);
  ensure_out_dir(opts);
  std::ofstream csv(out_path(opts, cfg.get_str("scaling", "csv_file",
                                               "scaling.csv")),
                    std::ios::binary);
  csv << "p,loss,ratio_p2,ratio_log\n";
  std::printf("p,loss,ratio_p2,ratio_log\n");
  for (const ScalingRow& row : rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g", row.p,
                  row.loss, row.ratio_p2, row.ratio_log);
    csv << line << "\n";
    std::printf("%s\n", line);
  }
  return 0;
}

inline int cmd_stats(const CommonOpts& opts) {
  Config cfg = Config::parse_file(opts.config_path);
  ToyModel model = load_model(cfg.get_str("stats", "model"));
  const double p = cfg.get_double("stats", "p");
  EffectiveStats st = stats_report(model, p);
  NoiseStats noise = noise_sigma(st.W, p);
  SigmaBound sb = sigma_lower_bound(p, model.n_s, model.n_d);
  std::printf("n_s=%zu\nn_d=%zu\n", model.n_s, model.n_d);
  std::printf("diag_mean=%.12g\ndiag_var=%.12g\n", st.diag_mean, st.diag_var);
  std::printf("bias_mean=%.12g\nbias_var=%.12g\n", st.bias_mean, st.bias_var);
  std::printf("delta_var_noise=%.12g\nlyapunov=%.12g\n", st.delta_var_noise,
              st.lyapunov);
  std::printf("noise_sigma=%.12g\nsigma_bound=%.12g\n", noise.sigma,
              std::sqrt(sb.bound_value));
  return 0;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
  using namespace cli_detail;
  CLI::App app{"sparse ReLU autoencoder lab: training, symmetry diagnostics, "
               "rug construction, analytic loss"};
  app.require_subcommand(1);
  CommonOpts opts;
  CLI::App* sub_train =
      app.add_subcommand("train", "train one model; emit TMSW weights + CSV row");
  CLI::App* sub_sweep =
      app.add_subcommand("sweep", "train a (p, r, n_s, seed) grid; emit CSV");
  CLI::App* sub_rug =
      app.add_subcommand("rug", "build the rug matrix; emit PGM + loss row");
  CLI::App* sub_compare = app.add_subcommand(
      "compare", "trained vs analytic rug vs linear loss across r");
  CLI::App* sub_scaling =
      app.add_subcommand("scaling", "high-sparsity loss-scaling probe");
  CLI::App* sub_stats =
      app.add_subcommand("stats", "recompute diagnostics from a TMSW file");
  for (CLI::App* sub : {sub_train, sub_sweep, sub_rug, sub_compare, sub_scaling,
                        sub_stats})
    add_common(sub, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  try {
    if (sub_train->parsed()) return cmd_train(opts);
    if (sub_sweep->parsed()) return cmd_sweep(opts);
    if (sub_rug->parsed()) return cmd_rug(opts);
    if (sub_compare->parsed()) return cmd_compare(opts);
    if (sub_scaling->parsed()) return cmd_scaling(opts);
    if (sub_stats->parsed()) return cmd_stats(opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::fprintf(stderr, "error: no subcommand\n");
  return 1;
}

}  // namespace toysae
