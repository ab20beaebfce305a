#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "fracsys/harness.hpp"

namespace fracsys {

namespace cli_detail {

inline void print_pair_summary(const EigenPair& pair, double p, bool quiet) {
  if (quiet) return;
  double umax = 0.0, vmax = 0.0;
  for (double x : pair.u.values) umax = std::max(umax, x);
  for (double x : pair.v.values) vmax = std::max(vmax, x);
  std::printf("p            = %g\n", p);
  std::printf("lambda       = %.12g\n", pair.lambda);
  std::printf("lambda^(1/p) = %.12g\n", std::exp(std::log(pair.lambda) / p));
  std::printf("kkt_u, kkt_v = %.3e, %.3e\n", pair.kkt_u, pair.kkt_v);
  std::printf("iterations   = %d\n", pair.iterations);
  std::printf("converged    = %s\n", pair.converged ? "yes" : "no");
  std::printf("max u, max v = %.6g, %.6g\n", umax, vmax);
}

inline std::filesystem::path eig_path(const std::filesystem::path& dir, double p,
                                      char which) {
  return dir / ("eigen_p" + detail::fmt_p(p) + "_" + which + ".txt");
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"First eigenpair of the coupled fractional (r,s)-p-Laplacian "
               "system and its p->infinity limit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "solver RNG seed (overrides config)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* cmd_solve = app.add_subcommand("solve", "solve one p (first sweep entry)");
  auto* cmd_sweep = app.add_subcommand("sweep", "run the ascending p-sweep");
  auto* cmd_limit = app.add_subcommand("limit", "geometric/variational limit eigenvalue");
  auto* cmd_selftest = app.add_subcommand("selftest", "run the property suites");
  // the global options above may appear after the subcommand name
  for (auto* c : {cmd_solve, cmd_sweep, cmd_limit, cmd_selftest}) c->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_selftest->parsed()) return run_selftest(quiet) ? 0 : 1;

    if (config_path.empty()) {
      std::fprintf(stderr, "error: --config is required for this subcommand\n");
      return 2;
    }
    ExperimentConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed_set) cfg.solver.seed = seed;
    const std::filesystem::path dir{cfg.output_dir};
    std::filesystem::create_directories(dir);

    const GridDomain domain = build_domain(cfg);

    if (cmd_limit->parsed()) {
      const InfinityResult res = analyze_limit(domain, cfg.r, cfg.s, cfg.gamma);
      const auto resid = limit_residual(res.extremal_u, res.extremal_v, cfg.gamma,
                                        cfg.r, cfg.s, res.lambda_inf_geometric);
      if (!quiet) {
        std::printf("inradius                 = %.12g\n", res.inradius);
        std::printf("lambda_inf (geometric)   = %.6f\n", res.lambda_inf_geometric);
        std::printf("lambda_inf (variational) = %.6f\n", res.lambda_inf_variational);
        std::printf("cone residual (u, v)     = %.3e, %.3e\n", resid.first,
                    resid.second);
      }
      write_limit_json(res, resid.first, resid.second, dir / "limit.json");
      return 0;
    }

    if (cmd_solve->parsed()) {
      const double p = cfg.sweep_p.front();
      FracParams params{cfg.r, cfg.s, p, cfg.gamma};
      EigenPair pair = minimize_rayleigh(domain, params, init_cone(domain, params),
                                         cfg.solver);
      cli_detail::print_pair_summary(pair, p, quiet);
      write_eigenfunction(pair.u, cli_detail::eig_path(dir, p, 'u'));
      write_eigenfunction(pair.v, cli_detail::eig_path(dir, p, 'v'));
      return pair.converged ? 0 : 1;
    }

    if (cmd_sweep->parsed()) {
      const SweepResult result = run_sweep(cfg, domain, quiet);
      write_sweep_csv(result.records, dir / "sweep.csv");
      for (std::size_t k = 0; k < result.pairs.size(); ++k) {
        const double p = result.records[k].p;
        write_eigenfunction(result.pairs[k].u, cli_detail::eig_path(dir, p, 'u'));
        write_eigenfunction(result.pairs[k].v, cli_detail::eig_path(dir, p, 'v'));
      }
      InfinityResult res = analyze_limit(domain, cfg.r, cfg.s, cfg.gamma);
      write_limit_json(res, result.final_residual_u, result.final_residual_v,
                       dir / "limit.json");
      return result.all_converged ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace fracsys
