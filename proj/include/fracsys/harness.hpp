#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsys/core.hpp"
#include "fracsys/eigensolver.hpp"
#include "fracsys/energy.hpp"
#include "fracsys/geometry.hpp"
#include "fracsys/infinity.hpp"

namespace fracsys {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepRecord {
  double p{0.0};
  double alpha{0.0};
  double beta{0.0};
  double lambda{0.0};
  double lambda_root{0.0};
  double lambda_inf{0.0};
  double abs_err{0.0};
  int iterations{0};
  double kkt_u{0.0};
  double kkt_v{0.0};
  bool converged{false};
  double wall_time_s{0.0};
};

struct DomainSpec {
  DomainKind kind{DomainKind::interval};
  double a{0.0}, b{1.0};    // interval
  Vec2 center{};            // disk
  double radius{1.0};       // disk
  Vec2 lo{}, hi{};          // box
};

struct GridSpec {
  int n{0};          // 1D node count
  double h{0.0};     // 2D spacing
  double collar_width{0.0};
};

struct ExperimentConfig {
  DomainSpec domain;
  GridSpec grid;
  double r{0.5}, s{0.5}, gamma{0.5};
  std::vector<double> sweep_p;
  SolverOptions solver;
  std::string output_dir{"out"};
  std::vector<std::string> formats{"csv", "eigenfunctions", "limit"};

  void validate() const {
    if (!(r > 0.0 && r < 1.0) || !(s > 0.0 && s < 1.0) ||
        !(gamma > 0.0 && gamma < 1.0))
      throw ConfigError("config: r, s, gamma must lie in (0,1)");
    if (sweep_p.empty()) throw ConfigError("config: sweep.p must be nonempty");
    const int dim = domain.kind == DomainKind::interval ? 1 : 2;
    double prev = 1.0;
    for (double p : sweep_p) {
      if (!(p > prev))
        throw ConfigError("config: sweep.p must be strictly increasing and > 1 "
                          "(ascending warm starts)");
      prev = p;
      FracParams fp{r, s, p, gamma};
      try {
        fp.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config: p = ") + std::to_string(p) + ": " +
                          e.what());
      }
      if (!fp.limit_admissible(dim))
        throw ConfigError("config: p = " + std::to_string(p) +
                          " violates p*min(r,s) >= N");
    }
    if (domain.kind == DomainKind::interval) {
      if (grid.n < 3) throw ConfigError("config: grid.n must be >= 3 for intervals");
    } else {
      if (!(grid.h > 0.0)) throw ConfigError("config: grid.h must be positive");
      if (!(grid.collar_width > 0.0))
        throw ConfigError("config: grid.collar_width must be positive");
    }
    try {
      solver.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: solver: ") + e.what());
    }
  }
};

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    const auto& dom = j.at("domain");
    const std::string kind = dom.at("kind").get<std::string>();
    if (kind == "interval") {
      cfg.domain.kind = DomainKind::interval;
      cfg.domain.a = dom.at("a").get<double>();
      cfg.domain.b = dom.at("b").get<double>();
    } else if (kind == "disk") {
      cfg.domain.kind = DomainKind::disk;
      const auto c = dom.at("center");
      cfg.domain.center = {c.at(0).get<double>(), c.at(1).get<double>()};
      cfg.domain.radius = dom.at("radius").get<double>();
    } else if (kind == "box") {
      cfg.domain.kind = DomainKind::box;
      const auto lo = dom.at("lo");
      const auto hi = dom.at("hi");
      cfg.domain.lo = {lo.at(0).get<double>(), lo.at(1).get<double>()};
      cfg.domain.hi = {hi.at(0).get<double>(), hi.at(1).get<double>()};
    } else {
      throw ConfigError("config: domain.kind must be interval, disk, or box");
    }

    const auto& grid = j.at("grid");
    if (grid.contains("n")) cfg.grid.n = grid.at("n").get<int>();
    if (grid.contains("h")) cfg.grid.h = grid.at("h").get<double>();
    if (grid.contains("collar_width"))
      cfg.grid.collar_width = grid.at("collar_width").get<double>();

    const auto& frac = j.at("fractional");
    cfg.r = frac.at("r").get<double>();
    cfg.s = frac.at("s").get<double>();
    cfg.gamma = frac.at("gamma").get<double>();

    cfg.sweep_p = j.at("sweep").at("p").get<std::vector<double>>();

    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("max_iterations")) cfg.solver.max_iterations = s.at("max_iterations").get<int>();
      if (s.contains("tol_quotient")) cfg.solver.tol_quotient = s.at("tol_quotient").get<double>();
      if (s.contains("tol_kkt")) cfg.solver.tol_kkt = s.at("tol_kkt").get<double>();
      if (s.contains("initial_step")) cfg.solver.initial_step = s.at("initial_step").get<double>();
      if (s.contains("backtrack")) cfg.solver.backtrack = s.at("backtrack").get<double>();
      if (s.contains("armijo_c")) cfg.solver.armijo_c = s.at("armijo_c").get<double>();
      if (s.contains("seed")) cfg.solver.seed = s.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("directory")) cfg.output_dir = o.at("directory").get<std::string>();
      if (o.contains("formats")) cfg.formats = o.at("formats").get<std::vector<std::string>>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  return parse_config(j);
}

inline GridDomain build_domain(const ExperimentConfig& cfg) {
  switch (cfg.domain.kind) {
    case DomainKind::interval:
      return build_interval(cfg.domain.a, cfg.domain.b, cfg.grid.n);
    case DomainKind::disk:
      return build_disk(cfg.domain.center, cfg.domain.radius, cfg.grid.h,
                        cfg.grid.collar_width);
    case DomainKind::box:
      return build_box(cfg.domain.lo, cfg.domain.hi, cfg.grid.h,
                       cfg.grid.collar_width);
  }
  throw ConfigError("config: unreachable domain kind");
}

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<EigenPair> pairs;
  // Uniform-convergence diagnostic: sup distance between successive pairs.
  std::vector<double> successive_sup_distance;
  double lambda_inf{0.0};
  double final_residual_u{0.0};
  double final_residual_v{0.0};
  bool all_converged{true};
};

// Ascending continuation in p: each solve warm-starts from the previous
// eigenpair; the first uses the extremal cone initialization.
inline SweepResult run_sweep(const ExperimentConfig& cfg, const GridDomain& domain,
                             bool quiet = true) {
  SweepResult result;
  result.lambda_inf = lambda_infinity_geometric(domain, cfg.gamma, cfg.r, cfg.s);

  std::optional<EigenPair> prev;
  for (double p : cfg.sweep_p) {
    FracParams params{cfg.r, cfg.s, p, cfg.gamma};
    std::pair<GridFunction, GridFunction> init =
        prev ? std::pair{prev->u, prev->v} : init_cone(domain, params);

    const auto t0 = std::chrono::steady_clock::now();
    EigenPair pair = minimize_rayleigh(domain, params, std::move(init), cfg.solver);
    const auto t1 = std::chrono::steady_clock::now();

    SweepRecord rec;
    rec.p = p;
    rec.alpha = params.alpha();
    rec.beta = params.beta();
    rec.lambda = pair.lambda;
    rec.lambda_root = std::exp(std::log(pair.lambda) / p);
    rec.lambda_inf = result.lambda_inf;
    rec.abs_err = std::abs(rec.lambda_root - rec.lambda_inf);
    rec.iterations = pair.iterations;
    rec.kkt_u = pair.kkt_u;
    rec.kkt_v = pair.kkt_v;
    rec.converged = pair.converged;
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    result.all_converged = result.all_converged && pair.converged;
    if (!quiet)
      std::fprintf(stderr,
                   "p=%-6g lambda^(1/p)=%.8f |err|=%.3e iters=%d converged=%d\n",
                   p, rec.lambda_root, rec.abs_err, rec.iterations,
                   pair.converged ? 1 : 0);

    if (prev) {
      double dsup = 0.0;
      for (std::size_t i = 0; i < domain.size(); ++i) {
        dsup = std::max(dsup, std::abs(pair.u.values[i] - prev->u.values[i]));
        dsup = std::max(dsup, std::abs(pair.v.values[i] - prev->v.values[i]));
      }
      result.successive_sup_distance.push_back(dsup);
    }
    result.records.push_back(rec);
    prev = pair;
    result.pairs.push_back(std::move(pair));
  }

  const EigenPair& last = result.pairs.back();
  const auto res = limit_residual(last.u, last.v, cfg.gamma, cfg.r, cfg.s,
                                  result.lambda_inf);
  result.final_residual_u = res.first;
  result.final_residual_v = res.second;
  return result;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_p(double p) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace detail

inline void write_sweep_csv(const std::vector<SweepRecord>& records,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "p,alpha,beta,lambda,lambda_root,lambda_inf,abs_err,iterations,"
         "kkt_u,kkt_v,converged,wall_time_s\n";
  for (const auto& r : records) {
    out << detail::fmt_double(r.p) << ',' << detail::fmt_double(r.alpha) << ','
        << detail::fmt_double(r.beta) << ',' << detail::fmt_double(r.lambda) << ','
        << detail::fmt_double(r.lambda_root) << ','
        << detail::fmt_double(r.lambda_inf) << ','
        << detail::fmt_double(r.abs_err) << ',' << r.iterations << ','
        << detail::fmt_double(r.kkt_u) << ',' << detail::fmt_double(r.kkt_v) << ','
        << (r.converged ? 1 : 0) << ',' << detail::fmt_double(r.wall_time_s)
        << '\n';
  }
}

inline void write_eigenfunction(const GridFunction& w,
                                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < w.values.size(); ++i)
    out << i << ' ' << detail::fmt_double(w.values[i]) << '\n';
}

inline void write_limit_json(const InfinityResult& res, double residual_u,
                             double residual_v,
                             const std::filesystem::path& path) {
  nlohmann::json j;
  j["lambda_inf_geometric"] = res.lambda_inf_geometric;
  j["lambda_inf_variational"] = res.lambda_inf_variational;
  j["inradius"] = res.inradius;
  j["gamma"] = res.gamma;
  j["r"] = res.r;
  j["s"] = res.s;
  j["residual_u"] = residual_u;
  j["residual_v"] = residual_v;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Extremal cone analysis of the limit problem on a domain.
inline InfinityResult analyze_limit(const GridDomain& domain, double r, double s,
                                    double gamma) {
  InfinityResult res;
  res.gamma = gamma;
  res.r = r;
  res.s = s;
  res.inradius = domain.inradius;
  res.argmax_node = domain.argmax_node;
  res.lambda_inf_geometric = lambda_infinity_geometric(domain, gamma, r, s);
  FracParams params{r, s, std::max(2.0, 1.0 / std::min(gamma, 1.0 - gamma)), gamma};
  auto cone = init_cone(domain, params);
  res.extremal_u = std::move(cone.first);
  res.extremal_v = std::move(cone.second);
  res.lambda_inf_variational =
      lambda_infinity_variational(res.extremal_u, res.extremal_v, gamma, r, s);
  return res;
}

// ---------------------------------------------------------------------------
// Self-test property suites.

namespace selftest_detail {

inline GridFunction random_function(const GridDomain& d, std::mt19937_64& rng,
                                    bool positive) {
  std::uniform_real_distribution<double> unif(positive ? 0.05 : -1.0, 1.0);
  GridFunction w = zeros(d);
  for (double& v : w.values) v = unif(rng);
  return w;
}

inline bool suite_picone() {
  const GridDomain d = build_interval(0.0, 1.0, 9);
  std::mt19937_64 rng(7);
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    for (int k = 0; k < 500; ++k) {
      GridFunction phi = random_function(d, rng, true);
      GridFunction psi = random_function(d, rng, true);
      for (double& v : phi.values) v = std::abs(v) - 0.05;  // allow zeros
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) pairs.push_back({i, j});
      for (double L : picone(phi, psi, p, pairs))
        if (L < -1e-10) return false;
    }
  }
  return true;
}

inline bool suite_poincare() {
  const GridDomain d = build_interval(0.0, 1.0, 33);
  std::mt19937_64 rng(11);
  for (auto [t, p] : std::vector<std::pair<double, double>>{{0.5, 2.0}, {0.3, 3.0}, {0.7, 4.0}}) {
    for (int k = 0; k < 100; ++k) {
      const GridFunction w = random_function(d, rng, false);
      if (!poincare_check(w, t, p).holds) return false;
    }
  }
  return true;
}

inline bool suite_gradient() {
  const GridDomain d = build_interval(0.0, 1.0, 12);
  std::mt19937_64 rng(13);
  const double hN = d.cell_volume;
  for (double p : {2.0, 3.0}) {
    for (int k = 0; k < 5; ++k) {
      const GridFunction w = random_function(d, rng, false);
      const GridFunction g = frac_p_laplacian_apply(w, 0.5, p);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double eps = 1e-6;
        GridFunction wp = w, wm = w;
        wp.values[i] += eps;
        wm.values[i] -= eps;
        const double fd = (seminorm_p(wp, 0.5, p) - seminorm_p(wm, 0.5, p)) /
                          (2.0 * eps * p * hN);
        const double scale = std::max(1.0, std::abs(g.values[i]));
        if (std::abs(fd - g.values[i]) / scale > 1e-5) return false;
      }
    }
  }
  return true;
}

inline bool suite_embedding() {
  const GridDomain d = build_interval(0.0, 1.0, 17);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const GridFunction w = random_function(d, rng, false);
    if (!embedding_check(w, 0.9, 40.0, 20.0)) return false;
  }
  return true;
}

inline bool suite_cone() {
  const GridDomain d = build_interval(0.0, 1.0, 41);
  const double r = 0.3, s = 0.6, gamma = 0.5;
  const InfinityResult res = analyze_limit(d, r, s, gamma);
  if (std::abs(res.lambda_inf_variational - res.lambda_inf_geometric) > 1e-9)
    return false;
  const auto resid = limit_residual(res.extremal_u, res.extremal_v, gamma, r, s,
                                    res.lambda_inf_geometric);
  const ViscosityOps apex = viscosity_ops(res.extremal_u, r, d.argmax_node);
  const double prod = 1.0;  // u0^g v0^(1-g) at the apex
  const double apex_res =
      std::abs(std::min(apex.l, apex.lplus - res.lambda_inf_geometric * prod));
  (void)resid;
  return apex_res <= 1e-9;
}

}  // namespace selftest_detail

inline bool run_selftest(bool quiet) {
  struct Suite {
    const char* name;
    bool (*fn)();
  };
  const Suite suites[] = {
      {"picone", selftest_detail::suite_picone},
      {"poincare", selftest_detail::suite_poincare},
      {"gradient", selftest_detail::suite_gradient},
      {"embedding", selftest_detail::suite_embedding},
      {"cone", selftest_detail::suite_cone},
  };
  std::vector<std::future<bool>> futures;
  for (const auto& s : suites)
    futures.push_back(std::async(std::launch::async, s.fn));
  bool ok = true;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const bool pass = futures[i].get();
    ok = ok && pass;
    if (!quiet)
      std::fprintf(stderr, "selftest %-10s %s\n", suites[i].name,
                   pass ? "pass" : "FAIL");
  }
  return ok;
}

}  // namespace fracsys
