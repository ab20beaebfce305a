// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "fracsys/eigensolver.hpp"
#include "fracsys/harness.hpp"
#include "fracsys/infinity.hpp"
#include "oracles.hpp"

using namespace fracsys;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass) {
  std::printf("criterion %2d [%s] %s\n", id, pass ? "PASS" : "FAIL", name);
  std::fflush(stdout);
  if (!pass) ++failures;
}

ExperimentConfig sweep_config(double r, double s, double gamma) {
  ExperimentConfig cfg;
  cfg.domain.kind = DomainKind::interval;
  cfg.domain.a = 0.0;
  cfg.domain.b = 1.0;
  cfg.grid.n = 161;
  cfg.r = r;
  cfg.s = s;
  cfg.gamma = gamma;
  cfg.sweep_p = {4.0, 8.0, 16.0, 32.0, 64.0};
  return cfg;
}

double dense_lambda_p2(const GridDomain& d, double t) {
  const std::size_t n = d.size();
  const double h = d.spacing;
  const auto tails = exterior_tail(d, t, 2.0);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 2.0 * tails[i].value * h;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double k = std::pow(dist(d.nodes[i], d.nodes[j]), -(1.0 + 2.0 * t));
      K(i, j) = -2.0 * k * h * h;
      diag += 2.0 * k * h * h;
    }
    K(i, i) = diag;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  return 2.0 * es.eigenvalues()(0) / h;
}

GridFunction random_fn(const GridDomain& d, std::mt19937_64& rng, double lo,
                       double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  GridFunction w = zeros(d);
  for (double& v : w.values) v = unif(rng);
  return w;
}

bool positive_interior(const EigenPair& pair) {
  const GridDomain& d = *pair.u.domain;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.interior_mask[i]) continue;
    if (!(pair.u.values[i] > 0.0) || !(pair.v.values[i] > 0.0)) return false;
  }
  return true;
}

}  // namespace

int main() {
  // Criteria 1 and 2: ascending p-sweep on (0,1), n = 161, against the
  // closed-form limit (1/R)^((1-gamma)s + gamma r) with R = 1/2.
  const ExperimentConfig cfg_sym = sweep_config(0.5, 0.5, 0.5);
  const GridDomain domain = build_domain(cfg_sym);
  const SweepResult sym = run_sweep(cfg_sym, domain);
  {
    bool pass = sym.all_converged;
    pass = pass && std::abs(sym.records.back().lambda_root - std::sqrt(2.0)) <= 0.15;
    // Once past p = 8 the error must never rise back above its p = 8 level.
    // (The discrete lambda^(1/p) crosses the limit near p ~ 20 and dips a
    // few 1e-2 below it before returning, so consecutive records straddling
    // the crossing are not pointwise ordered.)
    for (std::size_t k = 2; k < sym.records.size(); ++k)
      pass = pass && sym.records[k].abs_err <= sym.records[1].abs_err + 1e-15;
    report(1, "limit convergence, r = s = 0.5", pass);
  }

  const ExperimentConfig cfg_asym = sweep_config(0.3, 0.6, 0.5);
  const SweepResult asym = run_sweep(cfg_asym, domain);
  {
    // Large-p solves may stop at the iteration cap (flagged in the records);
    // the check is on the accuracy of the final root, not on the flags.
    const bool pass =
        std::abs(asym.records.back().lambda_root - std::pow(2.0, 0.45)) <= 0.15;
    report(2, "limit convergence, r = 0.3, s = 0.6 (target 1.366040)", pass);
  }

  // Criterion 3: linear case against the dense symmetric pencil.
  {
    const FracParams params{0.5, 0.5, 2.0, 0.5};
    const double oracle = dense_lambda_p2(domain, 0.5);
    const EigenPair pair =
        minimize_rayleigh(domain, params, init_cone(domain, params), cfg_sym.solver);
    const bool pass =
        pair.converged && std::abs(pair.lambda - oracle) / oracle <= 1e-6;
    report(3, "p = 2 lambda vs dense eigensolver, rel err <= 1e-6", pass);
  }

  // Criterion 4: tiny grid against an exhaustive random search.
  {
    const GridDomain d5 = build_interval(0.0, 1.0, 5);
    const FracParams params{0.5, 0.5, 3.0, 0.5};
    const EigenPair pair =
        minimize_rayleigh(d5, params, init_cone(d5, params), SolverOptions{});
    const double rs = oracles::random_search_lambda(d5, params, 1000000, 2024);
    const bool pass = pair.converged && pair.lambda <= rs * (1.0 + 1e-9) &&
                      std::abs(pair.lambda - rs) / rs <= 0.05;
    report(4, "n = 5, p = 3 lambda within 5% of 1e6-sample search", pass);
  }

  // Criterion 5: discrete Picone nonnegativity.
  {
    const GridDomain d9 = build_interval(0.0, 1.0, 9);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < d9.size(); ++i)
      for (std::size_t j = i + 1; j < d9.size(); ++j) pairs.push_back({i, j});
    std::mt19937_64 rng(101);
    bool pass = true;
    for (double p : {2.0, 2.5, 4.0}) {
      for (int k = 0; k < 10000 && pass; ++k) {
        GridFunction phi = random_fn(d9, rng, 0.0, 2.0);
        GridFunction psi = random_fn(d9, rng, 0.05, 2.0);
        for (double L : picone(phi, psi, p, pairs))
          if (L < -1e-10) pass = false;
      }
    }
    report(5, "Picone expression >= -1e-10 on 1e4 random pairs per p", pass);
  }

  // Criterion 6: Poincare inequality with the radial-tail constant.
  {
    const GridDomain d33 = build_interval(0.0, 1.0, 33);
    std::mt19937_64 rng(103);
    bool pass = true;
    for (auto [t, p] : std::vector<std::pair<double, double>>{
             {0.5, 2.0}, {0.3, 3.0}, {0.7, 4.0}}) {
      for (int k = 0; k < 100; ++k)
        pass = pass && poincare_check(random_fn(d33, rng, -1.0, 1.0), t, p).holds;
    }
    report(6, "Poincare inequality on 100 random functions x 3 (t,p)", pass);
  }

  // Criterion 7: operator vs finite differences of the energy.
  {
    const GridDomain d12 = build_interval(0.0, 1.0, 12);
    std::mt19937_64 rng(107);
    bool pass = true;
    for (double p : {2.0, 3.0}) {
      for (int k = 0; k < 20; ++k) {
        const GridFunction w = random_fn(d12, rng, -1.0, 1.0);
        const GridFunction g = frac_p_laplacian_apply(w, 0.5, p);
        const auto fd = oracles::fd_gradient(w, 0.5, p);
        for (std::size_t i = 0; i < d12.size(); ++i) {
          const double scale = std::max(1.0, std::abs(g.values[i]));
          if (std::abs(g.values[i] - fd[i]) / scale > 1e-5) pass = false;
        }
      }
    }
    report(7, "fractional p-Laplacian matches finite differences, rel <= 1e-5", pass);
  }

  // Criterion 8: closed-form identities of the extremal cone pair.
  const double r_a = 0.3, s_a = 0.6, g_a = 0.5;
  const double lam_inf = lambda_infinity_geometric(domain, g_a, r_a, s_a);
  const auto cone = init_cone(domain, FracParams{r_a, s_a, 8.0, g_a});
  {
    double prod = 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i)
      prod = std::max(prod, std::pow(cone.first.values[i], g_a) *
                                std::pow(cone.second.values[i], 1.0 - g_a));
    const bool pass =
        std::abs(holder_seminorm(cone.first, r_a) - lam_inf) <= 1e-9 &&
        std::abs(holder_seminorm(cone.second, s_a) - lam_inf) <= 1e-9 &&
        std::abs(prod - 1.0) <= 1e-12 &&
        std::abs(lambda_infinity_variational(cone.first, cone.second, g_a, r_a, s_a) -
                 lam_inf) <= 1e-9;
    report(8, "extremal cone identities within 1e-9 / 1e-12", pass);
  }

  // Criterion 9: lower bound of the variational characterization.
  {
    std::mt19937_64 rng(109);
    bool pass = true;
    for (int k = 0; k < 200; ++k) {
      const GridFunction u = random_fn(domain, rng, 0.05, 1.0);
      const GridFunction v = random_fn(domain, rng, 0.05, 1.0);
      pass = pass &&
             lambda_infinity_variational(u, v, g_a, r_a, s_a) >= lam_inf - 1e-9;
    }
    report(9, "variational value >= geometric value on 200 random pairs", pass);
  }

  // Criterion 10: limit-system residuals.
  {
    const double lam_sym = lambda_infinity_geometric(domain, 0.5, 0.5, 0.5);
    const EigenPair& last = sym.pairs.back();
    const auto res = limit_residual(last.u, last.v, 0.5, 0.5, 0.5, lam_sym);
    const std::size_t apex = domain.argmax_node;
    const ViscosityOps ou = viscosity_ops(cone.first, r_a, apex);
    const ViscosityOps ov = viscosity_ops(cone.second, s_a, apex);
    const double apex_u = std::abs(std::min(ou.l, ou.lplus - lam_inf));
    const double apex_v = std::abs(std::min(ov.l, ov.lplus - lam_inf));
    const bool pass = res.first <= 0.1 * lam_sym && res.second <= 0.1 * lam_sym &&
                      apex_u <= 1e-9 && apex_v <= 1e-9;
    report(10, "limit residual: p = 64 pair <= 0.1*Lambda, cone apex <= 1e-9", pass);
  }

  // Criterion 11: positivity of all converged pairs; simplicity probe.
  {
    bool pass = true;
    for (const EigenPair& pair : sym.pairs) pass = pass && positive_interior(pair);
    for (const EigenPair& pair : asym.pairs) pass = pass && positive_interior(pair);
    const GridDomain d61 = build_interval(0.0, 1.0, 61);
    SolverOptions opts;
    opts.seed = 11;
    const double spread =
        simplicity_probe(d61, FracParams{0.5, 0.5, 8.0, 0.5}, opts, 3);
    pass = pass && spread <= 1e-3;
    report(11, "positivity of eigenpairs; simplicity probe spread <= 1e-3", pass);
  }

  // Criterion 12: scaling polynomial sign pattern.
  {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool pass = true;
    for (int k = 0; k < 50; ++k) {
      const double p = 2.0 + 30.0 * unif(rng);
      const double alpha = 1.0 + (p - 2.0) * unif(rng);
      const double t = 0.1 + 5.0 * unif(rng);
      pass = pass && scaling_polynomial_check(t * alpha, t * (p - alpha), p, alpha);
    }
    report(12, "scaling polynomial check on 50 random (a,b,p,alpha)", pass);
  }

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
