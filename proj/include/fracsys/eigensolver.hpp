#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fracsys/core.hpp"
#include "fracsys/energy.hpp"
#include "fracsys/geometry.hpp"

namespace fracsys {

struct SolverOptions {
  int max_iterations{50000};
  double tol_quotient{1e-12};  // relative decrease of the log-quotient
  double tol_kkt{1e-5};        // KKT residual relative to lambda
  double initial_step{1.0};
  double backtrack{0.5};
  double armijo_c{1e-4};
  std::uint64_t seed{0};

  void validate() const {
    if (!(tol_quotient > 0.0) || !(tol_kkt > 0.0) || !(initial_step > 0.0) ||
        !(armijo_c > 0.0))
      throw std::invalid_argument("SolverOptions: tolerances and steps must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw std::invalid_argument("SolverOptions: backtrack factor must lie in (0,1)");
    if (max_iterations < 1)
      throw std::invalid_argument("SolverOptions: max_iterations must be >= 1");
  }
};

struct EigenPair {
  GridFunction u;
  GridFunction v;
  double lambda{0.0};
  double kkt_u{0.0};
  double kkt_v{0.0};
  int iterations{0};
  bool converged{false};
};

// Extremal truncated-cone profiles centered at the incenter. Near-optimal
// initialization for large p.
inline std::pair<GridFunction, GridFunction> init_cone(const GridDomain& domain,
                                                       const FracParams& params) {
  const double R = domain.inradius;
  const Vec2 x0 = domain.nodes[domain.argmax_node];
  const double cu = std::pow(R, (params.r - params.s) * (1.0 - params.gamma));
  const double cv = std::pow(R, -(params.r - params.s) * params.gamma);
  GridFunction u = zeros(domain);
  GridFunction v = zeros(domain);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const double profile = std::max(0.0, 1.0 - dist(domain.nodes[i], x0) / R);
    u.values[i] = cu * std::pow(profile, params.r);
    v.values[i] = cv * std::pow(profile, params.s);
  }
  return {std::move(u), std::move(v)};
}

namespace detail {

struct SolveState {
  std::vector<double> u;
  std::vector<double> v;
};

// Projection to the admissible set: componentwise absolute value, then a
// joint rescale so the coupling norm is exactly 1. The absolute value never
// increases either seminorm and leaves the coupling unchanged.
inline void project(SolveState& x, const GridDomain& d, const FracParams& params) {
  for (double& a : x.u) a = std::abs(a);
  for (double& a : x.v) a = std::abs(a);
  const double a = params.alpha();
  const double b = params.beta();
  const double log_hN = d.dim * std::log(d.spacing);
  LogSumAcc acc;
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    if (x.u[i] == 0.0 || x.v[i] == 0.0) continue;
    acc.add(a * std::log(x.u[i]) + b * std::log(x.v[i]) + log_hN);
  }
  const double logC = acc.log_value();
  if (!(logC > std::log(1e-300)))
    throw std::runtime_error("minimize_rayleigh: coupling collapsed below 1e-300");
  const double scale = std::exp(-logC / params.p);
  for (double& w : x.u) w *= scale;
  for (double& w : x.v) w *= scale;
}

// Gradient of log(S_u + S_v) w.r.t. one component, computed relative to the
// total energy in log scale to stay finite at large p.
inline void grad_log_seminorm(const KernelCache& c, std::span<const double> w,
                              double log_total, std::span<double> out) {
  const std::size_t n = w.size();
  const double p = c.p;
  parallel_chunks(n, 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> terms;
    for (std::size_t i = lo; i < hi; ++i) {
      terms.clear();
      const double wi = w[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dw = wi - w[j];
        if (dw == 0.0) continue;
        const double mag = std::exp((p - 1.0) * std::log(std::abs(dw)) +
                                    c.log_kernel[i * n + j] + 2.0 * c.log_hN -
                                    log_total);
        terms.push_back(std::copysign(2.0 * p * mag, dw));
      }
      if (wi != 0.0) {
        const double mag = std::exp((p - 1.0) * std::log(std::abs(wi)) +
                                    c.log_ext[i] + c.log_hN - log_total);
        terms.push_back(std::copysign(2.0 * p * mag, wi));
      }
      out[i] = pairwise_sum(terms);
    }
  });
}

// Gradient of log(coupling) w.r.t. u, for coupling already normalized to 1.
inline void grad_log_coupling_u(std::span<const double> u, std::span<const double> v,
                                double a, double b, double hN,
                                std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = a * signed_pow(u[i], a - 1.0) * std::pow(std::abs(v[i]), b) * hN;
}

}  // namespace detail

// Projected gradient descent on the log Rayleigh quotient with Armijo
// backtracking. The returned pair is normalized to coupling = 1 and lambda
// equals its Rayleigh quotient.
inline EigenPair minimize_rayleigh(const GridDomain& domain,
                                   const FracParams& params,
                                   std::pair<GridFunction, GridFunction> init,
                                   const SolverOptions& opts) {
  params.validate();
  opts.validate();
  const std::size_t n = domain.size();
  const double p = params.p;
  const double a = params.alpha();
  const double b = params.beta();
  const double hN = domain.cell_volume;

  const KernelCache cu = make_kernel_cache(domain, params.r, p);
  const KernelCache cv = make_kernel_cache(domain, params.s, p);

  detail::SolveState x{init.first.values, init.second.values};
  if (x.u.size() != n || x.v.size() != n)
    throw std::invalid_argument("minimize_rayleigh: init size mismatch");
  detail::project(x, domain, params);

  auto objective = [&](const detail::SolveState& st, double& log_su, double& log_sv) {
    log_su = detail::seminorm_log_impl(cu, st.u, true);
    log_sv = detail::seminorm_log_impl(cv, st.v, true);
    return log_add_exp(log_su, log_sv);  // log C = 0 after projection
  };

  double log_su = 0.0, log_sv = 0.0;
  double phi = objective(x, log_su, log_sv);
  if (!std::isfinite(phi))
    throw std::runtime_error("minimize_rayleigh: non-finite objective at start");

  std::vector<double> gu(n), gv(n), tmp(n);
  const double kkt_scale = p * hN;  // |grad phi|_inf / (p h^N) = residual / lambda

  int iter = 0;
  bool converged = false;
  double kkt_rel = std::numeric_limits<double>::infinity();
  double last_decrease = 0.0;  // an exact-minimizer init converges at once

  for (; iter < opts.max_iterations; ++iter) {
    detail::grad_log_seminorm(cu, x.u, phi, gu);
    detail::grad_log_seminorm(cv, x.v, phi, gv);
    detail::grad_log_coupling_u(x.u, x.v, a, b, hN, tmp);
    for (std::size_t i = 0; i < n; ++i) gu[i] -= tmp[i];
    detail::grad_log_coupling_u(x.v, x.u, b, a, hN, tmp);
    for (std::size_t i = 0; i < n; ++i) gv[i] -= tmp[i];

    double ginf = 0.0, gsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ginf = std::max({ginf, std::abs(gu[i]), std::abs(gv[i])});
      gsq += gu[i] * gu[i] + gv[i] * gv[i];
    }
    if (!std::isfinite(gsq))
      throw std::runtime_error("minimize_rayleigh: non-finite gradient at iteration " +
                               std::to_string(iter));
    kkt_rel = ginf / kkt_scale;
    // Converged when the KKT residual is small and the quotient has stopped
    // moving (trivially true before the first step).
    if (kkt_rel <= opts.tol_kkt && last_decrease <= opts.tol_quotient) {
      converged = true;
      break;
    }

    // Monotone Armijo backtracking; the trial step resets every iteration.
    double tau = opts.initial_step;
    bool accepted = false;
    detail::SolveState cand;
    double phi_cand = phi;
    for (int bt = 0; bt < 120; ++bt) {
      cand = x;
      for (std::size_t i = 0; i < n; ++i) {
        cand.u[i] -= tau * gu[i];
        cand.v[i] -= tau * gv[i];
      }
      detail::project(cand, domain, params);
      double lsu, lsv;
      phi_cand = objective(cand, lsu, lsv);
      if (std::isfinite(phi_cand) && phi_cand <= phi - opts.armijo_c * tau * gsq) {
        log_su = lsu;
        log_sv = lsv;
        accepted = true;
        break;
      }
      tau *= opts.backtrack;
    }
    if (!accepted) break;  // no descent direction left at machine scale

    last_decrease = (phi - phi_cand) / std::max(1.0, std::abs(phi));
    x = std::move(cand);
    phi = phi_cand;
  }

  EigenPair out;
  out.u = GridFunction{&domain, std::move(x.u)};
  out.v = GridFunction{&domain, std::move(x.v)};
  out.lambda = std::exp(phi);
  out.iterations = iter;
  out.converged = converged;

  // Absolute strong-form residuals at the final point.
  detail::grad_log_seminorm(cu, out.u.values, phi, gu);
  detail::grad_log_seminorm(cv, out.v.values, phi, gv);
  detail::grad_log_coupling_u(out.u.values, out.v.values, a, b, hN, tmp);
  double ru = 0.0;
  for (std::size_t i = 0; i < n; ++i) ru = std::max(ru, std::abs(gu[i] - tmp[i]));
  detail::grad_log_coupling_u(out.v.values, out.u.values, b, a, hN, tmp);
  double rv = 0.0;
  for (std::size_t i = 0; i < n; ++i) rv = std::max(rv, std::abs(gv[i] - tmp[i]));
  out.kkt_u = out.lambda / kkt_scale * ru;
  out.kkt_v = out.lambda / kkt_scale * rv;
  return out;
}

// Sup-norm of the discrete strong-form residual of each equation of the
// system, evaluated at interior nodes.
inline std::pair<double, double> kkt_residual(const EigenPair& pair,
                                              const FracParams& params) {
  const GridDomain& d = *pair.u.domain;
  const double p = params.p;
  const double a = params.alpha();
  const double b = params.beta();
  const GridFunction gu = frac_p_laplacian_apply(pair.u, params.r, p);
  const GridFunction gv = frac_p_laplacian_apply(pair.v, params.s, p);
  double ru = 0.0, rv = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.interior_mask[i]) continue;
    const double ui = pair.u.values[i];
    const double vi = pair.v.values[i];
    const double fu = pair.lambda * (a / p) * signed_pow(ui, a - 1.0) *
                      std::pow(std::abs(vi), b);
    const double fv = pair.lambda * (b / p) * std::pow(std::abs(ui), a) *
                      signed_pow(vi, b - 1.0);
    ru = std::max(ru, std::abs(gu.values[i] - fu));
    rv = std::max(rv, std::abs(gv.values[i] - fv));
  }
  return {ru, rv};
}

// Runs several independent random positive initializations and reports the
// largest sup-norm distance between the resulting normalized pairs.
inline double simplicity_probe(const GridDomain& domain, const FracParams& params,
                               const SolverOptions& opts, int trials) {
  if (trials < 2) throw std::invalid_argument("simplicity_probe: need trials >= 2");
  std::vector<EigenPair> pairs;
  pairs.reserve(trials);
  for (int k = 0; k < trials; ++k) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(k) * 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    GridFunction u = zeros(domain);
    GridFunction v = zeros(domain);
    for (std::size_t i = 0; i < domain.size(); ++i) {
      u.values[i] = unif(rng);
      v.values[i] = unif(rng);
    }
    EigenPair ep = minimize_rayleigh(domain, params, {std::move(u), std::move(v)}, opts);
    if (!ep.converged)
      throw std::runtime_error("simplicity_probe: trial " + std::to_string(k) +
                               " did not converge");
    pairs.push_back(std::move(ep));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      for (std::size_t k = 0; k < domain.size(); ++k) {
        worst = std::max(worst, std::abs(pairs[i].u.values[k] - pairs[j].u.values[k]));
        worst = std::max(worst, std::abs(pairs[i].v.values[k] - pairs[j].v.values[k]));
      }
    }
  }
  return worst;
}

// Checks the sign pattern of f(x) = a x^p - (a+b) x^alpha + b on (0,1):
// f(1) = 0, f > 0, f' < 0. Requires the eigen-pair relation a/(a+b) = alpha/p.
inline bool scaling_polynomial_check(double a, double b, double p, double alpha) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("scaling_polynomial_check: need a, b > 0");
  if (std::abs(a / (a + b) - alpha / p) > 1e-12)
    throw std::invalid_argument("scaling_polynomial_check: a/(a+b) must equal alpha/p");
  const double f1 = a - (a + b) + b;
  if (std::abs(f1) > 1e-12 * (a + b)) return false;
  const int samples = 2000;
  for (int k = 1; k < samples; ++k) {
    const double x = static_cast<double>(k) / samples;
    const double f = a * std::pow(x, p) - (a + b) * std::pow(x, alpha) + b;
    const double df = p * a * std::pow(x, p - 1.0) -
                      alpha * (a + b) * std::pow(x, alpha - 1.0);
    if (!(f > 0.0) || !(df < 0.0)) return false;
  }
  return true;
}

}  // namespace fracsys
