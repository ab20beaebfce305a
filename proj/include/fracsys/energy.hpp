#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fracsys/core.hpp"
#include "fracsys/geometry.hpp"

namespace fracsys {

// Node-indexed real values on a grid domain, implicitly extended by zero on
// the whole exterior.
struct GridFunction {
  const GridDomain* domain{nullptr};
  std::vector<double> values;
};

inline GridFunction zeros(const GridDomain& d) {
  return GridFunction{&d, std::vector<double>(d.size(), 0.0)};
}

struct FracParams {
  double r{0.5};
  double s{0.5};
  double p{2.0};
  double gamma{0.5};

  double alpha() const { return gamma * p; }
  double beta() const { return (1.0 - gamma) * p; }

  void validate() const {
    if (!(r > 0.0 && r < 1.0) || !(s > 0.0 && s < 1.0))
      throw std::invalid_argument("FracParams: r, s must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("FracParams: gamma must lie in (0,1)");
    if (!(p > 1.0)) throw std::invalid_argument("FracParams: p must exceed 1");
    if (std::min(alpha(), beta()) < 1.0)
      throw std::invalid_argument("FracParams: min(alpha, beta) must be >= 1");
  }

  bool limit_admissible(int dim) const {
    return p * std::min(r, s) >= static_cast<double>(dim);
  }
};

// Precomputed singular-kernel logarithms for one (t, p). All energies and
// gradients for that exponent pair run off this table.
struct KernelCache {
  const GridDomain* domain{nullptr};
  double t{0.0};
  double p{0.0};
  std::vector<double> log_kernel;  // n*n; entry (i,j) = -(N+tp)*log|x_i-x_j|
  std::vector<double> log_ext;     // log of the exterior integral weight
  double log_hN{0.0};              // N * log h
};

inline KernelCache make_kernel_cache(const GridDomain& d, double t, double p) {
  KernelCache c;
  c.domain = &d;
  c.t = t;
  c.p = p;
  c.log_hN = d.dim * std::log(d.spacing);
  const std::size_t n = d.size();
  const double expo = -(d.dim + t * p);
  c.log_kernel.assign(n * n, 0.0);
  parallel_chunks(n, 16, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) c.log_kernel[i * n + j] = expo * std::log(dist(d.nodes[i], d.nodes[j]));
  });
  c.log_ext.resize(n);
  const auto tails = exterior_tail(d, t, p);
  for (std::size_t i = 0; i < n; ++i) c.log_ext[i] = std::log(tails[i].value);
  return c;
}

namespace detail {

constexpr double kLogDomainP = 32.0;  // above this, accumulate in log space

// log of  sum over ordered pairs |w_i-w_j|^p K_ij h^{2N}
//       + 2 sum_i |w_i|^p E_i h^N  (if include_exterior)
inline double seminorm_log_impl(const KernelCache& c,
                                std::span<const double> w,
                                bool include_exterior) {
  const std::size_t n = w.size();
  const double p = c.p;
  const double log2h = std::numbers::ln2;
  const bool log_mode = p > kLogDomainP;

  std::vector<double> row_sums;     // linear mode: one partial per row
  std::vector<LogSumAcc> row_accs;  // log mode
  if (log_mode) row_accs.resize(n);
  else row_sums.assign(n, 0.0);

  parallel_chunks(n, 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> terms;
    for (std::size_t i = lo; i < hi; ++i) {
      terms.clear();
      LogSumAcc acc;
      // unordered pairs j > i, each counted twice
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dw = std::abs(w[i] - w[j]);
        if (dw == 0.0) continue;
        const double lt = log2h + p * std::log(dw) + c.log_kernel[i * n + j] +
                          2.0 * c.log_hN;
        if (log_mode) acc.add(lt);
        else terms.push_back(std::exp(lt));
      }
      if (include_exterior && w[i] != 0.0) {
        const double lt = log2h + p * std::log(std::abs(w[i])) + c.log_ext[i] +
                          c.log_hN;
        if (log_mode) acc.add(lt);
        else terms.push_back(std::exp(lt));
      }
      if (log_mode) row_accs[i] = acc;
      else row_sums[i] = pairwise_sum(terms);
    }
  });

  if (log_mode) {
    LogSumAcc total;
    for (const auto& a : row_accs) total.merge(a);
    return total.log_value();
  }
  const double s = pairwise_sum(row_sums);
  return std::log(s);
}

}  // namespace detail

inline double seminorm_log(const KernelCache& c, const GridFunction& w,
                           bool include_exterior = true) {
  if (w.domain != c.domain)
    throw std::invalid_argument("seminorm: function/cache domain mismatch");
  for (double v : w.values)
    if (!std::isfinite(v)) throw std::invalid_argument("seminorm: non-finite value");
  return detail::seminorm_log_impl(c, w.values, include_exterior);
}

// Discrete Gagliardo p-seminorm of the zero-extended function. With the
// exterior off this is the Omega x Omega seminorm only.
inline double seminorm_p(const GridFunction& w, double t, double p,
                         bool include_exterior = true) {
  if (w.domain == nullptr) throw std::invalid_argument("seminorm: null domain");
  const KernelCache c = make_kernel_cache(*w.domain, t, p);
  const double lg = seminorm_log(c, w, include_exterior);
  if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lg);
}

inline double seminorm_p(const KernelCache& c, const GridFunction& w,
                         bool include_exterior = true) {
  const double lg = seminorm_log(c, w, include_exterior);
  if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lg);
}

// log of  sum_i |u_i|^alpha |v_i|^beta h^N
inline double coupling_log(const GridFunction& u, const GridFunction& v,
                           const FracParams& params) {
  if (u.domain == nullptr || u.domain != v.domain)
    throw std::invalid_argument("coupling: domain mismatch");
  const double a = params.alpha();
  const double b = params.beta();
  const double log_hN = u.domain->dim * std::log(u.domain->spacing);
  LogSumAcc acc;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double au = std::abs(u.values[i]);
    const double av = std::abs(v.values[i]);
    if (au == 0.0 || av == 0.0) continue;
    acc.add(a * std::log(au) + b * std::log(av) + log_hN);
  }
  return acc.log_value();
}

inline double coupling(const GridFunction& u, const GridFunction& v,
                       const FracParams& params) {
  const double lg = coupling_log(u, v, params);
  if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lg);
}

// Rayleigh quotient of the system, exterior terms included.
inline double rayleigh(const GridFunction& u, const GridFunction& v,
                       const FracParams& params) {
  const double cpl = coupling(u, v, params);
  if (!(cpl > 0.0))
    throw std::invalid_argument("rayleigh: coupling vanishes (u*v == 0)");
  return (seminorm_p(u, params.r, params.p) + seminorm_p(v, params.s, params.p)) /
         cpl;
}

// Discrete weak-form fractional (p,t)-Laplacian: the gradient of
// seminorm_p / (p h^N) with respect to the nodal values.
inline GridFunction frac_p_laplacian_apply(const KernelCache& c,
                                           const GridFunction& w) {
  if (w.domain != c.domain)
    throw std::invalid_argument("frac_p_laplacian: domain mismatch");
  const std::size_t n = w.values.size();
  const double p = c.p;
  GridFunction g = zeros(*w.domain);
  parallel_chunks(n, 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> terms;
    for (std::size_t i = lo; i < hi; ++i) {
      terms.clear();
      const double wi = w.values[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dw = wi - w.values[j];
        if (dw == 0.0) continue;
        const double mag = std::exp((p - 1.0) * std::log(std::abs(dw)) +
                                    c.log_kernel[i * n + j] + c.log_hN);
        terms.push_back(std::copysign(2.0 * mag, dw));
      }
      if (wi != 0.0) {
        const double mag = std::exp((p - 1.0) * std::log(std::abs(wi)) + c.log_ext[i]);
        terms.push_back(std::copysign(2.0 * mag, wi));
      }
      g.values[i] = pairwise_sum(terms);
      if (!std::isfinite(g.values[i]))
        throw std::runtime_error("frac_p_laplacian: non-finite result at node " +
                                 std::to_string(i));
    }
  });
  return g;
}

inline GridFunction frac_p_laplacian_apply(const GridFunction& w, double t,
                                           double p) {
  if (w.domain == nullptr) throw std::invalid_argument("frac_p_laplacian: null domain");
  const KernelCache c = make_kernel_cache(*w.domain, t, p);
  return frac_p_laplacian_apply(c, w);
}

// Discrete Picone expression per node pair. Nonnegative whenever phi >= 0
// and psi > 0; the signed power is |a|^(p-1) * sign(a).
inline std::vector<double> picone(const GridFunction& phi,
                                  const GridFunction& psi, double p,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (phi.domain == nullptr || phi.domain != psi.domain)
    throw std::invalid_argument("picone: domain mismatch");
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double px = phi.values[i], py = phi.values[j];
    const double qx = psi.values[i], qy = psi.values[j];
    if (px < 0.0 || py < 0.0) throw std::invalid_argument("picone: phi must be >= 0");
    if (!(qx > 0.0) || !(qy > 0.0)) throw std::invalid_argument("picone: psi must be > 0");
    const double frac = std::pow(px, p) / std::pow(qx, p - 1.0) -
                        std::pow(py, p) / std::pow(qy, p - 1.0);
    out.push_back(std::pow(std::abs(px - py), p) -
                  signed_pow(qx - qy, p - 1.0) * frac);
  }
  return out;
}

struct PoincareCheck {
  double lhs{0.0};
  double rhs{0.0};
  bool holds{false};
};

// Discrete Poincare inequality with the corrected (negative-exponent)
// constant produced by the radial tail integral.
inline PoincareCheck poincare_check(const GridFunction& w, double t, double p) {
  const GridDomain& d = *w.domain;
  const double lhs = seminorm_p(w, t, p, true);
  const double hN = d.cell_volume;
  std::vector<double> terms(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i)
    terms[i] = std::pow(std::abs(w.values[i]), p) * hN;
  const double lp = pairwise_sum(terms);
  const double sigma = sphere_surface_measure(d.dim);
  const double rhs = sigma / (t * p) * std::pow(d.diameter + 1.0, -t * p) * lp;
  return {lhs, rhs, lhs >= rhs};
}

// Discrete analogue of the L^q / interior-seminorm embedding estimates with
// t = s - N/q.
inline bool embedding_check(const GridFunction& w, double s, double p, double q) {
  const GridDomain& d = *w.domain;
  const double N = static_cast<double>(d.dim);
  if (!(q > N / s) || !(q < p))
    throw std::invalid_argument("embedding_check: need N/s < q < p");
  const double t = s - N / q;
  const double hN = d.cell_volume;
  const double vol = static_cast<double>(d.size()) * hN;

  std::vector<double> tq(w.values.size()), tp(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double a = std::abs(w.values[i]);
    tq[i] = std::pow(a, q) * hN;
    tp[i] = std::pow(a, p) * hN;
  }
  const double nq = std::pow(pairwise_sum(tq), 1.0 / q);
  const double np = std::pow(pairwise_sum(tp), 1.0 / p);
  const double slack = 1e-12;
  const bool first = nq <= std::pow(vol, 1.0 / q - 1.0 / p) * np * (1.0 + slack);

  const double sem_q = std::pow(seminorm_p(w, t, q, false), 1.0 / q);
  const double sem_p = std::pow(seminorm_p(w, s, p, false), 1.0 / p);
  const bool second =
      sem_q <= std::pow(d.diameter, N / p) *
                   std::pow(vol, 2.0 / q - 2.0 / p) * sem_p * (1.0 + slack) +
               slack;
  return first && second;
}

}  // namespace fracsys
