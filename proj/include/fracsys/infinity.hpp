#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "fracsys/core.hpp"
#include "fracsys/energy.hpp"
#include "fracsys/geometry.hpp"

namespace fracsys {

struct InfinityResult {
  double lambda_inf_geometric{0.0};
  double lambda_inf_variational{0.0};
  double gamma{0.0};
  double r{0.0};
  double s{0.0};
  double inradius{0.0};
  std::size_t argmax_node{0};
  GridFunction extremal_u;
  GridFunction extremal_v;
};

// Discrete t-Holder seminorm: sup over node pairs, including the zero-valued
// boundary projections as virtual nodes.
inline double holder_seminorm(const GridFunction& w, double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("holder_seminorm: need t in (0,1)");
  const GridDomain& d = *w.domain;
  const std::size_t n = d.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.values[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double num = std::abs(wi - w.values[j]);
      if (num == 0.0) continue;
      best = std::max(best, num / std::pow(dist(d.nodes[i], d.nodes[j]), t));
    }
    if (wi != 0.0) {
      for (const Vec2& bp : d.boundary_points)
        best = std::max(best, std::abs(wi) / std::pow(dist(d.nodes[i], bp), t));
    }
  }
  return best;
}

inline double lambda_infinity_geometric(const GridDomain& domain, double gamma,
                                        double r, double s) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("lambda_infinity_geometric: need gamma in (0,1)");
  return std::pow(1.0 / domain.inradius, (1.0 - gamma) * s + gamma * r);
}

inline double lambda_infinity_variational(const GridFunction& u,
                                          const GridFunction& v, double gamma,
                                          double r, double s) {
  double denom = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    denom = std::max(denom, std::pow(std::abs(u.values[i]), gamma) *
                                std::pow(std::abs(v.values[i]), 1.0 - gamma));
  if (!(denom > 0.0))
    throw std::invalid_argument("lambda_infinity_variational: |u|^g |v|^(1-g) vanishes");
  return std::max(holder_seminorm(u, r), holder_seminorm(v, s)) / denom;
}

struct ViscosityOps {
  double lplus{0.0};
  double lminus{0.0};
  double l{0.0};  // lplus + lminus, by definition
};

// Discrete sup/inf difference-quotient operators at node i. Candidates are
// all other nodes, the zero-valued boundary projections, and the far-field
// limit 0 when w_i >= 0.
inline ViscosityOps viscosity_ops(const GridFunction& w, double t, std::size_t i) {
  const GridDomain& d = *w.domain;
  if (i >= d.size() || !d.interior_mask[i])
    throw std::invalid_argument("viscosity_ops: node must be interior");
  const double wi = w.values[i];
  const Vec2 xi = d.nodes[i];
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j == i) continue;
    const double q = (wi - w.values[j]) / std::pow(dist(xi, d.nodes[j]), t);
    hi = std::max(hi, q);
    lo = std::min(lo, q);
  }
  for (const Vec2& bp : d.boundary_points) {
    const double q = wi / std::pow(dist(xi, bp), t);
    hi = std::max(hi, q);
    lo = std::min(lo, q);
  }
  if (wi >= 0.0) {
    hi = std::max(hi, 0.0);
    lo = std::min(lo, 0.0);
  }
  return {hi, lo, hi + lo};
}

// Sup-norm residuals of the limit viscosity system over the interior nodes.
// The second equation acts on v (system symmetry), with the s-exponent
// operator.
inline std::pair<double, double> limit_residual(const GridFunction& u,
                                                const GridFunction& v,
                                                double gamma, double r, double s,
                                                double Lambda) {
  const GridDomain& d = *u.domain;
  double res_u = 0.0, res_v = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.interior_mask[i]) continue;
    const double prod = std::pow(std::abs(u.values[i]), gamma) *
                        std::pow(std::abs(v.values[i]), 1.0 - gamma);
    const ViscosityOps ou = viscosity_ops(u, r, i);
    const ViscosityOps ov = viscosity_ops(v, s, i);
    res_u = std::max(res_u, std::abs(std::min(ou.l, ou.lplus - Lambda * prod)));
    res_v = std::max(res_v, std::abs(std::min(ov.l, ov.lplus - Lambda * prod)));
  }
  return {res_u, res_v};
}

}  // namespace fracsys
