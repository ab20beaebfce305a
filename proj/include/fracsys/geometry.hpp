#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracsys/core.hpp"

namespace fracsys {

enum class DomainKind { interval, disk, box };

// Cell-centered uniform discretization of a bounded domain, together with
// everything the nonlocal energies need about the exterior: the distance to
// the boundary per node, the zero-value boundary projection of each node,
// and (in 2D) a collar of exterior quadrature nodes.
struct GridDomain {
  int dim{1};
  DomainKind kind{DomainKind::interval};

  std::vector<Vec2> nodes;
  std::vector<bool> interior_mask;
  double spacing{0.0};
  double cell_volume{0.0};
  std::vector<Vec2> collar_nodes;
  std::vector<double> boundary_distance;
  double diameter{0.0};
  double inradius{0.0};
  std::size_t argmax_node{0};

  // Nearest boundary point per node. These act as virtual nodes carrying the
  // value 0 for Holder seminorms and the infinity operators.
  std::vector<Vec2> boundary_points;

  // Interval data (dim == 1).
  double interval_a{0.0};
  double interval_b{0.0};

  // Disk / box data (dim == 2).
  Vec2 center{};
  double radius{0.0};
  Vec2 box_lo{};
  Vec2 box_hi{};
  double collar_width{0.0};
  // Radius, around `center`, of a ball covering the domain plus collar. The
  // analytic radial tail starts outside this ball.
  double covered_radius{0.0};

  std::size_t size() const { return nodes.size(); }
};

struct TailWeight {
  std::size_t node{0};
  double value{0.0};
};

// Surface measure of the unit sphere in dimension N (sigma_1 = 2,
// sigma_2 = 2*pi). This, not the unit-ball volume, is the constant the
// radial tail integral produces.
inline double sphere_surface_measure(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: throw std::invalid_argument("sphere_surface_measure: dim must be 1 or 2");
  }
}

namespace detail {

inline void finish_scalars(GridDomain& d) {
  d.interior_mask.assign(d.nodes.size(), true);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const double bd = d.boundary_distance[i];
    if (bd > best || (bd == best && lex_less(d.nodes[i], d.nodes[arg]))) {
      best = bd;
      arg = i;
    }
  }
  d.inradius = best;
  d.argmax_node = arg;
}

}  // namespace detail

inline GridDomain build_interval(double a, double b, int n) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw std::invalid_argument("build_interval: need finite a < b");
  if (n < 3) throw std::invalid_argument("build_interval: need n >= 3");

  GridDomain d;
  d.dim = 1;
  d.kind = DomainKind::interval;
  d.interval_a = a;
  d.interval_b = b;
  d.spacing = (b - a) / n;
  d.cell_volume = d.spacing;
  d.diameter = b - a;

  d.nodes.resize(static_cast<std::size_t>(n));
  d.boundary_distance.resize(d.nodes.size());
  d.boundary_points.resize(d.nodes.size());
  for (int i = 0; i < n; ++i) {
    const double x = a + (i + 0.5) * d.spacing;
    d.nodes[i] = {x, 0.0};
    const double left = x - a;
    const double right = b - x;
    d.boundary_distance[i] = std::min(left, right);
    d.boundary_points[i] = {left <= right ? a : b, 0.0};
  }
  detail::finish_scalars(d);
  return d;
}

inline GridDomain build_disk(Vec2 center, double radius, double h,
                             double collar_width) {
  if (!(radius > 0.0)) throw std::invalid_argument("build_disk: radius must be positive");
  if (!(h > 0.0) || !(h < radius / 4.0))
    throw std::invalid_argument("build_disk: need 0 < h < radius/4");
  const double diameter = 2.0 * radius;
  if (!(collar_width >= diameter))
    throw std::invalid_argument("build_disk: need collar_width >= diameter");

  GridDomain d;
  d.dim = 2;
  d.kind = DomainKind::disk;
  d.center = center;
  d.radius = radius;
  d.collar_width = collar_width;
  d.spacing = h;
  d.cell_volume = h * h;
  d.diameter = diameter;
  d.covered_radius = radius + collar_width;

  const double outer = radius + collar_width;
  const int lo = static_cast<int>(std::floor(-outer / h)) - 1;
  const int hi = static_cast<int>(std::ceil(outer / h)) + 1;
  for (int j = lo; j <= hi; ++j) {
    for (int i = lo; i <= hi; ++i) {
      const Vec2 p{center.x + (i + 0.5) * h, center.y + (j + 0.5) * h};
      const double rho = dist(p, center);
      if (rho < radius) {
        d.nodes.push_back(p);
        d.boundary_distance.push_back(radius - rho);
        if (rho > 0.0) {
          d.boundary_points.push_back({center.x + (p.x - center.x) * radius / rho,
                                       center.y + (p.y - center.y) * radius / rho});
        } else {
          d.boundary_points.push_back({center.x + radius, center.y});
        }
      } else if (rho <= outer) {
        d.collar_nodes.push_back(p);
      }
    }
  }
  detail::finish_scalars(d);
  return d;
}

inline GridDomain build_box(Vec2 lo, Vec2 hi, double h, double collar_width) {
  if (!(lo.x < hi.x) || !(lo.y < hi.y))
    throw std::invalid_argument("build_box: need lo < hi componentwise");
  const double wx = hi.x - lo.x;
  const double wy = hi.y - lo.y;
  const double diameter = std::hypot(wx, wy);
  if (!(h > 0.0) || !(h < std::min(wx, wy) / 4.0))
    throw std::invalid_argument("build_box: need 0 < h < min side / 4");
  if (!(collar_width >= diameter))
    throw std::invalid_argument("build_box: need collar_width >= diameter");

  GridDomain d;
  d.dim = 2;
  d.kind = DomainKind::box;
  d.box_lo = lo;
  d.box_hi = hi;
  d.center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
  d.collar_width = collar_width;
  d.spacing = h;
  d.cell_volume = h * h;
  d.diameter = diameter;
  d.covered_radius = 0.5 * diameter + collar_width;

  const double outer = d.covered_radius;
  const int ilo = static_cast<int>(std::floor((d.center.x - outer - lo.x) / h)) - 1;
  const int ihi = static_cast<int>(std::ceil((d.center.x + outer - lo.x) / h)) + 1;
  const int jlo = static_cast<int>(std::floor((d.center.y - outer - lo.y) / h)) - 1;
  const int jhi = static_cast<int>(std::ceil((d.center.y + outer - lo.y) / h)) + 1;
  for (int j = jlo; j <= jhi; ++j) {
    for (int i = ilo; i <= ihi; ++i) {
      const Vec2 p{lo.x + (i + 0.5) * h, lo.y + (j + 0.5) * h};
      const bool inside = p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
      if (inside) {
        d.nodes.push_back(p);
        const double bd = std::min(std::min(p.x - lo.x, hi.x - p.x),
                                   std::min(p.y - lo.y, hi.y - p.y));
        d.boundary_distance.push_back(bd);
        // Nearest point on the rectangle boundary: push the closest side.
        Vec2 bp = p;
        const double dl = p.x - lo.x, dr = hi.x - p.x;
        const double db = p.y - lo.y, dt = hi.y - p.y;
        const double m = std::min(std::min(dl, dr), std::min(db, dt));
        if (m == dl) bp.x = lo.x;
        else if (m == dr) bp.x = hi.x;
        else if (m == db) bp.y = lo.y;
        else bp.y = hi.y;
        d.boundary_points.push_back(bp);
      } else {
        // Collar: exterior points within collar_width of the box.
        const double ex = std::max({lo.x - p.x, 0.0, p.x - hi.x});
        const double ey = std::max({lo.y - p.y, 0.0, p.y - hi.y});
        const double gap = std::hypot(ex, ey);
        if (gap <= collar_width) d.collar_nodes.push_back(p);
      }
    }
  }
  detail::finish_scalars(d);
  return d;
}

// Exterior integral weight per node: the integral over the un-gridded
// exterior of |x_i - y|^{-(N + t p)} dy. Exact in closed form in 1D; in 2D
// a midpoint quadrature over the collar plus the analytic radial tail beyond
// the circle of radius rho(x_i) that encloses domain and collar.
inline std::vector<TailWeight> exterior_tail(const GridDomain& domain, double t,
                                             double p) {
  const double tp = t * p;
  if (!(tp > 0.0)) throw std::invalid_argument("exterior_tail: need t*p > 0");

  std::vector<TailWeight> out(domain.size());
  if (domain.dim == 1) {
    for (std::size_t i = 0; i < domain.size(); ++i) {
      const double left = domain.nodes[i].x - domain.interval_a;
      const double right = domain.interval_b - domain.nodes[i].x;
      out[i] = {i, (std::pow(left, -tp) + std::pow(right, -tp)) / tp};
    }
    return out;
  }

  const double sigma = sphere_surface_measure(domain.dim);
  const double hN = domain.cell_volume;
  const std::size_t m = domain.collar_nodes.size();
  parallel_chunks(domain.size(), 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> terms(m);
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec2 xi = domain.nodes[i];
      for (std::size_t k = 0; k < m; ++k)
        terms[k] = std::pow(dist(xi, domain.collar_nodes[k]), -(domain.dim + tp)) * hN;
      const double collar = pairwise_sum(terms);
      const double rho = dist(xi, domain.center) + domain.covered_radius;
      const double tail = sigma * std::pow(rho, -tp) / tp;
      out[i] = {i, collar + tail};
    }
  });
  return out;
}

inline std::pair<double, std::size_t> inradius_and_argmax(const GridDomain& domain) {
  return {domain.inradius, domain.argmax_node};
}

}  // namespace fracsys
