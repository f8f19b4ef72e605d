#pragma once
// Model domains (unit disk, unit polydisk), evaluation points and the
// deterministic grids every sweep runs on.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "common.hpp"

namespace demlab {

using Complex = std::complex<double>;

/// Evaluation point in C^n, n in {1, 2}.
struct Point {
  std::array<Complex, 2> c{};
  int n = 1;

  static Point one(Complex z) { return Point{{z, {}}, 1}; }
  static Point two(Complex z1, Complex z2) { return Point{{z1, z2}, 2}; }
};

enum class DomainKind { disk, polydisk };

/// Bounded model domain: a disk in C (n = 1) or a polydisk in C^2.
struct Domain {
  DomainKind kind = DomainKind::disk;
  int n = 1;
  std::array<double, 2> radius{1.0, 1.0};

  static Domain disk(double r = 1.0) {
    if (!(r > 0)) throw ArgumentError("disk radius must be positive");
    return Domain{DomainKind::disk, 1, {r, r}};
  }
  static Domain polydisk(double r1 = 1.0, double r2 = 1.0) {
    if (!(r1 > 0) || !(r2 > 0))
      throw ArgumentError("polydisk radii must be positive");
    return Domain{DomainKind::polydisk, 2, {r1, r2}};
  }
};

inline bool contains(const Domain& dom, const Point& z) {
  if (z.n != dom.n) return false;
  for (int j = 0; j < dom.n; ++j)
    if (std::abs(z.c[j]) >= dom.radius[j]) return false;
  return true;
}

/// Distance from z to the boundary: radius - |z| for the disk,
/// min_j (radius_j - |z_j|) for the polydisk.
inline double dist_to_boundary(const Domain& dom, const Point& z) {
  if (z.n != dom.n) throw DomainError("point dimension does not match domain");
  double d = kPosInf;
  for (int j = 0; j < dom.n; ++j) d = std::min(d, dom.radius[j] - std::abs(z.c[j]));
  if (d < 0) throw DomainError("point lies outside the domain");
  return d;
}

/// Volume of the Euclidean ball of radius r in C^n = R^{2n}:
/// pi^n r^{2n} / n!.
inline double ball_volume(int n, double r) {
  if (n < 1 || n > 2) throw ArgumentError("ball_volume: n must be 1 or 2");
  if (!(r > 0)) throw ArgumentError("ball_volume: radius must be positive");
  const double pi = std::numbers::pi;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return std::pow(pi, n) * std::pow(r, 2 * n) / fact;
}

enum class GridMode { radial, cartesian, log_radial };

/// Deterministic grid request. `margin` keeps radial/cartesian points at
/// distance >= margin from the boundary; log-radial grids run over
/// t = log|z| in [log_floor, log(radius - margin)] per axis.
struct GridSpec {
  GridMode mode = GridMode::radial;
  int points_per_axis = 60;
  double margin = 0.05;
  double log_floor = -8.0;

  void validate() const {
    if (points_per_axis < 1)
      throw ArgumentError("grid: points_per_axis must be >= 1");
    if (!(margin >= 0.0) || margin >= 1.0)
      throw ArgumentError("grid: margin must lie in [0, 1)");
    if (mode != GridMode::log_radial && margin <= 0.0)
      throw ArgumentError("grid: margin must be positive for point grids");
    if (mode == GridMode::log_radial && !(log_floor < 0))
      throw ArgumentError("grid: log_floor must be negative");
  }
};

namespace detail {

/// Radial abscissas 0, h, 2h, ... with h = (R - margin)/count.
inline std::vector<double> radial_axis(double R, const GridSpec& g) {
  const double h = (R - g.margin) / g.points_per_axis;
  std::vector<double> r(g.points_per_axis);
  for (int i = 0; i < g.points_per_axis; ++i) r[i] = i * h;
  return r;
}

/// Log abscissas t in [log_floor, log(R - margin)], inclusive, increasing.
inline std::vector<double> log_axis(double R, const GridSpec& g) {
  const double t_max = std::log(R - g.margin);
  if (!(g.log_floor < t_max))
    throw ArgumentError("grid: log_floor must lie below log(radius - margin)");
  const int m = g.points_per_axis;
  std::vector<double> t(m);
  if (m == 1) {
    t[0] = t_max;
    return t;
  }
  const double h = (t_max - g.log_floor) / (m - 1);
  for (int i = 0; i < m; ++i) t[i] = g.log_floor + i * h;
  t[m - 1] = t_max;
  return t;
}

/// Cartesian abscissas over the square inscribed in the disk of radius R,
/// shrunk so every lattice point keeps dist >= margin.
inline std::vector<double> cartesian_axis(double R, const GridSpec& g) {
  const double s = (R - g.margin) / std::sqrt(2.0);
  const int m = g.points_per_axis;
  std::vector<double> x(m);
  if (m == 1) {
    x[0] = 0.0;
    return x;
  }
  for (int i = 0; i < m; ++i) x[i] = -s + 2.0 * s * i / (m - 1);
  return x;
}

}  // namespace detail

/// Build the grid for `spec` on `dom`. Deterministic: the same inputs
/// always produce the same points in the same order.
inline std::vector<Point> make_grid(const Domain& dom, const GridSpec& g) {
  g.validate();
  std::vector<Point> pts;
  switch (g.mode) {
    case GridMode::radial: {
      std::array<std::vector<double>, 2> ax;
      for (int j = 0; j < dom.n; ++j) ax[j] = detail::radial_axis(dom.radius[j], g);
      if (dom.n == 1) {
        for (double r : ax[0]) pts.push_back(Point::one({r, 0.0}));
      } else {
        for (double r1 : ax[0])
          for (double r2 : ax[1]) pts.push_back(Point::two({r1, 0.0}, {r2, 0.0}));
      }
      break;
    }
    case GridMode::log_radial: {
      std::array<std::vector<double>, 2> ax;
      for (int j = 0; j < dom.n; ++j) ax[j] = detail::log_axis(dom.radius[j], g);
      if (dom.n == 1) {
        for (double t : ax[0]) pts.push_back(Point::one({std::exp(t), 0.0}));
      } else {
        for (double t1 : ax[0])
          for (double t2 : ax[1])
            pts.push_back(Point::two({std::exp(t1), 0.0}, {std::exp(t2), 0.0}));
      }
      break;
    }
    case GridMode::cartesian: {
      // full lattice in the real/imaginary parts of each coordinate,
      // filtered to the required boundary clearance
      std::array<std::vector<double>, 2> ax;
      for (int j = 0; j < dom.n; ++j)
        ax[j] = detail::cartesian_axis(dom.radius[j], g);
      const double keep = g.margin * (1.0 - 1e-12);
      if (dom.n == 1) {
        for (double x : ax[0])
          for (double y : ax[0]) {
            Point p = Point::one({x, y});
            if (dom.radius[0] - std::abs(p.c[0]) >= keep) pts.push_back(p);
          }
      } else {
        for (double x1 : ax[0])
          for (double y1 : ax[0])
            for (double x2 : ax[1])
              for (double y2 : ax[1]) {
                Point p = Point::two({x1, y1}, {x2, y2});
                if (dom.radius[0] - std::abs(p.c[0]) >= keep &&
                    dom.radius[1] - std::abs(p.c[1]) >= keep)
                  pts.push_back(p);
              }
      }
      break;
    }
  }
  return pts;
}

/// Smallest positive pairwise distance between grid points; the usc
/// radius schedule defaults are multiples of this spacing.
inline double grid_spacing(const std::vector<Point>& pts) {
  double h = kPosInf;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double d2 = 0;
      for (int k = 0; k < pts[i].n; ++k) {
        const double dr = pts[i].c[k].real() - pts[j].c[k].real();
        const double di = pts[i].c[k].imag() - pts[j].c[k].imag();
        d2 += dr * dr + di * di;
      }
      const double d = std::sqrt(d2);
      if (d > 0 && d < h) h = d;
    }
  return h;
}

inline double point_dist(const Point& a, const Point& b) {
  double d2 = 0;
  for (int k = 0; k < a.n; ++k) {
    const Complex d = a.c[k] - b.c[k];
    d2 += std::norm(d);
  }
  return std::sqrt(d2);
}

inline std::string point_to_string(const Point& z) {
  std::string s = "(" + fmt17(z.c[0].real()) + "," + fmt17(z.c[0].imag());
  if (z.n == 2)
    s += "),(" + fmt17(z.c[1].real()) + "," + fmt17(z.c[1].imag());
  return s + ")";
}

}  // namespace demlab
