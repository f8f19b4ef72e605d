#pragma once
// Largest psh minorant of a toric weight, computed in log coordinates.
// With t_j = log|z_j|, a toric V is psh iff u(t) = V(e^t) is convex and
// coordinatewise nondecreasing; after splitting off the pole slopes
// (u = gamma . t + ubar with ubar bounded) the envelope is the fixpoint of
// alternating the largest coordinatewise-nondecreasing minorant with the
// lower convex hull. The t-grid is extended internally by an anchor at the
// outer boundary t_j = log R_j (the continuous boundary extension of the
// bounded part); without it the iteration cannot see the flat boundary
// data that pins down envelopes like the constant -1.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "domains.hpp"
#include "hull.hpp"
#include "weights.hpp"

namespace demlab {

/// Bounded log-coordinate samples ubar on a product t-grid plus the pole
/// slopes gamma_j. Row-major over (t1, t2) for n = 2.
struct LogProfile {
  int n = 1;
  std::array<std::vector<double>, 2> t;
  std::array<double, 2> slope{0.0, 0.0};
  std::vector<double> u;

  size_t idx(size_t i1, size_t i2) const { return n == 1 ? i1 : i1 * t[1].size() + i2; }
  double& at(size_t i1, size_t i2) { return u[idx(i1, i2)]; }
  double at(size_t i1, size_t i2) const { return u[idx(i1, i2)]; }
};

/// Sample the bounded part of a toric weight on the log grid of `g`,
/// appending the boundary anchor on each axis.
inline LogProfile weight_log_profile(const Weight& w, const GridSpec& g) {
  if (!w.toric()) throw EngineMismatchError("envelope requires a toric weight");
  g.validate();
  const Domain& dom = w.domain();
  LogProfile p;
  p.n = dom.n;
  for (int j = 0; j < dom.n; ++j) {
    p.slope[j] = w.gamma(j);
    p.t[j] = detail::log_axis(dom.radius[j], g);
    const double top = std::log(dom.radius[j]);
    if (p.t[j].back() < top) p.t[j].push_back(top);
  }
  if (dom.n == 1) {
    p.u.reserve(p.t[0].size());
    for (double t1 : p.t[0]) {
      Point z = Point::one(std::exp(t1));
      p.u.push_back(w.bounded_part(z));
    }
  } else {
    p.u.reserve(p.t[0].size() * p.t[1].size());
    for (double t1 : p.t[0])
      for (double t2 : p.t[1]) {
        Point z = Point::two(std::exp(t1), std::exp(t2));
        p.u.push_back(w.bounded_part(z));
      }
  }
  return p;
}

namespace detail {

/// Largest coordinatewise-nondecreasing minorant: suffix min over the
/// upper-right quadrant of indices.
inline void monotone_minorant(LogProfile& p) {
  if (p.n == 1) {
    for (size_t i = p.u.size() - 1; i-- > 0;) p.u[i] = std::min(p.u[i], p.u[i + 1]);
    return;
  }
  const size_t N1 = p.t[0].size(), N2 = p.t[1].size();
  for (size_t i2 = 0; i2 < N2; ++i2)
    for (size_t i1 = N1 - 1; i1-- > 0;)
      p.at(i1, i2) = std::min(p.at(i1, i2), p.at(i1 + 1, i2));
  for (size_t i1 = 0; i1 < N1; ++i1)
    for (size_t i2 = N2 - 1; i2-- > 0;)
      p.at(i1, i2) = std::min(p.at(i1, i2), p.at(i1, i2 + 1));
}

inline void convex_pass(LogProfile& p) {
  if (p.n == 1) {
    p.u = convex_minorant_1d(p.t[0], p.u);
    return;
  }
  const size_t N1 = p.t[0].size(), N2 = p.t[1].size();
  std::vector<std::array<double, 3>> pts;
  pts.reserve(N1 * N2);
  for (size_t i1 = 0; i1 < N1; ++i1)
    for (size_t i2 = 0; i2 < N2; ++i2)
      pts.push_back({p.t[0][i1], p.t[1][i2], p.at(i1, i2)});
  const LowerHull2 hull = lower_hull_2d(pts);
  for (size_t i1 = 0; i1 < N1; ++i1)
    for (size_t i2 = 0; i2 < N2; ++i2) {
      const double h = hull.eval(p.t[0][i1], p.t[1][i2]);
      // a supporting plane never exceeds the sample it supports
      p.at(i1, i2) = std::min(p.at(i1, i2), h);
    }
}

}  // namespace detail

struct EnvelopeResult {
  LogProfile env;
  int iterations = 0;
  double final_gap = 0.0;
};

/// Alternate the two minorant operations to their common fixpoint.
inline EnvelopeResult envelope_iterate(LogProfile p, double tol = 1e-9,
                                       int max_iter = 50) {
  EnvelopeResult r;
  for (int it = 1; it <= max_iter; ++it) {
    const std::vector<double> before = p.u;
    detail::monotone_minorant(p);
    detail::convex_pass(p);
    double gap = 0;
    for (size_t i = 0; i < p.u.size(); ++i)
      gap = std::max(gap, std::fabs(before[i] - p.u[i]));
    r.iterations = it;
    r.final_gap = gap;
    if (gap <= tol) {
      r.env = std::move(p);
      return r;
    }
  }
  throw IterationError("envelope alternation did not stabilize", r.final_gap);
}

inline EnvelopeResult psh_envelope_toric(const Weight& w, const GridSpec& g,
                                         double tol = 1e-9) {
  return envelope_iterate(weight_log_profile(w, g), tol);
}

namespace detail {

/// Piecewise-linear value of the bounded envelope part along one axis,
/// extended left of the grid by its first slope (the convex extension).
inline double profile_interp_1d(const std::vector<double>& ts, const std::vector<double>& us,
                                double t, bool& minus_inf) {
  minus_inf = false;
  if (t >= ts.back()) return us.back();
  if (t <= ts.front()) {
    const double s = (us[1] - us[0]) / (ts[1] - ts[0]);
    if (t == kNegInf) {
      if (s > 1e-12) {
        minus_inf = true;
        return kNegInf;
      }
      return us.front();
    }
    return us.front() + s * (t - ts.front());
  }
  size_t i = 1;
  while (ts[i] < t) ++i;
  const double lam = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return us[i - 1] + lam * (us[i] - us[i - 1]);
}

}  // namespace detail

/// Envelope value at a point of the domain; exact at t-grid sites,
/// piecewise-linear in t between them, -inf on pole axes.
inline double envelope_value(const EnvelopeResult& r, const Point& z) {
  const LogProfile& p = r.env;
  if (z.n != p.n) throw DomainError("envelope value: dimension mismatch");
  double v = 0;
  if (p.n == 1) {
    const double rho = std::abs(z.c[0]);
    const double t1 = rho > 0 ? std::log(rho) : kNegInf;
    if (p.slope[0] > 0 && rho == 0) return kNegInf;
    bool mi = false;
    const double ub = detail::profile_interp_1d(p.t[0], p.u, t1, mi);
    if (mi) return kNegInf;
    return p.slope[0] * (rho > 0 ? t1 : 0.0) + ub;
  }
  // n = 2: interpolate the bounded part bilinearly in (t1, t2)
  std::array<double, 2> tq;
  for (int j = 0; j < 2; ++j) {
    const double rho = std::abs(z.c[j]);
    if (rho == 0) {
      if (p.slope[j] > 0) return kNegInf;
      tq[j] = kNegInf;
    } else {
      tq[j] = std::log(rho);
      v += p.slope[j] * tq[j];
    }
  }
  // clamp/extend per axis on the rectangular grid
  auto axis_pos = [&](int j, double t, size_t& i0, size_t& i1, double& lam,
                      double& slope_out) {
    const auto& ts = p.t[j];
    slope_out = 0;
    if (t >= ts.back()) {
      i0 = i1 = ts.size() - 1;
      lam = 0;
      return;
    }
    if (t <= ts.front()) {
      i0 = 0;
      i1 = 1;
      lam = 0;
      slope_out = t == kNegInf ? kNegInf : t - ts.front();  // handled by caller
      return;
    }
    size_t i = 1;
    while (ts[i] < t) ++i;
    i0 = i - 1;
    i1 = i;
    lam = (t - ts[i0]) / (ts[i1] - ts[i0]);
  };
  size_t a0, a1, b0, b1;
  double la, lb, ea, eb;
  axis_pos(0, tq[0], a0, a1, la, ea);
  axis_pos(1, tq[1], b0, b1, lb, eb);
  auto corner = [&](size_t i1_, size_t i2_) { return p.at(i1_, i2_); };
  double ub = (1 - la) * ((1 - lb) * corner(a0, b0) + lb * corner(a0, b1)) +
              la * ((1 - lb) * corner(a1, b0) + lb * corner(a1, b1));
  // left extensions: continue with the first-segment slope along that axis
  for (int j = 0; j < 2; ++j) {
    const double e = j == 0 ? ea : eb;
    if (e == 0) continue;
    const auto& ts = p.t[j];
    // first-slope along axis j at the interpolated other coordinate
    double u0, u1;
    if (j == 0) {
      u0 = (1 - lb) * corner(0, b0) + lb * corner(0, b1);
      u1 = (1 - lb) * corner(1, b0) + lb * corner(1, b1);
    } else {
      u0 = (1 - la) * corner(a0, 0) + la * corner(a1, 0);
      u1 = (1 - la) * corner(a0, 1) + la * corner(a1, 1);
    }
    const double s = (u1 - u0) / (ts[1] - ts[0]);
    if (e == kNegInf) {
      if (s > 1e-12) return kNegInf;
      continue;  // flat axis: u0 already counted via lam = 0 at the left edge
    }
    ub += s * e;
  }
  return v + ub;
}

/// Lift a one-variable envelope back into a Weight whose bounded part
/// reproduces the envelope exactly at the t-grid sites (piecewise-linear
/// in rho between them), so re-running the envelope on it changes nothing
/// at the sites.
inline Weight envelope_as_weight(const EnvelopeResult& r, const Weight& src) {
  if (r.env.n != 1) throw ArgumentError("envelope weight lift: n = 1 only");
  std::vector<double> knots, vals;
  knots.reserve(r.env.t[0].size() + 1);
  vals.reserve(knots.capacity());
  // extend flat to rho = 0 with the leftmost value (slope carries the pole)
  knots.push_back(0.0);
  vals.push_back(r.env.u.front());
  for (size_t i = 0; i < r.env.t[0].size(); ++i) {
    knots.push_back(std::exp(r.env.t[0][i]));
    vals.push_back(r.env.u[i]);
  }
  std::vector<RadialProfile> prof{RadialProfile::table(knots, vals)};
  return Weight("envelope_of_" + src.name(), src.domain(), {r.env.slope[0]}, prof, {},
                Psh::yes);
}

/// Mean of F over the circle |z_j - a_j| = rho (other coordinate fixed),
/// by the periodic trapezoid rule. Returns -inf if any node is -inf.
inline double circle_mean(const std::function<double(const Point&)>& F, const Point& a,
                          int axis, double rho, int nodes = 2048) {
  if (axis < 0 || axis >= a.n) throw ArgumentError("circle mean: bad axis");
  double acc = 0;
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * std::numbers::pi * k / nodes;
    Point z = a;
    z.c[axis] += Complex(rho * std::cos(th), rho * std::sin(th));
    const double v = F(z);
    if (v == kNegInf) return kNegInf;
    acc += v;
  }
  return acc / nodes;
}

struct CircleSpec {
  Point center;
  int axis = 0;
  double rho = 0.1;
};

/// Worst violation of the circle sub-mean inequality F(a) <= mean over the
/// given circles; positive values witness failure of subharmonicity.
inline double submean_excess(const std::function<double(const Point&)>& F,
                             const std::vector<CircleSpec>& circles, int nodes = 2048) {
  double worst = kNegInf;
  for (const CircleSpec& c : circles) {
    const double fa = F(c.center);
    if (fa == kNegInf) {
      worst = std::max(worst, 0.0);
      continue;  // -inf center can never violate
    }
    const double mean = circle_mean(F, c.center, c.axis, c.rho, nodes);
    if (mean == kNegInf) {
      worst = kPosInf;  // finite center against a -inf mean: flag loudly
      continue;
    }
    worst = std::max(worst, fa - mean);
  }
  return worst;
}

}  // namespace demlab
