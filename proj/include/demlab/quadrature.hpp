#pragma once
// Composite Gauss-Legendre quadrature on dyadically refined panels.
//
// The radial moment integrals behind the kernel engines have two hard
// spots on [0, R]: an r^p endpoint singularity at r = 0 (p > -1 after
// the inclusion test, possibly fractional) and strong mass concentration
// near r = R for high monomial degrees and steep exp(-2mV) factors.
// Panels are refined dyadically toward both endpoints; the depth doubles
// until two consecutive refinements agree to the requested relative
// tolerance, within a hard node budget.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "common.hpp"

namespace demlab {

struct QuadSpec {
  double rel_tol = 1e-10;
  int max_nodes = 1 << 14;  // budget per integral
  int panel_order = 20;     // Gauss-Legendre points per panel
};

struct QuadResult {
  double value = 0;
  double err_estimate = 0;  // |last refinement difference|, relative
  int nodes_used = 0;
  bool converged = false;
};

namespace detail {

/// Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1].
/// Newton iteration on the Legendre recurrence; cached per order.
inline const std::vector<std::array<double, 2>>& gauss_legendre(int q) {
  static std::map<int, std::vector<std::array<double, 2>>> cache;
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;

  std::vector<std::array<double, 2>> nw(q);
  for (int i = 0; i < q; ++i) {
    // Chebyshev-style initial guess for the i-th root (descending)
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double p1 = 0, p2 = 0;
    for (int iter = 0; iter < 100; ++iter) {
      p1 = 1.0;
      p2 = 0.0;
      for (int k = 0; k < q; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k + 1.0) * x * p2 - k * p3) / (k + 1.0);
      }
      const double dp = q * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    // recompute P_{q-1} at the converged root for the weight formula
    p1 = 1.0;
    p2 = 0.0;
    for (int k = 0; k < q; ++k) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * k + 1.0) * x * p2 - k * p3) / (k + 1.0);
    }
    const double dp = q * (x * p1 - p2) / (x * x - 1.0);
    nw[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return cache.emplace(q, std::move(nw)).first->second;
}

/// Panel breakpoints on [0, R] at dyadic depth K:
/// 0, R/2^K, ..., R/4, R/2, 3R/4, ..., R(1 - 1/2^K), R.
inline std::vector<double> dyadic_breakpoints(double R, int K) {
  std::vector<double> bp;
  bp.reserve(2 * K + 1);
  bp.push_back(0.0);
  for (int j = K; j >= 1; --j) bp.push_back(R * std::ldexp(1.0, -j));
  for (int j = 2; j <= K; ++j) bp.push_back(R * (1.0 - std::ldexp(1.0, -j)));
  bp.push_back(R);
  return bp;
}

/// Merge known interior kink locations into a panel list so that every
/// panel interior is smooth. Points outside (0, R) or closer than ~1 ulp
/// to an existing breakpoint are dropped.
inline std::vector<double> merge_breakpoints(std::vector<double> bp,
                                             const std::vector<double>& interior,
                                             double R) {
  for (double x : interior)
    if (x > 0.0 && x < R) bp.push_back(x);
  std::sort(bp.begin(), bp.end());
  std::vector<double> out;
  out.reserve(bp.size());
  for (double x : bp)
    if (out.empty() || x - out.back() > 1e-14 * R) out.push_back(x);
  if (out.back() != R) out.back() = R;
  return out;
}

template <class F>
double panels_sum(F&& f, const std::vector<double>& bp, int q) {
  const auto& nw = gauss_legendre(q);
  double total = 0;
  for (size_t p = 0; p + 1 < bp.size(); ++p) {
    const double a = bp[p], b = bp[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (const auto& [x, w] : nw) s += w * f(mid + half * x);
    total += half * s;
  }
  return total;
}

}  // namespace detail

/// Integrate f over [0, R] with the dyadic panel scheme. The refinement
/// decision |I_K - I_{K/2}| <= rel_tol * |I_K| is scale-free, so scaling
/// the integrand by a constant changes nothing about the panel layout.
/// `interior` lists known kinks of f in (0, R); each becomes a panel
/// boundary at every depth, keeping the rule spectral for piecewise-smooth
/// integrands (piecewise-linear weights would otherwise stall refinement).
template <class F>
QuadResult integrate_dyadic(F&& f, double R, const QuadSpec& spec = {},
                            const std::vector<double>& interior = {}) {
  if (!(R > 0)) throw ArgumentError("integrate_dyadic: upper limit must be positive");
  const int q = spec.panel_order;
  const auto breaks = [&](int depth) {
    auto bp = detail::dyadic_breakpoints(R, depth);
    return interior.empty() ? bp : detail::merge_breakpoints(std::move(bp), interior, R);
  };
  int K = 4;
  auto bp = breaks(K);
  double prev = detail::panels_sum(f, bp, q);
  int nodes = static_cast<int>(bp.size() - 1) * q;
  double last_diff = kPosInf;
  QuadResult res;
  while (true) {
    K *= 2;
    bp = breaks(K);
    const int next_nodes = static_cast<int>(bp.size() - 1) * q;
    if (nodes + next_nodes > spec.max_nodes) {
      res.value = prev;
      res.err_estimate = last_diff;
      res.nodes_used = nodes;
      res.converged = false;
      return res;
    }
    const double cur = detail::panels_sum(f, bp, q);
    nodes += next_nodes;
    const double scale = std::max(std::fabs(cur), 1e-300);
    const double diff = std::fabs(cur - prev) / scale;
    last_diff = diff;
    if (diff <= spec.rel_tol) {
      res.value = cur;
      res.err_estimate = diff;
      res.nodes_used = nodes;
      res.converged = true;
      return res;
    }
    prev = cur;
  }
}

/// Throwing wrapper used by the moment builders.
template <class F>
QuadResult integrate_or_throw(F&& f, double R, const QuadSpec& spec = {},
                              const std::vector<double>& interior = {}) {
  QuadResult r = integrate_dyadic(f, R, spec, interior);
  if (!r.converged)
    throw QuadAccuracyError("quadrature did not converge within the node budget",
                            r.err_estimate);
  return r;
}

}  // namespace demlab
