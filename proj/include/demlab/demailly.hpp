#pragma once
// The m-th approximant V_m = (1/2m) log K_m of a weight V, its two-sided
// sandwich against the psh envelope, convergence runs over an m-schedule,
// and the regularized-limsup field. The upper bound uses the exact identity
// (1/2) log(1/vol B(z, r)) = log(c_n / r^n) with c_n = sqrt(n!/pi^n).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "common.hpp"
#include "domains.hpp"
#include "envelope.hpp"
#include "weights.hpp"

namespace demlab {

inline double bergman_point_constant(int n) {
  if (n < 1 || n > 2) throw ArgumentError("point constant: n must be 1 or 2");
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return std::sqrt(f / std::pow(std::numbers::pi, n));
}

inline double demailly_value(const KernelValue& kv, int m) {
  if (kv.log_value == kNegInf) return kNegInf;
  return kv.log_value / (2.0 * m);
}

/// Ball radius used in the sandwich at z: half the boundary distance,
/// capped at m^(-1/2) so it shrinks along the schedule.
inline double sandwich_radius(const Domain& dom, const Point& z, int m) {
  return std::min(0.5 * dist_to_boundary(dom, z), 1.0 / std::sqrt((double)m));
}

/// V_m(z) <= sup_{B(z,r)} V + (1/m) log(c_n / r^n), up to the truncation
/// slack log1p(tail_rel)/(2m).
struct UpperBoundRow {
  double vm = 0, bound = 0, slack = 0, slack_tol = 0;
  bool ok = true;
};

inline UpperBoundRow upper_bound_check(const Weight& w, const KernelValue& kv, int m,
                                       const Point& z, double r) {
  UpperBoundRow u;
  u.vm = demailly_value(kv, m);
  const int n = w.domain().n;
  const double ball_sup = weight_ball_sup(w, z, r);
  u.bound = ball_sup + (std::log(bergman_point_constant(n)) - n * std::log(r)) / m;
  u.slack = u.bound - u.vm;  // +inf when vm = -inf: the bound holds trivially
  u.slack_tol = std::isfinite(kv.tail_rel) ? std::log1p(kv.tail_rel) / (2.0 * m) + 1e-9
                                           : kPosInf;
  u.ok = !(u.slack < -u.slack_tol);
  return u;
}

struct ConvergeRow {
  std::string weight;
  int m = 1;
  Point z;
  double vm = 0;
  double vtilde = 0;
  double error = 0;
  double tail = 0;
  double lower_slack = 0;
  double upper_slack = 0;
  double r_used = 0;
};

struct WeightRunSummary {
  std::string weight;
  std::vector<int> schedule;
  std::vector<double> max_abs_error;  // per schedule entry, finite rows only
  std::vector<double> max_deficit;    // per entry: max m (V - V_m) over psh rows
  double c1_estimate = 0;             // max of max_deficit, 0 if none finite
  double rate = 0;                    // LS slope of log max|error| in log m
  bool error_shrinks = true;          // top-of-schedule vs mid-schedule comparison
  long minus_inf_flagged = 0;         // rows where exactly one of V_m, Vtilde is -inf
  bool upper_ok = true;
  double worst_upper_violation = 0;
};

struct ConvergenceReport {
  int n = 1;
  std::vector<ConvergeRow> rows;
  std::vector<WeightRunSummary> summaries;
};

/// Later-half split point of a schedule: entries with index >= ceil(L/2).
inline size_t schedule_split(size_t L) { return (L + 1) / 2; }

inline std::vector<int> default_schedule() { return {1, 2, 4, 8, 16, 32, 64}; }

/// Full convergence run for one weight. Toric weights are compared against
/// the psh envelope; non-toric weights fall back to the Cauchy surrogate
/// error V_{2m} - V_m (rows whose doubled index leaves the schedule carry
/// a NaN error).
inline ConvergenceReport converge_run(const Weight& w, const GridSpec& g,
                                      const std::vector<int>& schedule,
                                      const QuadSpec& q = {}) {
  if (schedule.empty()) throw ArgumentError("converge: empty m-schedule");
  for (size_t i = 0; i + 1 < schedule.size(); ++i)
    if (!(schedule[i] < schedule[i + 1]))
      throw ArgumentError("converge: m-schedule must increase");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Domain& dom = w.domain();
  ConvergenceReport rep;
  rep.n = dom.n;
  const std::vector<Point> pts = make_grid(dom, g);

  const bool toric = w.toric();
  EnvelopeResult env;
  if (toric) env = psh_envelope_toric(w, g);

  std::map<int, KernelEvaluator> evals;
  for (int m : schedule) evals.emplace(m, KernelEvaluator(w, m, Engine::automatic, q));

  WeightRunSummary sum;
  sum.weight = w.name();
  sum.schedule = schedule;
  sum.max_abs_error.assign(schedule.size(), 0.0);
  sum.max_deficit.assign(schedule.size(), kNegInf);

  // vm per (schedule index, point) for the Cauchy surrogate
  std::vector<std::vector<double>> vm_grid(schedule.size(),
                                           std::vector<double>(pts.size()));
  for (size_t si = 0; si < schedule.size(); ++si) {
    const KernelEvaluator& ke = evals.at(schedule[si]);
    for (size_t pi = 0; pi < pts.size(); ++pi)
      vm_grid[si][pi] = demailly_value(ke.at(pts[pi]), schedule[si]);
  }

  for (size_t pi = 0; pi < pts.size(); ++pi) {
    const Point& z = pts[pi];
    const double vt = toric ? envelope_value(env, z) : nan;
    const double v_here = w.eval(z);
    for (size_t si = 0; si < schedule.size(); ++si) {
      const int m = schedule[si];
      const KernelEvaluator& ke = evals.at(m);
      const KernelValue kv = ke.at(z);
      ConvergeRow row;
      row.weight = w.name();
      row.m = m;
      row.z = z;
      row.vm = vm_grid[si][pi];
      row.vtilde = vt;
      row.tail = kv.tail_rel;
      row.r_used = sandwich_radius(dom, z, m);

      const UpperBoundRow ub = upper_bound_check(w, kv, m, z, row.r_used);
      row.upper_slack = ub.slack;
      if (!ub.ok) {
        sum.upper_ok = false;
        sum.worst_upper_violation =
            std::max(sum.worst_upper_violation, -(ub.slack + ub.slack_tol));
      }

      if (toric) {
        if (row.vm == kNegInf && vt == kNegInf)
          row.error = 0.0;  // both sit on the pole axis
        else if (row.vm == kNegInf || vt == kNegInf) {
          row.error = row.vm == kNegInf ? kNegInf : kPosInf;
          ++sum.minus_inf_flagged;
        } else {
          row.error = row.vm - vt;
          sum.max_abs_error[si] = std::max(sum.max_abs_error[si], std::fabs(row.error));
        }
      } else {
        const auto nx = std::find(schedule.begin(), schedule.end(), 2 * m);
        if (nx == schedule.end())
          row.error = nan;
        else {
          const double v2 = vm_grid[nx - schedule.begin()][pi];
          if (v2 == kNegInf && row.vm == kNegInf)
            row.error = 0.0;
          else if (v2 == kNegInf || row.vm == kNegInf) {
            row.error = kPosInf;
            ++sum.minus_inf_flagged;
          } else {
            row.error = v2 - row.vm;
            sum.max_abs_error[si] = std::max(sum.max_abs_error[si], std::fabs(row.error));
          }
        }
      }

      if (w.psh() == Psh::yes && v_here > kNegInf && row.vm > kNegInf)
        sum.max_deficit[si] = std::max(sum.max_deficit[si], m * (v_here - row.vm));
      row.lower_slack = nan;  // filled below once the deficit constant is known
      rep.rows.push_back(std::move(row));
    }
  }

  for (double d : sum.max_deficit)
    if (d > kNegInf) sum.c1_estimate = std::max(sum.c1_estimate, d);
  if (w.psh() == Psh::yes) {
    for (ConvergeRow& row : rep.rows) {
      const double v_here = w.eval(row.z);
      if (v_here > kNegInf && row.vm > kNegInf)
        row.lower_slack = sum.c1_estimate / row.m - (v_here - row.vm);
    }
  }

  // least-squares slope of log max|error| against log m
  {
    std::vector<double> xs, ys;
    for (size_t si = 0; si < schedule.size(); ++si)
      if (sum.max_abs_error[si] > 0) {
        xs.push_back(std::log((double)schedule[si]));
        ys.push_back(std::log(sum.max_abs_error[si]));
      }
    if (xs.size() >= 2) {
      double mx = 0, my = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
      }
      mx /= xs.size();
      my /= ys.size();
      double num = 0, den = 0;
      for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
      }
      sum.rate = den > 0 ? num / den : 0.0;
    }
  }
  {
    const size_t L = schedule.size();
    const size_t mid = (L - 1) / 2;
    sum.error_shrinks =
        sum.max_abs_error[L - 1] <= sum.max_abs_error[mid] + 1e-12;
  }
  rep.summaries.push_back(std::move(sum));
  return rep;
}

inline void merge_reports(ConvergenceReport& into, ConvergenceReport&& from) {
  if (into.rows.empty()) into.n = from.n;
  if (into.n != from.n)
    throw ArgumentError("cannot merge reports of different dimension");
  for (auto& r : from.rows) into.rows.push_back(std::move(r));
  for (auto& s : from.summaries) into.summaries.push_back(std::move(s));
}

/// Pointwise max of the later-half approximants followed by the usc
/// regularization: the computable stand-in for (limsup V_m)^*.
struct PhiResult {
  SampledField phi;
  std::vector<int> used_ms;
  double max_phi_minus_vtilde = kNegInf;  // -inf when no finite comparison exists
};

inline PhiResult limsup_regularized(const Weight& w, const GridSpec& g,
                                    const std::vector<int>& schedule,
                                    const QuadSpec& q = {}) {
  if (schedule.empty()) throw ArgumentError("limsup: empty m-schedule");
  PhiResult res;
  const size_t split = schedule_split(schedule.size());
  for (size_t si = split; si < schedule.size(); ++si)
    res.used_ms.push_back(schedule[si]);
  if (res.used_ms.empty()) res.used_ms.push_back(schedule.back());

  SampledField field;
  field.domain = w.domain();
  field.grid = g;
  field.points = make_grid(w.domain(), g);
  field.values.assign(field.points.size(), kNegInf);
  for (int m : res.used_ms) {
    KernelEvaluator ke(w, m, Engine::automatic, q);
    for (size_t pi = 0; pi < field.points.size(); ++pi)
      field.values[pi] =
          std::max(field.values[pi], demailly_value(ke.at(field.points[pi]), m));
  }
  res.phi = usc_regularize(field);

  if (w.toric()) {
    const EnvelopeResult env = psh_envelope_toric(w, g);
    for (size_t pi = 0; pi < field.points.size(); ++pi) {
      const double vt = envelope_value(env, field.points[pi]);
      const double ph = res.phi.values[pi];
      if (ph > kNegInf && vt > kNegInf)
        res.max_phi_minus_vtilde = std::max(res.max_phi_minus_vtilde, ph - vt);
      else if (ph > kNegInf && vt == kNegInf)
        res.max_phi_minus_vtilde = kPosInf;
    }
  }
  return res;
}

}  // namespace demlab
