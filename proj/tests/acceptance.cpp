// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single [PASS]/[FAIL] line with its wall time.  Exit status
// is the number of failed checks, so the gate composes with ctest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "demlab/demailly.hpp"
#include "demlab/envelope.hpp"
#include "oracles.hpp"

using namespace demlab;

namespace {

// Tolerances and budgets, fixed here on purpose: the gate is only meaningful
// if nothing downstream can loosen it.
constexpr double kKernelRelTol = 1e-7;       // closed forms and engine agreement
constexpr double kDeficitGrowth = 0.05;      // allowed top-half deficit creep
constexpr double kConvergeAbsTol = 0.1;      // |V_64 - Vtilde| away from the rim
constexpr double kMonotoneTol = 1e-9;        // envelope-weight kernel comparison
constexpr double kOffsetTol = 1e-12;         // translation equivariance
constexpr double kDominationTol = 1e-12;     // envelope below its data
constexpr double kIdempotenceTol = 1e-9;     // envelope of envelope
constexpr double kSubmeanTol = 1e-6;         // circle sub-mean slack
constexpr double kBudgetClosedForm = 1.0;    // seconds
constexpr double kBudgetPole = 5.0;
constexpr double kBudgetSandwich = 60.0;
constexpr double kBudgetConverge = 120.0;

Weight disk_weight(const std::string& name, CatalogParams par = {}) {
  return catalog(Domain::disk(1.0), name, par);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

// The six toric catalog entries, used by the agreement and envelope checks.
std::vector<Weight> toric_catalog() {
  CatalogParams dip;
  dip.knots = {0.0, 0.3, 0.7, 1.0};
  dip.values = {0.0, 0.05, -0.1, 0.2};
  return {disk_weight("zero"),           disk_weight("log_pole"),
          disk_weight("abs_square"),     disk_weight("neg_abs_square"),
          disk_weight("radial_custom", dip), disk_weight("angular_bump")};
}

bool closed_form_kernel(std::string& d) {
  const KernelEvaluator ke(disk_weight("zero"), 1);
  if (ke.basis().N[0] != 60) {
    d = "unexpected basis width";
    return false;
  }
  double worst = 0;
  for (double r : {0.0, 0.25, 0.5, 0.75}) {
    const double got = ke.at(Point::one({r, 0.0})).value;
    const double want = oracle::disk_kernel(r);
    worst = std::max(worst, std::fabs(got - want) / want);
  }
  d = "max rel err " + sci(worst);
  return worst <= kKernelRelTol;
}

bool pole_kernel(std::string& d) {
  const Weight w = disk_weight("log_pole");
  double worst = 0;
  for (int m = 1; m <= 8; ++m) {
    const KernelEvaluator ke(w, m);
    if (ke.basis().a0[0] != m) {
      d = "first degree for m=" + std::to_string(m) + " is " +
          std::to_string(ke.basis().a0[0]);
      return false;
    }
    for (double r : {0.25, 0.5, 0.75}) {
      const double got = ke.at(Point::one({r, 0.0})).value;
      const double want = oracle::pole_kernel(r, m);
      worst = std::max(worst, std::fabs(got - want) / want);
    }
  }
  d = "max rel err " + sci(worst);
  return worst <= kKernelRelTol;
}

bool sandwich_bounds(std::string& d) {
  const std::vector<int> sched = default_schedule();
  struct Job {
    Weight w;
    GridSpec g;
  };
  std::vector<Job> jobs;
  for (const char* n : {"zero", "log_pole", "abs_square"})
    jobs.push_back({disk_weight(n), GridSpec{}});
  GridSpec gp;
  gp.points_per_axis = 12;
  jobs.push_back({catalog(Domain::polydisk(1.0, 1.0), "log_pole"), gp});

  for (const Job& job : jobs) {
    const ConvergenceReport rep = converge_run(job.w, job.g, sched);
    const WeightRunSummary& s = rep.summaries.front();
    if (!s.upper_ok) {
      d = s.weight + ": upper bound violated by " + sci(s.worst_upper_violation);
      return false;
    }
    const size_t split = schedule_split(sched.size());
    double bottom = kNegInf, top = kNegInf;
    for (size_t i = 0; i < sched.size(); ++i)
      (i < split ? bottom : top) = std::max(i < split ? bottom : top, s.max_deficit[i]);
    const double allowance = kDeficitGrowth * std::max(1.0, std::fabs(bottom));
    if (!(top < bottom + allowance)) {
      d = s.weight + ": deficit grows, top " + sci(top) + " vs bottom " + sci(bottom);
      return false;
    }
  }
  d = std::to_string(jobs.size()) + " weights, deficits stable and bounds hold";
  return true;
}

bool pointwise_convergence(std::string& d) {
  const Weight w = disk_weight("neg_abs_square");
  const GridSpec g{};
  const EnvelopeResult er = psh_envelope_toric(w, g);
  for (double u : er.env.u)
    if (u != -1.0) {
      d = "envelope is not the constant -1";
      return false;
    }
  const KernelEvaluator k8(w, 8), k64(w, 64);
  double worst64 = 0;
  for (const Point& z : make_grid(w.domain(), g)) {
    if (dist_to_boundary(w.domain(), z) < 0.2) continue;
    const double e8 = std::fabs(demailly_value(k8.at(z), 8) + 1.0);
    const double e64 = std::fabs(demailly_value(k64.at(z), 64) + 1.0);
    if (e64 > e8 + 1e-12) {
      d = "error grew between m=8 and m=64 at " + point_to_string(z);
      return false;
    }
    worst64 = std::max(worst64, e64);
  }
  d = "max |V_64 - Vtilde| = " + sci(worst64);
  return worst64 <= kConvergeAbsTol;
}

bool kernel_monotonicity(std::string& d) {
  const Weight w = disk_weight("neg_abs_square");
  const GridSpec g{};
  const Weight lifted = envelope_as_weight(psh_envelope_toric(w, g), w);
  const std::vector<Point> pts = make_grid(w.domain(), g);
  double worst = kNegInf;
  for (int m : default_schedule()) {
    const KernelEvaluator ka(lifted, m), kb(w, m);
    for (const Point& z : pts) {
      const double gap = demailly_value(ka.at(z), m) - demailly_value(kb.at(z), m);
      worst = std::max(worst, gap);
      if (gap > kMonotoneTol) {
        d = "V_m rose under the envelope at m=" + std::to_string(m) + ", gap " + sci(gap);
        return false;
      }
    }
  }
  d = "max gap " + sci(worst);
  return true;
}

bool translation_equivariance(std::string& d) {
  std::mt19937_64 gen(20260822);
  auto unit = [&gen] { return double(gen() >> 11) * 0x1.0p-53; };
  const std::vector<std::string> names = {"zero", "log_pole", "abs_square",
                                          "neg_abs_square"};
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const Weight w = disk_weight(names[i % names.size()]);
    const int m = 1 + i % 8;
    const double r = 0.1 + 0.75 * unit();
    const double th = 2.0 * std::numbers::pi * unit();
    const Point z = Point::one({r * std::cos(th), r * std::sin(th)});
    const KernelEvaluator base(w, m);
    const double v0 = demailly_value(base.at(z), m);
    for (double c : {-1.0, 0.5}) {
      const KernelEvaluator shifted(w.with_offset(c), m);
      const double diff = demailly_value(shifted.at(z), m) - v0;
      worst = std::max(worst, std::fabs(diff - c));
    }
  }
  d = "max |shift error| " + sci(worst);
  return worst <= kOffsetTol;
}

bool cross_engine_agreement(std::string& d) {
  const std::vector<Point> probes = {Point::one({0.35, 0.2}), Point::one({-0.55, 0.1}),
                                     Point::one({0.0, 0.75})};
  double worst = 0;
  for (const Weight& w : toric_catalog()) {
    for (int m : {1, 2, 4, 8}) {
      const KernelEvaluator kd(w, m, Engine::diagonal);
      const KernelEvaluator kg(w, m, Engine::gram);
      for (const Point& z : probes) {
        const double a = kd.at(z).value, b = kg.at(z).value;
        worst = std::max(worst, std::fabs(a - b) / std::max(a, b));
      }
    }
  }
  d = "max rel disagreement " + sci(worst);
  return worst <= kKernelRelTol;
}

bool envelope_properties(std::string& d) {
  const GridSpec g{};
  const std::vector<CircleSpec> circles = {{Point::one({0.2, 0.1}), 0, 0.08},
                                           {Point::one({-0.3, 0.25}), 0, 0.08},
                                           {Point::one({0.45, -0.2}), 0, 0.08}};
  for (const Weight& w : toric_catalog()) {
    const LogProfile prof = weight_log_profile(w, g);
    const EnvelopeResult er = psh_envelope_toric(w, g);
    if (er.iterations > 50) {
      d = w.name() + ": too many alternation steps";
      return false;
    }
    for (size_t i = 0; i < prof.u.size(); ++i)
      if (er.env.u[i] > prof.u[i] + kDominationTol) {
        d = w.name() + ": envelope exceeds its data";
        return false;
      }
    const EnvelopeResult again = psh_envelope_toric(envelope_as_weight(er, w), g);
    double idem = 0;
    for (size_t i = 0; i < er.env.u.size(); ++i)
      idem = std::max(idem, std::fabs(again.env.u[i] - er.env.u[i]));
    if (idem > kIdempotenceTol) {
      d = w.name() + ": envelope not idempotent, gap " + sci(idem);
      return false;
    }
    const double excess = submean_excess(
        [&er](const Point& z) { return envelope_value(er, z); }, circles);
    if (excess > kSubmeanTol) {
      d = w.name() + ": envelope breaks the circle sub-mean bound by " + sci(excess);
      return false;
    }
  }
  d = "domination, idempotence and sub-mean hold on the toric catalog";
  return true;
}

bool submean_vm(std::string& d) {
  CatalogParams bump;
  bump.eps = 0.02;
  const std::vector<Weight> ws = {disk_weight("zero"), disk_weight("log_pole"),
                                  disk_weight("neg_abs_square"),
                                  disk_weight("angular_bump", bump)};
  std::mt19937_64 gen(9);
  auto unit = [&gen] { return double(gen() >> 11) * 0x1.0p-53; };
  std::vector<CircleSpec> circles;
  for (int i = 0; i < 10; ++i) {
    const double r = 0.10 + 0.5 * unit();
    const double th = 2.0 * std::numbers::pi * unit();
    const Point a = Point::one({r * std::cos(th), r * std::sin(th)});
    for (double rho : {0.05, 0.08, 0.12}) circles.push_back({a, 0, rho});
  }
  double worst = kNegInf;
  for (const Weight& w : ws)
    for (int m : {4, 16}) {
      const KernelEvaluator ke(w, m);
      const double excess = submean_excess(
          [&ke, m](const Point& z) { return demailly_value(ke.at(z), m); }, circles);
      worst = std::max(worst, excess);
      if (excess > kSubmeanTol) {
        d = w.name() + " at m=" + std::to_string(m) + ": excess " + sci(excess);
        return false;
      }
    }
  d = "max excess " + sci(worst);
  return true;
}

bool usc_regularization(std::string& d) {
  const Domain disk = Domain::disk(1.0);

  // plateau: isolated dips and spikes at interior and rim sites are invisible
  GridSpec gc;
  gc.mode = GridMode::cartesian;
  gc.points_per_axis = 12;
  SampledField base;
  base.domain = disk;
  base.grid = gc;
  base.points = make_grid(disk, gc);
  base.values.assign(base.points.size(), 3.0);
  const SampledField flat = usc_regularize(base);
  if (flat.values != base.values) {
    d = "constant field not fixed";
    return false;
  }
  const size_t interior = base.points.size() / 2;
  const size_t rim = base.points.size() - 1;
  for (size_t site : {interior, rim})
    for (double bad : {-5.0, 20.0}) {
      SampledField tweaked = base;
      tweaked.values[site] = bad;
      if (usc_regularize(tweaked).values != base.values) {
        d = "single-site modification leaked at index " + std::to_string(site);
        return false;
      }
    }

  // jump: the closure extends the upper region by exactly one site ring
  GridSpec gr;
  gr.mode = GridMode::radial;
  gr.points_per_axis = 38;
  SampledField step;
  step.domain = disk;
  step.grid = gr;
  step.points = make_grid(disk, gr);
  step.values.resize(step.points.size());
  for (size_t i = 0; i < step.points.size(); ++i)
    step.values[i] = std::abs(step.points[i].c[0]) <= 0.5 ? 1.0 : 0.0;
  const SampledField closed = usc_regularize(step);
  for (size_t i = 0; i < closed.values.size(); ++i) {
    const double want = i <= 21 ? 1.0 : 0.0;
    if (closed.values[i] != want) {
      d = "jump closure wrong at site " + std::to_string(i);
      return false;
    }
  }

  // smooth field: changes stay local and small, and the map stabilizes
  GridSpec gs;
  gs.mode = GridMode::cartesian;
  gs.points_per_axis = 20;
  SampledField smooth;
  smooth.domain = disk;
  smooth.grid = gs;
  smooth.points = make_grid(disk, gs);
  smooth.values.resize(smooth.points.size());
  for (size_t i = 0; i < smooth.points.size(); ++i)
    smooth.values[i] = -std::norm(smooth.points[i].c[0]);
  const double h = smooth.spacing();
  const SampledField once = usc_regularize(smooth);
  const SampledField twice = usc_regularize(once);
  for (size_t i = 0; i < smooth.values.size(); ++i) {
    const double rr = std::abs(smooth.points[i].c[0]);
    if (rr < 6.1 * h) {
      if (std::fabs(once.values[i] - smooth.values[i]) > 30.0 * h * h) {
        d = "change too large near the peak at site " + std::to_string(i);
        return false;
      }
      continue;
    }
    if (once.values[i] != smooth.values[i] || twice.values[i] != once.values[i]) {
      d = "smooth field moved away from its peak at site " + std::to_string(i);
      return false;
    }
  }
  d = "plateau, jump and smooth conventions all exact";
  return true;
}

struct Criterion {
  const char* name;
  double budget;  // seconds; 0 = untimed
  bool (*run)(std::string&);
};

}  // namespace

int main() {
  const std::vector<Criterion> checks = {
      {"closed_form_kernel", kBudgetClosedForm, closed_form_kernel},
      {"pole_kernel", kBudgetPole, pole_kernel},
      {"sandwich_bounds", kBudgetSandwich, sandwich_bounds},
      {"pointwise_convergence", kBudgetConverge, pointwise_convergence},
      {"kernel_monotonicity", 0.0, kernel_monotonicity},
      {"translation_equivariance", 0.0, translation_equivariance},
      {"cross_engine_agreement", 0.0, cross_engine_agreement},
      {"envelope_properties", 0.0, envelope_properties},
      {"submean_vm", 0.0, submean_vm},
      {"usc_regularization", 0.0, usc_regularization},
  };

  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const Criterion& c = checks[i];
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.budget > 0 && secs > c.budget) {
      ok = false;
      detail += "; over budget " + sci(c.budget) + " s";
    }
    std::printf("[%s] %zu. %s (%s, %.2fs)\n", ok ? "PASS" : "FAIL", i + 1, c.name,
                detail.c_str(), secs);
    if (!ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", int(checks.size()) - failures, checks.size());
  return failures;
}
