#pragma once
// Orchestration: run every configured weight through the kernel, envelope,
// convergence and limsup machinery, evaluate the invariant checks, and
// collect the artifacts. The process exit code is a bitmask of failed
// check families: kernel = 1, envelope = 2, bounds = 4, converge = 8,
// phi = 16; 0 means every check passed.

#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman.hpp"
#include "common.hpp"
#include "config.hpp"
#include "demailly.hpp"
#include "envelope.hpp"
#include "report.hpp"
#include "weights.hpp"

namespace demlab {

constexpr int kBitKernel = 1;
constexpr int kBitEnvelope = 2;
constexpr int kBitBounds = 4;
constexpr int kBitConverge = 8;
constexpr int kBitPhi = 16;

struct CheckLine {
  std::string name;
  bool ok = true;
  int bit = 0;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;
  std::vector<CheckLine> checks;
  std::map<std::string, std::string> artifacts;  // file name -> content
  nlohmann::ordered_json summary;
};

namespace detail {

/// Deterministic in-domain sample points from raw generator bits.
inline std::vector<Point> sample_points(const Domain& dom, size_t count,
                                        unsigned long long seed) {
  std::mt19937_64 gen(seed);
  auto unit = [&]() { return (double)(gen() >> 11) * 0x1.0p-53; };
  std::vector<Point> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Point p;
    p.n = dom.n;
    for (int j = 0; j < dom.n; ++j) {
      const double r = dom.radius[j] * (0.08 + 0.55 * unit());
      const double th = 2.0 * std::numbers::pi * unit();
      p.c[j] = Complex(r * std::cos(th), r * std::sin(th));
    }
    out.push_back(p);
  }
  return out;
}

inline std::vector<CircleSpec> sample_circles(const Domain& dom) {
  std::vector<CircleSpec> cs;
  const double R1 = dom.radius[0];
  if (dom.n == 1) {
    cs.push_back({Point::one(Complex(0.30 * R1, 0.0)), 0, 0.10 * R1});
    cs.push_back({Point::one(Complex(-0.22 * R1, 0.34 * R1)), 0, 0.12 * R1});
    cs.push_back({Point::one(Complex(0.55 * R1, 0.10 * R1)), 0, 0.08 * R1});
  } else {
    const double R2 = dom.radius[1];
    cs.push_back({Point::two(Complex(0.40 * R1, 0.0), Complex(0.30 * R2, 0.0)), 0,
                  0.10 * R1});
    cs.push_back({Point::two(Complex(0.40 * R1, 0.0), Complex(0.30 * R2, 0.0)), 1,
                  0.10 * R2});
    cs.push_back({Point::two(Complex(-0.30 * R1, 0.20 * R1), Complex(0.45 * R2, 0.0)),
                  1, 0.12 * R2});
  }
  return cs;
}

}  // namespace detail

/// All structural checks for one configuration. Kept separate from the
/// artifact-producing run so `check-invariants` can call it directly.
inline std::vector<CheckLine> invariant_checks(const RunConfig& cfg) {
  std::vector<CheckLine> out;
  auto push = [&](const std::string& name, int bit, bool ok, const std::string& det) {
    out.push_back({name, ok, bit, det});
  };
  const int m_probe = cfg.schedule[cfg.schedule.size() / 2];
  const std::vector<Point> probes = detail::sample_points(cfg.domain, 4, cfg.seed);
  const std::vector<CircleSpec> circles = detail::sample_circles(cfg.domain);

  bool did_cross_engine = false;
  for (const Weight& w : cfg.weights) {
    const std::string wn = w.name();
    KernelEvaluator ke(w, m_probe, Engine::automatic, cfg.quad, cfg.clip_tol);

    // extremal witness: unit norm, attained kernel value, Cauchy-Schwarz
    {
      Point z0 = probes[0];
      const WitnessReport wr = extremal_witness_check(ke, z0, probes);
      const bool ok = wr.norm_gap <= 1e-8 && wr.attain_gap <= 1e-8 &&
                      wr.cs_excess <= 1e-8;
      push("kernel.witness." + wn, kBitKernel, ok,
           "norm_gap=" + fmt17(wr.norm_gap) + " attain_gap=" + fmt17(wr.attain_gap) +
               " cs_excess=" + fmt17(wr.cs_excess));
    }

    // adding c to the weight scales every norm by e^(-2mc), so log K
    // shifts by exactly +2mc
    {
      const double c = 0.3125;  // exactly representable
      KernelEvaluator ks(w.with_offset(c), m_probe, Engine::automatic, cfg.quad,
                         cfg.clip_tol);
      double worst = 0;
      for (const Point& z : probes) {
        const double a = ke.at(z).log_value, b = ks.at(z).log_value;
        if (a == kNegInf && b == kNegInf) continue;
        worst = std::max(worst,
                         std::fabs(b - (a + 2.0 * m_probe * c)) /
                             std::max(1.0, std::fabs(a)));
      }
      push("kernel.offset_equivariance." + wn, kBitKernel, worst <= 1e-12,
           "rel_gap=" + fmt17(worst));
    }

    // the two engines agree on toric disk weights
    if (!did_cross_engine && w.toric() && cfg.domain.n == 1) {
      did_cross_engine = true;
      KernelEvaluator kd(w, m_probe, Engine::diagonal, cfg.quad, cfg.clip_tol);
      KernelEvaluator kg(w, m_probe, Engine::gram, cfg.quad, cfg.clip_tol);
      double worst = 0;
      for (const Point& z : probes) {
        const double a = kd.at(z).log_value, b = kg.at(z).log_value;
        if (a == kNegInf && b == kNegInf) continue;
        worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(a)));
      }
      push("kernel.cross_engine." + wn, kBitKernel, worst <= 1e-6,
           "rel_gap=" + fmt17(worst));
    }

    // V_m is built from log-moduli of holomorphic data, so it obeys the
    // circle sub-mean inequality
    {
      auto F = [&](const Point& z) { return demailly_value(ke.at(z), m_probe); };
      const double ex = submean_excess(F, circles);
      push("kernel.submean." + wn, kBitKernel, ex <= 1e-6, "excess=" + fmt17(ex));
    }

    if (w.toric()) {
      const EnvelopeResult env = psh_envelope_toric(w, cfg.grid, cfg.envelope_tol);

      // envelope never exceeds the weight at its own sample sites
      {
        const LogProfile raw = weight_log_profile(w, cfg.grid);
        double worst = kNegInf;
        for (size_t i = 0; i < raw.u.size(); ++i)
          worst = std::max(worst, env.env.u[i] - raw.u[i]);
        push("envelope.below_weight." + wn, kBitEnvelope, worst <= 1e-9,
             "max_excess=" + fmt17(worst));
      }

      // feeding the envelope back through the machinery changes nothing
      {
        double worst = 0;
        if (cfg.domain.n == 1) {
          const Weight lifted = envelope_as_weight(env, w);
          const EnvelopeResult again = psh_envelope_toric(lifted, cfg.grid,
                                                          cfg.envelope_tol);
          for (size_t i = 0; i < env.env.u.size(); ++i)
            worst = std::max(worst, std::fabs(again.env.u[i] - env.env.u[i]));
        } else {
          const EnvelopeResult again = envelope_iterate(env.env, cfg.envelope_tol);
          for (size_t i = 0; i < env.env.u.size(); ++i)
            worst = std::max(worst, std::fabs(again.env.u[i] - env.env.u[i]));
        }
        push("envelope.idempotent." + wn, kBitEnvelope, worst <= 1e-9,
             "max_change=" + fmt17(worst));
      }

      // the envelope itself obeys the circle sub-mean inequality
      {
        auto F = [&](const Point& z) { return envelope_value(env, z); };
        const double ex = submean_excess(F, circles);
        push("envelope.submean." + wn, kBitEnvelope, ex <= 1e-6,
             "excess=" + fmt17(ex));
      }
    }
  }
  return out;
}

inline RunOutcome run_all(const RunConfig& cfg) {
  RunOutcome out;
  ConvergenceReport rep;
  std::vector<KernelRow> krows;
  nlohmann::ordered_json jw = nlohmann::ordered_json::array();

  for (const Weight& w : cfg.weights) {
    ConvergenceReport one = converge_run(w, cfg.grid, cfg.schedule, cfg.quad);
    const WeightRunSummary& s = one.summaries.front();

    nlohmann::ordered_json entry = summary_schedule_json(s);
    out.checks.push_back({"bounds.upper." + w.name(), s.upper_ok, kBitBounds,
                          "worst_violation=" + fmt17(s.worst_upper_violation)});
    if (w.psh() == Psh::yes) {
      double worst = 0;
      for (const ConvergeRow& r : one.rows)
        if (std::isfinite(r.lower_slack)) worst = std::min(worst, r.lower_slack);
      out.checks.push_back({"bounds.lower." + w.name(), worst >= -1e-9, kBitBounds,
                            "min_slack=" + fmt17(worst)});
    }
    if (w.toric())
      out.checks.push_back({"converge.error_shrinks." + w.name(), s.error_shrinks,
                            kBitConverge,
                            "top=" + fmt17(s.max_abs_error.back()) + " mid=" +
                                fmt17(s.max_abs_error[(s.max_abs_error.size() - 1) / 2])});

    if (w.toric()) {
      const EnvelopeResult env = psh_envelope_toric(w, cfg.grid, cfg.envelope_tol);
      out.artifacts["envelope_" + w.name() + ".csv"] = envelope_csv(env);
      entry["envelope_iterations"] = env.iterations;
      entry["envelope_final_gap"] = fmt17(env.final_gap);
    }

    const PhiResult phi = limsup_regularized(w, cfg.grid, cfg.schedule, cfg.quad);
    entry["phi_ms"] = phi.used_ms;
    entry["phi_max_minus_vtilde"] = fmt17(phi.max_phi_minus_vtilde);
    if (w.toric())
      out.checks.push_back(
          {"phi.below_envelope." + w.name(),
           !(phi.max_phi_minus_vtilde > cfg.phi_tol), kBitPhi,
           "max_gap=" + fmt17(phi.max_phi_minus_vtilde) + " tol=" + fmt17(cfg.phi_tol)});

    // kernel rows at the top of the schedule
    {
      const int m_top = cfg.schedule.back();
      KernelEvaluator ke(w, m_top, Engine::automatic, cfg.quad, cfg.clip_tol);
      for (const Point& z : make_grid(cfg.domain, cfg.grid))
        krows.push_back({w.name(), m_top, z, ke.at(z)});
    }

    jw.push_back(std::move(entry));
    merge_reports(rep, std::move(one));
  }

  for (CheckLine& c : invariant_checks(cfg)) out.checks.push_back(std::move(c));

  for (const CheckLine& c : out.checks)
    if (!c.ok) out.exit_code |= c.bit;

  out.artifacts["converge.csv"] = converge_csv(rep);
  out.artifacts["kernel.csv"] = kernel_csv(krows, cfg.domain.n);

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["domain"] = cfg.domain.n == 1 ? "disk" : "polydisk";
  j["radius"] = fmt17(cfg.domain.radius[0]);
  if (cfg.domain.n == 2) j["radius2"] = fmt17(cfg.domain.radius[1]);
  j["grid"] = cfg.grid.mode == GridMode::radial
                  ? "radial"
                  : cfg.grid.mode == GridMode::cartesian ? "cartesian" : "log_radial";
  j["points"] = cfg.grid.points_per_axis;
  j["margin"] = fmt17(cfg.grid.margin);
  j["schedule"] = cfg.schedule;
  j["seed"] = cfg.seed;
  j["weights"] = jw;
  nlohmann::ordered_json jc = nlohmann::ordered_json::array();
  for (const CheckLine& c : out.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["ok"] = c.ok;
    e["detail"] = c.detail;
    jc.push_back(std::move(e));
  }
  j["checks"] = jc;
  j["exit_code"] = out.exit_code;
  out.summary = std::move(j);
  out.artifacts["summary.json"] = out.summary.dump(2) + "\n";
  return out;
}

}  // namespace demlab
