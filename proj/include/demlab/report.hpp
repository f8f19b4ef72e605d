#pragma once
// Serialization of run artifacts. Every number is printed through fmt17
// (shortest round-trip %.17g), infinities appear as "inf"/"-inf" and NaN as
// "nan", so outputs are byte-identical across runs with equal inputs.

#include <string>
#include <vector>

#include <json.hpp>

#include "bergman.hpp"
#include "common.hpp"
#include "demailly.hpp"
#include "domains.hpp"
#include "envelope.hpp"

namespace demlab {

inline std::string converge_csv(const ConvergenceReport& rep) {
  std::string out = rep.n == 1
                        ? "weight,m,re_z1,im_z1,V_m,V_tilde,error,tail,lower_slack,"
                          "upper_slack,r_used\n"
                        : "weight,m,re_z1,im_z1,re_z2,im_z2,V_m,V_tilde,error,tail,"
                          "lower_slack,upper_slack,r_used\n";
  for (const ConvergeRow& r : rep.rows) {
    out += r.weight + "," + std::to_string(r.m);
    for (int j = 0; j < rep.n; ++j)
      out += "," + fmt17(r.z.c[j].real()) + "," + fmt17(r.z.c[j].imag());
    out += "," + fmt17(r.vm) + "," + fmt17(r.vtilde) + "," + fmt17(r.error) + "," +
           fmt17(r.tail) + "," + fmt17(r.lower_slack) + "," + fmt17(r.upper_slack) +
           "," + fmt17(r.r_used) + "\n";
  }
  return out;
}

struct KernelRow {
  std::string weight;
  int m = 1;
  Point z;
  KernelValue kv;
};

inline std::string kernel_csv(const std::vector<KernelRow>& rows, int n) {
  std::string out = n == 1
                        ? "weight,m,re_z1,im_z1,K,tail_estimate,basis_size,cond_flag\n"
                        : "weight,m,re_z1,im_z1,re_z2,im_z2,K,tail_estimate,"
                          "basis_size,cond_flag\n";
  for (const KernelRow& r : rows) {
    out += r.weight + "," + std::to_string(r.m);
    for (int j = 0; j < n; ++j)
      out += "," + fmt17(r.z.c[j].real()) + "," + fmt17(r.z.c[j].imag());
    out += "," + fmt17(r.kv.value) + "," + fmt17(r.kv.tail_rel) + "," +
           std::to_string(r.kv.basis_size) + "," + std::to_string(r.kv.clipped) + "\n";
  }
  return out;
}

inline std::string envelope_csv(const EnvelopeResult& env) {
  const LogProfile& p = env.env;
  std::string out;
  if (p.n == 1) {
    out = "t1,u_bounded,V_tilde\n";
    for (size_t i = 0; i < p.t[0].size(); ++i) {
      const double t = p.t[0][i];
      out += fmt17(t) + "," + fmt17(p.u[i]) + "," + fmt17(p.slope[0] * t + p.u[i]) +
             "\n";
    }
  } else {
    out = "t1,t2,u_bounded,V_tilde\n";
    for (size_t i1 = 0; i1 < p.t[0].size(); ++i1)
      for (size_t i2 = 0; i2 < p.t[1].size(); ++i2) {
        const double t1 = p.t[0][i1], t2 = p.t[1][i2];
        out += fmt17(t1) + "," + fmt17(t2) + "," + fmt17(p.at(i1, i2)) + "," +
               fmt17(p.slope[0] * t1 + p.slope[1] * t2 + p.at(i1, i2)) + "\n";
      }
  }
  return out;
}

inline nlohmann::ordered_json summary_schedule_json(const WeightRunSummary& s) {
  nlohmann::ordered_json j;
  j["weight"] = s.weight;
  j["schedule"] = s.schedule;
  nlohmann::ordered_json errs = nlohmann::ordered_json::array();
  for (double e : s.max_abs_error) errs.push_back(fmt17(e));
  j["max_abs_error"] = errs;
  nlohmann::ordered_json defs = nlohmann::ordered_json::array();
  for (double d : s.max_deficit) defs.push_back(fmt17(d));
  j["max_deficit"] = defs;
  j["c1_estimate"] = fmt17(s.c1_estimate);
  j["rate"] = fmt17(s.rate);
  j["error_shrinks"] = s.error_shrinks;
  j["minus_inf_flagged"] = s.minus_inf_flagged;
  j["upper_ok"] = s.upper_ok;
  j["worst_upper_violation"] = fmt17(s.worst_upper_violation);
  return j;
}

}  // namespace demlab
