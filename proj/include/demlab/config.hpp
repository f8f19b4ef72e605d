#pragma once
// INI-style run configuration: [run] and [tolerances] sections plus one
// [weight.<label>] section per weight instance. Unknown keys are errors;
// every diagnostic carries the line and key it came from.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "domains.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace demlab {

struct RunConfig {
  Domain domain = Domain::disk();
  GridSpec grid;
  std::vector<Weight> weights;
  std::vector<int> schedule{1, 2, 4, 8, 16, 32, 64};
  unsigned long long seed = 42;
  QuadSpec quad;
  double clip_tol = 1e-12;
  double envelope_tol = 1e-9;
  double phi_tol = 0.15;
};

namespace detail {

struct IniLine {
  int line = 0;
  std::string key, value;
};

struct IniFile {
  // section -> key -> (line, value); insertion order of sections preserved
  std::vector<std::pair<std::string, std::map<std::string, IniLine>>> sections;

  const std::map<std::string, IniLine>* find(const std::string& name) const {
    for (const auto& [sec, kv] : sections)
      if (sec == name) return &kv;
    return nullptr;
  }
};

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline IniFile parse_ini(const std::string& text) {
  IniFile f;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  std::string cur;
  while (std::getline(in, raw)) {
    ++ln;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("unterminated section header", ln, s);
      cur = trim(s.substr(1, s.size() - 2));
      if (cur.empty()) throw ConfigError("empty section name", ln, s);
      if (!f.find(cur)) f.sections.push_back({cur, {}});
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", ln, s);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", ln, s);
    if (cur.empty()) throw ConfigError("key outside any section", ln, key);
    for (auto& [sec, kv] : f.sections)
      if (sec == cur) {
        if (kv.count(key))
          throw ConfigError("duplicate key in section [" + cur + "]", ln, key);
        kv[key] = IniLine{ln, key, val};
      }
  }
  return f;
}

inline double to_double(const IniLine& l) {
  try {
    size_t pos = 0;
    const double v = std::stod(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + l.value + "'", l.line, l.key);
  }
}

inline long to_int(const IniLine& l) {
  try {
    size_t pos = 0;
    const long v = std::stol(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + l.value + "'", l.line, l.key);
  }
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else
      cur.push_back(c);
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline void reject_unknown(const std::string& section,
                           const std::map<std::string, IniLine>& kv,
                           const std::set<std::string>& allowed) {
  for (const auto& [k, l] : kv)
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key in [" + section + "] (allowed: " + list + ")",
                        l.line, k);
    }
}

inline Weight weight_from_section(const Domain& dom, const std::string& label,
                                  const std::map<std::string, IniLine>& kv) {
  reject_unknown("weight." + label, kv,
                 {"kind", "gamma", "gamma2", "eps", "knots", "values", "offset"});
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end())
    throw ConfigError("weight section needs a kind", 0, "kind");
  CatalogParams par;
  if (auto it = kv.find("gamma"); it != kv.end())
    par.gammas.push_back(to_double(it->second));
  if (auto it = kv.find("gamma2"); it != kv.end()) {
    if (par.gammas.empty()) par.gammas.push_back(1.0);
    par.gammas.push_back(to_double(it->second));
  }
  if (auto it = kv.find("eps"); it != kv.end()) par.eps = to_double(it->second);
  if (auto it = kv.find("knots"); it != kv.end())
    for (const auto& tok : split_list(it->second.value))
      par.knots.push_back(to_double(IniLine{it->second.line, it->second.key, tok}));
  if (auto it = kv.find("values"); it != kv.end())
    for (const auto& tok : split_list(it->second.value))
      par.values.push_back(to_double(IniLine{it->second.line, it->second.key, tok}));
  Weight w = catalog(dom, kind_it->second.value, par);
  if (auto it = kv.find("offset"); it != kv.end())
    w = w.with_offset(to_double(it->second));
  return w.renamed(label);
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
  using namespace detail;
  const IniFile f = parse_ini(text);
  RunConfig cfg;

  if (const auto* run = f.find("run")) {
    reject_unknown("run", *run,
                   {"domain", "radius", "radius2", "grid", "points", "margin",
                    "log_floor", "schedule", "weights", "seed"});
    double r1 = 1.0, r2 = 0.0;
    if (auto it = run->find("radius"); it != run->end()) r1 = to_double(it->second);
    if (auto it = run->find("radius2"); it != run->end()) r2 = to_double(it->second);
    std::string dk = "disk";
    if (auto it = run->find("domain"); it != run->end()) dk = it->second.value;
    if (dk == "disk")
      cfg.domain = Domain::disk(r1);
    else if (dk == "polydisk")
      cfg.domain = Domain::polydisk(r1, r2 > 0 ? r2 : r1);
    else {
      const auto& l = run->at("domain");
      throw ConfigError("domain must be disk or polydisk", l.line, l.key);
    }
    if (auto it = run->find("grid"); it != run->end()) {
      const std::string& g = it->second.value;
      if (g == "radial")
        cfg.grid.mode = GridMode::radial;
      else if (g == "cartesian")
        cfg.grid.mode = GridMode::cartesian;
      else if (g == "log_radial")
        cfg.grid.mode = GridMode::log_radial;
      else
        throw ConfigError("grid must be radial, cartesian or log_radial",
                          it->second.line, it->second.key);
    }
    if (auto it = run->find("points"); it != run->end()) {
      cfg.grid.points_per_axis = (int)to_int(it->second);
      if (cfg.grid.points_per_axis < 2)
        throw ConfigError("points must be >= 2", it->second.line, it->second.key);
    }
    if (auto it = run->find("margin"); it != run->end())
      cfg.grid.margin = to_double(it->second);
    if (auto it = run->find("log_floor"); it != run->end())
      cfg.grid.log_floor = to_double(it->second);
    if (auto it = run->find("seed"); it != run->end())
      cfg.seed = (unsigned long long)to_int(it->second);
    if (auto it = run->find("schedule"); it != run->end()) {
      cfg.schedule.clear();
      for (const auto& tok : split_list(it->second.value))
        cfg.schedule.push_back(
            (int)to_int(IniLine{it->second.line, it->second.key, tok}));
      if (cfg.schedule.empty())
        throw ConfigError("schedule must not be empty", it->second.line,
                          it->second.key);
    }
    if (auto it = run->find("weights"); it != run->end()) {
      for (const auto& label : split_list(it->second.value)) {
        if (const auto* ws = f.find("weight." + label))
          cfg.weights.push_back(detail::weight_from_section(cfg.domain, label, *ws));
        else
          cfg.weights.push_back(catalog(cfg.domain, label));  // bare catalog name
      }
    }
  }

  if (const auto* tol = f.find("tolerances")) {
    reject_unknown("tolerances", *tol,
                   {"quad_rel", "eig_clip", "envelope", "phi"});
    if (auto it = tol->find("quad_rel"); it != tol->end())
      cfg.quad.rel_tol = to_double(it->second);
    if (auto it = tol->find("eig_clip"); it != tol->end())
      cfg.clip_tol = to_double(it->second);
    if (auto it = tol->find("envelope"); it != tol->end())
      cfg.envelope_tol = to_double(it->second);
    if (auto it = tol->find("phi"); it != tol->end())
      cfg.phi_tol = to_double(it->second);
  }

  for (const auto& [sec, kv] : f.sections) {
    if (sec == "run" || sec == "tolerances") continue;
    if (sec.rfind("weight.", 0) == 0) continue;  // referenced via [run] weights
    const int ln = kv.empty() ? 0 : kv.begin()->second.line;
    throw ConfigError("unknown section [" + sec + "]", ln, sec);
  }

  if (cfg.weights.empty()) {
    cfg.weights.push_back(catalog(cfg.domain, "zero"));
    CatalogParams lp;
    lp.gammas.assign(cfg.domain.n, 1.0);
    cfg.weights.push_back(catalog(cfg.domain, "log_pole", lp));
    cfg.weights.push_back(catalog(cfg.domain, "neg_abs_square"));
  }
  cfg.grid.validate();
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, 0, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline RunConfig default_config() { return parse_config_text(""); }

}  // namespace demlab
