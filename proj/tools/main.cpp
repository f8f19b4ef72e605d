// Command-line front end: run | kernel | approx | envelope | converge |
// check-invariants. All data outputs are deterministic for a fixed config;
// timings go to stderr only.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "demlab/bergman.hpp"
#include "demlab/config.hpp"
#include "demlab/demailly.hpp"
#include "demlab/envelope.hpp"
#include "demlab/report.hpp"
#include "demlab/runner.hpp"

namespace {

demlab::RunConfig load_config(const std::string& path, long long seed_override) {
  demlab::RunConfig cfg =
      path.empty() ? demlab::default_config() : demlab::parse_config_file(path);
  if (seed_override >= 0) cfg.seed = (unsigned long long)seed_override;
  return cfg;
}

void filter_weights(demlab::RunConfig& cfg, const std::string& only) {
  if (only.empty()) return;
  std::vector<demlab::Weight> keep;
  for (const auto& label : demlab::detail::split_list(only)) {
    bool found = false;
    for (const auto& w : cfg.weights)
      if (w.name() == label) {
        keep.push_back(w);
        found = true;
      }
    if (!found)
      throw demlab::ArgumentError("--only: no configured weight named '" + label + "'");
  }
  cfg.weights = std::move(keep);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw demlab::ArgumentError("cannot write " + path);
  out << content;
}

int cmd_run(const demlab::RunConfig& cfg, const std::string& outdir) {
  const auto t0 = std::chrono::steady_clock::now();
  demlab::RunOutcome oc = demlab::run_all(cfg);
  std::filesystem::create_directories(outdir);
  for (const auto& [name, content] : oc.artifacts)
    write_text(outdir + "/" + name, content);
  for (const auto& c : oc.checks)
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << c.name << " " << c.detail << "\n";
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  std::cerr << "run: " << oc.artifacts.size() << " artifacts in " << outdir << " ("
            << dt.count() << "s)\n";
  return oc.exit_code;
}

demlab::Engine parse_engine(const std::string& s) {
  if (s == "auto") return demlab::Engine::automatic;
  if (s == "diagonal") return demlab::Engine::diagonal;
  if (s == "gram") return demlab::Engine::gram;
  throw demlab::ArgumentError("--engine must be auto, diagonal or gram");
}

int cmd_kernel(const demlab::RunConfig& cfg, int m, const std::string& engine,
               const std::string& outfile) {
  const demlab::Engine eng = parse_engine(engine);
  std::vector<demlab::KernelRow> rows;
  const auto pts = demlab::make_grid(cfg.domain, cfg.grid);
  for (const auto& w : cfg.weights) {
    demlab::KernelEvaluator ke(w, m, eng, cfg.quad, cfg.clip_tol);
    for (const auto& z : pts) rows.push_back({w.name(), m, z, ke.at(z)});
  }
  const std::string csv = demlab::kernel_csv(rows, cfg.domain.n);
  if (outfile.empty())
    std::cout << csv;
  else
    write_text(outfile, csv);
  return 0;
}

int cmd_approx(const demlab::RunConfig& cfg, int m, const std::string& outfile) {
  std::string csv = cfg.domain.n == 1 ? "weight,m,re_z1,im_z1,V_m\n"
                                      : "weight,m,re_z1,im_z1,re_z2,im_z2,V_m\n";
  const auto pts = demlab::make_grid(cfg.domain, cfg.grid);
  for (const auto& w : cfg.weights) {
    demlab::KernelEvaluator ke(w, m, demlab::Engine::automatic, cfg.quad, cfg.clip_tol);
    for (const auto& z : pts) {
      csv += w.name() + "," + std::to_string(m);
      for (int j = 0; j < cfg.domain.n; ++j)
        csv += "," + demlab::fmt17(z.c[j].real()) + "," + demlab::fmt17(z.c[j].imag());
      csv += "," + demlab::fmt17(demlab::demailly_value(ke.at(z), m)) + "\n";
    }
  }
  if (outfile.empty())
    std::cout << csv;
  else
    write_text(outfile, csv);
  return 0;
}

int cmd_envelope(const demlab::RunConfig& cfg, const std::string& outdir) {
  bool any = false;
  for (const auto& w : cfg.weights) {
    if (!w.toric()) {
      std::cerr << "envelope: skipping non-toric weight " << w.name() << "\n";
      continue;
    }
    any = true;
    const demlab::EnvelopeResult env =
        demlab::psh_envelope_toric(w, cfg.grid, cfg.envelope_tol);
    const std::string csv = demlab::envelope_csv(env);
    if (outdir.empty()) {
      std::cout << "# weight: " << w.name() << " iterations: " << env.iterations
                << "\n"
                << csv;
    } else {
      std::filesystem::create_directories(outdir);
      write_text(outdir + "/envelope_" + w.name() + ".csv", csv);
    }
  }
  if (!any) {
    std::cerr << "envelope: no toric weight in the configuration\n";
    return 34;
  }
  return 0;
}

int cmd_converge(const demlab::RunConfig& cfg, const std::string& outfile) {
  demlab::ConvergenceReport rep;
  for (const auto& w : cfg.weights)
    demlab::merge_reports(rep,
                          demlab::converge_run(w, cfg.grid, cfg.schedule, cfg.quad));
  const std::string csv = demlab::converge_csv(rep);
  if (outfile.empty())
    std::cout << csv;
  else
    write_text(outfile, csv);
  return 0;
}

int cmd_check(const demlab::RunConfig& cfg) {
  int code = 0;
  for (const auto& c : demlab::invariant_checks(cfg)) {
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << c.name << " " << c.detail << "\n";
    if (!c.ok) code |= c.bit;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman-kernel approximation of plurisubharmonic envelopes"};
  app.require_subcommand(1);

  std::string config_path, outdir = "out", outfile, engine = "auto", only;
  long long seed = -1;
  int m = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (INI format)");
    sub->add_option("--seed", seed, "override the configured seed");
  };

  CLI::App* run = app.add_subcommand("run", "full run: artifacts plus checks");
  add_common(run);
  run->add_option("--out", outdir, "output directory (default: out)");
  run->add_option("--only", only, "comma-separated weight labels to keep");

  CLI::App* ker = app.add_subcommand("kernel", "kernel values on the grid (CSV)");
  add_common(ker);
  ker->add_option("--m", m, "kernel index m (default: top of the schedule)");
  ker->add_option("--engine", engine, "auto | diagonal | gram");
  ker->add_option("--out", outfile, "output file (default: stdout)");

  CLI::App* apx = app.add_subcommand("approx", "approximant V_m on the grid (CSV)");
  add_common(apx);
  apx->add_option("--m", m, "approximant index m (default: top of the schedule)");
  apx->add_option("--out", outfile, "output file (default: stdout)");

  CLI::App* env = app.add_subcommand("envelope", "psh envelope profiles (CSV)");
  add_common(env);
  env->add_option("--out", outdir, "output directory (default: stdout)")
      ->default_val("");

  CLI::App* cvg = app.add_subcommand("converge", "convergence table (CSV)");
  add_common(cvg);
  cvg->add_option("--out", outfile, "output file (default: stdout)");

  CLI::App* chk = app.add_subcommand("check-invariants",
                                     "structural checks, one line each");
  add_common(chk);

  CLI11_PARSE(app, argc, argv);

  try {
    demlab::RunConfig cfg = load_config(config_path, seed);
    if (m <= 0) m = cfg.schedule.back();
    if (run->parsed()) {
      filter_weights(cfg, only);
      return cmd_run(cfg, outdir);
    }
    if (ker->parsed()) return cmd_kernel(cfg, m, engine, outfile);
    if (apx->parsed()) return cmd_approx(cfg, m, outfile);
    if (env->parsed()) return cmd_envelope(cfg, outdir);
    if (cvg->parsed()) return cmd_converge(cfg, outfile);
    if (chk->parsed()) return cmd_check(cfg);
  } catch (const demlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 32;
  } catch (const demlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 33;
  }
  return 0;
}
