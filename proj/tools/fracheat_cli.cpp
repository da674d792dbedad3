// fracheat: run a convergence or validation study and write its artifacts.
//
//   fracheat <kernel-rate|solution-rate|kernel-props|solver-validate>
//            [--config file.yaml] [--out dir] [--threads k] [--strict]
//
// Exit status: 0 when every check passes, 1 when a check fails or the study
// is incomplete, 2 on configuration or usage errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracheat/config.hpp"
#include "fracheat/report.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw fracheat::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string bounds(const fracheat::CheckResult& c) {
  char buf[128];
  if (c.target)
    std::snprintf(buf, sizeof buf, "%.6g +/- %.3g", *c.target, *c.tolerance);
  else if (std::isinf(c.lo))
    std::snprintf(buf, sizeof buf, "<= %.6g", c.hi);
  else if (std::isinf(c.hi))
    std::snprintf(buf, sizeof buf, ">= %.6g", c.lo);
  else
    std::snprintf(buf, sizeof buf, "in [%.6g, %.6g]", c.lo, c.hi);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional heat / Burgers convergence studies"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  int threads = 0;
  bool strict = false;
  for (const char* name : {"kernel-rate", "solution-rate", "kernel-props", "solver-validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "worker threads (overrides output.threads)")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", strict, "treat warnings as failures");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string study = app.get_subcommands().front()->get_name();

  fracheat::RunConfig cfg;
  try {
    const std::string text = config_path.empty() ? "study: " + study + "\n" : read_file(config_path);
    cfg = fracheat::parse_config(text);
    if (fracheat::to_string(cfg.study) != study)
      throw fracheat::ConfigError("config declares study '" + std::string(fracheat::to_string(cfg.study)) +
                                  "' but the subcommand is '" + study + "'");
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    fracheat::prepare_output_dir(cfg.output_dir);
  } catch (const fracheat::Error& e) {
    std::cerr << "fracheat: " << e.what() << "\n";
    return 2;
  }

  const fracheat::StudyReport rep = fracheat::run_study(cfg);
  try {
    fracheat::write_outputs(rep, cfg, cfg.output_dir, strict);
  } catch (const fracheat::Error& e) {
    std::cerr << "fracheat: " << e.what() << "\n";
    return 1;
  }

  std::printf("%s  config %s  -> %s\n", study.c_str(), rep.config_hash.c_str(), cfg.output_dir.c_str());
  for (const auto& c : rep.checks)
    std::printf("%s  %-48s measured %-14.8g %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                bounds(c).c_str());
  for (const auto& w : rep.warnings) std::printf("WARN  %s\n", w.c_str());
  if (!rep.complete) std::printf("INCOMPLETE  %s\n", rep.error.c_str());
  const bool ok = rep.passed(strict);
  std::printf("%s\n", ok ? "all checks passed" : "some checks failed");
  return ok ? 0 : 1;
}
