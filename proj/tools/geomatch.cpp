// geomatch command-line front end.  Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomatch/geomatch.h"

namespace {

using nlohmann::json;

struct CString {
  char* p = nullptr;
  ~CString() { gm_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int report(gm_status st, const char* what) {
  std::cerr << "geomatch: " << what << ": " << (*gm_last_error() ? gm_last_error() : gm_status_name(st)) << "\n";
  return static_cast<int>(st);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct SweepOverrides {
  std::optional<int> n, d, sigma_points, trials, workers;
  std::optional<double> sigma_min, sigma_max;
  std::optional<std::string> models, estimators, out;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

void add_overrides(CLI::App* cmd, SweepOverrides& o) {
  cmd->add_option("--n", o.n, "number of points");
  cmd->add_option("--d", o.d, "latent dimension");
  cmd->add_option("--sigma-min", o.sigma_min, "smallest noise level");
  cmd->add_option("--sigma-max", o.sigma_max, "largest noise level");
  cmd->add_option("--sigma-points", o.sigma_points, "number of log-spaced noise levels");
  cmd->add_option("--trials", o.trials, "trials per noise level");
  cmd->add_option("--models", o.models, "comma-separated models");
  cmd->add_option("--estimators", o.estimators, "comma-separated estimator labels");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_flag("--timing", o.timing, "record wall-clock runtimes (output no longer reproducible)");
}

void apply_overrides(json& cfg, const SweepOverrides& o) {
  if (o.n) cfg["n"] = *o.n;
  if (o.d) cfg["d"] = *o.d;
  if (o.trials) cfg["trials"] = *o.trials;
  if (o.workers) cfg["workers"] = *o.workers;
  if (o.seed) cfg["base_seed"] = *o.seed;
  if (o.out) cfg["output_path"] = *o.out;
  if (o.timing) cfg["record_timing"] = true;
  if (o.models) cfg["models"] = split_list(*o.models);
  if (o.estimators) cfg["estimators"] = split_list(*o.estimators);
  if (o.sigma_min || o.sigma_max || o.sigma_points) {
    const int n = cfg.value("n", 200), d = cfg.value("d", 2);
    int count = 0;
    std::vector<double> grid(64);
    gm_default_sigma_grid(n, d, grid.data(), static_cast<int>(grid.size()), &count);
    json g;
    g["min"] = o.sigma_min.value_or(count > 0 ? grid.front() : 1e-3);
    g["max"] = o.sigma_max.value_or(count > 0 ? grid[count - 1] : 1.0);
    g["points"] = o.sigma_points.value_or(count > 0 ? count : 15);
    cfg["sigma_grid"] = g;
  }
}

void print_summary(const gm_sweep* sweep) {
  CString js;
  if (gm_sweep_summary_json(sweep, &js.p) != GM_OK) return;
  const json rows = json::parse(js.str());
  std::printf("%-18s %-20s %12s %6s %10s %10s\n", "model", "estimator", "sigma", "runs", "overlap", "std");
  for (const auto& r : rows) {
    const double mean = r["mean_overlap"].is_number() ? r["mean_overlap"].get<double>() : -1.0;
    const double sd = r["std_overlap"].is_number() ? r["std_overlap"].get<double>() : -1.0;
    std::printf("%-18s %-20s %12.5g %6d %10.4f %10.4f\n", r["model"].get<std::string>().c_str(),
                r["estimator"].get<std::string>().c_str(), r["sigma"].get<double>(),
                r["count"].get<int>(), mean, sd);
  }
}

int run_config(const json& cfg, bool quiet, const std::string& summary_path) {
  gm_sweep* sweep = nullptr;
  const gm_status st = gm_sweep_run(cfg.dump().c_str(), &sweep);
  if (st != GM_OK && !sweep) return report(st, "sweep failed");
  if (!quiet) print_summary(sweep);
  size_t failures = 0;
  gm_sweep_failure_count(sweep, &failures);
  if (failures > 0) std::cerr << "geomatch: " << failures << " estimator runs failed (see CSV rows with iterations = -1)\n";
  if (!summary_path.empty()) {
    CString js;
    if (gm_sweep_summary_json(sweep, &js.p) == GM_OK) {
      std::ofstream os(summary_path);
      os << js.str() << "\n";
      if (!os) std::cerr << "geomatch: cannot write summary '" << summary_path << "'\n";
    }
  }
  gm_sweep_free(sweep);
  if (st != GM_OK) return report(st, "sweep output");
  return 0;
}

void verify_line(const char* name, int passed, const char* detail, void*) {
  std::printf("[%s] %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matching correlated Gaussian point clouds from pairwise data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gm_version()));

  auto* sweep = app.add_subcommand("sweep", "run a noise sweep described by a JSON config");
  std::string config_path, summary_path;
  bool quiet = false;
  SweepOverrides sweep_over;
  sweep->add_option("--config", config_path, "sweep configuration (JSON)")->check(CLI::ExistingFile);
  sweep->add_option("--summary", summary_path, "also write per-point aggregates as JSON");
  sweep->add_flag("--quiet", quiet, "do not print the summary table");
  add_overrides(sweep, sweep_over);

  auto* demo = app.add_subcommand("demo", "run the reference sweep for (n, d)");
  SweepOverrides demo_over;
  std::string demo_summary;
  bool demo_quiet = false;
  demo->add_option("--summary", demo_summary, "also write per-point aggregates as JSON");
  demo->add_flag("--quiet", demo_quiet, "do not print the summary table");
  add_overrides(demo, demo_over);

  auto* verify = app.add_subcommand("verify", "run the theory oracle checks");
  long samples = 0;
  std::uint64_t verify_seed = 20240601;
  verify->add_option("--samples", samples, "Monte-Carlo samples per MGF configuration");
  verify->add_option("--seed", verify_seed, "verification seed");

  CLI11_PARSE(app, argc, argv);

  if (*sweep) {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      try {
        cfg = json::parse(is);
      } catch (const json::exception& e) {
        std::cerr << "geomatch: cannot parse " << config_path << ": " << e.what() << "\n";
        return GM_ERR_PARAMETER;
      }
    }
    apply_overrides(cfg, sweep_over);
    return run_config(cfg, quiet, summary_path);
  }

  if (*demo) {
    const int n = demo_over.n.value_or(200), d = demo_over.d.value_or(2);
    CString js;
    if (const gm_status st = gm_demo_config(n, d, &js.p); st != GM_OK) return report(st, "demo");
    json cfg = json::parse(js.str());
    if (!demo_over.out) demo_over.out = "demo_n" + std::to_string(n) + "_d" + std::to_string(d) + ".csv";
    apply_overrides(cfg, demo_over);
    return run_config(cfg, demo_quiet, demo_summary);
  }

  if (*verify) {
    int failures = 0;
    if (const gm_status st = gm_verify(samples, verify_seed, verify_line, nullptr, &failures); st != GM_OK)
      return report(st, "verify");
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
  }
  return 0;
}
