// mlmc: command line front end over the C API.
//
//   mlmc run      --config cfg.json [--seed N] [--out DIR] [--threads N] [--reuse-samples BOOL]
//   mlmc compare  MANIFEST... [--out DIR]
//   mlmc diag     MANIFEST [--out DIR]
//   mlmc validate --config cfg.json
//
// Exit codes: 0 success, 1 config error, 2 failed runs in the ensemble,
// 3 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cmlmc/cmlmc.h"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRunsFailed = 2, kInternal = 3 };

int exit_for(cmlmc_status s) {
  switch (s) {
    case CMLMC_OK: return kOk;
    case CMLMC_ERR_CONFIG: return kConfig;
    case CMLMC_ERR_RUNS_FAILED: return kRunsFailed;
    default: return kInternal;
  }
}

int report(cmlmc_status s) {
  if (s != CMLMC_OK) std::cerr << "mlmc: " << cmlmc_status_string(s) << ": " << cmlmc_last_error() << "\n";
  return exit_for(s);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

bool parse_bool(std::string v, bool& out) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "on" || v == "yes") {
    out = true;
    return true;
  }
  if (v == "0" || v == "false" || v == "off" || v == "no") {
    out = false;
    return true;
  }
  return false;
}

void print_and_free(char* s) {
  if (!s) return;
  std::cout << s << "\n";
  cmlmc_string_free(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Monte Carlo experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, reuse;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override base_seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "parallel repetitions")->check(CLI::PositiveNumber);
  run->add_option("--reuse-samples", reuse, "true/false: override sample reuse");

  std::vector<std::string> manifests;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "join manifests on the tolerance grid");
  cmp->add_option("manifests", manifests, "manifest.json files")->required();
  cmp->add_option("--out", cmp_out, "directory for compare.csv / compare.json");

  std::string diag_manifest, diag_out;
  auto* diag = app.add_subcommand("diag", "recompute diagnostics from stored run records");
  diag->add_option("manifest", diag_manifest, "manifest.json")->required();
  diag->add_option("--out", diag_out, "directory for recomputed tables");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a config without running it");
  val->add_option("--config", validate_path, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (*val) {
    std::string text;
    if (!read_file(validate_path, text)) {
      std::cerr << "mlmc: cannot read " << validate_path << "\n";
      return kConfig;
    }
    char* norm = nullptr;
    const cmlmc_status s = cmlmc_config_validate(text.c_str(), &norm);
    if (s == CMLMC_OK) print_and_free(norm);
    return report(s);
  }

  if (*run) {
    std::string text;
    if (!read_file(config_path, text)) {
      std::cerr << "mlmc: cannot read " << config_path << "\n";
      return kConfig;
    }
    cmlmc_run_options opt;
    cmlmc_run_options_init(&opt);
    opt.threads = threads;
    if (!out_dir.empty()) opt.out_dir = out_dir.c_str();
    if (*seed_opt) {
      opt.has_seed = 1;
      opt.seed = seed;
    }
    if (!reuse.empty()) {
      bool b = false;
      if (!parse_bool(reuse, b)) {
        std::cerr << "mlmc: --reuse-samples expects true or false\n";
        return kConfig;
      }
      opt.reuse_samples = b ? 1 : 0;
    }
    char* manifest = nullptr;
    const cmlmc_status s = cmlmc_experiment_run(text.c_str(), &opt, &manifest);
    if (manifest) {
      std::cerr << "mlmc: manifest written\n";
      cmlmc_string_free(manifest);
    }
    return report(s);
  }

  if (*cmp) {
    std::vector<const char*> ptrs;
    for (const auto& m : manifests) ptrs.push_back(m.c_str());
    char* out = nullptr;
    const cmlmc_status s =
        cmlmc_compare(ptrs.data(), ptrs.size(), cmp_out.empty() ? nullptr : cmp_out.c_str(), &out);
    if (s == CMLMC_OK) print_and_free(out);
    return report(s);
  }

  if (*diag) {
    char* out = nullptr;
    const cmlmc_status s =
        cmlmc_diag(diag_manifest.c_str(), diag_out.empty() ? nullptr : diag_out.c_str(), &out);
    if (s == CMLMC_OK) print_and_free(out);
    return report(s);
  }
  return kInternal;
}
