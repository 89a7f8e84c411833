#include "cmlmc/cmlmc.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "mlmc/error.hpp"
#include "mlmc/experiment.hpp"
#include "mlmc/rng.hpp"
#include "mlmc/sampler.hpp"

struct cmlmc_sampler {
  std::unique_ptr<mlmc::CoupledSampler> impl;
  nlohmann::json spec;
};

struct cmlmc_record {
  mlmc::RunRecord rec;
};

namespace {

thread_local std::string g_last_error;

cmlmc_status map_code(mlmc::ErrorCode c) {
  using mlmc::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument: return CMLMC_ERR_INVALID_ARGUMENT;
    case ErrorCode::config: return CMLMC_ERR_CONFIG;
    case ErrorCode::sampling_failure: return CMLMC_ERR_SAMPLING_FAILURE;
    case ErrorCode::insufficient_samples: return CMLMC_ERR_INSUFFICIENT_SAMPLES;
    case ErrorCode::invalid_split: return CMLMC_ERR_INVALID_SPLIT;
    case ErrorCode::calibration_unavailable: return CMLMC_ERR_CALIBRATION_UNAVAILABLE;
    case ErrorCode::tolerance_unreachable: return CMLMC_ERR_TOLERANCE_UNREACHABLE;
    case ErrorCode::iteration_limit: return CMLMC_ERR_ITERATION_LIMIT;
    case ErrorCode::estimate_undefined: return CMLMC_ERR_ESTIMATE_UNDEFINED;
    case ErrorCode::io: return CMLMC_ERR_IO;
  }
  return CMLMC_ERR_INTERNAL;
}

cmlmc_status fail(cmlmc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
cmlmc_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const mlmc::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CMLMC_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(CMLMC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CMLMC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CMLMC_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

cmlmc_status status_from_name(const std::string& name) {
  using mlmc::ErrorCode;
  if (name == "ok") return CMLMC_OK;
  for (ErrorCode c : {ErrorCode::invalid_argument, ErrorCode::config, ErrorCode::sampling_failure,
                      ErrorCode::insufficient_samples, ErrorCode::invalid_split,
                      ErrorCode::calibration_unavailable, ErrorCode::tolerance_unreachable,
                      ErrorCode::iteration_limit, ErrorCode::estimate_undefined, ErrorCode::io}) {
    if (name == mlmc::to_string(c)) return map_code(c);
  }
  return CMLMC_ERR_INTERNAL;
}

}  // namespace

extern "C" {

const char* cmlmc_version(void) { return "1.0.0"; }

const char* cmlmc_status_string(cmlmc_status s) {
  switch (s) {
    case CMLMC_OK: return "ok";
    case CMLMC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CMLMC_ERR_CONFIG: return "configuration error";
    case CMLMC_ERR_SAMPLING_FAILURE: return "sampling failure";
    case CMLMC_ERR_INSUFFICIENT_SAMPLES: return "insufficient samples";
    case CMLMC_ERR_INVALID_SPLIT: return "invalid error split";
    case CMLMC_ERR_CALIBRATION_UNAVAILABLE: return "calibration unavailable";
    case CMLMC_ERR_TOLERANCE_UNREACHABLE: return "tolerance unreachable";
    case CMLMC_ERR_ESTIMATE_UNDEFINED: return "estimate undefined";
    case CMLMC_ERR_ITERATION_LIMIT: return "iteration limit reached";
    case CMLMC_ERR_IO: return "i/o error";
    case CMLMC_ERR_RUNS_FAILED: return "ensemble contains failed runs";
    case CMLMC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cmlmc_last_error(void) { return g_last_error.c_str(); }

void cmlmc_string_free(char* s) { std::free(s); }

cmlmc_status cmlmc_sampler_create(const char* spec_json, cmlmc_sampler** out) {
  return guarded([&] {
    if (!spec_json || !out) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto h = std::make_unique<cmlmc_sampler>();
    h->impl = mlmc::make_sampler(nlohmann::json::parse(spec_json));
    h->spec = {{"name", h->impl->descriptor().name}, {"params", h->impl->params_json()}};
    *out = h.release();
    return CMLMC_OK;
  });
}

void cmlmc_sampler_destroy(cmlmc_sampler* s) { delete s; }

cmlmc_status cmlmc_sampler_sample(const cmlmc_sampler* s, int level, uint64_t seed, uint64_t index,
                                  double* g, double* cost) {
  return guarded([&] {
    if (!s || !g || !cost) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    if (level < 0 || level > s->impl->max_level()) {
      return fail(CMLMC_ERR_INVALID_ARGUMENT, "level out of range");
    }
    mlmc::Stream st(seed, level, index);
    std::vector<double> scratch;
    const mlmc::Sample x = s->impl->sample(level, st, scratch);
    *g = x.g;
    *cost = x.cost;
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_sampler_reference(const cmlmc_sampler* s, int* has_reference, double* reference) {
  return guarded([&] {
    if (!s || !has_reference || !reference) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    const auto& r = s->impl->descriptor().reference;
    *has_reference = r ? 1 : 0;
    *reference = r.value_or(0.0);
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_sampler_describe(const cmlmc_sampler* s, char** json_out) {
  return guarded([&] {
    if (!s || !json_out) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    const auto& d = s->impl->descriptor();
    nlohmann::json j = {{"name", d.name},
                        {"q1", d.q1},
                        {"q2", d.q2},
                        {"h0", d.hier.h0},
                        {"beta", d.hier.beta},
                        {"gamma", d.hier.gamma},
                        {"s1", d.s1},
                        {"s2", d.s2},
                        {"max_level", s->impl->max_level()},
                        {"params", s->impl->params_json()}};
    j["reference"] = d.reference ? nlohmann::json(*d.reference) : nlohmann::json(nullptr);
    *json_out = dup_string(j.dump());
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_run(const cmlmc_sampler* s, const char* algorithm_json, uint64_t seed,
                       int threads, cmlmc_record** out) {
  return guarded([&] {
    if (!s || !algorithm_json || !out) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    nlohmann::json alg = nlohmann::json::parse(algorithm_json);
    if (!alg.is_object()) return fail(CMLMC_ERR_CONFIG, "/algorithm: expected object");
    if (!alg.contains("tol") || !alg["tol"].is_number()) {
      return fail(CMLMC_ERR_CONFIG, "/algorithm/tol: required number");
    }
    const double tol = alg["tol"].get<double>();
    alg.erase("tol");
    const nlohmann::json cfg_json = {{"sampler", s->spec}, {"algorithm", alg}, {"tolerances", {tol}}};
    const mlmc::ExperimentConfig cfg = mlmc::parse_config(cfg_json);
    auto r = std::make_unique<cmlmc_record>();
    r->rec = mlmc::run_single(*s->impl, cfg, tol, seed, threads < 1 ? 1 : threads);
    *out = r.release();
    return CMLMC_OK;
  });
}

void cmlmc_record_destroy(cmlmc_record* r) { delete r; }

cmlmc_status cmlmc_record_status(const cmlmc_record* r) {
  if (!r) return CMLMC_ERR_INVALID_ARGUMENT;
  return status_from_name(r->rec.status);
}

double cmlmc_record_estimate(const cmlmc_record* r) { return r ? r->rec.estimate : 0.0; }
double cmlmc_record_error_estimate(const cmlmc_record* r) { return r ? r->rec.error_estimate : 0.0; }
double cmlmc_record_model_work(const cmlmc_record* r) { return r ? r->rec.total_model_work : 0.0; }
int cmlmc_record_final_level(const cmlmc_record* r) { return r ? r->rec.final_L : -1; }
double cmlmc_record_theta(const cmlmc_record* r) { return r ? r->rec.theta_final : 0.0; }
size_t cmlmc_record_iterations(const cmlmc_record* r) { return r ? r->rec.iterations.size() : 0; }

cmlmc_status cmlmc_record_to_json(const cmlmc_record* r, int include_timing, char** json_out) {
  return guarded([&] {
    if (!r || !json_out) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    *json_out = dup_string(mlmc::to_json(r->rec, include_timing != 0).dump());
    return CMLMC_OK;
  });
}

void cmlmc_run_options_init(cmlmc_run_options* opt) {
  if (!opt) return;
  opt->out_dir = nullptr;
  opt->threads = 1;
  opt->has_seed = 0;
  opt->seed = 0;
  opt->reuse_samples = -1;
}

cmlmc_status cmlmc_config_validate(const char* config_json, char** normalized_out) {
  return guarded([&] {
    if (!config_json) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      return fail(CMLMC_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
    }
    const mlmc::ExperimentConfig cfg = mlmc::parse_config(j);
    if (normalized_out) *normalized_out = dup_string(mlmc::config_to_json(cfg).dump(2));
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_experiment_run(const char* config_json, const cmlmc_run_options* opt,
                                  char** manifest_out) {
  return guarded([&] {
    if (!config_json) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      return fail(CMLMC_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
    }
    const mlmc::ExperimentConfig cfg = mlmc::parse_config(j);
    mlmc::RunOptions ro;
    if (opt) {
      if (opt->out_dir) ro.out_dir = std::string(opt->out_dir);
      ro.threads = opt->threads < 1 ? 1 : opt->threads;
      if (opt->has_seed) ro.seed = opt->seed;
      if (opt->reuse_samples >= 0) ro.reuse_samples = opt->reuse_samples != 0;
    }
    const mlmc::ExperimentResult res = mlmc::run_experiment(cfg, ro);
    if (manifest_out) *manifest_out = dup_string(res.manifest.dump(2));
    if (res.failed_runs > 0) {
      return fail(CMLMC_ERR_RUNS_FAILED,
                  std::to_string(res.failed_runs) + " run(s) failed; see the manifest");
    }
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_compare(const char* const* manifest_paths, size_t n, const char* out_dir,
                           char** result_out) {
  return guarded([&] {
    if (!manifest_paths || n == 0) return fail(CMLMC_ERR_INVALID_ARGUMENT, "no manifests given");
    std::vector<std::string> paths;
    for (size_t i = 0; i < n; ++i) {
      if (!manifest_paths[i]) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null manifest path");
      paths.emplace_back(manifest_paths[i]);
    }
    std::optional<std::string> od;
    if (out_dir) od = std::string(out_dir);
    const nlohmann::json out = mlmc::compare_manifests(paths, od);
    if (result_out) *result_out = dup_string(out.dump(2));
    return CMLMC_OK;
  });
}

cmlmc_status cmlmc_diag(const char* manifest_path, const char* out_dir, char** result_out) {
  return guarded([&] {
    if (!manifest_path) return fail(CMLMC_ERR_INVALID_ARGUMENT, "null manifest path");
    std::optional<std::string> od;
    if (out_dir) od = std::string(out_dir);
    const nlohmann::json out = mlmc::diagnose_manifest(manifest_path, od);
    if (result_out) *result_out = dup_string(out.dump(2));
    return CMLMC_OK;
  });
}

}  // extern "C"
