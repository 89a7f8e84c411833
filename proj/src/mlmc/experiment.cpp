#include "mlmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mlmc/error.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config, path + ": " + what);
}

// Strict object reader: every key must be consumed, types are checked.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "/" : path_, "expected object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return path_ + "/" + key; }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void number(const char* key, double& dst) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) config_error(at(key), "expected number");
    dst = v.get<double>();
    if (!std::isfinite(dst)) config_error(at(key), "must be finite");
  }

  template <class Int>
  void integer(const char* key, Int& dst) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_integer()) config_error(at(key), "expected integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        dst = static_cast<Int>(v.get<std::uint64_t>());
      } else {
        const long long x = v.get<long long>();
        if (x < 0) config_error(at(key), "must be nonnegative");
        dst = static_cast<Int>(x);
      }
    } else {
      dst = static_cast<Int>(v.get<long long>());
    }
  }

  void boolean(const char* key, bool& dst) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_boolean()) config_error(at(key), "expected boolean");
    dst = v.get<bool>();
  }

  void string(const char* key, std::string& dst) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) config_error(at(key), "expected string");
    dst = v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) config_error(path_ + "/" + it.key(), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ContinuationConfig parse_cmlmc(Reader& r, const std::string& preset) {
  ContinuationConfig c =
      preset == "pde" ? ContinuationConfig::pde_defaults() : ContinuationConfig::sde_defaults();
  c.initial_hierarchy.clear();
  r.number("tol_max", c.tol_max);
  r.number("r1", c.r1);
  r.number("r2", c.r2);
  r.number("c_alpha", c.c_alpha);
  r.integer("L_inc", c.L_inc);
  r.integer("frak_L", c.frak_L);
  r.integer("L_max_abs", c.L_max_abs);
  r.integer("max_iterations", c.max_iterations);
  r.number("theta_min", c.theta_min);
  r.boolean("reuse_samples", c.reuse_samples);
  r.number("kappa0", c.var_prior.kappa0);
  r.number("kappa1", c.var_prior.kappa1);
  if (r.has("initial_hierarchy")) {
    const json& h = r.raw("initial_hierarchy");
    const std::string p = r.at("initial_hierarchy");
    if (!h.is_array()) config_error(p, "expected array");
    for (std::size_t i = 0; i < h.size(); ++i) {
      Reader lr(h[i], p + "/" + std::to_string(i));
      InitialLevel lvl;
      if (!lr.has("h")) config_error(lr.at("h"), "required");
      lr.number("h", lvl.h);
      lr.integer("M", lvl.M);
      lr.finish();
      c.initial_hierarchy.push_back(lvl);
    }
  }
  if (r.has("rate_prior")) {
    const json& jp = r.raw("rate_prior");
    if (!jp.is_null()) {
      Reader pr(jp, r.at("rate_prior"));
      RatePrior p;
      pr.number("x0_hat", p.x0_hat);
      pr.number("x1_hat", p.x1_hat);
      pr.number("sigma0", p.sigma0);
      pr.number("sigma1", p.sigma1);
      pr.finish();
      c.rate_prior = p;
    }
  }
  return c;
}

StandardConfig parse_smlmc(Reader& r) {
  StandardConfig s;
  r.integer("M_tilde", s.M_tilde);
  r.number("theta", s.theta);
  r.number("c_alpha", s.c_alpha);
  r.boolean("reuse_samples", s.reuse_samples);
  r.integer("L_max_abs", s.L_max_abs);
  if (r.has("q1") && !r.raw("q1").is_null()) {
    double q1 = 0.0;
    r.number("q1", q1);
    s.q1 = q1;
  }
  return s;
}

json algorithm_json(const ExperimentConfig& cfg) {
  if (cfg.is_cmlmc()) {
    const auto& c = std::get<ContinuationConfig>(cfg.algorithm);
    json init = json::array();
    for (const auto& l : c.initial_hierarchy) init.push_back({{"h", l.h}, {"M", l.M}});
    json j = {{"type", "cmlmc"},
              {"preset", cfg.preset},
              {"tol_max", c.tol_max},
              {"r1", c.r1},
              {"r2", c.r2},
              {"c_alpha", c.c_alpha},
              {"L_inc", c.L_inc},
              {"frak_L", c.frak_L},
              {"L_max_abs", c.L_max_abs},
              {"max_iterations", c.max_iterations},
              {"theta_min", c.theta_min},
              {"reuse_samples", c.reuse_samples},
              {"kappa0", c.var_prior.kappa0},
              {"kappa1", c.var_prior.kappa1},
              {"initial_hierarchy", init}};
    if (c.rate_prior) {
      j["rate_prior"] = {{"x0_hat", c.rate_prior->x0_hat},
                         {"x1_hat", c.rate_prior->x1_hat},
                         {"sigma0", c.rate_prior->sigma0},
                         {"sigma1", c.rate_prior->sigma1}};
    } else {
      j["rate_prior"] = nullptr;
    }
    return j;
  }
  const auto& s = std::get<StandardConfig>(cfg.algorithm);
  json j = {{"type", "smlmc"},
            {"M_tilde", s.M_tilde},
            {"theta", s.theta},
            {"c_alpha", s.c_alpha},
            {"reuse_samples", s.reuse_samples},
            {"L_max_abs", s.L_max_abs}};
  j["q1"] = s.q1 ? json(*s.q1) : json(nullptr);
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write " + p.string());
  f << text;
  if (!f) throw Error(ErrorCode::io, "write failed for " + p.string());
}

json read_json(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot read " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, p.string() + ": " + e.what());
  }
}

std::string run_file_name(std::size_t t, int r) {
  return "runs/tol" + std::to_string(t) + "_rep" + std::to_string(r) + ".json";
}

json summary_json(const EnsembleSummary& s) {
  json j = {{"tol", s.tol},
            {"runs", s.runs},
            {"failed", s.failed},
            {"exceed_fraction", s.exceed_fraction},
            {"work", {{"p5", s.work.p5}, {"p50", s.work.p50}, {"p95", s.work.p95}}},
            {"ks_statistic", s.ks_statistic},
            {"ks_excluded", s.ks_excluded}};
  if (!s.costs.empty()) {
    const Percentiles c = work_percentiles(s.costs);
    j["timing"] = {{"measured_cost", {{"p5", c.p5}, {"p50", c.p50}, {"p95", c.p95}}}};
  }
  return j;
}

struct Tables {
  std::string errors = "tol,rep,estimate,reference,error,error_estimate,exceeded\n";
  std::string work = "tol,rep,model_work,measured_cost,final_L,theta_final,iterations\n";
  std::string theta = "tol,rep,theta_final\n";
  std::string levels = "tol,rep,final_L\n";
  std::string qq = "rank,normalized_error,normal_quantile\n";
};

Tables build_tables(const std::vector<double>& tols, const std::vector<std::vector<RunRecord>>& recs,
                    std::optional<double> reference) {
  Tables t;
  for (std::size_t k = 0; k < tols.size(); ++k) {
    const std::string tol = format_double(tols[k]);
    for (std::size_t r = 0; r < recs[k].size(); ++r) {
      const RunRecord& rec = recs[k][r];
      if (!rec.ok()) continue;
      const std::string rep = std::to_string(r);
      if (reference) {
        const double e = rec.estimate - *reference;
        t.errors += tol + "," + rep + "," + format_double(rec.estimate) + "," +
                    format_double(*reference) + "," + format_double(e) + "," +
                    format_double(rec.error_estimate) + "," + (std::abs(e) > tols[k] ? "1" : "0") +
                    "\n";
      }
      t.work += tol + "," + rep + "," + format_double(rec.total_model_work) + "," +
                format_double(rec.total_measured_cost) + "," + std::to_string(rec.final_L) + "," +
                format_double(rec.theta_final) + "," + std::to_string(rec.iterations.size()) + "\n";
      t.theta += tol + "," + rep + "," + format_double(rec.theta_final) + "\n";
      t.levels += tol + "," + rep + "," + std::to_string(rec.final_L) + "\n";
    }
  }
  if (reference && !tols.empty()) {
    const std::size_t kmin = static_cast<std::size_t>(
        std::min_element(tols.begin(), tols.end()) - tols.begin());
    const NormalityResult nr = normality_check(recs[kmin], *reference);
    const double n = static_cast<double>(nr.sorted.size());
    for (std::size_t i = 0; i < nr.sorted.size(); ++i) {
      const double q = normal_quantile((static_cast<double>(i + 1) - 0.5) / n);
      t.qq += std::to_string(i + 1) + "," + format_double(nr.sorted[i]) + "," + format_double(q) + "\n";
    }
  }
  return t;
}

json write_tables(const fs::path& dir, const Tables& t, const EmitFlags& emit, bool has_ref) {
  json files = json::array();
  auto put = [&](bool on, const char* name, const std::string& body) {
    if (!on) return;
    write_text(dir / name, body);
    files.push_back(name);
  };
  put(emit.errors && has_ref, "errors.csv", t.errors);
  put(emit.work, "work.csv", t.work);
  put(emit.theta, "theta.csv", t.theta);
  put(emit.levels, "levels.csv", t.levels);
  put(emit.qq && has_ref, "qq.csv", t.qq);
  return files;
}

std::optional<ComplexityFit> fit_if_possible(const std::vector<EnsembleSummary>& sums, double s2) {
  std::vector<double> tols, works;
  for (const auto& s : sums) {
    if (s.runs == 0 || !(s.tol < 1.0)) continue;
    tols.push_back(s.tol);
    works.push_back(s.work.p50);
  }
  if (std::set<double>(tols.begin(), tols.end()).size() < 3) return std::nullopt;
  return complexity_fit(tols, works, s2);
}

json complexity_json(const ComplexityFit& f) {
  return {{"s1_hat", f.s1_hat}, {"s2", f.s2}, {"intercept", f.intercept}, {"residual", f.residual}};
}

void check_initial_hierarchy(const ExperimentConfig& cfg, const CoupledSampler& sampler) {
  if (!cfg.is_cmlmc()) return;
  const auto& c = std::get<ContinuationConfig>(cfg.algorithm);
  for (std::size_t l = 0; l < c.initial_hierarchy.size(); ++l) {
    const double h = mesh_size(sampler.hierarchy(), static_cast<int>(l));
    if (std::abs(c.initial_hierarchy[l].h - h) > 1e-12 * h) {
      config_error("/algorithm/initial_hierarchy/" + std::to_string(l) + "/h",
                   "does not match the sampler mesh size " + format_double(h));
    }
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void ExperimentConfig::set_reuse(bool reuse) {
  std::visit([reuse](auto& a) { a.reuse_samples = reuse; }, algorithm);
}

ExperimentConfig parse_config(const json& j) {
  Reader top(j, "");
  ExperimentConfig cfg;

  if (!top.has("sampler")) config_error("/sampler", "required");
  cfg.sampler = top.raw("sampler");
  {
    // Build once to validate the sampler section; normalise params.
    auto s = make_sampler(cfg.sampler);
    cfg.sampler = {{"name", s->descriptor().name}, {"params", s->params_json()}};
  }
  const std::string sname = cfg.sampler["name"].get<std::string>();

  if (!top.has("algorithm")) config_error("/algorithm", "required");
  Reader alg(top.raw("algorithm"), "/algorithm");
  std::string type;
  if (!alg.has("type")) config_error("/algorithm/type", "required");
  alg.string("type", type);
  if (type == "cmlmc") {
    cfg.preset = sname == "elliptic1d" ? "pde" : "sde";
    alg.string("preset", cfg.preset);
    if (cfg.preset != "sde" && cfg.preset != "pde") {
      config_error("/algorithm/preset", "expected \"sde\" or \"pde\"");
    }
    cfg.algorithm = parse_cmlmc(alg, cfg.preset);
  } else if (type == "smlmc") {
    cfg.algorithm = parse_smlmc(alg);
  } else {
    config_error("/algorithm/type", "expected \"cmlmc\" or \"smlmc\"");
  }
  alg.finish();

  if (!top.has("tolerances")) config_error("/tolerances", "required");
  const json& tols = top.raw("tolerances");
  if (!tols.is_array() || tols.empty()) config_error("/tolerances", "expected nonempty array");
  for (std::size_t k = 0; k < tols.size(); ++k) {
    const std::string p = "/tolerances/" + std::to_string(k);
    if (!tols[k].is_number()) config_error(p, "expected number");
    const double t = tols[k].get<double>();
    if (!(t > 0.0) || !std::isfinite(t)) config_error(p, "must be positive");
    if (cfg.is_cmlmc() && t > std::get<ContinuationConfig>(cfg.algorithm).tol_max) {
      config_error(p, "exceeds /algorithm/tol_max");
    }
    cfg.tolerances.push_back(t);
  }

  top.integer("repetitions", cfg.repetitions);
  if (cfg.repetitions < 1) config_error("/repetitions", "must be >= 1");
  top.integer("base_seed", cfg.base_seed);
  top.string("output_dir", cfg.output_dir);
  top.string("label", cfg.label);
  if (cfg.label.empty()) cfg.label = type;
  if (top.has("reference") && !top.raw("reference").is_null()) {
    double ref = 0.0;
    top.number("reference", ref);
    cfg.reference = ref;
  }
  if (top.has("emit")) {
    Reader em(top.raw("emit"), "/emit");
    em.boolean("records", cfg.emit.records);
    em.boolean("errors", cfg.emit.errors);
    em.boolean("work", cfg.emit.work);
    em.boolean("theta", cfg.emit.theta);
    em.boolean("levels", cfg.emit.levels);
    em.boolean("qq", cfg.emit.qq);
    em.finish();
  }
  top.finish();

  // Validate the algorithm knobs with a representative tolerance.
  try {
    if (cfg.is_cmlmc()) {
      auto c = std::get<ContinuationConfig>(cfg.algorithm);
      c.tol = *std::min_element(cfg.tolerances.begin(), cfg.tolerances.end());
      c.validate();
    } else {
      auto s = std::get<StandardConfig>(cfg.algorithm);
      s.tol = cfg.tolerances.front();
      s.validate();
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::config, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::config, path + ": cannot open config file");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j = {{"sampler", cfg.sampler},
            {"algorithm", algorithm_json(cfg)},
            {"label", cfg.label},
            {"tolerances", cfg.tolerances},
            {"repetitions", cfg.repetitions},
            {"base_seed", cfg.base_seed},
            {"output_dir", cfg.output_dir},
            {"emit",
             {{"records", cfg.emit.records},
              {"errors", cfg.emit.errors},
              {"work", cfg.emit.work},
              {"theta", cfg.emit.theta},
              {"levels", cfg.emit.levels},
              {"qq", cfg.emit.qq}}}};
  j["reference"] = cfg.reference ? json(*cfg.reference) : json(nullptr);
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunRecord run_single(const CoupledSampler& sampler, const ExperimentConfig& cfg, double tol,
                     std::uint64_t seed, int threads) {
  if (cfg.is_cmlmc()) {
    auto c = std::get<ContinuationConfig>(cfg.algorithm);
    c.tol = tol;
    return run_cmlmc(sampler, c, seed, threads);
  }
  auto s = std::get<StandardConfig>(cfg.algorithm);
  s.tol = tol;
  return run_smlmc(sampler, s, seed, threads);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opt) {
  ExperimentConfig cfg = cfg_in;
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (opt.reuse_samples) cfg.set_reuse(*opt.reuse_samples);
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;

  const auto sampler = make_sampler(cfg.sampler);
  check_initial_hierarchy(cfg, *sampler);
  ExperimentResult res;
  const std::optional<double> ref = cfg.reference ? cfg.reference : sampler->descriptor().reference;
  res.has_reference = ref.has_value();
  res.reference = ref.value_or(0.0);

  const std::size_t nt = cfg.tolerances.size();
  const std::size_t nr = static_cast<std::size_t>(cfg.repetitions);
  res.records.assign(nt, std::vector<RunRecord>(nr));

  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < nt * nr;) {
      const std::size_t t = k / nr, r = k % nr;
      const std::uint64_t seed = cfg.base_seed + r;
      try {
        res.records[t][r] = run_single(*sampler, cfg, cfg.tolerances[t], seed);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::config) {
          std::lock_guard lk(mu);
          if (!err) err = std::current_exception();
          continue;
        }
        RunRecord& rec = res.records[t][r];
        rec.algorithm = cfg.algorithm_name();
        rec.sampler = sampler->descriptor().name;
        rec.seed = seed;
        rec.tol = cfg.tolerances[t];
        rec.status = to_string(e.code());
        rec.message = e.what();
      } catch (const std::exception& e) {
        RunRecord& rec = res.records[t][r];
        rec.algorithm = cfg.algorithm_name();
        rec.seed = seed;
        rec.tol = cfg.tolerances[t];
        rec.status = "internal_error";
        rec.message = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(nt * nr)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);

  for (std::size_t t = 0; t < nt; ++t) {
    res.summaries.push_back(confidence_table(res.records[t], res.reference, cfg.tolerances[t]));
    for (const auto& r : res.records[t]) res.failed_runs += r.ok() ? 0 : 1;
  }
  res.complexity = fit_if_possible(res.summaries, sampler->descriptor().s2);

  const fs::path dir(cfg.output_dir);
  json runs = json::array();
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 0; r < nr; ++r) {
      const RunRecord& rec = res.records[t][r];
      json e = {{"tol_index", t},
                {"rep", r},
                {"tol", cfg.tolerances[t]},
                {"seed", rec.seed},
                {"status", rec.status},
                {"model_work", rec.total_model_work},
                {"measured_cost", rec.total_measured_cost}};
      if (cfg.emit.records) e["file"] = run_file_name(t, static_cast<int>(r));
      if (!rec.ok()) e["message"] = rec.message;
      runs.push_back(e);
    }
  }
  json summaries = json::array();
  for (std::size_t t = 0; t < nt; ++t) summaries.push_back("summary_tol" + std::to_string(t) + ".json");

  json& m = res.manifest;
  m["format"] = "mlmc-manifest/1";
  m["label"] = cfg.label;
  m["algorithm"] = cfg.algorithm_name();
  m["sampler"] = sampler->descriptor().name;
  m["config_file"] = "config.json";
  m["config_hash"] = config_hash(cfg);
  m["tolerances"] = cfg.tolerances;
  m["repetitions"] = cfg.repetitions;
  m["base_seed"] = cfg.base_seed;
  m["reference"] = res.has_reference ? json(res.reference) : json(nullptr);
  m["nominal_s2"] = sampler->descriptor().s2;
  m["failed_runs"] = res.failed_runs;
  m["runs"] = runs;
  m["summaries"] = summaries;
  if (res.complexity) m["complexity"] = complexity_json(*res.complexity);

  if (opt.write) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
    if (cfg.emit.records) {
      for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t r = 0; r < nr; ++r) {
          write_text(dir / run_file_name(t, static_cast<int>(r)),
                     to_json(res.records[t][r]).dump(2) + "\n");
        }
      }
    }
    for (std::size_t t = 0; t < nt; ++t) {
      write_text(dir / summaries[t].get<std::string>(), summary_json(res.summaries[t]).dump(2) + "\n");
    }
    m["tables"] = write_tables(dir, build_tables(cfg.tolerances, res.records, ref), cfg.emit,
                               res.has_reference);
    write_text(dir / "manifest.json", m.dump(2) + "\n");
  }
  return res;
}

json compare_manifests(const std::vector<std::string>& paths, const std::optional<std::string>& out_dir) {
  if (paths.empty()) throw Error(ErrorCode::invalid_argument, "compare needs at least one manifest");
  std::vector<json> ms;
  for (const auto& p : paths) ms.push_back(read_json(p));
  std::size_t base = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].value("algorithm", "") == "cmlmc") {
      base = i;
      break;
    }
  }
  const json grid = ms[base].at("tolerances");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].at("tolerances") != grid) {
      throw Error(ErrorCode::config, paths[i] + ": tolerance grid differs from the baseline");
    }
  }

  // works[manifest][tol_index]
  std::vector<std::vector<std::vector<double>>> works(ms.size(),
                                                      std::vector<std::vector<double>>(grid.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (const auto& r : ms[i].at("runs")) {
      if (r.at("status") != "ok") continue;
      works[i][r.at("tol_index").get<std::size_t>()].push_back(r.at("model_work").get<double>());
    }
  }

  json rows = json::array();
  std::string csv = "tol,variant,median,p5,p95,normalized_median,normalized_p5,normalized_p95\n";
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double tol = grid[t].get<double>();
    if (works[base][t].empty()) {
      throw Error(ErrorCode::estimate_undefined, "baseline has no successful runs at tol " + format_double(tol));
    }
    const double bmed = percentile(works[base][t], 0.5);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (works[i][t].empty()) continue;
      const Percentiles p = work_percentiles(works[i][t]);
      std::string label = ms[i].value("label", ms[i].value("algorithm", "variant"));
      json row = {{"tol", tol},
                  {"variant", label},
                  {"manifest", paths[i]},
                  {"median", p.p50},
                  {"p5", p.p5},
                  {"p95", p.p95},
                  {"normalized_median", p.p50 / bmed},
                  {"normalized_p5", p.p5 / bmed},
                  {"normalized_p95", p.p95 / bmed}};
      rows.push_back(row);
      csv += format_double(tol) + "," + label + "," + format_double(p.p50) + "," +
             format_double(p.p5) + "," + format_double(p.p95) + "," + format_double(p.p50 / bmed) +
             "," + format_double(p.p5 / bmed) + "," + format_double(p.p95 / bmed) + "\n";
    }
  }
  json out = {{"baseline", paths[base]}, {"rows", rows}};
  if (out_dir) {
    const fs::path d(*out_dir);
    write_text(d / "compare.csv", csv);
    write_text(d / "compare.json", out.dump(2) + "\n");
  }
  return out;
}

json diagnose_manifest(const std::string& manifest_path, const std::optional<std::string>& out_dir) {
  const fs::path mp(manifest_path);
  const json m = read_json(mp);
  const fs::path root = mp.parent_path();
  const std::vector<double> tols = m.at("tolerances").get<std::vector<double>>();
  const std::size_t reps = m.at("repetitions").get<std::size_t>();
  std::vector<std::vector<RunRecord>> recs(tols.size(), std::vector<RunRecord>(reps));
  for (const auto& r : m.at("runs")) {
    const std::size_t t = r.at("tol_index").get<std::size_t>();
    const std::size_t k = r.at("rep").get<std::size_t>();
    if (t >= tols.size() || k >= reps) throw Error(ErrorCode::io, "manifest run index out of range");
    if (!r.contains("file")) throw Error(ErrorCode::io, "manifest lists no run record files");
    recs[t][k] = record_from_json(read_json(root / r.at("file").get<std::string>()));
  }
  std::optional<double> ref;
  if (m.contains("reference") && m.at("reference").is_number()) ref = m.at("reference").get<double>();

  std::vector<EnsembleSummary> sums;
  json jsums = json::array();
  for (std::size_t t = 0; t < tols.size(); ++t) {
    sums.push_back(confidence_table(recs[t], ref.value_or(0.0), tols[t]));
    jsums.push_back(summary_json(sums.back()));
  }
  json out = {{"summaries", jsums}};
  if (auto f = fit_if_possible(sums, m.value("nominal_s2", 0.0))) out["complexity"] = complexity_json(*f);
  if (ref) {
    const std::size_t kmin =
        static_cast<std::size_t>(std::min_element(tols.begin(), tols.end()) - tols.begin());
    const NormalityResult nr = normality_check(recs[kmin], *ref);
    out["normality"] = {{"tol", tols[kmin]},
                        {"ks_statistic", nr.ks_statistic},
                        {"excluded", nr.excluded},
                        {"degenerate", nr.degenerate},
                        {"n", nr.sorted.size()}};
  }
  if (out_dir) {
    const fs::path d(*out_dir);
    out["tables"] = write_tables(d, build_tables(tols, recs, ref), EmitFlags{}, ref.has_value());
    write_text(d / "diag.json", out.dump(2) + "\n");
  }
  return out;
}

}  // namespace mlmc
