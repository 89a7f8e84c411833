#include "mlmc/run_record.hpp"

#include "mlmc/error.hpp"

namespace mlmc {

using nlohmann::json;

namespace {

json iteration_json(const IterationTrace& t) {
  return {{"index", t.index},
          {"tol_i", t.tol_i},
          {"L", t.L},
          {"theta", t.theta},
          {"qw_theta", t.qw_theta},
          {"M", t.M},
          {"M_bar", t.M_bar},
          {"V", t.V},
          {"q1", t.q1},
          {"q2", t.q2},
          {"qw", t.qw},
          {"qw_star", t.qw_star},
          {"qw_sd", t.qw_sd},
          {"qs", t.qs},
          {"rate_warning", t.rate_warning},
          {"estimate", t.estimate},
          {"bias", t.bias},
          {"stat_error", t.stat_error},
          {"error_estimate", t.error_estimate},
          {"model_work", t.model_work}};
}

template <class T>
void get_to(const json& j, const char* key, T& dst) {
  if (j.contains(key)) j.at(key).get_to(dst);
}

}  // namespace

json to_json(const RunRecord& r, bool include_timing) {
  json iters = json::array();
  for (const auto& t : r.iterations) iters.push_back(iteration_json(t));
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"level", l.level}, {"count", l.count}, {"mean", l.mean}, {"variance", l.variance}});
  }
  json j = {{"algorithm", r.algorithm},
            {"sampler", r.sampler},
            {"status", r.status},
            {"message", r.message},
            {"seed", r.seed},
            {"tol", r.tol},
            {"estimate", r.estimate},
            {"error_estimate", r.error_estimate},
            {"estimator_variance", r.estimator_variance},
            {"bias", r.bias},
            {"final_L", r.final_L},
            {"theta_final", r.theta_final},
            {"total_model_work", r.total_model_work},
            {"levels", levels},
            {"iterations", iters}};
  if (include_timing) {
    json per_iter = json::array();
    for (const auto& t : r.iterations) per_iter.push_back(t.measured_cost);
    j["timing"] = {{"total_measured_cost", r.total_measured_cost}, {"iterations", per_iter}};
  }
  return j;
}

RunRecord record_from_json(const json& j) {
  try {
    RunRecord r;
    get_to(j, "algorithm", r.algorithm);
    get_to(j, "sampler", r.sampler);
    get_to(j, "status", r.status);
    get_to(j, "message", r.message);
    get_to(j, "seed", r.seed);
    get_to(j, "tol", r.tol);
    get_to(j, "estimate", r.estimate);
    get_to(j, "error_estimate", r.error_estimate);
    get_to(j, "estimator_variance", r.estimator_variance);
    get_to(j, "bias", r.bias);
    get_to(j, "final_L", r.final_L);
    get_to(j, "theta_final", r.theta_final);
    get_to(j, "total_model_work", r.total_model_work);
    if (j.contains("levels")) {
      for (const auto& l : j.at("levels")) {
        LevelSummary s;
        get_to(l, "level", s.level);
        get_to(l, "count", s.count);
        get_to(l, "mean", s.mean);
        get_to(l, "variance", s.variance);
        r.levels.push_back(s);
      }
    }
    if (j.contains("iterations")) {
      for (const auto& it : j.at("iterations")) {
        IterationTrace t;
        get_to(it, "index", t.index);
        get_to(it, "tol_i", t.tol_i);
        get_to(it, "L", t.L);
        get_to(it, "theta", t.theta);
        get_to(it, "qw_theta", t.qw_theta);
        get_to(it, "M", t.M);
        get_to(it, "M_bar", t.M_bar);
        get_to(it, "V", t.V);
        get_to(it, "q1", t.q1);
        get_to(it, "q2", t.q2);
        get_to(it, "qw", t.qw);
        get_to(it, "qw_star", t.qw_star);
        get_to(it, "qw_sd", t.qw_sd);
        get_to(it, "qs", t.qs);
        get_to(it, "rate_warning", t.rate_warning);
        get_to(it, "estimate", t.estimate);
        get_to(it, "bias", t.bias);
        get_to(it, "stat_error", t.stat_error);
        get_to(it, "error_estimate", t.error_estimate);
        get_to(it, "model_work", t.model_work);
        r.iterations.push_back(std::move(t));
      }
    }
    if (j.contains("timing")) {
      const auto& tm = j.at("timing");
      get_to(tm, "total_measured_cost", r.total_measured_cost);
      if (tm.contains("iterations")) {
        const auto& c = tm.at("iterations");
        for (std::size_t i = 0; i < c.size() && i < r.iterations.size(); ++i) {
          r.iterations[i].measured_cost = c[i].get<double>();
        }
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed run record: ") + e.what());
  }
}

}  // namespace mlmc
