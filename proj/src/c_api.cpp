#include "agdesign.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "agdesign/config.hpp"
#include "agdesign/harness.hpp"
#include "json.hpp"

using nlohmann::json;

struct agd_scenario {
  agdesign::ParsedConfig cfg;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

agd_status set_error(agd_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Run `fn`, translating exceptions into status codes + the thread-local
// message.
template <typename Fn>
agd_status guarded(Fn&& fn) {
  try {
    fn();
    return AGD_OK;
  } catch (const agdesign::DomainError& e) {
    return set_error(AGD_STATUS_VALIDATION, e.what());
  } catch (const agdesign::NumericError& e) {
    return set_error(AGD_STATUS_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(AGD_STATUS_NUMERIC, e.what());
  } catch (...) {
    return set_error(AGD_STATUS_NUMERIC, "unknown error");
  }
}

json table_rows_json(const std::vector<agdesign::TableRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json row{{"table", r.table_id},
             {"block", r.block},
             {"design", r.design},
             {"rate_family", r.rate_family},
             {"kappa0", r.kappa0},
             {"kappa1", r.kappa1},
             {"dropout0", r.dropout0},
             {"dropout1", r.dropout1},
             {"rate_ratio", r.rate_ratio},
             {"p1", r.p1},
             {"target_power", r.target_power},
             {"total_n", r.total_n},
             {"raw_n", r.raw_n},
             {"nominal_power", r.nominal_power}};
    if (r.rate_family == "weibull") {
      row["psi"] = r.psi;
      row["nu"] = r.nu;
    }
    if (r.sim_replicates > 0) {
      row["simulated_power"] = r.simulated_power;
      row["sim_stderr"] = r.sim_stderr;
      row["sim_replicates"] = r.sim_replicates;
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace

extern "C" {

const char* agd_version(void) { return "1.0.0"; }

const char* agd_last_error(void) { return g_last_error.c_str(); }

void agd_string_free(char* text) { std::free(text); }

agd_status agd_scenario_from_json(const char* json_text, agd_scenario** out) {
  if (!json_text || !out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = agdesign::parse_config(json_text);
    *out = new agd_scenario{std::move(cfg)};
  });
}

void agd_scenario_free(agd_scenario* scenario) { delete scenario; }

agd_status agd_scenario_to_json(const agd_scenario* scenario, char** json_out) {
  if (!scenario || !json_out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    *json_out = copy_string(agdesign::resolved_config_text(scenario->cfg));
  });
}

agd_status agd_variance(const agd_scenario* scenario, agd_variance_result* out) {
  if (!scenario || !out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto rep = agdesign::variance(scenario->cfg.scenario);
    out->v_beta = rep.v_beta;
    out->e0 = rep.e0;
    out->f0 = rep.f0;
    out->e1 = rep.e1;
    out->f1 = rep.f1;
    out->path = rep.path == agdesign::VariancePath::general ? 0 : 1;
  });
}

agd_status agd_size(const agd_scenario* scenario, double target_power,
                    agd_size_result* out) {
  if (!scenario || !out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto size =
        agdesign::size_for(scenario->cfg.scenario, scenario->cfg.hypothesis, target_power);
    out->total_n = size.total_n;
    out->n_treatment = size.n_treatment;
    out->n_control = size.n_control;
    out->raw_n = size.raw_n;
    out->nominal_power = size.nominal_power;
  });
}

agd_status agd_power(const agd_scenario* scenario, long n_total, double* power_out,
                     int* margin_feasible_out) {
  if (!scenario || !power_out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto p = agdesign::power_at(scenario->cfg.scenario, scenario->cfg.hypothesis,
                                      static_cast<double>(n_total));
    *power_out = p.power;
    if (margin_feasible_out) *margin_feasible_out = p.margin_feasible ? 1 : 0;
  });
}

agd_status agd_simulate(const agd_scenario* scenario, long n_total, long replicates,
                        uint64_t seed, int threads, agd_sim_result* out) {
  if (!scenario || !out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = agdesign::empirical_power(scenario->cfg.scenario,
                                             scenario->cfg.hypothesis, n_total,
                                             replicates, seed, threads);
    out->replicates = r.replicates;
    out->rejections = r.rejections;
    out->empirical_power = r.empirical_power;
    out->mc_stderr = r.mc_stderr;
    out->degenerate_count = r.degenerate_count;
    out->wall_seconds = r.wall_seconds;
  });
}

agd_status agd_simulate_trial_csv(const agd_scenario* scenario, long n_total,
                                  uint64_t seed, uint64_t replicate, char** csv_out) {
  if (!scenario || !csv_out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto data =
        agdesign::simulate_trial(scenario->cfg.scenario, n_total, seed, replicate);
    *csv_out = copy_string(agdesign::trial_to_csv(data));
  });
}

agd_status agd_fit_csv(const char* csv_text, double alpha, char** json_out) {
  if (!csv_text || !json_out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto data = agdesign::trial_from_csv(csv_text);
    const auto fit = agdesign::ag_fit(data, alpha);
    json j{{"beta_hat", fit.beta_hat},
           {"rate_ratio", std::exp(fit.beta_hat)},
           {"model_info", fit.model_info},
           {"robust_meat", fit.robust_meat},
           {"robust_var", fit.robust_var},
           {"ci_lower", fit.ci_lower},
           {"ci_upper", fit.ci_upper},
           {"alpha", fit.alpha},
           {"iterations", fit.iterations},
           {"converged", fit.converged},
           {"degenerate", fit.degenerate},
           {"n_subjects", fit.n_subjects},
           {"n_events", fit.n_events}};
    *json_out = copy_string(j.dump());
  });
}

agd_status agd_reproduce_table(int table_id, long replicates, uint64_t seed,
                               int threads, char** json_out) {
  if (!json_out) return set_error(AGD_STATUS_ARGUMENT, "null argument");
  return guarded([&] {
    const auto rows = agdesign::reproduce_table(table_id, replicates, seed, threads);
    json j{{"table", table_id}, {"rows", table_rows_json(rows)}};
    *json_out = copy_string(j.dump());
  });
}

agd_status agd_self_check(char** json_out) {
  bool all_passed = false;
  const agd_status status = guarded([&] {
    const auto checks = agdesign::run_self_checks();
    all_passed = true;
    json arr = json::array();
    for (const auto& c : checks) {
      all_passed = all_passed && c.passed;
      arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    if (json_out)
      *json_out = copy_string(json{{"checks", arr}, {"all_passed", all_passed}}.dump());
  });
  if (status != AGD_OK) return status;
  if (!all_passed) return set_error(AGD_STATUS_NUMERIC, "self checks failed");
  return AGD_OK;
}

}  // extern "C"
