// Command-line front end for the agdesign shared library. Talks to the engine
// exclusively through the C API in agdesign.h; JSON assembly/rendering happens
// here.
//
// Subcommands: size, power, simulate, reproduce-table, check.
// Exit codes: 0 success, 2 validation error, 3 numeric error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agdesign.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

int status_to_exit(agd_status s) {
  switch (s) {
    case AGD_OK: return 0;
    case AGD_STATUS_VALIDATION: return kExitValidation;
    default: return kExitNumeric;
  }
}

[[noreturn]] void die(agd_status s) {
  std::cerr << "error: " << agd_last_error() << "\n";
  std::exit(status_to_exit(s));
}

[[noreturn]] void die_validation(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kExitValidation);
}

struct ScenarioPtr {
  agd_scenario* p = nullptr;
  ~ScenarioPtr() { agd_scenario_free(p); }
};

std::string take_string(char* s) {
  std::string out = s ? s : "";
  agd_string_free(s);
  return out;
}

// Common options shared by the scenario-driven subcommands.
struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_format = "text";
  long long seed = -1;
  long reps = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "scenario config (JSON file)");
  if (needs_config) cfg->required();
  cmd->add_option("--set", opts.sets,
                  "override a config field, e.g. --set run.n_total=365 "
                  "(value parsed as JSON; repeatable)");
  cmd->add_option("--out", opts.out_format, "output format: text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--seed", opts.seed, "master seed (overrides run.seed)");
  cmd->add_option("--reps", opts.reps, "Monte Carlo replicates (overrides run.replicates)");
  cmd->add_option("--threads", opts.threads,
                  "worker threads; 0 = auto (default; or AGDESIGN_THREADS)");
}

int resolve_threads(int threads) {
  if (threads != 0) return threads;
  if (const char* env = std::getenv("AGDESIGN_THREADS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      die_validation("AGDESIGN_THREADS must be an integer");
    }
  }
  return 0;
}

// Load the config file, apply --set overrides and flag-level overrides, and
// return the JSON text handed to the library.
json assemble_config(const CommonOpts& opts) {
  json root;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) die_validation("cannot open config file: " + opts.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      root = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      die_validation(std::string("config file is not valid JSON: ") + e.what());
    }
  } else {
    root = json::object();
  }
  for (const std::string& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      die_validation("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;  // bare words become strings
    }
    std::string pointer = "/" + key;
    for (auto& c : pointer)
      if (c == '.') c = '/';
    try {
      root[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception& e) {
      die_validation("--set " + key + ": " + e.what());
    }
  }
  if (opts.seed >= 0) root["run"]["seed"] = static_cast<std::uint64_t>(opts.seed);
  if (opts.reps >= 0) root["run"]["replicates"] = opts.reps;
  return root;
}

ScenarioPtr make_scenario(const json& config) {
  ScenarioPtr sc;
  const agd_status s = agd_scenario_from_json(config.dump().c_str(), &sc.p);
  if (s != AGD_OK) die(s);
  return sc;
}

json resolved_config(const agd_scenario* sc) {
  char* text = nullptr;
  const agd_status s = agd_scenario_to_json(sc, &text);
  if (s != AGD_OK) die(s);
  return json::parse(take_string(text));
}

// run.* fields come back through the resolved config
template <typename T>
T require_run_field(const json& cfg, const char* key, const char* hint) {
  if (!cfg.contains("run") || !cfg["run"].contains(key))
    die_validation(std::string("run.") + key + " is required (" + hint + ")");
  return cfg["run"][key].get<T>();
}

void emit(const json& payload, const std::string& format,
          const std::string& text_rendering) {
  if (format == "json")
    std::cout << payload.dump(2) << "\n";
  else
    std::cout << text_rendering;
}

std::string csv_escape(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// One flat CSV from an array of uniform JSON objects.
std::string rows_to_csv(const json& rows, const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ",";
      if (row.contains(columns[i])) out += csv_escape(row[columns[i]]);
    }
    out += "\n";
  }
  return out;
}

int run_size(const CommonOpts& opts) {
  const json config = assemble_config(opts);
  ScenarioPtr sc = make_scenario(config);
  const json resolved = resolved_config(sc.p);
  const double target =
      require_run_field<double>(resolved, "target_power", "e.g. --set run.target_power=0.9");
  agd_size_result size{};
  if (const agd_status s = agd_size(sc.p, target, &size); s != AGD_OK) die(s);

  json result{{"total_n", size.total_n},
              {"n_treatment", size.n_treatment},
              {"n_control", size.n_control},
              {"raw_n", size.raw_n},
              {"nominal_power", size.nominal_power}};
  char text[256];
  std::snprintf(text, sizeof text,
                "total size        %ld\n"
                "per arm           %ld treatment / %ld control\n"
                "raw size          %.4f\n"
                "nominal power     %.4f%%\n",
                size.total_n, size.n_treatment, size.n_control, size.raw_n,
                100.0 * size.nominal_power);
  if (opts.out_format == "csv") {
    std::cout << "total_n,n_treatment,n_control,raw_n,nominal_power\n"
              << size.total_n << "," << size.n_treatment << "," << size.n_control << ","
              << json(size.raw_n).dump() << "," << json(size.nominal_power).dump()
              << "\n";
  } else {
    emit(json{{"config", resolved}, {"result", result}}, opts.out_format, text);
  }
  return 0;
}

int run_power(const CommonOpts& opts) {
  const json config = assemble_config(opts);
  ScenarioPtr sc = make_scenario(config);
  const json resolved = resolved_config(sc.p);
  const long n = require_run_field<long>(resolved, "n_total", "e.g. --set run.n_total=365");
  double power = 0.0;
  int feasible = 1;
  if (const agd_status s = agd_power(sc.p, n, &power, &feasible); s != AGD_OK) die(s);

  json result{{"n_total", n}, {"power", power}, {"margin_feasible", feasible != 0}};
  char text[192];
  std::snprintf(text, sizeof text, "power at n=%ld    %.4f%%%s\n", n, 100.0 * power,
                feasible ? "" : "  (margins infeasible at this size)");
  if (opts.out_format == "csv") {
    std::cout << "n_total,power,margin_feasible\n"
              << n << "," << json(power).dump() << "," << (feasible ? 1 : 0) << "\n";
  } else {
    emit(json{{"config", resolved}, {"result", result}}, opts.out_format, text);
  }
  return 0;
}

int run_simulate(const CommonOpts& opts, const std::string& emit_data_path) {
  const json config = assemble_config(opts);
  ScenarioPtr sc = make_scenario(config);
  const json resolved = resolved_config(sc.p);
  const long n = require_run_field<long>(resolved, "n_total", "e.g. --set run.n_total=365");
  const long reps = resolved.contains("run") && resolved["run"].contains("replicates")
                        ? resolved["run"]["replicates"].get<long>()
                        : 5000;
  const std::uint64_t seed = resolved.contains("run") && resolved["run"].contains("seed")
                                 ? resolved["run"]["seed"].get<std::uint64_t>()
                                 : 12345;

  if (!emit_data_path.empty()) {
    char* csv = nullptr;
    if (const agd_status s = agd_simulate_trial_csv(sc.p, n, seed, 0, &csv); s != AGD_OK)
      die(s);
    std::ofstream out(emit_data_path);
    if (!out) die_validation("cannot write " + emit_data_path);
    out << take_string(csv);
  }

  agd_sim_result sim{};
  const agd_status s =
      agd_simulate(sc.p, n, reps, seed, resolve_threads(opts.threads), &sim);
  if (s != AGD_OK) die(s);

  // wall time is reported in text output only, so JSON stays byte-identical
  // across runs and thread counts.
  json result{{"replicates", sim.replicates},
              {"rejections", sim.rejections},
              {"empirical_power", sim.empirical_power},
              {"mc_stderr", sim.mc_stderr},
              {"degenerate_count", sim.degenerate_count},
              {"n_total", n},
              {"seed", seed}};
  char text[320];
  std::snprintf(text, sizeof text,
                "replicates        %ld\n"
                "rejections        %ld\n"
                "empirical power   %.2f%%  (mc stderr %.2f pp)\n"
                "degenerate fits   %ld\n"
                "wall time         %.1f s\n",
                sim.replicates, sim.rejections, 100.0 * sim.empirical_power,
                100.0 * sim.mc_stderr, sim.degenerate_count, sim.wall_seconds);
  if (opts.out_format == "csv") {
    std::cout << "replicates,rejections,empirical_power,mc_stderr,degenerate_count\n"
              << sim.replicates << "," << sim.rejections << ","
              << json(sim.empirical_power).dump() << "," << json(sim.mc_stderr).dump()
              << "," << sim.degenerate_count << "\n";
  } else {
    emit(json{{"config", resolved}, {"result", result}}, opts.out_format, text);
  }
  return 0;
}

int run_table(const CommonOpts& opts, int table_id) {
  if (table_id < 1 || table_id > 3) die_validation("--table must be 1, 2 or 3");
  const long reps = opts.reps >= 0 ? opts.reps : 0;
  const std::uint64_t seed = opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed) : 12345;
  char* text = nullptr;
  const agd_status s = agd_reproduce_table(table_id, reps, seed,
                                           resolve_threads(opts.threads), &text);
  if (s != AGD_OK) die(s);
  const json payload = json::parse(take_string(text));
  const json& rows = payload["rows"];

  if (opts.out_format == "json") {
    std::cout << payload.dump(2) << "\n";
    return 0;
  }
  std::vector<std::string> columns{"block",  "design",      "rate_family", "psi",
                                   "nu",     "kappa0",      "kappa1",      "dropout0",
                                   "dropout1", "rate_ratio", "p1",          "total_n",
                                   "nominal_power"};
  if (reps > 0) {
    columns.push_back("simulated_power");
    columns.push_back("sim_stderr");
  }
  if (opts.out_format == "csv") {
    std::cout << rows_to_csv(rows, columns);
    return 0;
  }
  std::printf("table %d (%zu rows)\n", table_id, rows.size());
  std::printf("%-20s %-7s %-9s %5s %5s %5s %5s %6s %6s %8s %10s", "block", "design",
              "family", "k0", "k1", "d0", "d1", "ratio", "p1", "total_n", "nominal%");
  if (reps > 0) std::printf(" %10s", "sim%");
  std::printf("\n");
  for (const auto& r : rows) {
    std::printf("%-20s %-7d %-9s %5.2f %5.2f %5.2f %5.2f %6.2f %6.3f %8ld %10.2f",
                r["block"].get<std::string>().c_str(), r["design"].get<int>(),
                r["rate_family"].get<std::string>().c_str(), r["kappa0"].get<double>(),
                r["kappa1"].get<double>(), r["dropout0"].get<double>(),
                r["dropout1"].get<double>(), r["rate_ratio"].get<double>(),
                r["p1"].get<double>(), r["total_n"].get<long>(),
                100.0 * r["nominal_power"].get<double>());
    if (reps > 0 && r.contains("simulated_power"))
      std::printf(" %10.2f", 100.0 * r["simulated_power"].get<double>());
    std::printf("\n");
  }
  return 0;
}

int run_check(const std::string& out_format) {
  char* text = nullptr;
  const agd_status s = agd_self_check(&text);
  const std::string payload_text = take_string(text);
  if (payload_text.empty()) die(s);
  const json payload = json::parse(payload_text);
  if (out_format == "json") {
    std::cout << payload.dump(2) << "\n";
  } else {
    for (const auto& c : payload["checks"])
      std::printf("[%s] %s — %s\n", c["passed"].get<bool>() ? "PASS" : "FAIL",
                  c["name"].get<std::string>().c_str(),
                  c["detail"].get<std::string>().c_str());
    std::printf("%s\n", payload["all_passed"].get<bool>() ? "all checks passed"
                                                          : "CHECKS FAILED");
  }
  return payload["all_passed"].get<bool>() ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trial design engine for recurrent events under the "
               "Andersen-Gill proportional rates model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(agd_version()));

  CommonOpts size_opts, power_opts, sim_opts, table_opts;
  std::string emit_data_path;
  int table_id = 1;
  std::string check_format = "text";

  auto* size_cmd =
      app.add_subcommand("size", "sample size for the configured scenario and power");
  add_common(size_cmd, size_opts, true);

  auto* power_cmd = app.add_subcommand("power", "nominal power at run.n_total");
  add_common(power_cmd, power_opts, true);

  auto* sim_cmd = app.add_subcommand(
      "simulate", "empirical power by Monte Carlo (simulate + fit + test)");
  add_common(sim_cmd, sim_opts, true);
  sim_cmd->add_option("--emit-data", emit_data_path,
                      "also write one simulated trial as counting-process CSV");

  auto* table_cmd =
      app.add_subcommand("reproduce-table", "recompute a built-in design table");
  table_cmd->add_option("--table", table_id, "table id: 1, 2 or 3")->required();
  add_common(table_cmd, table_opts, false);

  auto* check_cmd = app.add_subcommand("check", "run the built-in invariant suite");
  check_cmd->add_option("--out", check_format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    app.exit(e);
    return kExitValidation;
  }

  if (size_cmd->parsed()) return run_size(size_opts);
  if (power_cmd->parsed()) return run_power(power_opts);
  if (sim_cmd->parsed()) return run_simulate(sim_opts, emit_data_path);
  if (table_cmd->parsed()) return run_table(table_opts, table_id);
  if (check_cmd->parsed()) return run_check(check_format);
  return kExitValidation;
}
