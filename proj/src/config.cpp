#include "agdesign/config.hpp"

#include <cmath>

#include "json.hpp"

namespace agdesign {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw DomainError("config: " + path + ": " + msg);
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

// Unknown fields are hard errors so typos never silently change a design.
void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || item.key() == key;
    if (!ok) {
      std::string keys;
      for (const char* key : allowed) {
        if (!keys.empty()) keys += ", ";
        keys += key;
      }
      fail(path + "." + item.key(), "unknown field (valid fields: " + keys + ")");
    }
  }
}

const json& get_field(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required field is missing");
  return *it;
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const json& v = get_field(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const char* key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, path, key);
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const json& v = get_field(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const std::string& path,
                                     const char* key) {
  const json& v = get_field(obj, path, key);
  if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(path + "." + key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

StudyDesign parse_design(const json& root) {
  const json& d = get_field(root, "", "design");
  require_object(d, "design");
  require_keys(d, "design", {"type", "tau_c", "tau_a", "eta"});
  const std::string type = get_string(d, "design", "type");
  const double tau_c = get_number(d, "design", "tau_c");
  if (type == "design1") {
    if (d.contains("tau_a") || d.contains("eta"))
      fail("design", "tau_a/eta apply to design2 only");
    return StudyDesign::design1(tau_c);
  }
  if (type == "design2")
    return StudyDesign::design2(get_number(d, "design", "tau_a"), tau_c,
                                get_number_or(d, "design", "eta", 0.0));
  fail("design.type", "expected \"design1\" or \"design2\"");
}

RateFunction parse_rate(const json& arm, const std::string& path) {
  const json& r = get_field(arm, path, "rate");
  require_object(r, path + ".rate");
  require_keys(r, path + ".rate", {"weibull", "piecewise"});
  if (r.contains("weibull") == r.contains("piecewise"))
    fail(path + ".rate", "specify exactly one of weibull / piecewise");
  if (r.contains("weibull")) {
    const json& w = r["weibull"];
    require_object(w, path + ".rate.weibull");
    require_keys(w, path + ".rate.weibull", {"psi", "nu"});
    return RateFunction::weibull(get_number(w, path + ".rate.weibull", "psi"),
                                 get_number(w, path + ".rate.weibull", "nu"));
  }
  const json& p = r["piecewise"];
  require_object(p, path + ".rate.piecewise");
  require_keys(p, path + ".rate.piecewise", {"knots", "rates"});
  return RateFunction::piecewise_constant(
      get_number_array(p, path + ".rate.piecewise", "knots"),
      get_number_array(p, path + ".rate.piecewise", "rates"));
}

Hypothesis parse_hypothesis(const json& root) {
  const json& h = get_field(root, "", "hypothesis");
  require_object(h, "hypothesis");
  require_keys(h, "hypothesis", {"type", "alpha", "m0", "ml", "mu"});
  const std::string type = get_string(h, "hypothesis", "type");
  const double alpha = get_number_or(h, "hypothesis", "alpha", 0.05);
  if (type == "superiority") {
    if (h.contains("m0") || h.contains("ml") || h.contains("mu"))
      fail("hypothesis", "superiority takes no margins");
    return Hypothesis::superiority(alpha);
  }
  if (type == "noninferiority") {
    if (h.contains("ml") || h.contains("mu"))
      fail("hypothesis", "noninferiority takes the single margin m0");
    return Hypothesis::noninferiority(get_number(h, "hypothesis", "m0"), alpha);
  }
  if (type == "equivalence") {
    if (h.contains("m0")) fail("hypothesis", "equivalence takes margins ml and mu");
    return Hypothesis::equivalence(get_number(h, "hypothesis", "ml"),
                                   get_number(h, "hypothesis", "mu"), alpha);
  }
  fail("hypothesis.type",
       "expected \"superiority\", \"noninferiority\" or \"equivalence\"");
}

long get_integer(const json& obj, const std::string& path, const char* key) {
  const json& v = get_field(obj, path, key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

RunConfig parse_run(const json& root) {
  RunConfig run;
  if (!root.contains("run")) return run;
  const json& r = root["run"];
  require_object(r, "run");
  require_keys(r, "run", {"target_power", "n_total", "replicates", "seed"});
  if (r.contains("target_power")) run.target_power = get_number(r, "run", "target_power");
  if (r.contains("n_total")) run.n_total = get_integer(r, "run", "n_total");
  if (r.contains("replicates")) run.replicates = get_integer(r, "run", "replicates");
  if (r.contains("seed")) {
    const json& v = get_field(r, "run", "seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail("run.seed", "expected an integer");
    run.seed = v.get<std::uint64_t>();
  }
  return run;
}

}  // namespace

ParsedConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  require_object(root, "(root)");
  require_keys(root, "(root)",
               {"design", "control", "treatment", "allocation", "hypothesis", "run"});

  const StudyDesign design = parse_design(root);

  const json& control = get_field(root, "", "control");
  require_object(control, "control");
  require_keys(control, "control", {"rate", "kappa", "dropout_delta"});
  const RateFunction rate = parse_rate(control, "control");
  const double kappa0 = get_number(control, "control", "kappa");
  const double delta0 = get_number(control, "control", "dropout_delta");

  const json& treatment = get_field(root, "", "treatment");
  require_object(treatment, "treatment");
  require_keys(treatment, "treatment", {"rate_ratio", "kappa", "dropout_delta"});
  const double ratio = get_number(treatment, "treatment", "rate_ratio");
  if (!(ratio > 0.0)) fail("treatment.rate_ratio", "must be positive");
  const double kappa1 = get_number(treatment, "treatment", "kappa");
  const double delta1 = get_number(treatment, "treatment", "dropout_delta");

  const json& allocation = get_field(root, "", "allocation");
  require_object(allocation, "allocation");
  require_keys(allocation, "allocation", {"p1"});
  const double p1 = get_number(allocation, "allocation", "p1");

  try {
    TrialScenario scenario(design, rate, ratio, p1, kappa0, kappa1,
                           DropoutModel(delta0), DropoutModel(delta1));
    return {std::move(scenario), parse_hypothesis(root), parse_run(root)};
  } catch (const DomainError& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

std::string resolved_config_text(const ParsedConfig& cfg) {
  json root;
  const StudyDesign& d = cfg.scenario.design();
  if (d.staggered_entry())
    root["design"] = {{"type", "design2"}, {"tau_c", d.tau_c()}, {"tau_a", d.tau_a()},
                      {"eta", d.eta()}};
  else
    root["design"] = {{"type", "design1"}, {"tau_c", d.tau_c()}};

  json rate;
  const RateFunction& r = cfg.scenario.control_rate();
  if (r.is_weibull())
    rate = {{"weibull", {{"psi", r.psi()}, {"nu", r.nu()}}}};
  else
    rate = {{"piecewise", {{"knots", r.knots()}, {"rates", r.rates()}}}};
  root["control"] = {{"rate", rate},
                     {"kappa", cfg.scenario.kappa(0)},
                     {"dropout_delta", cfg.scenario.dropout(0).delta()}};
  root["treatment"] = {{"rate_ratio", cfg.scenario.rate_ratio()},
                       {"kappa", cfg.scenario.kappa(1)},
                       {"dropout_delta", cfg.scenario.dropout(1).delta()}};
  root["allocation"] = {{"p1", cfg.scenario.p1()}};

  json hyp;
  hyp["alpha"] = cfg.hypothesis.alpha();
  switch (cfg.hypothesis.type()) {
    case Hypothesis::Type::superiority:
      hyp["type"] = "superiority";
      break;
    case Hypothesis::Type::noninferiority:
      hyp["type"] = "noninferiority";
      hyp["m0"] = cfg.hypothesis.m0();
      break;
    case Hypothesis::Type::equivalence:
      hyp["type"] = "equivalence";
      hyp["ml"] = cfg.hypothesis.ml();
      hyp["mu"] = cfg.hypothesis.mu();
      break;
  }
  root["hypothesis"] = hyp;

  json run = json::object();
  if (cfg.run.target_power) run["target_power"] = *cfg.run.target_power;
  if (cfg.run.n_total) run["n_total"] = *cfg.run.n_total;
  if (cfg.run.replicates) run["replicates"] = *cfg.run.replicates;
  if (cfg.run.seed) run["seed"] = *cfg.run.seed;
  if (!run.empty()) root["run"] = run;

  return root.dump();
}

}  // namespace agdesign
