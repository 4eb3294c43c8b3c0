#include "agdesign/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace agdesign {

namespace {

double sample_entry(const StudyDesign& design, num::RngStream& stream) {
  const double u = stream.uniform();
  const double eta = design.eta();
  if (eta == 0.0) return u * design.tau_a();
  // invert the truncated-exponential CDF
  return -std::log1p(u * std::expm1(-eta * design.tau_a())) / eta;
}

}  // namespace

SubjectRecord simulate_subject(const StudyDesign& design, const RateFunction& rate,
                               double kappa, const DropoutModel& dropout,
                               num::RngStream& stream) {
  SubjectRecord rec;
  rec.frailty = kappa > 0.0 ? stream.gamma(1.0 / kappa, kappa) : 1.0;
  rec.entry = design.staggered_entry() ? sample_entry(design, stream) : 0.0;
  const double admin_limit =
      design.staggered_entry() ? design.horizon() - rec.entry : design.tau_c();
  const double censor = dropout.delta() > 0.0
                            ? stream.exponential(dropout.delta())
                            : std::numeric_limits<double>::infinity();
  rec.follow_up = std::min(censor, admin_limit);

  const double cum_at_end = rate.cumulative(rec.follow_up);
  const long n_events = stream.poisson(rec.frailty * cum_at_end);
  rec.event_times.reserve(static_cast<std::size_t>(n_events));
  for (long j = 0; j < n_events; ++j)
    rec.event_times.push_back(rate.inverse_cumulative(stream.uniform() * cum_at_end));
  std::sort(rec.event_times.begin(), rec.event_times.end());
  // continuous times tie only through finite precision; nudge duplicates
  for (std::size_t j = 1; j < rec.event_times.size(); ++j)
    if (rec.event_times[j] <= rec.event_times[j - 1])
      rec.event_times[j] = std::nextafter(rec.event_times[j - 1],
                                          std::numeric_limits<double>::infinity());
  return rec;
}

TrialData simulate_trial(const TrialScenario& sc, long n_total,
                         std::uint64_t master_seed, std::uint64_t replicate) {
  if (n_total < 2) throw DomainError("simulate_trial: need at least 2 subjects");
  TrialData data;
  data.master_seed = master_seed;
  data.replicate = replicate;
  data.scenario_fingerprint = scenario_fingerprint(sc);
  data.subjects.reserve(static_cast<std::size_t>(n_total));

  const long n_treat = std::lround(static_cast<double>(n_total) * sc.p1());
  const RateFunction treat_rate = sc.treatment_rate();
  num::RngStream trial_stream(master_seed, replicate);
  for (long i = 0; i < n_total; ++i) {
    num::RngStream subject_stream = trial_stream.substream(static_cast<std::uint64_t>(i));
    const bool treated = i < n_treat;
    SubjectRecord rec = simulate_subject(
        sc.design(), treated ? treat_rate : sc.control_rate(), sc.kappa(treated ? 1 : 0),
        sc.dropout(treated ? 1 : 0), subject_stream);
    rec.arm = treated ? 1 : 0;
    data.subjects.push_back(std::move(rec));
  }
  return data;
}

std::string trial_to_csv(const TrialData& data) {
  std::string out = "subject_id,arm,entry,follow_up,event_time\n";
  char buf[128];
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const auto& s = data.subjects[i];
    for (double t : s.event_times) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g\n", i, s.arm, s.entry,
                    s.follow_up, t);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,\n", i, s.arm, s.entry,
                  s.follow_up);
    out += buf;
  }
  return out;
}

TrialData trial_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::map<long, SubjectRecord> subjects;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("subject_id", 0) == 0) continue;  // header
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 5)
      throw DomainError("trial CSV: expected 5 fields on line " + std::to_string(line_no));
    long id;
    int arm;
    double entry, follow_up, event_time = -1.0;
    try {
      id = std::stol(fields[0]);
      arm = std::stoi(fields[1]);
      entry = std::stod(fields[2]);
      follow_up = std::stod(fields[3]);
      if (!fields[4].empty()) event_time = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw DomainError("trial CSV: malformed number on line " + std::to_string(line_no));
    }
    if (arm != 0 && arm != 1)
      throw DomainError("trial CSV: arm must be 0 or 1 on line " + std::to_string(line_no));
    auto& rec = subjects[id];
    rec.arm = arm;
    rec.entry = entry;
    rec.follow_up = follow_up;
    rec.frailty = std::numeric_limits<double>::quiet_NaN();  // unobserved
    if (!fields[4].empty()) rec.event_times.push_back(event_time);
  }
  if (subjects.empty()) throw DomainError("trial CSV: no subject rows");
  TrialData data;
  data.subjects.reserve(subjects.size());
  for (auto& [id, rec] : subjects) {
    std::sort(rec.event_times.begin(), rec.event_times.end());
    for (double t : rec.event_times)
      if (!(t > 0.0) || t > rec.follow_up)
        throw DomainError("trial CSV: event time outside (0, follow_up]");
    data.subjects.push_back(std::move(rec));
  }
  return data;
}

}  // namespace agdesign
