#include "confsets/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace confsets {

namespace {
std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "#schema=1\n";
  out += "model,estimator,n,N,K,B,epsilon,mean_risk,sd_risk,mean_prop,sd_prop,"
         "undefined_count,seed\n";
  for (const EpsilonSummary& s : report.summaries) {
    out += report.model_name;
    out += ',';
    out += report.estimator;
    out += ',';
    out += std::to_string(report.n) + ',' + std::to_string(report.N) + ',' +
           std::to_string(report.K) + ',' + std::to_string(report.reps) + ',';
    out += fmt6(s.epsilon);
    out += ',';
    out += s.all_risk_undefined ? "nan" : fmt6(s.mean_risk);
    out += ',';
    out += s.all_risk_undefined ? "nan" : fmt6(s.sd_risk);
    out += ',';
    out += fmt6(s.mean_prop);
    out += ',';
    out += fmt6(s.sd_prop);
    out += ',';
    out += std::to_string(s.undefined_risk_count);
    out += ',';
    out += std::to_string(report.master_seed);
    out += '\n';
  }
  return out;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["model"] = report.model_name;
  j["estimator"] = report.estimator;
  j["n"] = report.n;
  j["N"] = report.N;
  j["K"] = report.K;
  j["B"] = report.reps;
  j["seed"] = report.master_seed;
  j["fit_failures"] = report.fit_failures;

  nlohmann::json rows = nlohmann::json::array();
  for (const EpsilonSummary& s : report.summaries) {
    nlohmann::json row;
    row["epsilon"] = s.epsilon;
    if (s.all_risk_undefined) {
      row["mean_risk"] = nullptr;
      row["sd_risk"] = nullptr;
    } else {
      row["mean_risk"] = s.mean_risk;
      row["sd_risk"] = s.sd_risk;
    }
    row["mean_prop"] = s.mean_prop;
    row["sd_prop"] = s.sd_prop;
    row["undefined_count"] = s.undefined_risk_count;
    row["defined_count"] = s.defined_count;
    row["single_sample"] = s.single_sample;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);

  nlohmann::json reps = nlohmann::json::array();
  for (const RepetitionRecord& rec : report.records) {
    nlohmann::json per_eps = nlohmann::json::array();
    for (const EvaluationResult& r : rec.per_epsilon) {
      nlohmann::json e;
      e["classified"] = r.n_classified;
      e["errors"] = r.n_errors;
      e["total"] = r.total;
      e["prop"] = r.prop();
      if (r.risk_defined()) {
        e["risk"] = r.risk();
      } else {
        e["risk"] = nullptr;
      }
      per_eps.push_back(std::move(e));
    }
    reps.push_back(std::move(per_eps));
  }
  j["repetitions"] = std::move(reps);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace confsets
