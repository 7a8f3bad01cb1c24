#include "metrics/report.hpp"

#include <cstdio>
#include <ostream>

#include "harness/csv.hpp"

namespace madp {
namespace {

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<const MetricReport*> all_rows(const EvaluationReport& report) {
  std::vector<const MetricReport*> rows;
  for (const MetricReport& r : report.subsets) rows.push_back(&r);
  rows.push_back(&report.average);
  rows.push_back(&report.worst);
  return rows;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["subset"] = report.subset;
  j["n_bf"] = report.n_bf;
  j["n_attack"] = report.n_attack;
  j["eer"] = report.eer;
  nlohmann::ordered_json apcer, bpcer, apcer_met, bpcer_met;
  for (int t : kOperatingTargets) {
    const std::string key = std::to_string(t);
    apcer[key] = report.apcer_at_bpcer.at(t);
    bpcer[key] = report.bpcer_at_apcer.at(t);
    apcer_met[key] = report.apcer_at_bpcer_met.at(t);
    bpcer_met[key] = report.bpcer_at_apcer_met.at(t);
  }
  j["apcer_at_bpcer"] = apcer;
  j["bpcer_at_apcer"] = bpcer;
  j["constraint_flags"] = {{"apcer_at_bpcer", apcer_met}, {"bpcer_at_apcer", bpcer_met}};
  return j;
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["selector"] = report.selector;
  j["dot_mode"] = report.dot_mode;
  j["normalization"] = report.normalization;
  j["normalize_before_average"] = report.normalize_before_average;
  j["prompt_count"] = report.prompt_count;
  j["bona_fide_subset"] = report.bona_fide_subset;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const MetricReport* r : all_rows(report)) rows.push_back(to_json(*r));
  j["rows"] = rows;
  return j;
}

void write_json(std::ostream& out, const EvaluationReport& report) {
  out << to_json(report).dump(2) << '\n';
}

void write_csv(std::ostream& out, const EvaluationReport& report) {
  out << "subset,n_bf,n_attack,eer";
  for (int t : kOperatingTargets) out << ",apcer_at_bpcer_" << t;
  for (int t : kOperatingTargets) out << ",bpcer_at_apcer_" << t;
  out << '\n';
  for (const MetricReport* r : all_rows(report)) {
    out << csv::quote(r->subset) << ',' << r->n_bf << ',' << r->n_attack << ',' << two_decimals(r->eer);
    for (int t : kOperatingTargets) out << ',' << two_decimals(r->apcer_at_bpcer.at(t));
    for (int t : kOperatingTargets) out << ',' << two_decimals(r->bpcer_at_apcer.at(t));
    out << '\n';
  }
}

void write_table(std::ostream& out, const EvaluationReport& report) {
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %8s | %25s | %25s\n", "Test data", "EER (%)",
                "APCER (%) @ BPCER 1/10/20", "BPCER (%) @ APCER 1/10/20");
  out << "Setting: " << report.selector << (report.dot_mode ? " (dot)" : " (no dot)")
      << ", normalization " << report.normalization << ", " << report.prompt_count
      << " prompt(s) per class\n"
      << line;
  for (const MetricReport* r : all_rows(report)) {
    std::snprintf(line, sizeof line, "%-14s %8.2f | %7.2f %8.2f %8.2f | %7.2f %8.2f %8.2f\n",
                  r->subset.c_str(), r->eer, r->apcer_at_bpcer.at(1), r->apcer_at_bpcer.at(10),
                  r->apcer_at_bpcer.at(20), r->bpcer_at_apcer.at(1), r->bpcer_at_apcer.at(10),
                  r->bpcer_at_apcer.at(20));
    out << line;
  }
}

}  // namespace madp
