#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "metrics/metrics.hpp"

namespace madp {

// Per-subset rows followed by the Average and Worst rows, plus the run
// settings that produced them.
struct EvaluationReport {
  std::string selector;
  bool dot_mode = true;
  std::string normalization;
  bool normalize_before_average = true;
  std::size_t prompt_count = 0;
  std::string bona_fide_subset;
  std::vector<MetricReport> subsets;
  MetricReport average;
  MetricReport worst;
};

nlohmann::ordered_json to_json(const MetricReport& report);
nlohmann::ordered_json to_json(const EvaluationReport& report);

// Full precision JSON, two-space indent, trailing newline.
void write_json(std::ostream& out, const EvaluationReport& report);

// subset,n_bf,n_attack,eer,apcer@bpcer1,...,bpcer@apcer20 with two decimals.
void write_csv(std::ostream& out, const EvaluationReport& report);

// Fixed-width table in the layout of a results table, two decimals.
void write_table(std::ostream& out, const EvaluationReport& report);

}  // namespace madp
