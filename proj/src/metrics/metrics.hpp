#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace madp {

struct ScoreRecord;

// Scores split by ground truth. Attack is decided when score >= threshold.
struct ScoreSet {
  std::vector<double> bona_fide;
  std::vector<double> attack;

  static ScoreSet from_records(std::span<const ScoreRecord> records);
};

struct OperatingPoint {
  double threshold;        // +inf for the all-bona-fide sentinel
  double apcer;            // attacks with score < threshold
  double bpcer;            // bona fides with score >= threshold
  std::size_t attacks_missed;
  std::size_t bona_fide_rejected;
};

// One point per distinct score plus +inf, ascending threshold. Throws
// DegenerateClassCounts without at least one score of each class, Data on
// non-finite scores.
std::vector<OperatingPoint> sweep(const ScoreSet& scores);

// Percent at the point minimizing |APCER - BPCER| (ties: smaller
// APCER + BPCER, then smaller threshold), reported as their mean.
double eer(const ScoreSet& scores);

enum class FixedMetric { BPCER, APCER };

struct FixedPointResult {
  double value;  // percent of the reported metric
  double threshold;
  bool constraint_met;
};

// With fix = BPCER: the lowest APCER among points whose BPCER <= target%,
// and symmetrically for APCER. When nothing meets the constraint, the point
// with the smallest fixed metric (then smallest reported metric) is used and
// constraint_met is false.
FixedPointResult error_at_fixed(const ScoreSet& scores, FixedMetric fix, double target_percent);

inline constexpr std::array<int, 3> kOperatingTargets = {1, 10, 20};

struct MetricReport {
  std::string subset;
  std::size_t n_bf = 0;
  std::size_t n_attack = 0;
  double eer = 0.0;
  std::map<int, double> apcer_at_bpcer;
  std::map<int, double> bpcer_at_apcer;
  std::map<int, bool> apcer_at_bpcer_met;
  std::map<int, bool> bpcer_at_apcer_met;
};

MetricReport evaluate(std::string subset, const ScoreSet& scores);

struct AggregateRows {
  MetricReport average;
  MetricReport worst;
};

// Per-metric mean and maximum over the given rows. Aggregate rows carry the
// largest bona-fide count and the summed attack count. Throws EmptyList.
AggregateRows aggregate_rows(std::span<const MetricReport> reports);

}  // namespace madp
