#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "classifier/classifier.hpp"
#include "core/errors.hpp"

namespace madp {
namespace {

void check(const ScoreSet& s) {
  if (s.bona_fide.empty() || s.attack.empty()) {
    fail(ErrorCode::DegenerateClassCounts,
         "metrics need at least one bona-fide and one attack score (got " +
             std::to_string(s.bona_fide.size()) + " / " + std::to_string(s.attack.size()) + ")");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(s.bona_fide.begin(), s.bona_fide.end(), finite) ||
      !std::all_of(s.attack.begin(), s.attack.end(), finite)) {
    fail(ErrorCode::Data, "scores must be finite");
  }
}

// Error rates are compared as exact rationals: with a = missed/nA and
// b = rejected/nB, a*nA*nB and b*nA*nB are integers.
struct Scaled {
  std::uint64_t apcer;
  std::uint64_t bpcer;
};

Scaled scaled(const OperatingPoint& p, std::size_t n_attack, std::size_t n_bf) {
  return {static_cast<std::uint64_t>(p.attacks_missed) * n_bf,
          static_cast<std::uint64_t>(p.bona_fide_rejected) * n_attack};
}

}  // namespace

ScoreSet ScoreSet::from_records(std::span<const ScoreRecord> records) {
  ScoreSet s;
  for (const ScoreRecord& r : records) {
    (r.truth == Label::BonaFide ? s.bona_fide : s.attack).push_back(r.score);
  }
  return s;
}

std::vector<OperatingPoint> sweep(const ScoreSet& scores) {
  check(scores);
  std::vector<double> bf = scores.bona_fide;
  std::vector<double> ma = scores.attack;
  std::sort(bf.begin(), bf.end());
  std::sort(ma.begin(), ma.end());

  std::vector<double> thresholds;
  thresholds.reserve(bf.size() + ma.size() + 1);
  std::merge(bf.begin(), bf.end(), ma.begin(), ma.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double n_bf = static_cast<double>(bf.size());
  const double n_ma = static_cast<double>(ma.size());
  std::vector<OperatingPoint> points;
  points.reserve(thresholds.size());
  auto bf_it = bf.begin();
  auto ma_it = ma.begin();
  for (double t : thresholds) {
    while (bf_it != bf.end() && *bf_it < t) ++bf_it;
    while (ma_it != ma.end() && *ma_it < t) ++ma_it;
    const auto missed = static_cast<std::size_t>(ma_it - ma.begin());
    const auto rejected = static_cast<std::size_t>(bf.end() - bf_it);
    points.push_back({t, static_cast<double>(missed) / n_ma,
                      static_cast<double>(rejected) / n_bf, missed, rejected});
  }
  return points;
}

double eer(const ScoreSet& scores) {
  const auto points = sweep(scores);
  const std::size_t n_bf = scores.bona_fide.size();
  const std::size_t n_ma = scores.attack.size();
  const OperatingPoint* best = nullptr;
  std::uint64_t best_gap = 0;
  std::uint64_t best_sum = 0;
  for (const OperatingPoint& p : points) {
    const Scaled s = scaled(p, n_ma, n_bf);
    const std::uint64_t gap = s.apcer > s.bpcer ? s.apcer - s.bpcer : s.bpcer - s.apcer;
    const std::uint64_t sum = s.apcer + s.bpcer;
    // ascending thresholds, so keeping the first on a full tie picks the smaller one
    if (!best || gap < best_gap || (gap == best_gap && sum < best_sum)) {
      best = &p;
      best_gap = gap;
      best_sum = sum;
    }
  }
  return (best->apcer + best->bpcer) / 2.0 * 100.0;
}

FixedPointResult error_at_fixed(const ScoreSet& scores, FixedMetric fix, double target_percent) {
  const auto points = sweep(scores);
  const double n_bf = static_cast<double>(scores.bona_fide.size());
  const double n_ma = static_cast<double>(scores.attack.size());

  auto fixed_count = [&](const OperatingPoint& p) {
    return fix == FixedMetric::BPCER ? p.bona_fide_rejected : p.attacks_missed;
  };
  auto reported_count = [&](const OperatingPoint& p) {
    return fix == FixedMetric::BPCER ? p.attacks_missed : p.bona_fide_rejected;
  };
  auto reported_rate = [&](const OperatingPoint& p) {
    return fix == FixedMetric::BPCER ? p.apcer : p.bpcer;
  };
  const double fixed_total = fix == FixedMetric::BPCER ? n_bf : n_ma;

  // count/total <= target/100, compared without dividing
  auto feasible = [&](const OperatingPoint& p) {
    return static_cast<double>(fixed_count(p)) * 100.0 <= target_percent * fixed_total;
  };

  const OperatingPoint* best = nullptr;
  for (const OperatingPoint& p : points) {
    if (!feasible(p)) continue;
    if (!best || reported_count(p) < reported_count(*best)) best = &p;
  }
  if (best) return {reported_rate(*best) * 100.0, best->threshold, true};

  for (const OperatingPoint& p : points) {
    if (!best || fixed_count(p) < fixed_count(*best) ||
        (fixed_count(p) == fixed_count(*best) && reported_count(p) < reported_count(*best))) {
      best = &p;
    }
  }
  return {reported_rate(*best) * 100.0, best->threshold, false};
}

MetricReport evaluate(std::string subset, const ScoreSet& scores) {
  MetricReport r;
  r.subset = std::move(subset);
  r.n_bf = scores.bona_fide.size();
  r.n_attack = scores.attack.size();
  r.eer = eer(scores);
  for (int target : kOperatingTargets) {
    const auto a = error_at_fixed(scores, FixedMetric::BPCER, target);
    const auto b = error_at_fixed(scores, FixedMetric::APCER, target);
    r.apcer_at_bpcer[target] = a.value;
    r.apcer_at_bpcer_met[target] = a.constraint_met;
    r.bpcer_at_apcer[target] = b.value;
    r.bpcer_at_apcer_met[target] = b.constraint_met;
  }
  return r;
}

AggregateRows aggregate_rows(std::span<const MetricReport> reports) {
  if (reports.empty()) fail(ErrorCode::EmptyList, "no reports to aggregate");
  AggregateRows rows;
  rows.average.subset = "Average";
  rows.worst.subset = "Worst";
  const double n = static_cast<double>(reports.size());

  auto mean_of = [&](auto get) {
    double acc = 0.0;
    for (const MetricReport& r : reports) acc += get(r);
    return acc / n;
  };
  auto max_of = [&](auto get) {
    double best = get(reports.front());
    for (const MetricReport& r : reports) best = std::max(best, get(r));
    return best;
  };

  rows.average.eer = mean_of([](const MetricReport& r) { return r.eer; });
  rows.worst.eer = max_of([](const MetricReport& r) { return r.eer; });
  for (int t : kOperatingTargets) {
    auto apcer = [t](const MetricReport& r) { return r.apcer_at_bpcer.at(t); };
    auto bpcer = [t](const MetricReport& r) { return r.bpcer_at_apcer.at(t); };
    rows.average.apcer_at_bpcer[t] = mean_of(apcer);
    rows.worst.apcer_at_bpcer[t] = max_of(apcer);
    rows.average.bpcer_at_apcer[t] = mean_of(bpcer);
    rows.worst.bpcer_at_apcer[t] = max_of(bpcer);
    bool apcer_met = true;
    bool bpcer_met = true;
    for (const MetricReport& r : reports) {
      apcer_met = apcer_met && r.apcer_at_bpcer_met.at(t);
      bpcer_met = bpcer_met && r.bpcer_at_apcer_met.at(t);
    }
    for (MetricReport* row : {&rows.average, &rows.worst}) {
      row->apcer_at_bpcer_met[t] = apcer_met;
      row->bpcer_at_apcer_met[t] = bpcer_met;
    }
  }
  for (const MetricReport& r : reports) {
    for (MetricReport* row : {&rows.average, &rows.worst}) {
      row->n_bf = std::max(row->n_bf, r.n_bf);
      row->n_attack += r.n_attack;
    }
  }
  return rows;
}

}  // namespace madp
