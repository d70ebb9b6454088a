#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coop/judgment.hpp"
#include "coop/records.hpp"

// Aggregates per-trial verdicts into joint counts over requested x estimated
// cooperativeness and the two conditional distributions, mirroring the
// Tables I-III analysis. Per-trial filtering and judging fan out across OpenMP
// threads; the reduction is a serial, order-stable tally, so results never
// depend on the thread count.

namespace coop {

// 3x3 joint counts; rows = requested xi, columns = estimated xi, both ordered
// (-1, 0, +1).
struct ConfusionMatrix {
  std::array<std::array<long, 3>, 3> counts{};

  static int index_of(int xi);  // -1 -> 0, 0 -> 1, +1 -> 2

  long& at(int requested_xi, int estimated_xi);
  long at(int requested_xi, int estimated_xi) const;
  long row_sum(int requested_xi) const;
  long col_sum(int estimated_xi) const;
  long total() const;
};

// Percentages rounded to one decimal (half away from zero). Rows (or columns,
// for the estimated-conditional) with zero counts are undefined, not 0%.
struct ConditionalTable {
  std::array<std::array<double, 3>, 3> pct{};  // NaN where undefined
  std::array<bool, 3> defined{};               // per row (or column)
};

double round_half_away_1dp(double value);

ConfusionMatrix confusion_matrix(
    const std::vector<std::pair<int, int>>& requested_estimated_pairs);

// Row-normalized: distribution of estimated xi given requested xi.
ConditionalTable conditional_by_requested(const ConfusionMatrix& m);

// Column-normalized: distribution of requested xi given estimated xi.
ConditionalTable conditional_by_estimated(const ConfusionMatrix& m);

struct TrialOutcome {
  std::string id;
  int requested_xi = 0;
  Verdict verdict;
};

struct Exclusion {
  std::string id;
  std::string reason;
};

struct EvaluationReport {
  std::size_t n_records = 0;
  ConfusionMatrix confusion;
  ConditionalTable by_requested;
  ConditionalTable by_estimated;
  std::array<double, 3> per_class_accuracy{};  // NaN for empty classes
  double overall_accuracy = 0.0;               // NaN when nothing judged
  std::vector<TrialOutcome> outcomes;
  std::vector<Exclusion> exclusions;
};

// Filters and judges every record (OpenMP across trials), tallying verdicts
// against the requested labels. Per-trial failures (no cue, short trace,
// missing label, numerical trouble) land in the exclusion list with a reason
// instead of aborting the suite. threads = 0 uses the OpenMP default.
EvaluationReport evaluate_suite(const std::vector<TrialRecord>& records,
                                const ModelParams& params,
                                const JudgmentConfig& cfg, int threads = 0);

// One row of the threshold-sweep output.
struct SweepPoint {
  double threshold = 0.0;
  double overall_accuracy = 0.0;
  std::array<double, 3> per_class_accuracy{};
  std::size_t n_judged = 0;
};

// Re-judges the suite at floor((hi-lo)/step)+1 thresholds (traces are
// filtered once and reused).
std::vector<SweepPoint> threshold_sweep(const std::vector<TrialRecord>& records,
                                        const ModelParams& params,
                                        const JudgmentConfig& base, double lo,
                                        double hi, double step,
                                        int threads = 0);

// Tables I-III layout to a stream.
void render_tables(const EvaluationReport& report, std::ostream& os);

}  // namespace coop
