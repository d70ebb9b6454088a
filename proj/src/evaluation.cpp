#include "coop/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coop/errors.hpp"
#include "coop/kalman.hpp"

namespace coop {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kXiValues[3] = {-1, 0, 1};

}  // namespace

int ConfusionMatrix::index_of(int xi) {
  if (xi < -1 || xi > 1) {
    throw ValidationError("ConfusionMatrix: value " + std::to_string(xi) +
                          " outside {-1, 0, +1}");
  }
  return xi + 1;
}

long& ConfusionMatrix::at(int requested_xi, int estimated_xi) {
  return counts[static_cast<std::size_t>(index_of(requested_xi))]
               [static_cast<std::size_t>(index_of(estimated_xi))];
}

long ConfusionMatrix::at(int requested_xi, int estimated_xi) const {
  return counts[static_cast<std::size_t>(index_of(requested_xi))]
               [static_cast<std::size_t>(index_of(estimated_xi))];
}

long ConfusionMatrix::row_sum(int requested_xi) const {
  const auto& row = counts[static_cast<std::size_t>(index_of(requested_xi))];
  return row[0] + row[1] + row[2];
}

long ConfusionMatrix::col_sum(int estimated_xi) const {
  const auto j = static_cast<std::size_t>(index_of(estimated_xi));
  return counts[0][j] + counts[1][j] + counts[2][j];
}

long ConfusionMatrix::total() const {
  long sum = 0;
  for (const auto& row : counts) sum += row[0] + row[1] + row[2];
  return sum;
}

double round_half_away_1dp(double value) {
  return std::round(value * 10.0) / 10.0;
}

ConfusionMatrix confusion_matrix(
    const std::vector<std::pair<int, int>>& requested_estimated_pairs) {
  ConfusionMatrix m;
  for (const auto& [requested, estimated] : requested_estimated_pairs) {
    ++m.at(requested, estimated);
  }
  return m;
}

ConditionalTable conditional_by_requested(const ConfusionMatrix& m) {
  ConditionalTable table;
  for (int i = 0; i < 3; ++i) {
    const long denom = m.row_sum(kXiValues[i]);
    table.defined[static_cast<std::size_t>(i)] = denom > 0;
    for (int j = 0; j < 3; ++j) {
      const auto cell = static_cast<double>(m.at(kXiValues[i], kXiValues[j]));
      table.pct[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          denom > 0 ? round_half_away_1dp(100.0 * cell /
                                          static_cast<double>(denom))
                    : kNan;
    }
  }
  return table;
}

ConditionalTable conditional_by_estimated(const ConfusionMatrix& m) {
  ConditionalTable table;
  for (int j = 0; j < 3; ++j) {
    const long denom = m.col_sum(kXiValues[j]);
    table.defined[static_cast<std::size_t>(j)] = denom > 0;
    for (int i = 0; i < 3; ++i) {
      const auto cell = static_cast<double>(m.at(kXiValues[i], kXiValues[j]));
      table.pct[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          denom > 0 ? round_half_away_1dp(100.0 * cell /
                                          static_cast<double>(denom))
                    : kNan;
    }
  }
  return table;
}

namespace {

struct TrialSlot {
  std::optional<TrialOutcome> outcome;
  std::optional<Exclusion> exclusion;
};

std::string record_id(const TrialRecord& record, std::size_t index) {
  return record.subject_id + "#" + std::to_string(index);
}

TrialSlot process_record(const TrialRecord& record, std::size_t index,
                         const ModelParams& params, const JudgmentConfig& cfg) {
  TrialSlot slot;
  const std::string id = record_id(record, index);
  try {
    if (!record.requested_xi.has_value()) {
      throw UnjudgeableError("no requested cooperativeness label");
    }
    detect_cue_onset(record.cues);  // fail fast with the "no cue" reason
    const FilterTrace trace = filter_trial(record, params);
    const Verdict verdict = judge(trace, record.cues, cfg);
    slot.outcome = TrialOutcome{id, *record.requested_xi, verdict};
  } catch (const std::exception& e) {
    slot.exclusion = Exclusion{id, e.what()};
  }
  return slot;
}

std::array<double, 3> per_class_accuracy_of(const ConfusionMatrix& m) {
  std::array<double, 3> acc{};
  for (int i = 0; i < 3; ++i) {
    const long denom = m.row_sum(kXiValues[i]);
    acc[static_cast<std::size_t>(i)] =
        denom > 0 ? static_cast<double>(m.at(kXiValues[i], kXiValues[i])) /
                        static_cast<double>(denom)
                  : kNan;
  }
  return acc;
}

double overall_accuracy_of(const ConfusionMatrix& m) {
  const long total = m.total();
  if (total == 0) return kNan;
  long diag = 0;
  for (int v : kXiValues) diag += m.at(v, v);
  return static_cast<double>(diag) / static_cast<double>(total);
}

std::vector<TrialSlot> process_all(const std::vector<TrialRecord>& records,
                                   const ModelParams& params,
                                   const JudgmentConfig& cfg, int threads) {
  std::vector<TrialSlot> slots(records.size());
  const long n = static_cast<long>(records.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    slots[i] = process_record(records[i], i, params, cfg);
  }
  return slots;
}

}  // namespace

EvaluationReport evaluate_suite(const std::vector<TrialRecord>& records,
                                const ModelParams& params,
                                const JudgmentConfig& cfg, int threads) {
  params.validate();
  cfg.validate();

  EvaluationReport report;
  report.n_records = records.size();
  for (TrialSlot& slot : process_all(records, params, cfg, threads)) {
    if (slot.outcome.has_value()) {
      report.confusion.at(slot.outcome->requested_xi,
                          slot.outcome->verdict.value) += 1;
      report.outcomes.push_back(std::move(*slot.outcome));
    } else {
      report.exclusions.push_back(std::move(*slot.exclusion));
    }
  }
  report.by_requested = conditional_by_requested(report.confusion);
  report.by_estimated = conditional_by_estimated(report.confusion);
  report.per_class_accuracy = per_class_accuracy_of(report.confusion);
  report.overall_accuracy = overall_accuracy_of(report.confusion);
  return report;
}

std::vector<SweepPoint> threshold_sweep(const std::vector<TrialRecord>& records,
                                        const ModelParams& params,
                                        const JudgmentConfig& base, double lo,
                                        double hi, double step, int threads) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw ValidationError("threshold_sweep: need hi >= lo and step > 0");
  }
  const auto n_points =
      static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;

  // Filter once; judging is cheap per threshold.
  struct Filtered {
    int requested = 0;
    FilterTrace trace;
    const CueTrace* cues = nullptr;
  };
  std::vector<std::optional<Filtered>> filtered(records.size());
  const long n = static_cast<long>(records.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      if (!records[i].requested_xi.has_value()) continue;
      detect_cue_onset(records[i].cues);
      filtered[i] = Filtered{*records[i].requested_xi,
                             filter_trial(records[i], params),
                             &records[i].cues};
    } catch (const std::exception&) {
      // excluded from the sweep, same as evaluate_suite would
    }
  }

  std::vector<SweepPoint> sweep;
  sweep.reserve(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    JudgmentConfig cfg = base;
    cfg.threshold = lo + static_cast<double>(p) * step;
    SweepPoint point;
    point.threshold = cfg.threshold;
    ConfusionMatrix m;
    for (const auto& f : filtered) {
      if (!f.has_value()) continue;
      try {
        const Verdict v = judge(f->trace, *f->cues, cfg);
        m.at(f->requested, v.value) += 1;
      } catch (const std::exception&) {
      }
    }
    point.per_class_accuracy = per_class_accuracy_of(m);
    point.overall_accuracy = overall_accuracy_of(m);
    point.n_judged = static_cast<std::size_t>(m.total());
    sweep.push_back(point);
  }
  return sweep;
}

namespace {

void render_pct_cell(std::ostream& os, double pct, bool defined) {
  if (!defined) {
    os << std::setw(10) << "undef";
  } else {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(1) << pct << "%";
    os << std::setw(10) << cell.str();
  }
}

}  // namespace

void render_tables(const EvaluationReport& report, std::ostream& os) {
  static const char* kLabels[3] = {"uncoop(-1)", "unresp(0)", "coop(+1)"};
  const ConfusionMatrix& m = report.confusion;

  os << "Table I. Joint trial counts (N=" << m.total()
     << "), requested x estimated cooperativeness\n";
  os << std::setw(14) << "requested\\est";
  for (const char* label : kLabels) os << std::setw(12) << label;
  os << std::setw(9) << "total" << "\n";
  for (int i = 0; i < 3; ++i) {
    os << std::setw(14) << kLabels[i];
    for (int j = 0; j < 3; ++j) {
      os << std::setw(12) << m.at(kXiValues[i], kXiValues[j]);
    }
    os << std::setw(9) << m.row_sum(kXiValues[i]) << "\n";
  }
  os << std::setw(14) << "total";
  for (int j = 0; j < 3; ++j) os << std::setw(12) << m.col_sum(kXiValues[j]);
  os << std::setw(9) << m.total() << "\n\n";

  os << "Table II. Estimated cooperativeness conditioned on requested "
        "(rows sum to 100%)\n";
  os << std::setw(14) << "requested";
  for (const char* label : kLabels) os << std::setw(12) << label;
  os << "\n";
  for (int i = 0; i < 3; ++i) {
    os << std::setw(14) << kLabels[i];
    for (int j = 0; j < 3; ++j) {
      os << "  ";
      render_pct_cell(os,
                      report.by_requested.pct[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(j)],
                      report.by_requested.defined[static_cast<std::size_t>(i)]);
    }
    os << "\n";
  }
  os << "\n";

  os << "Table III. Requested cooperativeness conditioned on estimated "
        "(columns sum to 100%)\n";
  os << std::setw(14) << "true\\judged";
  for (const char* label : kLabels) os << std::setw(12) << label;
  os << "\n";
  for (int i = 0; i < 3; ++i) {
    os << std::setw(14) << kLabels[i];
    for (int j = 0; j < 3; ++j) {
      os << "  ";
      render_pct_cell(os,
                      report.by_estimated.pct[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(j)],
                      report.by_estimated.defined[static_cast<std::size_t>(j)]);
    }
    os << "\n";
  }
  os << "\n";

  os << "Judged " << report.outcomes.size() << "/" << report.n_records
     << " trials";
  if (!report.exclusions.empty()) {
    os << " (" << report.exclusions.size() << " excluded)";
  }
  os << "\n";
  if (m.total() > 0) {
    os << std::fixed << std::setprecision(3)
       << "Overall accuracy: " << report.overall_accuracy << "\n";
    for (int i = 0; i < 3; ++i) {
      os << "  " << kLabels[i] << " correct rate: ";
      const double acc = report.per_class_accuracy[static_cast<std::size_t>(i)];
      if (std::isnan(acc)) {
        os << "undef (no trials)";
      } else {
        os << std::fixed << std::setprecision(3) << acc;
      }
      os << "\n";
    }
  }
  for (const Exclusion& excl : report.exclusions) {
    os << "  excluded " << excl.id << ": " << excl.reason << "\n";
  }
}

}  // namespace coop
