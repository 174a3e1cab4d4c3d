#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auxst/conditions.h"
#include "auxst/corpus.h"

namespace auxst {

struct TokenCounts {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

// Token accuracy of `task` labels in `pred` against `gold`. Both must hold
// the same sentences with the same token counts.
TokenCounts count_correct(const Corpus& pred, const Corpus& gold, std::string_view task);
double accuracy(const Corpus& pred, const Corpus& gold, std::string_view task);

// Unweighted mean over corpora.
double macro_average(std::span<const double> per_corpus);

// Absolute percentage points, 100 * (condition - baseline).
double delta_points(double condition_accuracy, double baseline_accuracy);

double round_half_up(double value, int decimals);
// Two decimals, half-up; "-0.00" is written as "0.00".
std::string format_fixed2(double value);

// Paired bootstrap over sentences, two-sided: p = 2 * (fraction of
// resamples whose accuracy difference is zero or of the opposite sign to
// the observed one), capped at 1. p = 1 when the observed difference is 0.
double significance(const Corpus& pred_a, const Corpus& pred_b, const Corpus& gold,
                    std::string_view task, std::size_t resamples = 10000,
                    std::uint64_t seed = 0);
// Multi-run form: each side's accuracy on a resample is its mean over runs
// (e.g. seeds), each run predicting the same test sentences.
double significance(std::span<const Corpus* const> runs_a,
                    std::span<const Corpus* const> runs_b, const Corpus& gold,
                    std::string_view task, std::size_t resamples = 10000,
                    std::uint64_t seed = 0);

inline constexpr double kSignificanceLevel = 0.05;

// Accuracies of one condition at one training size over the test corpora.
struct Metrics {
  std::vector<std::string> corpora;
  std::vector<double> accuracy;  // in [0, 1], aligned with `corpora`
  std::vector<double> p_value;   // against the baseline; empty for the baseline
};

struct DeltaCell {
  double delta = 0.0;  // points
  bool significant = false;
};

struct ReportRow {
  std::string key;        // group name for grouped reports, empty otherwise
  std::size_t size = 0;   // main-task training sentences
  double baseline = 0.0;  // macro-averaged accuracy, percent
  // Conditions in report order; std::nullopt renders as "n/a".
  std::vector<std::pair<ConditionKind, std::optional<DeltaCell>>> cells;
};

// Macro-averages every metric over corpora and reports each condition as
// a delta from the baseline. A delta is starred when the median
// per-corpus p-value is below 0.05 and the accuracies differ.
ReportRow delta_row(std::size_t size, const Metrics& baseline,
                    const std::vector<std::pair<ConditionKind, std::optional<Metrics>>>& conditions);

// "10k", "1k", "0.5k", "0.1k"; other sizes as plain integers unless a
// multiple of 100.
std::string size_label(std::size_t size);

// Tab-separated table: N Main, MTL, then one delta column per condition
// with a "*" suffix for significant deltas. Grouped rows add a leading
// Group column.
std::string format_report(std::span<const ReportRow> rows, bool grouped = false);

// `corpus<TAB>group` lines.
std::map<std::string, std::string> parse_group_map(std::string_view text);

}  // namespace auxst
