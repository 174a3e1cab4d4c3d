#include "auxst/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "auxst/errors.h"
#include "auxst/random.h"

namespace auxst {

namespace {

void require_aligned(const Corpus& a, const Corpus& b, std::string_view what) {
  if (a.size() != b.size()) {
    throw DataError(std::string(what) + ": " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + " sentences");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tokens.size() != b[i].tokens.size()) {
      throw DataError(std::string(what) + ": sentence " + std::to_string(i) +
                      " has " + std::to_string(a[i].tokens.size()) + " vs " +
                      std::to_string(b[i].tokens.size()) + " tokens");
    }
  }
}

const std::vector<std::string>& labels_of(const Sentence& s, std::string_view task) {
  const auto* seq = s.labels_for(task);
  if (!seq) throw DataError("sentence lacks '" + std::string(task) + "' labels");
  return *seq;
}

std::vector<std::size_t> correct_per_sentence(const Corpus& pred, const Corpus& gold,
                                              std::string_view task) {
  std::vector<std::size_t> out(gold.size(), 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& p = labels_of(pred[i], task);
    const auto& g = labels_of(gold[i], task);
    for (std::size_t k = 0; k < g.size(); ++k) out[i] += p[k] == g[k];
  }
  return out;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

TokenCounts count_correct(const Corpus& pred, const Corpus& gold, std::string_view task) {
  require_aligned(pred, gold, "accuracy");
  TokenCounts counts;
  const auto per_sentence = correct_per_sentence(pred, gold, task);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    counts.correct += per_sentence[i];
    counts.total += gold[i].tokens.size();
  }
  return counts;
}

double accuracy(const Corpus& pred, const Corpus& gold, std::string_view task) {
  return count_correct(pred, gold, task).accuracy();
}

double macro_average(std::span<const double> per_corpus) {
  if (per_corpus.empty()) throw std::invalid_argument("macro_average: empty list");
  double total = 0.0;
  for (double v : per_corpus) total += v;
  return total / static_cast<double>(per_corpus.size());
}

double delta_points(double condition_accuracy, double baseline_accuracy) {
  return 100.0 * (condition_accuracy - baseline_accuracy);
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  // Absorb representation error so 9.5549999999 style values from exact
  // decimal inputs round as their decimal form would.
  const double nudged = scaled + (scaled >= 0 ? 1e-9 : -1e-9);
  const double rounded = scaled >= 0 ? std::floor(nudged + 0.5) : -std::floor(-nudged + 0.5);
  return rounded / scale;
}

std::string format_fixed2(double value) {
  double r = round_half_up(value, 2);
  if (r == 0.0) r = 0.0;  // drops the sign of -0.0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

double significance(const Corpus& pred_a, const Corpus& pred_b, const Corpus& gold,
                    std::string_view task, std::size_t resamples, std::uint64_t seed) {
  const Corpus* a[] = {&pred_a};
  const Corpus* b[] = {&pred_b};
  return significance(a, b, gold, task, resamples, seed);
}

double significance(std::span<const Corpus* const> runs_a,
                    std::span<const Corpus* const> runs_b, const Corpus& gold,
                    std::string_view task, std::size_t resamples, std::uint64_t seed) {
  if (runs_a.empty() || runs_b.empty()) {
    throw std::invalid_argument("significance: no prediction runs");
  }
  if (resamples == 0) throw std::invalid_argument("significance: zero resamples");
  const std::size_t n = gold.size();
  // Per sentence: mean correct count of a minus that of b.
  std::vector<double> diff(n, 0.0);
  std::vector<double> tokens(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tokens[i] = static_cast<double>(gold[i].tokens.size());
  auto accumulate = [&](std::span<const Corpus* const> runs, double sign) {
    for (const Corpus* run : runs) {
      require_aligned(*run, gold, "significance");
      const auto correct = correct_per_sentence(*run, gold, task);
      for (std::size_t i = 0; i < n; ++i) {
        diff[i] += sign * static_cast<double>(correct[i]) / static_cast<double>(runs.size());
      }
    }
  };
  accumulate(runs_a, 1.0);
  accumulate(runs_b, -1.0);

  double observed = 0.0;
  for (double d : diff) observed += d;
  // Compare in whole-token units to avoid spurious sign flips from rounding.
  const double tolerance = 1e-9;
  if (n == 0 || std::abs(observed) <= tolerance) return 1.0;

  Rng rng(seed);
  std::size_t against = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += diff[uniform_index(rng, n)];
    const bool opposite_or_zero = observed > 0 ? total <= tolerance : total >= -tolerance;
    against += opposite_or_zero;
  }
  const double p = 2.0 * static_cast<double>(against) / static_cast<double>(resamples);
  return std::min(1.0, p);
}

ReportRow delta_row(std::size_t size, const Metrics& baseline,
                    const std::vector<std::pair<ConditionKind, std::optional<Metrics>>>& conditions) {
  if (baseline.accuracy.size() != baseline.corpora.size()) {
    throw std::invalid_argument("delta_row: baseline metrics are misaligned");
  }
  ReportRow row;
  row.size = size;
  const double base = macro_average(baseline.accuracy);
  row.baseline = 100.0 * base;
  for (const auto& [kind, metrics] : conditions) {
    if (!metrics) {
      row.cells.emplace_back(kind, std::nullopt);
      continue;
    }
    if (metrics->corpora != baseline.corpora) {
      throw DataError("delta report: condition '" + std::string(condition_id(kind)) +
                      "' was evaluated on different test corpora than the baseline");
    }
    const double acc = macro_average(metrics->accuracy);
    DeltaCell cell;
    cell.delta = delta_points(acc, base);
    cell.significant = !metrics->p_value.empty() && acc != base &&
                       median(metrics->p_value) < kSignificanceLevel;
    row.cells.emplace_back(kind, cell);
  }
  return row;
}

std::string size_label(std::size_t size) {
  if (size % 1000 == 0) return std::to_string(size / 1000) + "k";
  if (size % 100 == 0 && size < 1000) return "0." + std::to_string(size / 100) + "k";
  if (size % 100 == 0) {
    return std::to_string(size / 1000) + "." + std::to_string((size % 1000) / 100) + "k";
  }
  return std::to_string(size);
}

std::string format_report(std::span<const ReportRow> rows, bool grouped) {
  std::string out;
  if (grouped) out += "Group\t";
  out += "N Main\tMTL";
  if (!rows.empty()) {
    for (const auto& [kind, cell] : rows.front().cells) {
      out += "\t";
      out += condition_label(kind);
    }
  }
  out += "\n";
  for (const auto& row : rows) {
    if (grouped) out += row.key + "\t";
    out += size_label(row.size) + "\t" + format_fixed2(row.baseline);
    for (const auto& [kind, cell] : row.cells) {
      out += "\t";
      if (!cell) {
        out += "n/a";
        continue;
      }
      out += format_fixed2(cell->delta);
      if (cell->significant) out += "*";
    }
    out += "\n";
  }
  return out;
}

std::map<std::string, std::string> parse_group_map(std::string_view text) {
  std::map<std::string, std::string> groups;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError("group map line " + std::to_string(line_no) +
                      ": expected corpus<TAB>group");
    }
    groups[std::string(line.substr(0, tab))] = std::string(line.substr(tab + 1));
  }
  return groups;
}

}  // namespace auxst
