#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "auxst/conditions.h"
#include "auxst/config.h"
#include "auxst/evaluation.h"

namespace auxst {

std::string_view tool_version();

struct CellKey {
  std::string corpus;
  ConditionKind condition = ConditionKind::MtlBaseline;
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

struct CellOutcome {
  CellKey key;
  Corpus predictions;  // main-task labels on the test inputs
  TokenCounts counts;
  std::size_t best_epoch = 0;
  std::filesystem::path run_dir;
};

struct LoadedCorpus {
  ExperimentPlan plan;
  std::string group;
  std::vector<std::pair<std::string, std::string>> checksums;  // role -> fnv1a64
  std::vector<std::pair<std::string, std::string>> paths;      // role -> path
};

// Reads one corpus triple and derives its plan from the config.
LoadedCorpus load_corpus(const ExperimentConfig& config, const CorpusEntry& entry);

// Trains and evaluates one (corpus, condition, size, seed) cell, writing
// manifest, logs, models, silver data and metrics to `run_dir`.
CellOutcome run_cell(const ExperimentConfig& config, const LoadedCorpus& corpus,
                     const CellKey& key, const std::filesystem::path& run_dir);

struct ExperimentOutcome {
  std::vector<CellOutcome> cells;
  std::vector<ReportRow> rows;
  std::vector<ReportRow> grouped_rows;
  std::filesystem::path report_path;
  std::optional<std::filesystem::path> grouped_report_path;
};

// Runs every (corpus x condition x size x seed) cell, `config.parallelism`
// at a time, then writes report.tsv (and grouped_report.tsv when groups
// are known), cells.tsv and significance.tsv to the report directory.
// Outputs do not depend on scheduling order.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 std::ostream* progress = nullptr);

// <root>/<corpus>/<condition>/<size>/<seed>
std::filesystem::path cell_directory(const std::filesystem::path& run_root, const CellKey& key);
// AUXST_RUN_ROOT if set, else the config's run_root.
std::filesystem::path resolve_run_root(const ExperimentConfig& config);

}  // namespace auxst
