#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auxst/corpus.h"
#include "auxst/task.h"

namespace auxst {

enum class ConditionKind {
  MtlBaseline,
  AuxStCeiling,  // gold aux labels on the test inputs
  AuxSt,         // silver aux labels on the test inputs
  ExtraAux,      // extra held-back gold aux sentences
  ExtraMain,     // extra held-back gold main sentences
  FreqBin,       // aux task replaced by binned word frequency
};

// Config identifiers ("mtl", "aux_st_ceiling", ...) and report headers
// ("MTL", "Aux-ST ceiling", ...).
std::string_view condition_id(ConditionKind kind);
std::string_view condition_label(ConditionKind kind);
// Accepts identifiers and report headers.
ConditionKind parse_condition(std::string_view text);
std::span<const ConditionKind> all_conditions();

inline constexpr std::string_view kFreqBinTask = "freqbin";

struct ExperimentPlan {
  std::string corpus_id;
  TaskSpec main_task;
  Corpus main_pool;  // main-task training sentences before subsampling
  TaskSpec aux_task;
  Corpus aux_pool;
  Corpus test;       // main-task test sentences; may also carry gold aux labels
  std::vector<std::size_t> sizes{10000, 1000, 500, 100};
  std::vector<std::uint64_t> seeds{1};
  std::vector<ConditionKind> conditions;
  double freqbin_base = std::numbers::e;

  // Sentences added by Extra-Aux and Extra-Main.
  std::size_t extra_count() const { return test.size(); }
  bool ceiling_available() const;
  void validate() const;
};

// Uniform sample of n sentences without replacement, in original order.
Corpus subsample(const Corpus& corpus, std::size_t n, std::uint64_t seed);
// The sentences subsample() leaves out, in original order.
Corpus subsample_complement(const Corpus& corpus, std::size_t n, std::uint64_t seed);

// Adds FreqBin labels: floor(log_base(count)) of each token's frequency in
// `corpus` itself.
Corpus freqbin_labels(const Corpus& corpus, double base = std::numbers::e);

struct ConditionMaterials {
  Corpus main_train;
  Corpus aux_train;
  TaskSpec aux_task;
};

// Auxiliary training data shared by every condition of a (plan, seed): the
// aux pool minus the reserve that Extra-Aux draws from.
Corpus aux_training_pool(const ExperimentPlan& plan, std::uint64_t seed);

// `aux_train` followed by the sentences of `labelled`, carrying only
// their `aux_task` labels.
Corpus append_aux_sentences(const Corpus& aux_train, const Corpus& labelled,
                            std::string_view aux_task);

// `silver_aux_test` must be given exactly when kind == AuxSt.
ConditionMaterials build_condition(const ExperimentPlan& plan, ConditionKind kind,
                                   std::size_t size, std::uint64_t seed,
                                   const Corpus* silver_aux_test = nullptr);

}  // namespace auxst
