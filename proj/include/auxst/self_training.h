#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "auxst/conditions.h"
#include "auxst/corpus.h"
#include "auxst/model.h"
#include "auxst/trainer.h"

namespace auxst {

// Test inputs labelled by a model for the auxiliary task only.
struct SilverCorpus {
  Corpus corpus;
  std::string task;
  std::string model_id;  // checksum of the producing model
};

using Labeler = std::function<std::vector<std::string>(std::span<const std::string> tokens)>;

// Labels every sentence of `test_inputs` (all kept, no confidence filter).
// Any labels already on the inputs are discarded first.
SilverCorpus self_label(const Labeler& labeler, std::string model_id,
                        const Corpus& test_inputs, const TaskSpec& task);
SilverCorpus self_label(const ModelParams& model_aux, const Corpus& test_inputs,
                        const TaskSpec& task);

// Shared vocabulary policy: every token of the training corpora plus the
// test inputs, which are observable in the transductive setting.
Vocabulary condition_vocabulary(const Corpus& main_train, const Corpus& aux_train,
                                const Corpus& test_inputs, std::size_t min_count);

struct RunSettings {
  TrainConfig train;   // train.seed is the run seed
  std::size_t min_count = 1;
  std::ostream* aux_log = nullptr;
  std::ostream* mtl_log = nullptr;

  std::uint64_t aux_seed() const { return train.seed; }
  std::uint64_t mtl_seed() const { return train.seed + 1; }
};

// The final multi-task model of any condition: datasets ordered (main,
// aux), seeded with the run seed + 1.
TrainResult train_condition_model(const Corpus& main_train, const TaskSpec& main_task,
                                  const Corpus& aux_train, const TaskSpec& aux_task,
                                  const Corpus& test_inputs, const RunSettings& settings);

struct SelfTrainingResult {
  std::optional<TrainResult> aux_model;  // absent when a labeler was injected
  SilverCorpus silver;
  Corpus augmented_aux;
  TrainResult mtl;
};

// Replaces the trained single-task aux model, e.g. with an oracle stub.
using AuxLabelerFactory =
    std::function<Labeler(const Corpus& train_aux, const TaskSpec& aux_task)>;

// Transductive auxiliary-task self-training: train a single-task aux model
// on `train_aux`, label the main-task test inputs with it, append those
// silver sentences to the aux data, and train the multi-task model on the
// augmented aux data plus `train_main`. Only the tokens of `testinp_main`
// are read.
SelfTrainingResult transductive_aux_self_train(const Corpus& train_aux,
                                               const Corpus& train_main,
                                               const Corpus& testinp_main,
                                               const TaskSpec& aux_task,
                                               const TaskSpec& main_task,
                                               const RunSettings& settings,
                                               const AuxLabelerFactory& aux_labeler = {});

}  // namespace auxst
