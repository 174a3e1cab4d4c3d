#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "auxst/corpus.h"
#include "auxst/graph.h"
#include "auxst/model.h"

namespace auxst {

struct TrainConfig {
  std::size_t max_epochs = 10;
  std::size_t batch_size = 16;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t patience = 2;
  double dev_fraction = 0.1;
  double clip_norm = 5.0;     // global L2 gradient norm; <= 0 disables
  double word_dropout = 0.0;  // probability of replacing a word embedding by unknown
  std::uint64_t seed = 1;
  ModelDims dims;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Adam moments per parameter tensor, keyed by tensor name.
struct AdamState {
  std::map<std::string, Tensor, std::less<>> first_moment;
  std::map<std::string, Tensor, std::less<>> second_moment;
  std::map<std::string, std::uint64_t, std::less<>> tensor_steps;
  std::uint64_t step = 0;
};

// Bias-corrected Adam update. Only tensors with an entry in `grads` move;
// the bias correction of each tensor uses the number of updates it has
// received. Throws NumericalError naming any non-finite gradient tensor.
void adam_step(ModelParams& params, const GradientMap& grads, AdamState& state,
               const TrainConfig& config);

// Rescales all gradients in place so their joint L2 norm is at most
// `max_norm`. Returns the norm before clipping.
double clip_gradients(GradientMap& grads, double max_norm);

struct TaskData {
  TaskSpec task;
  Corpus corpus;
};

struct EpochStats {
  std::size_t epoch = 0;
  std::map<std::string, double> mean_loss;  // per task, per training sentence
  double dev_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;        // 1-based
  std::map<std::string, std::size_t> task_steps;  // optimizer steps per task
};

struct TrainHooks {
  // Called after every optimizer step with the task trained and its gradients.
  std::function<void(const std::string& task, const GradientMap&, const ModelParams&)>
      on_step;
  std::ostream* log = nullptr;  // tab-separated per-epoch lines
};

// Holds out floor(dev_fraction * n) sentences, chosen by a seeded
// permutation, as dev data; both parts keep corpus order. Throws
// DataError if either part would be empty.
std::pair<Corpus, Corpus> train_dev_split(const Corpus& corpus, double dev_fraction,
                                          std::uint64_t seed);

double dev_accuracy(const ModelParams& params, const Corpus& dev, const std::string& task);

TrainResult train_single_task(const Corpus& corpus, const TaskSpec& task,
                              const Vocabulary& vocab, const TrainConfig& config,
                              const TrainHooks& hooks = {});

// Multi-task training with hard parameter sharing. Each step samples a task
// uniformly, then the next batch of that task's shuffled data. An epoch
// has (number of tasks) * max_t ceil(|train_t| / batch) steps, so every
// dataset is covered once in expectation. Early stopping on the dev
// accuracy of the main task (the first task with role Main, or the only
// task).
TrainResult train_mtl(const std::vector<TaskData>& datasets, const Vocabulary& vocab,
                      const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace auxst
