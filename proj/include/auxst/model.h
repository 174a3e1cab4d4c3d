#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auxst/corpus.h"
#include "auxst/graph.h"
#include "auxst/task.h"

namespace auxst {

struct ModelDims {
  std::size_t word_dim = 64;
  std::size_t char_dim = 32;
  std::size_t char_hidden = 32;  // per direction
  std::size_t word_hidden = 100; // per direction

  std::size_t word_repr_dim() const { return word_dim + 2 * char_hidden; }
  std::size_t context_dim() const { return 2 * word_hidden; }
  bool operator==(const ModelDims&) const = default;
};

// Parameters of the hierarchical bi-LSTM tagger: character bi-LSTM per
// word, word-level bi-LSTM over the sentence, and one softmax head per
// task. Everything except the heads is shared by all tasks.
//
// Tensor names:
//   embed.word [|V_w| x d_w], embed.char [|V_c| x d_c]
//   {char,word}.{fwd,bwd}.{W,U,b}_{i,f,o,g}   LSTM gates
//   head.<task>.W [|L| x 2 h_w], head.<task>.b [|L|]
class ModelParams {
 public:
  // Uniform [-0.1, 0.1] weights from `seed`, zero biases, forget-gate bias 1.
  ModelParams(ModelDims dims, Vocabulary vocab, std::vector<TaskSpec> tasks,
              std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const TaskSpec* find_task(std::string_view name) const;
  // Throws std::invalid_argument listing the registered tasks.
  const TaskSpec& task(std::string_view name) const;

  // Registers a new head, initialised from `seed`. Shared tensors untouched.
  void add_task(TaskSpec task, std::uint64_t seed);

  Tensor& tensor(std::string_view name);
  const Tensor& tensor(std::string_view name) const;
  std::map<std::string, Tensor, std::less<>>& tensors() { return tensors_; }
  const std::map<std::string, Tensor, std::less<>>& tensors() const { return tensors_; }
  std::size_t parameter_count() const;
  void fill(double value);

  bool operator==(const ModelParams& other) const {
    return dims_ == other.dims_ && vocab_ == other.vocab_ && tasks_ == other.tasks_ &&
           tensors_ == other.tensors_;
  }

  // Versioned text format; doubles written with 17 significant digits so
  // a round trip is value-exact.
  std::string serialize() const;
  static ModelParams deserialize(std::string_view text);

 private:
  ModelParams() = default;
  void init_head(const TaskSpec& task, std::uint64_t seed);

  ModelDims dims_;
  Vocabulary vocab_;
  std::vector<TaskSpec> tasks_;
  std::map<std::string, Tensor, std::less<>> tensors_;
};

std::string head_weight_name(std::string_view task);
std::string head_bias_name(std::string_view task);

// Graph-building forms, used by training.

NodeRef encode_word(Graph& graph, const ModelParams& params, std::string_view word,
                    bool drop_word = false);
// `dropped`, when non-empty, marks tokens whose word embedding is replaced
// by the unknown row.
std::vector<NodeRef> encode_sentence(Graph& graph, const ModelParams& params,
                                     std::span<const std::string> tokens,
                                     std::span<const std::uint8_t> dropped = {});
std::vector<NodeRef> task_logits(Graph& graph, const ModelParams& params,
                                 std::span<const NodeRef> contexts,
                                 const TaskSpec& task);
// Sum of per-token softmax cross-entropy.
NodeRef sentence_loss(Graph& graph, const ModelParams& params,
                      std::span<const std::string> tokens,
                      std::span<const std::string> gold, std::string_view task,
                      std::span<const std::uint8_t> dropped = {});

// Evaluation forms.

Tensor encode_word(const ModelParams& params, std::string_view word);
std::vector<Tensor> encode_sentence(const ModelParams& params,
                                    std::span<const std::string> tokens);

struct TokenPrediction {
  std::size_t index = 0;
  std::string label;
  std::vector<double> distribution;
};

// Argmax ties resolve to the lowest tag index.
std::vector<TokenPrediction> predict(const ModelParams& params,
                                     std::span<const std::string> tokens,
                                     std::string_view task);
std::vector<std::string> predict_labels(const ModelParams& params,
                                        std::span<const std::string> tokens,
                                        std::string_view task);
double sentence_loss(const ModelParams& params, std::span<const std::string> tokens,
                     std::span<const std::string> gold, std::string_view task);

// Labels every sentence of `corpus` for `task` (other label sequences kept).
Corpus tag_corpus(const ModelParams& params, const Corpus& corpus, std::string_view task);

}  // namespace auxst
