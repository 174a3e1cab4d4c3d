#include "auxst/self_training.h"

#include "auxst/errors.h"
#include "auxst/random.h"

namespace auxst {

SilverCorpus self_label(const Labeler& labeler, std::string model_id,
                        const Corpus& test_inputs, const TaskSpec& task) {
  SilverCorpus silver{Corpus(test_inputs.id()), task.name(), std::move(model_id)};
  const Corpus inputs = strip_labels(test_inputs);
  for (const auto& s : inputs.sentences()) {
    Sentence labelled = s;
    auto labels = labeler(s.tokens);
    if (labels.size() != s.tokens.size()) {
      throw std::logic_error("labeler returned " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(s.tokens.size()) + " tokens");
    }
    labelled.labels.emplace(task.name(), std::move(labels));
    silver.corpus.add(std::move(labelled));
  }
  return silver;
}

SilverCorpus self_label(const ModelParams& model_aux, const Corpus& test_inputs,
                        const TaskSpec& task) {
  model_aux.task(task.name());
  const Labeler labeler = [&](std::span<const std::string> tokens) {
    return predict_labels(model_aux, tokens, task.name());
  };
  return self_label(labeler, fnv1a_hex(model_aux.serialize()), test_inputs, task);
}

Vocabulary condition_vocabulary(const Corpus& main_train, const Corpus& aux_train,
                                const Corpus& test_inputs, std::size_t min_count) {
  const Corpus* sources[] = {&main_train, &aux_train, &test_inputs};
  return build_vocab(sources, min_count);
}

TrainResult train_condition_model(const Corpus& main_train, const TaskSpec& main_task,
                                  const Corpus& aux_train, const TaskSpec& aux_task,
                                  const Corpus& test_inputs, const RunSettings& settings) {
  const Vocabulary vocab =
      condition_vocabulary(main_train, aux_train, strip_labels(test_inputs), settings.min_count);
  TrainConfig config = settings.train;
  config.seed = settings.mtl_seed();
  const TaskSpec main_spec(main_task.name(), main_task.tagset(), TaskRole::Main);
  const TaskSpec aux_spec(aux_task.name(), aux_task.tagset(), TaskRole::Auxiliary);
  TrainHooks hooks;
  hooks.log = settings.mtl_log;
  return train_mtl({TaskData{main_spec, main_train}, TaskData{aux_spec, aux_train}}, vocab,
                   config, hooks);
}

SelfTrainingResult transductive_aux_self_train(const Corpus& train_aux,
                                               const Corpus& train_main,
                                               const Corpus& testinp_main,
                                               const TaskSpec& aux_task,
                                               const TaskSpec& main_task,
                                               const RunSettings& settings,
                                               const AuxLabelerFactory& aux_labeler) {
  // Gold labels of the test set, for either task, never enter this path.
  const Corpus test_inputs = strip_labels(testinp_main);

  std::optional<TrainResult> aux_model;
  SilverCorpus silver;
  if (aux_labeler) {
    silver = self_label(aux_labeler(train_aux, aux_task), "injected", test_inputs, aux_task);
  } else {
    const Vocabulary vocab =
        condition_vocabulary(train_main, train_aux, test_inputs, settings.min_count);
    TrainConfig config = settings.train;
    config.seed = settings.aux_seed();
    TrainHooks hooks;
    hooks.log = settings.aux_log;
    const TaskSpec aux_single(aux_task.name(), aux_task.tagset(), TaskRole::Main);
    aux_model = train_single_task(train_aux, aux_single, vocab, config, hooks);
    silver = self_label(aux_model->params, test_inputs, aux_task);
  }

  Corpus augmented = append_aux_sentences(train_aux, silver.corpus, aux_task.name());
  TrainResult mtl =
      train_condition_model(train_main, main_task, augmented, aux_task, test_inputs, settings);
  return {std::move(aux_model), std::move(silver), std::move(augmented), std::move(mtl)};
}

}  // namespace auxst
