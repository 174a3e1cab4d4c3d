#include "support/trend.h"

namespace auxst::trend {

namespace {

constexpr std::uint64_t kLanguageSeed = 7;

TaskSpec task_of(const Corpus& c, const char* name, TaskRole role) {
  const Corpus* src[] = {&c};
  return TaskSpec(name, collect_tagset(src, name), role);
}

}  // namespace

synthetic::LanguageSpec language_spec() {
  synthetic::LanguageSpec spec;
  spec.classes = 10;
  spec.words_per_class = 20;
  spec.test_only_per_class = 6;
  spec.context_variants = 2;
  spec.test_only_rate = 0.3;
  return spec;
}

ExperimentConfig config() {
  ExperimentConfig c;
  c.main_task = synthetic::kMainTask;
  c.aux_task = synthetic::kAuxTask;
  c.train.dims = ModelDims{32, 16, 16, 32};
  c.train.learning_rate = 0.005;
  c.train.batch_size = 1;
  c.train.patience = 10;
  return c;
}

LoadedCorpus corpus(const synthetic::LanguageSpec& spec) {
  const auto lang = synthetic::make_language(spec, kLanguageSeed);
  Corpus main_pool =
      keep_task(synthetic::generate(lang, 3 * kMainSize, 11, false, "main"), synthetic::kMainTask);
  Corpus aux_pool = keep_task(synthetic::generate(lang, kAuxSize + kTestSize, 12, false, "aux"),
                              synthetic::kAuxTask);
  Corpus test = synthetic::generate(lang, kTestSize, 13, true, "test");
  TaskSpec main_task = task_of(main_pool, synthetic::kMainTask, TaskRole::Main);
  TaskSpec aux_task = task_of(aux_pool, synthetic::kAuxTask, TaskRole::Auxiliary);
  ExperimentPlan plan{"synthetic",
                      std::move(main_task),
                      std::move(main_pool),
                      std::move(aux_task),
                      std::move(aux_pool),
                      std::move(test),
                      {kMainSize},
                      {1, 2, 3, 4, 5},
                      {ConditionKind::MtlBaseline, ConditionKind::AuxStCeiling,
                       ConditionKind::AuxSt, ConditionKind::FreqBin},
                      std::numbers::e};
  plan.validate();
  return LoadedCorpus{std::move(plan), "", {}, {}};
}

std::set<std::string> test_only_words(const synthetic::LanguageSpec& spec) {
  const auto lang = synthetic::make_language(spec, kLanguageSeed);
  std::set<std::string> out;
  for (const auto& words : lang.words) {
    for (std::size_t w = spec.words_per_class - spec.test_only_per_class; w < words.size(); ++w) {
      out.insert(words[w]);
    }
  }
  return out;
}

}  // namespace auxst::trend
