#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "auxst/conditions.h"
#include "auxst/trainer.h"

namespace auxst {

enum class CorpusFormat { Conllu, TaggedTsv };

struct CorpusSource {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::TaggedTsv;
};

struct CorpusEntry {
  std::string id;
  std::string group;  // optional
  CorpusSource main;
  CorpusSource aux;
  CorpusSource test;
};

// Experiment configuration. Flat `key = value` lines, `#` comments, list
// values comma-separated. Global keys come first; each `[corpus <id>]`
// section then names one main/aux/test corpus triple. A config with a
// single corpus may put the corpus keys at top level instead.
//
// Global keys:
//   main_task, aux_task           task names ("pos"/"deprel" for CoNLL-U)
//   sizes, seeds, conditions      lists
//   word_dim, char_dim, char_hidden, word_hidden
//   max_epochs, batch_size, learning_rate, beta1, beta2, adam_epsilon,
//   patience, dev_fraction, clip_norm, word_dropout
//   min_count, freqbin_base, bootstrap_resamples, bootstrap_seed,
//   parallelism, run_root, report_dir, group_map
// Corpus keys:
//   main_corpus, aux_corpus, test_corpus    paths, relative to the config
//   main_format, aux_format, test_format    conllu | tsv (default from extension)
//   group
struct ExperimentConfig {
  std::string main_task;
  std::string aux_task;
  std::vector<std::size_t> sizes{10000, 1000, 500, 100};
  std::vector<std::uint64_t> seeds{1};
  std::vector<ConditionKind> conditions{ConditionKind::MtlBaseline};
  TrainConfig train;
  std::size_t min_count = 1;
  double freqbin_base = std::numbers::e;
  std::size_t bootstrap_resamples = 10000;
  std::uint64_t bootstrap_seed = 0;
  std::size_t parallelism = 1;
  std::filesystem::path run_root;    // default <config dir>/runs
  std::filesystem::path report_dir;  // default <config dir>
  std::filesystem::path group_map;   // optional
  std::vector<CorpusEntry> corpora;

  std::string source_text;  // verbatim config, for manifests
};

// Throws ConfigError naming the offending key or line.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Name of the environment variable that overrides run_root.
inline constexpr const char* kRunRootEnv = "AUXST_RUN_ROOT";

}  // namespace auxst
