#include "auxst/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "auxst/errors.h"
#include "auxst/random.h"
#include "auxst/self_training.h"

namespace auxst {

namespace {

Corpus load_source(const CorpusSource& src, const std::string& task, const std::string& id,
                   std::string& checksum) {
  const std::string text = read_text_file(src.path);
  checksum = fnv1a_hex(text);
  if (src.format == CorpusFormat::Conllu) {
    if (task != kPosTask && task != kDeprelTask) {
      throw ConfigError("task '" + task + "' cannot be read from CoNLL-U file " +
                        src.path.string() + " (only pos and deprel)");
    }
    return parse_conllu(text, id);
  }
  return parse_tagged_tsv(text, task, id);
}

std::vector<ConditionKind> canonical_conditions(const std::vector<ConditionKind>& requested) {
  std::vector<ConditionKind> out;
  for (ConditionKind kind : all_conditions()) {
    if (std::find(requested.begin(), requested.end(), kind) != requested.end()) {
      out.push_back(kind);
    }
  }
  return out;
}

std::string format_accuracy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_p(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string_view tool_version() { return "auxst 1.0.0"; }

std::filesystem::path resolve_run_root(const ExperimentConfig& config) {
  if (const char* env = std::getenv(kRunRootEnv); env && *env) return env;
  return config.run_root;
}

std::filesystem::path cell_directory(const std::filesystem::path& run_root, const CellKey& key) {
  return run_root / key.corpus / std::string(condition_id(key.condition)) /
         std::to_string(key.size) / std::to_string(key.seed);
}

LoadedCorpus load_corpus(const ExperimentConfig& config, const CorpusEntry& entry) {
  std::string main_sum, aux_sum, test_sum;
  Corpus main_pool = load_source(entry.main, config.main_task, entry.id + "/main", main_sum);
  Corpus aux_pool = load_source(entry.aux, config.aux_task, entry.id + "/aux", aux_sum);
  Corpus test = load_source(entry.test, config.main_task, entry.id + "/test", test_sum);
  if (!test.fully_labelled(config.main_task)) {
    throw DataError("test corpus " + entry.test.path.string() + " lacks '" + config.main_task +
                    "' labels");
  }
  const Corpus* main_src[] = {&main_pool};
  const Corpus* aux_src[] = {&aux_pool};
  TaskSpec main_task(config.main_task, collect_tagset(main_src, config.main_task),
                     TaskRole::Main);
  TaskSpec aux_task(config.aux_task, collect_tagset(aux_src, config.aux_task),
                    TaskRole::Auxiliary);
  ExperimentPlan plan{entry.id,
                      std::move(main_task),
                      keep_task(main_pool, config.main_task),
                      std::move(aux_task),
                      keep_task(aux_pool, config.aux_task),
                      std::move(test),
                      config.sizes,
                      config.seeds,
                      canonical_conditions(config.conditions),
                      config.freqbin_base};
  plan.validate();
  return LoadedCorpus{std::move(plan),
                      entry.group,
                      {{"main", main_sum}, {"aux", aux_sum}, {"test", test_sum}},
                      {{"main", entry.main.path.string()},
                       {"aux", entry.aux.path.string()},
                       {"test", entry.test.path.string()}}};
}

CellOutcome run_cell(const ExperimentConfig& config, const LoadedCorpus& corpus,
                     const CellKey& key, const std::filesystem::path& run_dir) {
  const ExperimentPlan& plan = corpus.plan;
  std::filesystem::create_directories(run_dir);
  const Corpus test_inputs = strip_labels(plan.test);

  std::ostringstream mtl_log, aux_log;
  RunSettings settings;
  settings.train = config.train;
  settings.train.seed = key.seed;
  settings.min_count = config.min_count;
  settings.mtl_log = &mtl_log;
  settings.aux_log = &aux_log;

  nlohmann::ordered_json artifacts;
  std::optional<TrainResult> trained;
  if (key.condition == ConditionKind::AuxSt) {
    const ConditionMaterials base =
        build_condition(plan, ConditionKind::MtlBaseline, key.size, key.seed);
    SelfTrainingResult st = transductive_aux_self_train(
        base.aux_train, base.main_train, test_inputs, plan.aux_task, plan.main_task, settings);
    write_text_file(run_dir / "aux_model.txt", st.aux_model->params.serialize());
    write_text_file(run_dir / "aux_train.log", aux_log.str());
    write_text_file(run_dir / "silver.tsv", write_tagged_tsv(st.silver.corpus, st.silver.task));
    artifacts["aux_model"] = "aux_model.txt";
    artifacts["aux_train_log"] = "aux_train.log";
    artifacts["silver_corpus"] = "silver.tsv";
    artifacts["silver_model_id"] = st.silver.model_id;
    trained = std::move(st.mtl);
  } else {
    const ConditionMaterials m = build_condition(plan, key.condition, key.size, key.seed);
    trained = train_condition_model(m.main_train, plan.main_task, m.aux_train, m.aux_task,
                                    test_inputs, settings);
  }

  const std::string& main = plan.main_task.name();
  CellOutcome out;
  out.key = key;
  out.run_dir = run_dir;
  out.best_epoch = trained->best_epoch;
  out.predictions = keep_task(tag_corpus(trained->params, test_inputs, main), main);
  out.counts = count_correct(out.predictions, plan.test, main);

  write_text_file(run_dir / "model.txt", trained->params.serialize());
  write_text_file(run_dir / "train.log", mtl_log.str());
  write_text_file(run_dir / "predictions.tsv", write_tagged_tsv(out.predictions, main));
  artifacts["model"] = "model.txt";
  artifacts["train_log"] = "train.log";
  artifacts["predictions"] = "predictions.tsv";
  artifacts["metrics"] = "metrics.json";

  nlohmann::ordered_json metrics;
  metrics["accuracy"] = out.counts.accuracy();
  metrics["correct"] = out.counts.correct;
  metrics["tokens"] = out.counts.total;
  metrics["best_epoch"] = out.best_epoch;
  write_text_file(run_dir / "metrics.json", metrics.dump(2) + "\n");

  nlohmann::ordered_json manifest;
  manifest["tool"] = tool_version();
  manifest["corpus"] = key.corpus;
  manifest["condition"] = condition_id(key.condition);
  manifest["size"] = key.size;
  manifest["seeds"] = {{"run", key.seed},
                       {"aux_model", settings.aux_seed()},
                       {"mtl", settings.mtl_seed()}};
  for (std::size_t i = 0; i < corpus.paths.size(); ++i) {
    manifest["inputs"][corpus.paths[i].first] = {{"path", corpus.paths[i].second},
                                                 {"fnv1a64", corpus.checksums[i].second}};
  }
  manifest["artifacts"] = artifacts;
  manifest["config"] = config.source_text;
  write_text_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream* progress) {
  std::vector<LoadedCorpus> corpora;
  for (const auto& entry : config.corpora) corpora.push_back(load_corpus(config, entry));

  std::map<std::string, std::string> groups;
  if (!config.group_map.empty()) groups = parse_group_map(read_text_file(config.group_map));
  for (const auto& c : corpora) {
    if (!c.group.empty()) groups[c.plan.corpus_id] = c.group;
  }

  const auto conditions = canonical_conditions(config.conditions);
  struct Job {
    std::size_t corpus;
    CellKey key;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < corpora.size(); ++ci) {
    const ExperimentPlan& plan = corpora[ci].plan;
    for (std::size_t size : config.sizes) {
      for (ConditionKind kind : conditions) {
        if (kind == ConditionKind::AuxStCeiling && !plan.ceiling_available()) continue;
        for (std::uint64_t seed : config.seeds) {
          jobs.push_back({ci, CellKey{plan.corpus_id, kind, size, seed}});
        }
      }
    }
  }

  const std::filesystem::path run_root = resolve_run_root(config);
  std::vector<std::optional<CellOutcome>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const Job& job = jobs[i];
        results[i] = run_cell(config, corpora[job.corpus], job.key,
                              cell_directory(run_root, job.key));
        std::lock_guard lock(mu);
        const std::size_t finished = ++done;
        if (progress) {
          *progress << "[" << finished << "/" << jobs.size() << "] " << job.key.corpus << " "
                    << condition_id(job.key.condition) << " " << job.key.size << " seed "
                    << job.key.seed << " accuracy " << format_accuracy(results[i]->counts.accuracy())
                    << "\n";
          progress->flush();
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t n_threads = std::min(config.parallelism, std::max<std::size_t>(1, jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutcome outcome;
  for (auto& r : results) outcome.cells.push_back(std::move(*r));

  // (corpus, condition, size) -> runs over seeds
  std::map<std::tuple<std::string, ConditionKind, std::size_t>, std::vector<const CellOutcome*>>
      runs;
  for (const auto& cell : outcome.cells) {
    runs[{cell.key.corpus, cell.key.condition, cell.key.size}].push_back(&cell);
  }
  auto seed_mean = [](const std::vector<const CellOutcome*>& cells) {
    double total = 0.0;
    for (const auto* c : cells) total += c->counts.accuracy();
    return total / static_cast<double>(cells.size());
  };
  auto predictions = [](const std::vector<const CellOutcome*>& cells) {
    std::vector<const Corpus*> out;
    for (const auto* c : cells) out.push_back(&c->predictions);
    return out;
  };

  std::string significance_tsv = "corpus\tsize\tcondition\taccuracy\tbaseline\tdelta\tp_value\n";
  // Per size and corpus subset, the baseline and condition metrics.
  auto metrics_for = [&](std::size_t size, const std::vector<std::size_t>& members,
                         bool record) {
    Metrics base;
    std::vector<std::pair<ConditionKind, std::optional<Metrics>>> rest;
    for (std::size_t ci : members) {
      const auto& id = corpora[ci].plan.corpus_id;
      base.corpora.push_back(id);
      base.accuracy.push_back(seed_mean(runs.at({id, ConditionKind::MtlBaseline, size})));
    }
    for (ConditionKind kind : conditions) {
      if (kind == ConditionKind::MtlBaseline) continue;
      Metrics m;
      bool available = true;
      for (std::size_t ci : members) {
        const ExperimentPlan& plan = corpora[ci].plan;
        auto it = runs.find({plan.corpus_id, kind, size});
        if (it == runs.end()) {
          available = false;
          break;
        }
        const auto& base_runs = runs.at({plan.corpus_id, ConditionKind::MtlBaseline, size});
        const auto a = predictions(it->second);
        const auto b = predictions(base_runs);
        const double p = significance(a, b, plan.test, plan.main_task.name(),
                                      config.bootstrap_resamples, config.bootstrap_seed);
        const double acc = seed_mean(it->second);
        m.corpora.push_back(plan.corpus_id);
        m.accuracy.push_back(acc);
        m.p_value.push_back(p);
        if (record) {
          const double base_acc = seed_mean(base_runs);
          significance_tsv += plan.corpus_id + "\t" + std::to_string(size) + "\t" +
                              std::string(condition_id(kind)) + "\t" + format_accuracy(acc) +
                              "\t" + format_accuracy(base_acc) + "\t" +
                              format_fixed2(delta_points(acc, base_acc)) + "\t" + format_p(p) +
                              "\n";
        }
      }
      rest.emplace_back(kind, available ? std::optional<Metrics>(std::move(m)) : std::nullopt);
    }
    return std::pair{std::move(base), std::move(rest)};
  };

  std::vector<std::size_t> everyone(corpora.size());
  for (std::size_t i = 0; i < corpora.size(); ++i) everyone[i] = i;
  for (std::size_t size : config.sizes) {
    auto [base, rest] = metrics_for(size, everyone, true);
    outcome.rows.push_back(delta_row(size, base, rest));
  }

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    auto it = groups.find(corpora[i].plan.corpus_id);
    if (it != groups.end()) members[it->second].push_back(i);
  }
  for (const auto& [group, idx] : members) {
    for (std::size_t size : config.sizes) {
      auto [base, rest] = metrics_for(size, idx, false);
      ReportRow row = delta_row(size, base, rest);
      row.key = group;
      outcome.grouped_rows.push_back(std::move(row));
    }
  }

  std::string cells_tsv = "corpus\tgroup\tcondition\tsize\tseed\tcorrect\ttokens\taccuracy\tbest_epoch\n";
  for (const auto& c : outcome.cells) {
    auto g = groups.find(c.key.corpus);
    cells_tsv += c.key.corpus + "\t" + (g == groups.end() ? "" : g->second) + "\t" +
                 std::string(condition_id(c.key.condition)) + "\t" + std::to_string(c.key.size) +
                 "\t" + std::to_string(c.key.seed) + "\t" + std::to_string(c.counts.correct) +
                 "\t" + std::to_string(c.counts.total) + "\t" +
                 format_accuracy(c.counts.accuracy()) + "\t" + std::to_string(c.best_epoch) +
                 "\n";
  }

  outcome.report_path = config.report_dir / "report.tsv";
  write_text_file(outcome.report_path, format_report(outcome.rows));
  write_text_file(config.report_dir / "cells.tsv", cells_tsv);
  write_text_file(config.report_dir / "significance.tsv", significance_tsv);
  if (!outcome.grouped_rows.empty()) {
    outcome.grouped_report_path = config.report_dir / "grouped_report.tsv";
    write_text_file(*outcome.grouped_report_path, format_report(outcome.grouped_rows, true));
  }
  return outcome;
}

}  // namespace auxst
