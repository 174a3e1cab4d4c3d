#include "auxst/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "auxst/errors.h"
#include "auxst/random.h"

namespace auxst {

void TrainConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ConfigError("dev_fraction must lie in (0, 1)");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
  if (!(word_dropout >= 0.0 && word_dropout < 1.0)) {
    throw ConfigError("word_dropout must lie in [0, 1)");
  }
}

void adam_step(ModelParams& params, const GradientMap& grads, AdamState& state,
               const TrainConfig& config) {
  for (const auto& [name, t] : params.tensors()) {
    const Tensor* g = grads.find(&t);
    if (!g) continue;
    if (!g->same_shape(t)) {
      throw std::invalid_argument("adam_step: gradient for " + name + " has shape " +
                                  g->shape_string() + ", parameter " + t.shape_string());
    }
    if (!g->all_finite()) throw NumericalError("adam_step: non-finite gradient for " + name);
  }

  ++state.step;
  for (auto& [name, t] : params.tensors()) {
    const Tensor* g = grads.find(&t);
    if (!g) continue;
    auto m_it = state.first_moment.try_emplace(name, t.shape()).first;
    auto v_it = state.second_moment.try_emplace(name, t.shape()).first;
    const auto steps = ++state.tensor_steps[name];
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    const double m_corr = 1.0 - std::pow(config.beta1, static_cast<double>(steps));
    const double v_corr = 1.0 - std::pow(config.beta2, static_cast<double>(steps));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double gi = (*g)[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m[i] / m_corr;
      const double v_hat = v[i] / v_corr;
      t[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

double clip_gradients(GradientMap& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [param, g] : grads.entries()) {
    for (double v : g.values()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

std::pair<Corpus, Corpus> train_dev_split(const Corpus& corpus, double dev_fraction,
                                          std::uint64_t seed) {
  const std::size_t n = corpus.size();
  const auto n_dev = static_cast<std::size_t>(std::floor(dev_fraction * static_cast<double>(n)));
  if (n_dev == 0 || n_dev >= n) {
    throw DataError("corpus '" + corpus.id() + "' with " + std::to_string(n) +
                    " sentences is too small for a train/dev split");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<bool> is_dev(n, false);
  for (std::size_t i = 0; i < n_dev; ++i) is_dev[order[i]] = true;
  Corpus train(corpus.id()), dev(corpus.id());
  for (std::size_t i = 0; i < n; ++i) (is_dev[i] ? dev : train).add(corpus[i]);
  return {std::move(train), std::move(dev)};
}

double dev_accuracy(const ModelParams& params, const Corpus& dev, const std::string& task) {
  std::size_t correct = 0, total = 0;
  for (const auto& s : dev.sentences()) {
    const auto* gold = s.labels_for(task);
    if (!gold) throw DataError("dev sentence lacks '" + task + "' labels");
    const auto predicted = predict_labels(params, s.tokens, task);
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == (*gold)[i];
    total += predicted.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainResult train_single_task(const Corpus& corpus, const TaskSpec& task,
                              const Vocabulary& vocab, const TrainConfig& config,
                              const TrainHooks& hooks) {
  return train_mtl({TaskData{task, corpus}}, vocab, config, hooks);
}

namespace {

// Cycles through a task's training sentences in per-epoch shuffled order.
struct BatchCursor {
  const Corpus* corpus = nullptr;
  std::vector<std::size_t> order;
  std::size_t next = 0;

  void reshuffle(Rng& rng) {
    order.resize(corpus->size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    next = 0;
  }

  std::vector<std::size_t> take(std::size_t batch, Rng& rng) {
    if (next >= order.size()) reshuffle(rng);
    const std::size_t end = std::min(order.size(), next + batch);
    std::vector<std::size_t> out(order.begin() + static_cast<std::ptrdiff_t>(next),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    next = end;
    return out;
  }
};

void write_log_header(std::ostream& log, const std::vector<TaskData>& datasets) {
  log << "epoch";
  for (const auto& d : datasets) log << "\tloss:" << d.task.name();
  log << "\tdev_acc\n";
}

void write_log_line(std::ostream& log, const EpochStats& stats,
                    const std::vector<TaskData>& datasets) {
  char buf[64];
  log << stats.epoch;
  for (const auto& d : datasets) {
    std::snprintf(buf, sizeof buf, "\t%.6f", stats.mean_loss.at(d.task.name()));
    log << buf;
  }
  std::snprintf(buf, sizeof buf, "\t%.6f\n", stats.dev_accuracy);
  log << buf;
}

}  // namespace

TrainResult train_mtl(const std::vector<TaskData>& datasets, const Vocabulary& vocab,
                      const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (datasets.empty()) throw std::invalid_argument("train_mtl: no tasks");

  std::size_t main = 0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (datasets[i].task.role() == TaskRole::Main) {
      main = i;
      break;
    }
  }
  std::vector<TaskSpec> tasks;
  for (const auto& d : datasets) {
    if (!d.corpus.fully_labelled(d.task.name())) {
      throw DataError("corpus '" + d.corpus.id() + "' is not labelled for task '" +
                      d.task.name() + "'");
    }
    if (d.corpus.empty()) {
      throw DataError("no training data for task '" + d.task.name() + "'");
    }
    tasks.push_back(d.task);
  }
  const std::string main_task = datasets[main].task.name();

  auto [main_train, dev] = train_dev_split(datasets[main].corpus, config.dev_fraction,
                                           mix_seed(config.seed, "dev"));
  std::vector<const Corpus*> train(datasets.size());
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    train[i] = i == main ? &main_train : &datasets[i].corpus;
  }

  TrainResult result{ModelParams(config.dims, vocab, tasks, mix_seed(config.seed, "init")),
                     {}, 0, {}};
  ModelParams params = result.params;
  AdamState adam;
  Rng rng(mix_seed(config.seed, "schedule"));

  std::size_t max_batches = 0;
  for (const Corpus* c : train) {
    max_batches = std::max(max_batches, (c->size() + config.batch_size - 1) / config.batch_size);
  }
  const std::size_t steps_per_epoch = datasets.size() * max_batches;

  std::vector<BatchCursor> cursors(datasets.size());
  for (std::size_t i = 0; i < datasets.size(); ++i) cursors[i].corpus = train[i];
  for (const auto& t : tasks) result.task_steps[t.name()] = 0;

  if (hooks.log) write_log_header(*hooks.log, datasets);
  double best_accuracy = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (auto& c : cursors) c.reshuffle(rng);
    std::vector<double> loss_sum(datasets.size(), 0.0);
    std::vector<std::size_t> loss_count(datasets.size(), 0);

    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const std::size_t t = uniform_index(rng, datasets.size());
      const auto batch = cursors[t].take(config.batch_size, rng);
      const std::string& name = tasks[t].name();

      Graph graph;
      std::vector<NodeRef> losses;
      for (std::size_t idx : batch) {
        const Sentence& s = (*train[t])[idx];
        std::vector<std::uint8_t> dropped;
        if (config.word_dropout > 0.0) {
          dropped.resize(s.tokens.size());
          for (auto& d : dropped) d = uniform_unit(rng) < config.word_dropout;
        }
        losses.push_back(
            sentence_loss(graph, params, s.tokens, *s.labels_for(name), name, dropped));
      }
      const NodeRef total = losses.size() == 1 ? losses[0] : graph.add(losses);
      loss_sum[t] += graph.value(total).item();
      loss_count[t] += batch.size();

      GradientMap grads = graph.backward(total);
      clip_gradients(grads, config.clip_norm);
      adam_step(params, grads, adam, config);
      ++result.task_steps[name];
      if (hooks.on_step) hooks.on_step(name, grads, params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      stats.mean_loss[tasks[i].name()] =
          loss_count[i] ? loss_sum[i] / static_cast<double>(loss_count[i]) : 0.0;
    }
    stats.dev_accuracy = dev_accuracy(params, dev, main_task);
    if (hooks.log) write_log_line(*hooks.log, stats, datasets);
    result.history.push_back(stats);

    if (stats.dev_accuracy > best_accuracy) {
      best_accuracy = stats.dev_accuracy;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace auxst
