#include "auxst/conditions.h"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "auxst/errors.h"
#include "auxst/random.h"

namespace auxst {

namespace {

constexpr std::array kConditions = {ConditionKind::MtlBaseline, ConditionKind::AuxStCeiling,
                                    ConditionKind::AuxSt,       ConditionKind::ExtraAux,
                                    ConditionKind::ExtraMain,   ConditionKind::FreqBin};

// Index permutation shared by subsample() and subsample_complement().
std::vector<bool> sample_mask(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n > corpus.size()) {
    throw DataError("cannot subsample " + std::to_string(n) + " sentences from corpus '" +
                    corpus.id() + "' of size " + std::to_string(corpus.size()));
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<bool> chosen(corpus.size(), false);
  for (std::size_t i = 0; i < n; ++i) chosen[order[i]] = true;
  return chosen;
}

Corpus select(const Corpus& corpus, const std::vector<bool>& mask, bool keep) {
  Corpus out(corpus.id());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (mask[i] == keep) out.add(corpus[i]);
  }
  return out;
}

}  // namespace

std::string_view condition_id(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::MtlBaseline: return "mtl";
    case ConditionKind::AuxStCeiling: return "aux_st_ceiling";
    case ConditionKind::AuxSt: return "aux_st";
    case ConditionKind::ExtraAux: return "extra_aux";
    case ConditionKind::ExtraMain: return "extra_main";
    case ConditionKind::FreqBin: return "freqbin";
  }
  return "unknown";
}

std::string_view condition_label(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::MtlBaseline: return "MTL";
    case ConditionKind::AuxStCeiling: return "Aux-ST ceiling";
    case ConditionKind::AuxSt: return "Aux-ST";
    case ConditionKind::ExtraAux: return "Extra Aux";
    case ConditionKind::ExtraMain: return "Extra Main";
    case ConditionKind::FreqBin: return "FreqBin";
  }
  return "unknown";
}

ConditionKind parse_condition(std::string_view text) {
  for (ConditionKind kind : kConditions) {
    if (text == condition_id(kind) || text == condition_label(kind)) return kind;
  }
  throw ConfigError("unknown condition '" + std::string(text) + "'");
}

std::span<const ConditionKind> all_conditions() { return kConditions; }

bool ExperimentPlan::ceiling_available() const {
  return !test.empty() && test.fully_labelled(aux_task.name());
}

void ExperimentPlan::validate() const {
  if (sizes.empty()) throw ConfigError("plan '" + corpus_id + "' has no training sizes");
  if (seeds.empty()) throw ConfigError("plan '" + corpus_id + "' has no seeds");
  const bool extra_main =
      std::find(conditions.begin(), conditions.end(), ConditionKind::ExtraMain) != conditions.end();
  for (std::size_t n : sizes) {
    if (n == 0) throw ConfigError("training sizes must be positive");
    const std::size_t needed = n + (extra_main ? extra_count() : 0);
    if (needed > main_pool.size()) {
      throw DataError("corpus '" + corpus_id + "': size " + std::to_string(n) +
                      (extra_main ? " plus " + std::to_string(extra_count()) + " extra" : "") +
                      " exceeds the " + std::to_string(main_pool.size()) +
                      " available main-task sentences");
    }
  }
  if (extra_count() >= aux_pool.size()) {
    throw DataError("corpus '" + corpus_id + "': aux pool of " +
                    std::to_string(aux_pool.size()) +
                    " sentences cannot spare a reserve of " + std::to_string(extra_count()));
  }
  if (!main_pool.fully_labelled(main_task.name())) {
    throw DataError("main corpus of '" + corpus_id + "' lacks '" + main_task.name() + "' labels");
  }
  if (!aux_pool.fully_labelled(aux_task.name())) {
    throw DataError("aux corpus of '" + corpus_id + "' lacks '" + aux_task.name() + "' labels");
  }
}

Corpus subsample(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  return select(corpus, sample_mask(corpus, n, seed), true);
}

Corpus subsample_complement(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  return select(corpus, sample_mask(corpus, n, seed), false);
}

Corpus freqbin_labels(const Corpus& corpus, double base) {
  if (corpus.empty()) throw DataError("freqbin_labels: empty corpus");
  if (!(base > 1.0)) throw ConfigError("freqbin base must exceed 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : corpus.sentences()) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  const double log_base = std::log(base);
  Corpus out(corpus.id());
  for (const auto& s : corpus.sentences()) {
    Sentence labelled = s;
    std::vector<std::string> bins;
    bins.reserve(s.tokens.size());
    for (const auto& t : s.tokens) {
      // The small offset keeps exact powers of the base in the upper bin.
      const double bin =
          std::floor(std::log(static_cast<double>(counts[t])) / log_base + 1e-12);
      bins.push_back(std::to_string(static_cast<long long>(bin)));
    }
    labelled.labels.insert_or_assign(std::string(kFreqBinTask), std::move(bins));
    out.add(std::move(labelled));
  }
  return out;
}

Corpus aux_training_pool(const ExperimentPlan& plan, std::uint64_t seed) {
  return keep_task(subsample_complement(plan.aux_pool, plan.extra_count(),
                                        mix_seed(seed, "aux-reserve")),
                   plan.aux_task.name());
}

Corpus append_aux_sentences(const Corpus& aux_train, const Corpus& labelled,
                            std::string_view aux_task) {
  Corpus out = aux_train;
  const Corpus kept = keep_task(labelled, aux_task);
  for (const auto& s : kept.sentences()) {
    if (!s.labels_for(aux_task)) {
      throw DataError("sentence " + std::to_string(s.index) + " of '" + labelled.id() +
                      "' has no '" + std::string(aux_task) + "' labels");
    }
    out.add(s);
  }
  return out;
}

ConditionMaterials build_condition(const ExperimentPlan& plan, ConditionKind kind,
                                   std::size_t size, std::uint64_t seed,
                                   const Corpus* silver_aux_test) {
  if ((kind == ConditionKind::AuxSt) != (silver_aux_test != nullptr)) {
    throw std::invalid_argument("build_condition: silver aux labels are required for "
                                "Aux-ST and only for Aux-ST");
  }
  if (kind == ConditionKind::AuxStCeiling && !plan.ceiling_available()) {
    throw DataError("Aux-ST ceiling is unavailable for '" + plan.corpus_id +
                    "': the test corpus has no gold '" + plan.aux_task.name() + "' labels");
  }

  const std::string& main = plan.main_task.name();
  const std::string& aux = plan.aux_task.name();
  const std::uint64_t main_seed = mix_seed(seed, "main-subsample");
  ConditionMaterials m{keep_task(subsample(plan.main_pool, size, main_seed), main),
                       aux_training_pool(plan, seed), plan.aux_task};

  switch (kind) {
    case ConditionKind::MtlBaseline:
      break;
    case ConditionKind::AuxSt:
      m.aux_train = append_aux_sentences(m.aux_train, *silver_aux_test, aux);
      break;
    case ConditionKind::AuxStCeiling: {
      const Corpus gold_aux = keep_task(plan.test, aux);
      const Corpus* sources[] = {&gold_aux};
      m.aux_task = plan.aux_task.with_labels(collect_tagset(sources, aux));
      m.aux_train = append_aux_sentences(m.aux_train, gold_aux, aux);
      break;
    }
    case ConditionKind::ExtraAux: {
      const Corpus reserve =
          subsample(plan.aux_pool, plan.extra_count(), mix_seed(seed, "aux-reserve"));
      m.aux_train = append_aux_sentences(m.aux_train, reserve, aux);
      break;
    }
    case ConditionKind::ExtraMain: {
      const Corpus held_back = subsample_complement(plan.main_pool, size, main_seed);
      const Corpus extra =
          subsample(held_back, plan.extra_count(), mix_seed(seed, "extra-main"));
      m.main_train.append(keep_task(extra, main));
      break;
    }
    case ConditionKind::FreqBin: {
      m.aux_train = keep_task(freqbin_labels(m.main_train, plan.freqbin_base), kFreqBinTask);
      const Corpus* sources[] = {&m.aux_train};
      m.aux_task = TaskSpec(std::string(kFreqBinTask), collect_tagset(sources, kFreqBinTask),
                            TaskRole::Auxiliary);
      break;
    }
  }
  return m;
}

}  // namespace auxst
