#include "auxst/config.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "auxst/corpus.h"
#include "auxst/errors.h"

namespace auxst {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t end = value.find(',', start);
    if (end == std::string_view::npos) end = value.size();
    const auto item = trim(value.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + std::string(key) + "': invalid number '" +
                      std::string(text) + "'");
  }
  return value;
}

CorpusFormat parse_format(std::string_view key, std::string_view text) {
  if (text == "conllu") return CorpusFormat::Conllu;
  if (text == "tsv") return CorpusFormat::TaggedTsv;
  throw ConfigError("config key '" + std::string(key) + "': format must be conllu or tsv");
}

CorpusFormat format_from_extension(const std::filesystem::path& p) {
  return p.extension() == ".conllu" ? CorpusFormat::Conllu : CorpusFormat::TaggedTsv;
}

struct PendingCorpus {
  std::string id;
  std::map<std::string, std::string, std::less<>> values;
};

const std::set<std::string, std::less<>> kCorpusKeys = {
    "main_corpus", "aux_corpus",  "test_corpus", "main_format",
    "aux_format",  "test_format", "group"};

CorpusEntry finish_corpus(const PendingCorpus& pending, const std::filesystem::path& base) {
  CorpusEntry entry;
  entry.id = pending.id;
  auto source = [&](const std::string& role) {
    auto it = pending.values.find(role + "_corpus");
    if (it == pending.values.end()) {
      throw ConfigError("corpus '" + pending.id + "' is missing key '" + role + "_corpus'");
    }
    CorpusSource src;
    src.path = base / it->second;
    auto fmt = pending.values.find(role + "_format");
    src.format = fmt == pending.values.end() ? format_from_extension(src.path)
                                             : parse_format(fmt->first, fmt->second);
    return src;
  };
  entry.main = source("main");
  entry.aux = source("aux");
  entry.test = source("test");
  if (auto it = pending.values.find("group"); it != pending.values.end()) {
    entry.group = it->second;
  }
  return entry;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.source_text = std::string(text);
  cfg.run_root = base_dir / "runs";
  cfg.report_dir = base_dir;

  using Setter = std::function<void(std::string_view key, std::string_view value)>;
  auto size_field = [](std::size_t& field) {
    return [&field](std::string_view k, std::string_view v) {
      field = parse_number<std::size_t>(k, v);
    };
  };
  auto real_field = [](double& field) {
    return [&field](std::string_view k, std::string_view v) {
      field = parse_number<double>(k, v);
    };
  };
  auto path_field = [&base_dir](std::filesystem::path& field) {
    return [&field, &base_dir](std::string_view, std::string_view v) {
      field = base_dir / std::string(v);
    };
  };

  TrainConfig& t = cfg.train;
  const std::map<std::string, Setter, std::less<>> globals = {
      {"main_task", [&](auto, auto v) { cfg.main_task = std::string(v); }},
      {"aux_task", [&](auto, auto v) { cfg.aux_task = std::string(v); }},
      {"sizes",
       [&](auto k, auto v) {
         cfg.sizes.clear();
         for (auto item : split_list(v)) cfg.sizes.push_back(parse_number<std::size_t>(k, item));
       }},
      {"seeds",
       [&](auto k, auto v) {
         cfg.seeds.clear();
         for (auto item : split_list(v)) cfg.seeds.push_back(parse_number<std::uint64_t>(k, item));
       }},
      {"conditions",
       [&](auto, auto v) {
         cfg.conditions.clear();
         for (auto item : split_list(v)) cfg.conditions.push_back(parse_condition(item));
       }},
      {"word_dim", size_field(t.dims.word_dim)},
      {"char_dim", size_field(t.dims.char_dim)},
      {"char_hidden", size_field(t.dims.char_hidden)},
      {"word_hidden", size_field(t.dims.word_hidden)},
      {"max_epochs", size_field(t.max_epochs)},
      {"batch_size", size_field(t.batch_size)},
      {"learning_rate", real_field(t.learning_rate)},
      {"beta1", real_field(t.beta1)},
      {"beta2", real_field(t.beta2)},
      {"adam_epsilon", real_field(t.adam_epsilon)},
      {"patience", size_field(t.patience)},
      {"dev_fraction", real_field(t.dev_fraction)},
      {"clip_norm", real_field(t.clip_norm)},
      {"word_dropout", real_field(t.word_dropout)},
      {"min_count", size_field(cfg.min_count)},
      {"freqbin_base", real_field(cfg.freqbin_base)},
      {"bootstrap_resamples", size_field(cfg.bootstrap_resamples)},
      {"bootstrap_seed",
       [&](auto k, auto v) { cfg.bootstrap_seed = parse_number<std::uint64_t>(k, v); }},
      {"parallelism", size_field(cfg.parallelism)},
      {"run_root", path_field(cfg.run_root)},
      {"report_dir", path_field(cfg.report_dir)},
      {"group_map", path_field(cfg.group_map)},
  };

  std::vector<PendingCorpus> pending;
  PendingCorpus top{"corpus", {}};
  PendingCorpus* section = nullptr;
  std::set<std::string, std::less<>> seen_globals;

  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      }
      const auto inner = trim(line.substr(1, line.size() - 2));
      if (!inner.starts_with("corpus ") || trim(inner.substr(7)).empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": sections must be written [corpus <id>]");
      }
      pending.push_back({std::string(trim(inner.substr(7))), {}});
      section = &pending.back();
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (kCorpusKeys.contains(key)) {
      PendingCorpus& target = section ? *section : top;
      if (!target.values.emplace(std::string(key), std::string(value)).second) {
        throw ConfigError("config key '" + std::string(key) + "' given twice");
      }
      continue;
    }
    if (section) {
      throw ConfigError("config key '" + std::string(key) +
                        "' is not valid inside a [corpus] section");
    }
    if (key == "corpus_id") {
      top.id = std::string(value);
      continue;
    }
    auto it = globals.find(key);
    if (it == globals.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    if (!seen_globals.insert(std::string(key)).second) {
      throw ConfigError("config key '" + std::string(key) + "' given twice");
    }
    it->second(key, value);
  }

  if (!top.values.empty()) {
    if (!pending.empty()) {
      throw ConfigError("corpus keys at top level cannot be mixed with [corpus] sections");
    }
    pending.push_back(top);
  }
  if (pending.empty()) throw ConfigError("config names no corpora");
  std::set<std::string> ids;
  for (const auto& p : pending) {
    if (!ids.insert(p.id).second) throw ConfigError("corpus '" + p.id + "' defined twice");
    cfg.corpora.push_back(finish_corpus(p, base_dir));
  }

  if (cfg.main_task.empty()) throw ConfigError("config key 'main_task' is required");
  if (cfg.aux_task.empty()) throw ConfigError("config key 'aux_task' is required");
  if (cfg.main_task == cfg.aux_task) throw ConfigError("main_task and aux_task must differ");
  if (cfg.aux_task == kFreqBinTask || cfg.main_task == kFreqBinTask) {
    throw ConfigError("task name 'freqbin' is reserved");
  }
  if (cfg.sizes.empty()) throw ConfigError("config key 'sizes' is empty");
  if (cfg.seeds.empty()) throw ConfigError("config key 'seeds' is empty");
  if (std::find(cfg.conditions.begin(), cfg.conditions.end(), ConditionKind::MtlBaseline) ==
      cfg.conditions.end()) {
    throw ConfigError("config key 'conditions' must include mtl (the baseline)");
  }
  if (cfg.parallelism == 0) throw ConfigError("config key 'parallelism' must be >= 1");
  if (cfg.min_count == 0) throw ConfigError("config key 'min_count' must be >= 1");
  if (cfg.bootstrap_resamples == 0) {
    throw ConfigError("config key 'bootstrap_resamples' must be >= 1");
  }
  cfg.train.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment_config(text, path.parent_path());
}

}  // namespace auxst
