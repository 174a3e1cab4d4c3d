#include "auxst/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "auxst/errors.h"

namespace auxst {

namespace {

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find('\t', start);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t'; });
}

[[noreturn]] void line_error(std::string_view what, std::size_t line_no,
                             std::string_view detail) {
  throw DataError(std::string(what) + ": line " + std::to_string(line_no) + ": " +
                  std::string(detail));
}

// Accumulates tokens and labels until a sentence boundary.
class SentenceBuilder {
 public:
  SentenceBuilder(Corpus& corpus, std::vector<std::string> tasks)
      : corpus_(corpus), tasks_(std::move(tasks)) {}

  void add(std::string_view token, std::span<const std::string_view> labels) {
    current_.tokens.emplace_back(token);
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
      current_.labels[tasks_[t]].emplace_back(labels[t]);
    }
  }

  void flush() {
    if (current_.tokens.empty()) return;
    current_.source = corpus_.id();
    current_.index = corpus_.size();
    corpus_.add(std::move(current_));
    current_ = Sentence{};
  }

 private:
  Corpus& corpus_;
  std::vector<std::string> tasks_;
  Sentence current_;
};

}  // namespace

const std::vector<std::string>* Sentence::labels_for(std::string_view task) const {
  auto it = labels.find(task);
  return it == labels.end() ? nullptr : &it->second;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.tokens.size();
  return n;
}

void Corpus::add(Sentence sentence) {
  if (sentence.tokens.empty()) throw DataError("corpus '" + id_ + "': empty sentence");
  for (const auto& token : sentence.tokens) {
    if (token.empty() || token.find_first_of("\t\n") != std::string::npos) {
      throw DataError("corpus '" + id_ + "': invalid token '" + token + "'");
    }
  }
  for (const auto& [task, seq] : sentence.labels) {
    if (seq.size() != sentence.tokens.size()) {
      throw DataError("corpus '" + id_ + "': task '" + task + "' has " +
                      std::to_string(seq.size()) + " labels for " +
                      std::to_string(sentence.tokens.size()) + " tokens");
    }
  }
  sentences_.push_back(std::move(sentence));
}

void Corpus::append(const Corpus& other) {
  for (const auto& s : other.sentences()) add(s);
}

std::set<std::string> Corpus::tasks_present() const {
  std::set<std::string> tasks;
  for (const auto& s : sentences_) {
    for (const auto& [task, seq] : s.labels) tasks.insert(task);
  }
  return tasks;
}

bool Corpus::fully_labelled(std::string_view task) const {
  return std::all_of(sentences_.begin(), sentences_.end(),
                     [&](const Sentence& s) { return s.labels_for(task) != nullptr; });
}

Corpus strip_labels(const Corpus& corpus) {
  Corpus out(corpus.id());
  for (const auto& s : corpus.sentences()) {
    Sentence bare;
    bare.tokens = s.tokens;
    bare.source = s.source;
    bare.index = s.index;
    out.add(std::move(bare));
  }
  return out;
}

Corpus keep_task(const Corpus& corpus, std::string_view task) {
  Corpus out(corpus.id());
  for (const auto& s : corpus.sentences()) {
    Sentence copy;
    copy.tokens = s.tokens;
    copy.source = s.source;
    copy.index = s.index;
    if (const auto* seq = s.labels_for(task)) copy.labels.emplace(std::string(task), *seq);
    out.add(std::move(copy));
  }
  return out;
}

Corpus parse_conllu(std::string_view text, std::string corpus_id) {
  Corpus corpus(std::move(corpus_id));
  SentenceBuilder builder(corpus, {std::string(kPosTask), std::string(kDeprelTask)});
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (is_blank(line)) {
      builder.flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 10) {
      line_error("conllu", i + 1,
                 "expected 10 tab-separated columns, found " + std::to_string(fields.size()));
    }
    const std::string_view id = fields[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      continue;
    }
    if (fields[1].empty()) line_error("conllu", i + 1, "empty FORM");
    const std::string_view labels[] = {fields[3], fields[7]};
    builder.add(fields[1], labels);
  }
  builder.flush();
  return corpus;
}

Corpus parse_tagged_tsv(std::string_view text, std::string_view task,
                        std::string corpus_id) {
  Corpus corpus(std::move(corpus_id));
  SentenceBuilder builder(corpus, {std::string(task)});
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      builder.flush();
      continue;
    }
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 2) {
      line_error("tagged tsv", i + 1,
                 "expected token<TAB>tag, found " + std::to_string(fields.size()) +
                     " fields");
    }
    if (fields[0].empty() || fields[1].empty()) {
      line_error("tagged tsv", i + 1, "empty token or tag");
    }
    builder.add(fields[0], {&fields[1], 1});
  }
  builder.flush();
  return corpus;
}

Corpus parse_token_lines(std::string_view text, std::string corpus_id) {
  Corpus corpus(std::move(corpus_id));
  SentenceBuilder builder(corpus, {});
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      builder.flush();
      continue;
    }
    const std::string_view token = split_tabs(lines[i]).front();
    if (token.empty()) line_error("token lines", i + 1, "empty token");
    builder.add(token, {});
  }
  builder.flush();
  return corpus;
}

std::string write_tagged_tsv(const Corpus& corpus, std::string_view task) {
  std::string out;
  for (const auto& s : corpus.sentences()) {
    const auto* labels = s.labels_for(task);
    if (!labels) {
      throw DataError("corpus '" + corpus.id() + "': sentence " +
                      std::to_string(s.index) + " has no '" + std::string(task) +
                      "' labels");
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += s.tokens[i];
      out += '\t';
      out += (*labels)[i];
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<std::string> collect_tagset(std::span<const Corpus* const> corpora,
                                        std::string_view task) {
  std::set<std::string> tags;
  for (const Corpus* c : corpora) {
    for (const auto& s : c->sentences()) {
      if (const auto* seq = s.labels_for(task)) tags.insert(seq->begin(), seq->end());
    }
  }
  return {tags.begin(), tags.end()};
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::string> chars)
    : words_(std::move(words)), chars_(std::move(chars)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!word_ids_.emplace(words_[i], i + 1).second) {
      throw std::invalid_argument("vocabulary lists word '" + words_[i] + "' twice");
    }
  }
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (!char_ids_.emplace(chars_[i], i + 1).second) {
      throw std::invalid_argument("vocabulary lists character '" + chars_[i] + "' twice");
    }
  }
}

std::size_t Vocabulary::word_index(std::string_view word) const {
  auto it = word_ids_.find(word);
  return it == word_ids_.end() ? kUnknown : it->second;
}

std::size_t Vocabulary::char_index(std::string_view ch) const {
  auto it = char_ids_.find(ch);
  return it == char_ids_.end() ? kUnknown : it->second;
}

std::vector<std::string> split_chars(std::string_view word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3
                                        : (lead >> 3) == 0x1e ? 4 : 1;
    if (i + len > word.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(word[i + k]) & 0xc0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(word.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

std::vector<std::string> canonical_order(const std::unordered_map<std::string, std::size_t>& counts,
                                         std::size_t min_count) {
  std::vector<std::pair<std::string, std::size_t>> items;
  for (const auto& [key, n] : counts) {
    if (n >= min_count) items.emplace_back(key, n);
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [key, n] : items) out.push_back(std::move(key));
  return out;
}

}  // namespace

Vocabulary build_vocab(std::span<const Corpus* const> corpora, std::size_t min_count) {
  if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
  std::unordered_map<std::string, std::size_t> words, chars;
  for (const Corpus* c : corpora) {
    for (const auto& s : c->sentences()) {
      for (const auto& token : s.tokens) {
        ++words[token];
        for (auto& ch : split_chars(token)) ++chars[std::move(ch)];
      }
    }
  }
  return Vocabulary(canonical_order(words, min_count), canonical_order(chars, 1));
}

}  // namespace auxst
