#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auxst/task.h"

namespace auxst {

// Task names under which CoNLL-U columns are exposed.
inline constexpr std::string_view kPosTask = "pos";
inline constexpr std::string_view kDeprelTask = "deprel";

struct Sentence {
  std::vector<std::string> tokens;
  // task name -> one label per token
  std::map<std::string, std::vector<std::string>, std::less<>> labels;
  std::string source;
  std::size_t index = 0;

  const std::vector<std::string>* labels_for(std::string_view task) const;
  bool operator==(const Sentence&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
  std::size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  std::size_t token_count() const;

  // Validates the sentence invariants before appending.
  void add(Sentence sentence);
  void append(const Corpus& other);

  std::set<std::string> tasks_present() const;
  // True when every sentence carries labels for `task`.
  bool fully_labelled(std::string_view task) const;

  bool operator==(const Corpus&) const = default;

 private:
  std::string id_;
  std::vector<Sentence> sentences_;
};

// Tokens and provenance only; every label sequence dropped.
Corpus strip_labels(const Corpus& corpus);
// Keeps only `task`'s labels.
Corpus keep_task(const Corpus& corpus, std::string_view task);

// CoNLL-U: FORM -> token, UPOS -> "pos", DEPREL -> "deprel". Multiword
// ranges and empty nodes are skipped.
Corpus parse_conllu(std::string_view text, std::string corpus_id = "");
// `token<TAB>tag` per line, blank lines between sentences.
Corpus parse_tagged_tsv(std::string_view text, std::string_view task,
                        std::string corpus_id = "");
// Same format without tags: one token per line (extra columns ignored).
Corpus parse_token_lines(std::string_view text, std::string corpus_id = "");
std::string write_tagged_tsv(const Corpus& corpus, std::string_view task);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Tagset in canonical (lexicographic) order from every label of `task`
// found in `corpora`.
std::vector<std::string> collect_tagset(std::span<const Corpus* const> corpora,
                                        std::string_view task);

// Shared word/character inventories. Index 0 of each is the reserved
// unknown entry; known entries follow in canonical order (descending
// frequency, ties by byte order).
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;

  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::string> chars);

  std::size_t word_index(std::string_view word) const;
  std::size_t char_index(std::string_view ch) const;
  std::size_t word_count() const { return words_.size() + 1; }
  std::size_t char_count() const { return chars_.size() + 1; }
  // Known entries, without the unknown slot.
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && chars_ == other.chars_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::string> chars_;
  std::map<std::string, std::size_t, std::less<>> word_ids_;
  std::map<std::string, std::size_t, std::less<>> char_ids_;
};

// UTF-8 code points of `word`; invalid bytes become single-byte units.
std::vector<std::string> split_chars(std::string_view word);

Vocabulary build_vocab(std::span<const Corpus* const> corpora, std::size_t min_count = 1);

}  // namespace auxst
