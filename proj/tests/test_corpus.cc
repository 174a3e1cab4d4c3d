#include <doctest.h>

#include <algorithm>

#include "auxst/corpus.h"
#include "auxst/errors.h"
#include "auxst/random.h"
#include "support/helpers.h"

using namespace auxst;

namespace {

std::vector<std::string> column(const Corpus& c, std::string_view task) {
  std::vector<std::string> out;
  for (const auto& s : c.sentences()) {
    for (const auto& l : *s.labels_for(task)) out.push_back(l);
  }
  return out;
}

std::vector<std::string> all_tokens(const Corpus& c) {
  std::vector<std::string> out;
  for (const auto& s : c.sentences()) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

}  // namespace

TEST_CASE("empty CoNLL-U input gives an empty corpus") {
  CHECK(parse_conllu("").size() == 0);
  CHECK(parse_conllu("# only a comment\n\n").size() == 0);
}

TEST_CASE("two-token sentence keeps UPOS and DEPREL") {
  const Corpus c = parse_conllu(read_text_file(test::fixture("two_tokens.conllu")), "de");
  REQUIRE(c.size() == 1);
  CHECK(c[0].tokens == std::vector<std::string>{"Der", "Hund"});
  CHECK(*c[0].labels_for(kPosTask) == std::vector<std::string>{"DET", "NOUN"});
  CHECK(*c[0].labels_for(kDeprelTask) == std::vector<std::string>{"det", "root"});
  CHECK(c[0].source == "de");
  CHECK(c.tasks_present() == std::set<std::string>{"deprel", "pos"});
}

TEST_CASE("fixture with comments, ranges and empty nodes matches hand counts") {
  const Corpus c = parse_conllu(read_text_file(test::fixture("sample.conllu")));
  // 3 sentences; 4 + 3 + 6 syntactic words; the 1-2 range and 2.1 node are skipped.
  REQUIRE(c.size() == 3);
  CHECK(c[0].tokens.size() == 4);
  CHECK(c[1].tokens == std::vector<std::string>{"de", "el", "mar"});
  CHECK(c[2].tokens.size() == 6);
  CHECK(c.token_count() == 13);
  CHECK(c[2].labels_for(kPosTask)->back() == "_");
  CHECK(c[2].labels_for(kDeprelTask)->back() == "_");
  CHECK(c[2].labels_for(kDeprelTask)->at(2) == "obj");
}

TEST_CASE("parsing never invents tokens") {
  const std::string text = read_text_file(test::fixture("sample.conllu"));
  std::vector<std::string> forms;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::string id = line.substr(0, line.find('\t'));
    if (id.find_first_not_of("0123456789") != std::string::npos) continue;
    const std::size_t a = line.find('\t') + 1;
    forms.push_back(line.substr(a, line.find('\t', a) - a));
  }
  CHECK(all_tokens(parse_conllu(text)) == forms);
}

TEST_CASE("wrong column count is rejected with its line number") {
  const std::string text = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t0\troot\n";
  CHECK_THROWS_WITH_AS(parse_conllu(text), doctest::Contains("line 2"), DataError);
}

TEST_CASE("CRLF line endings are accepted") {
  const Corpus c = parse_conllu("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\r\n\r\n");
  REQUIRE(c.size() == 1);
  CHECK(c[0].labels_for(kDeprelTask)->front() == "root");
}

TEST_CASE("tagged TSV parsing") {
  CHECK(parse_tagged_tsv("", "sem").size() == 0);
  const Corpus c = parse_tagged_tsv("a\tX\nb\tY\n\nc\tZ\n", "sem");
  REQUIRE(c.size() == 2);
  CHECK(c[0].tokens.size() == 2);
  CHECK(c[1].tokens.size() == 1);
  CHECK(*c[1].labels_for("sem") == std::vector<std::string>{"Z"});
  CHECK_THROWS_WITH_AS(parse_tagged_tsv("a\tX\nb\tY\tZ\n", "sem"), doctest::Contains("line 2"),
                       DataError);
  CHECK_THROWS_WITH_AS(parse_tagged_tsv("a\tX\n\nb\n", "sem"), doctest::Contains("line 3"),
                       DataError);
}

TEST_CASE("tagged TSV round trip is structure-exact") {
  const std::string text = read_text_file(test::fixture("sample.tsv"));
  const Corpus c = parse_tagged_tsv(text, "sem", "pmb");
  REQUIRE(c.size() == 3);
  CHECK(c.token_count() == 7);
  const std::string written = write_tagged_tsv(c, "sem");
  const Corpus again = parse_tagged_tsv(written, "sem", "pmb");
  CHECK(again == c);
  CHECK(write_tagged_tsv(again, "sem") == written);

  const Corpus conllu = parse_conllu(read_text_file(test::fixture("sample.conllu")), "ud");
  const Corpus deprel = keep_task(conllu, kDeprelTask);
  CHECK(parse_tagged_tsv(write_tagged_tsv(conllu, kDeprelTask), kDeprelTask, "ud") == deprel);
}

TEST_CASE("corpus invariants are enforced") {
  Corpus c("x");
  CHECK_THROWS_AS(c.add(test::sentence({})), DataError);
  CHECK_THROWS_AS(c.add(test::sentence({"a", "b"}, {{"t", {"X"}}})), DataError);
  CHECK_THROWS_AS(c.add(test::sentence({"a\tb"})), DataError);
  c.add(test::sentence({"a"}, {{"t", {"X"}}}));
  c.add(test::sentence({"b"}, {{"u", {"Y"}}}));
  CHECK(c.tasks_present() == std::set<std::string>{"t", "u"});
  CHECK_FALSE(c.fully_labelled("t"));
  CHECK(strip_labels(c).tasks_present().empty());
  CHECK(keep_task(c, "u").tasks_present() == std::set<std::string>{"u"});
}

TEST_CASE("token lines input ignores extra columns") {
  const Corpus c = parse_token_lines("a\nb\tX\n\nc\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].tokens == std::vector<std::string>{"a", "b"});
  CHECK(c[0].labels.empty());
}

TEST_CASE("missing files are reported with their path") {
  CHECK_THROWS_WITH_AS(read_text_file("/nonexistent/corpus.conllu"),
                       doctest::Contains("/nonexistent/corpus.conllu"), DataError);
}

TEST_CASE("characters are UTF-8 code points") {
  CHECK(split_chars("abc").size() == 3);
  CHECK(split_chars("résumé") == std::vector<std::string>{"r", "é", "s", "u", "m", "é"});
  CHECK(split_chars("日本").size() == 2);
}

TEST_CASE("build_vocab examples") {
  const Vocabulary empty = build_vocab({}, 1);
  CHECK(empty.word_count() == 1);
  CHECK(empty.char_count() == 1);
  CHECK(empty.word_index("anything") == Vocabulary::kUnknown);

  const Corpus c = test::corpus("c", {test::sentence({"a", "b", "a"}), test::sentence({"a"})});
  const Corpus* sources[] = {&c};
  const Vocabulary v = build_vocab(sources, 2);
  CHECK(v.words() == std::vector<std::string>{"a"});
  CHECK(v.word_index("b") == Vocabulary::kUnknown);
  CHECK(v.chars() == std::vector<std::string>{"a", "b"});
  CHECK(v.word_index("a") == 1);
}

TEST_CASE("vocabulary order is descending frequency then bytewise") {
  const Corpus c = test::corpus("c", {test::sentence({"b", "c", "a", "c", "b", "d"})});
  const Corpus* sources[] = {&c};
  CHECK(build_vocab(sources, 1).words() == std::vector<std::string>{"b", "c", "a", "d"});
}

TEST_CASE("property: build_vocab ignores corpus and sentence order") {
  Rng rng(4);
  const std::vector<std::string> words{"la", "casa", "el", "perro", "è", "Casa", "x"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Sentence> a, b;
    for (int i = 0; i < 6; ++i) {
      std::vector<std::string> toks(1 + uniform_index(rng, 5));
      for (auto& t : toks) t = words[uniform_index(rng, words.size())];
      (i < 3 ? a : b).push_back(test::sentence(toks));
    }
    const Corpus main = test::corpus("m", a), aux = test::corpus("a", b);
    std::vector<Sentence> all = a;
    all.insert(all.end(), b.begin(), b.end());
    shuffle(all, rng);
    const Corpus merged = test::corpus("all", all);
    const Corpus* order1[] = {&main, &aux};
    const Corpus* order2[] = {&aux, &main};
    const Corpus* order3[] = {&merged};
    const std::size_t min_count = 1 + uniform_index(rng, 2);
    CHECK(build_vocab(order1, min_count) == build_vocab(order2, min_count));
    CHECK(build_vocab(order1, min_count) == build_vocab(order3, min_count));
  }
}

TEST_CASE("tagset collection is sorted and deduplicated") {
  const Corpus c = parse_conllu(read_text_file(test::fixture("sample.conllu")));
  const Corpus* sources[] = {&c};
  const auto tags = collect_tagset(sources, kPosTask);
  CHECK(std::is_sorted(tags.begin(), tags.end()));
  CHECK(tags == std::vector<std::string>{"ADP", "CCONJ", "DET", "NOUN", "PROPN", "PUNCT", "VERB", "_"});
  CHECK(column(c, kPosTask).size() == 13);
}
