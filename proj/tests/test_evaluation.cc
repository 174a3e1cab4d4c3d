#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "auxst/errors.h"
#include "auxst/evaluation.h"
#include "auxst/random.h"
#include "support/helpers.h"
#include "support/table1.h"

using namespace auxst;

namespace {

Corpus labelled(std::vector<std::vector<std::string>> labels, const std::string& task = "t") {
  std::vector<Sentence> sents;
  for (auto& seq : labels) {
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < seq.size(); ++i) toks.push_back("w" + std::to_string(i));
    sents.push_back(test::sentence(toks, {{task, seq}}));
  }
  return test::corpus("c", sents);
}

// n one-token sentences, all labelled `label`.
Corpus uniform(std::size_t n, const std::string& label) {
  return labelled(std::vector<std::vector<std::string>>(n, {label}));
}

const ConditionKind kPublished[] = {ConditionKind::AuxStCeiling, ConditionKind::AuxSt,
                                    ConditionKind::ExtraAux, ConditionKind::ExtraMain};

}  // namespace

TEST_CASE("accuracy examples") {
  const Corpus gold = labelled({{"A", "B"}, {"C", "D"}});
  CHECK(accuracy(gold, gold, "t") == 1.0);
  CHECK(accuracy(labelled({{"x", "x"}, {"x", "x"}}), gold, "t") == 0.0);
  CHECK(accuracy(labelled({{"A", "B"}, {"C", "x"}}), gold, "t") == 0.75);
  const TokenCounts counts = count_correct(labelled({{"A", "B"}, {"C", "x"}}), gold, "t");
  CHECK(counts.correct == 3);
  CHECK(counts.total == 4);
}

TEST_CASE("accuracy rejects misaligned corpora") {
  const Corpus gold = labelled({{"A", "B"}, {"C", "D"}});
  CHECK_THROWS_AS(accuracy(labelled({{"A", "B"}}), gold, "t"), DataError);
  CHECK_THROWS_AS(accuracy(labelled({{"A", "B"}, {"C"}}), gold, "t"), DataError);
}

TEST_CASE("property: accuracy is invariant to joint sentence reordering") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::string>> g, p;
    for (int i = 0; i < 8; ++i) {
      std::vector<std::string> gs, ps;
      for (std::size_t k = 0; k < 1 + uniform_index(rng, 4); ++k) {
        gs.push_back(std::string(1, "AB"[uniform_index(rng, 2)]));
        ps.push_back(std::string(1, "AB"[uniform_index(rng, 2)]));
      }
      g.push_back(gs);
      p.push_back(ps);
    }
    const double before = accuracy(labelled(p), labelled(g), "t");
    std::vector<std::size_t> order(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<std::vector<std::string>> g2, p2;
    for (std::size_t i : order) {
      g2.push_back(g[i]);
      p2.push_back(p[i]);
    }
    CHECK(accuracy(labelled(p2), labelled(g2), "t") == doctest::Approx(before).epsilon(1e-15));
  }
}

TEST_CASE("macro average") {
  CHECK(macro_average(std::vector<double>{0.5}) == 0.5);
  CHECK(macro_average(std::vector<double>{0.0, 1.0}) == 0.5);
  CHECK_THROWS_AS(macro_average(std::vector<double>{}), std::invalid_argument);
  std::vector<double> v{0.1, 0.7, 0.35, 0.9};
  const double m = macro_average(v);
  std::sort(v.begin(), v.end());
  do {
    CHECK(macro_average(v) == doctest::Approx(m).epsilon(1e-15));
  } while (std::next_permutation(v.begin(), v.end()));
}

TEST_CASE("deltas are absolute points and antisymmetric") {
  CHECK(format_fixed2(delta_points(0.7587, 0.6631)) == "9.56");
  CHECK(format_fixed2(delta_points(0.6347, 0.5044)) == "13.03");
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double a = uniform_unit(rng), b = uniform_unit(rng);
    CHECK(delta_points(a, b) == -delta_points(b, a));
  }
}

TEST_CASE("half-up rounding to two decimals") {
  CHECK(format_fixed2(1.005) == "1.01");
  CHECK(format_fixed2(2.675) == "2.68");
  CHECK(format_fixed2(-0.305) == "-0.31");
  CHECK(format_fixed2(-0.001) == "0.00");
  CHECK(format_fixed2(0.0) == "0.00");
  CHECK(format_fixed2(18.15) == "18.15");
}

TEST_CASE("size labels") {
  CHECK(size_label(10000) == "10k");
  CHECK(size_label(1000) == "1k");
  CHECK(size_label(500) == "0.5k");
  CHECK(size_label(100) == "0.1k");
  CHECK(size_label(1500) == "1.5k");
  CHECK(size_label(42) == "42");
}

TEST_CASE("significance: identical predictions give p = 1") {
  const Corpus gold = labelled({{"A", "B"}, {"C"}, {"A"}});
  const Corpus pred = labelled({{"A", "x"}, {"C"}, {"x"}});
  CHECK(significance(pred, pred, gold, "t") == 1.0);
}

TEST_CASE("significance: perfect against all-wrong over 100 sentences") {
  const Corpus gold = uniform(100, "A");
  const Corpus wrong = uniform(100, "B");
  const double p = significance(gold, wrong, gold, "t", 10000, 0);
  CHECK(p < 0.001);
  CHECK(significance(wrong, gold, gold, "t", 10000, 0) == p);
}

TEST_CASE("significance is deterministic per seed and symmetric") {
  Rng rng(8);
  std::vector<std::vector<std::string>> g, a, b;
  for (int i = 0; i < 60; ++i) {
    g.push_back({"A", "B"});
    a.push_back({uniform_unit(rng) < 0.7 ? "A" : "x", uniform_unit(rng) < 0.7 ? "B" : "x"});
    b.push_back({uniform_unit(rng) < 0.6 ? "A" : "x", uniform_unit(rng) < 0.6 ? "B" : "x"});
  }
  const Corpus gold = labelled(g), pa = labelled(a), pb = labelled(b);
  const double p = significance(pa, pb, gold, "t", 2000, 5);
  CHECK(p == significance(pa, pb, gold, "t", 2000, 5));
  CHECK(p == significance(pb, pa, gold, "t", 2000, 5));
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
  CHECK_THROWS_AS(significance(pa, labelled({{"A"}}), gold, "t"), DataError);
}

TEST_CASE("multi-run significance averages runs per sentence") {
  const Corpus gold = uniform(50, "A");
  const Corpus right = uniform(50, "A"), wrong = uniform(50, "B");
  const Corpus* same[] = {&right, &wrong};
  const Corpus* swapped[] = {&wrong, &right};
  CHECK(significance(same, swapped, gold, "t") == 1.0);
  const Corpus* better[] = {&right, &right};
  CHECK(significance(better, same, gold, "t") < 0.001);
}

TEST_CASE("delta rows: equal accuracy is never starred") {
  Metrics base{{"c"}, {0.5}, {}};
  Metrics same{{"c"}, {0.5}, {0.001}};
  const ReportRow row = delta_row(100, base, {{ConditionKind::AuxSt, same}});
  REQUIRE(row.cells[0].second);
  CHECK(row.cells[0].second->delta == 0.0);
  CHECK_FALSE(row.cells[0].second->significant);
}

TEST_CASE("delta rows star on the median per-corpus p-value") {
  Metrics base{{"a", "b", "c"}, {0.5, 0.6, 0.7}, {}};
  Metrics two_of_three{{"a", "b", "c"}, {0.6, 0.7, 0.8}, {0.01, 0.02, 0.9}};
  Metrics one_of_three{{"a", "b", "c"}, {0.6, 0.7, 0.8}, {0.01, 0.2, 0.9}};
  const ReportRow row =
      delta_row(100, base, {{ConditionKind::AuxSt, two_of_three}, {ConditionKind::ExtraAux, one_of_three}});
  CHECK(row.baseline == doctest::Approx(60.0));
  CHECK(row.cells[0].second->significant);
  CHECK_FALSE(row.cells[1].second->significant);
  CHECK(format_fixed2(row.cells[0].second->delta) == "10.00");
}

TEST_CASE("delta rows reject mismatched test corpora") {
  Metrics base{{"a"}, {0.5}, {}};
  Metrics other{{"b"}, {0.6}, {0.01}};
  CHECK_THROWS_AS(delta_row(100, base, {{ConditionKind::AuxSt, other}}), DataError);
}

TEST_CASE("report layout") {
  Metrics base{{"a"}, {0.6631}, {}};
  Metrics st{{"a"}, {0.7587}, {0.001}};
  std::vector<ReportRow> rows{
      delta_row(100, base, {{ConditionKind::AuxStCeiling, std::nullopt}, {ConditionKind::AuxSt, st}})};
  CHECK(format_report(rows) == "N Main\tMTL\tAux-ST ceiling\tAux-ST\n0.1k\t66.31\tn/a\t9.56*\n");
  rows[0].key = "Slavic";
  CHECK(format_report(rows, true) ==
        "Group\tN Main\tMTL\tAux-ST ceiling\tAux-ST\nSlavic\t0.1k\t66.31\tn/a\t9.56*\n");
  CHECK(format_report(std::vector<ReportRow>{delta_row(100, base, {})}) == "N Main\tMTL\n0.1k\t66.31\n");
}

TEST_CASE("published table rows are reproduced from baseline + delta") {
  const auto& rows = test::published_rows();
  const auto& lines = test::published_lines();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& pub = rows[r];
    Metrics base{{pub.block}, {pub.baseline / 100.0}, {}};
    std::vector<std::pair<ConditionKind, std::optional<Metrics>>> conditions;
    for (std::size_t c = 0; c < 4; ++c) {
      const auto& cell = pub.cells[c];
      if (!cell.delta) {
        conditions.emplace_back(kPublished[c], std::nullopt);
        continue;
      }
      const double acc = (pub.baseline + *cell.delta) / 100.0;
      conditions.emplace_back(kPublished[c],
                              Metrics{{pub.block}, {acc}, {cell.significant ? 0.01 : 0.5}});
    }
    const ReportRow row = delta_row(pub.size, base, conditions);
    const std::string text = format_report(std::vector<ReportRow>{row});
    CHECK(text.substr(text.find('\n') + 1) == lines[r] + "\n");
  }
}

TEST_CASE("group maps") {
  const auto groups = parse_group_map("# corpus\tgroup\nUD_Czech\tSlavic\nUD_Finnish\tFinno-Ugric\n");
  CHECK(groups.size() == 2);
  CHECK(groups.at("UD_Czech") == "Slavic");
  CHECK_THROWS_AS(parse_group_map("UD_Czech Slavic\n"), DataError);
}
