#pragma once

#include <optional>
#include <string>
#include <vector>

namespace auxst::test {

// Published macro-averaged results: baseline accuracy and per-condition
// deltas (percentage points) for Aux-ST ceiling, Aux-ST, Extra Aux and
// Extra Main, with significance marks.
struct PublishedCell {
  std::optional<double> delta;  // absent: not available
  bool significant = false;
};

struct PublishedRow {
  std::string block;
  std::size_t size;
  double baseline;
  PublishedCell cells[4];
};

inline const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows = {
      {"deprel", 10000, 86.39, {{3.79, true}, {1.97, true}, {-0.30, false}, {0.19, false}}},
      {"deprel", 1000, 79.19, {{7.42, true}, {5.39, true}, {1.74, true}, {7.01, true}}},
      {"deprel", 500, 75.77, {{8.69, true}, {6.85, true}, {2.64, true}, {10.17, true}}},
      {"deprel", 100, 66.31, {{11.32, true}, {9.56, true}, {4.97, true}, {18.15, true}}},
      {"semtag", 1000, 67.82, {{std::nullopt, false}, {1.74, true}, {0.05, false}, {0.64, false}}},
      {"semtag", 500, 63.32, {{std::nullopt, false}, {4.60, true}, {0.83, false}, {2.31, true}}},
      {"semtag", 100, 50.44, {{std::nullopt, false}, {13.03, true}, {4.93, true}, {11.58, true}}},
  };
  return rows;
}

// The same rows as they appear in the published table, one line per row.
inline const std::vector<std::string>& published_lines() {
  static const std::vector<std::string> lines = {
      "10k\t86.39\t3.79*\t1.97*\t-0.30\t0.19",
      "1k\t79.19\t7.42*\t5.39*\t1.74*\t7.01*",
      "0.5k\t75.77\t8.69*\t6.85*\t2.64*\t10.17*",
      "0.1k\t66.31\t11.32*\t9.56*\t4.97*\t18.15*",
      "1k\t67.82\tn/a\t1.74*\t0.05\t0.64",
      "0.5k\t63.32\tn/a\t4.60*\t0.83\t2.31*",
      "0.1k\t50.44\tn/a\t13.03*\t4.93*\t11.58*",
  };
  return lines;
}

}  // namespace auxst::test
