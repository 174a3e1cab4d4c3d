#include "support/helpers.h"

#include "auxst/random.h"

namespace auxst::test {

void randomize(ModelParams& params, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (auto& [name, t] : params.tensors()) {
    for (double& v : t.values()) v = uniform_real(rng, -scale, scale);
  }
}

ModelParams small_model(std::uint64_t seed, std::vector<TaskSpec> tasks, ModelDims dims) {
  if (tasks.empty()) {
    tasks.emplace_back("main", std::vector<std::string>{"A", "B", "C"}, TaskRole::Main);
    tasks.emplace_back("aux", std::vector<std::string>{"x", "y"}, TaskRole::Auxiliary);
  }
  Vocabulary vocab({"the", "cat", "sat", "ab", "ba"}, {"a", "b", "c", "e", "h", "s", "t"});
  ModelParams params(dims, std::move(vocab), std::move(tasks), seed);
  randomize(params, seed);
  return params;
}

Sentence sentence(std::vector<std::string> tokens,
                  std::vector<std::pair<std::string, std::vector<std::string>>> labels) {
  Sentence s;
  s.tokens = std::move(tokens);
  for (auto& [task, seq] : labels) s.labels.emplace(task, std::move(seq));
  return s;
}

Corpus corpus(std::string id, std::vector<Sentence> sentences) {
  Corpus c(id);
  std::size_t i = 0;
  for (auto& s : sentences) {
    s.source = id;
    s.index = i++;
    c.add(std::move(s));
  }
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("auxst_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(AUXST_FIXTURES) / name;
}

}  // namespace auxst::test
