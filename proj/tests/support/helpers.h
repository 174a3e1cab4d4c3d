#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "auxst/corpus.h"
#include "auxst/model.h"
#include "auxst/task.h"

namespace auxst::test {

// Every tensor redrawn uniformly from [-scale, scale].
void randomize(ModelParams& params, std::uint64_t seed, double scale = 0.5);

ModelParams small_model(std::uint64_t seed, std::vector<TaskSpec> tasks = {},
                        ModelDims dims = {6, 4, 5, 7});

Sentence sentence(std::vector<std::string> tokens,
                  std::vector<std::pair<std::string, std::vector<std::string>>> labels = {});
Corpus corpus(std::string id, std::vector<Sentence> sentences);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::filesystem::path fixture(const std::string& name);

}  // namespace auxst::test
