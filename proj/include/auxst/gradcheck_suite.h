#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auxst/gradcheck.h"

namespace auxst {

struct OperatorCheck {
  std::string name;  // operator name, or "two_layer_tanh" / "full_model"
  GradientAgreement agreement;
  std::size_t parameters = 0;
};

struct GradcheckReport {
  std::vector<OperatorCheck> checks;
  bool ok() const;
};

inline constexpr double kGradcheckEpsilon = 1e-5;

// Autodiff against central differences for every differentiable operator
// on random inputs in [-1, 1], a random two-layer tanh network and a small
// random tagger (two tasks, under 5k parameters).
GradcheckReport run_gradient_checks(std::uint64_t seed);

// One line per check: name, parameter count, max relative and absolute
// error, PASS/FAIL.
std::string format_gradcheck(const GradcheckReport& report);

}  // namespace auxst
