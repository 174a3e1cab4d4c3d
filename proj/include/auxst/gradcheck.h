#pragma once

#include <functional>
#include <span>
#include <vector>

#include "auxst/tensor.h"

namespace auxst {

// Central differences (f(p+eps) - f(p-eps)) / (2 eps), one coordinate at a
// time. `f` reads the tensors in `params`, which are perturbed in place and
// restored before returning. Throws NumericalError if f is ever non-finite.
std::vector<Tensor> finite_difference_gradient(const std::function<double()>& f,
                                               std::span<Tensor* const> params,
                                               double epsilon);

struct GradientAgreement {
  double max_relative_error = 0.0;  // over coordinates with magnitude >= floor
  double max_absolute_error = 0.0;  // over coordinates below floor
  bool ok = true;
};

// Relative error |a - n| / max(|a|, |n|) must stay under `rel_tol`; where
// both magnitudes are under `floor`, the absolute error must stay under
// `abs_tol` instead.
GradientAgreement compare_gradients(const Tensor& analytic, const Tensor& numeric,
                                    double rel_tol = 1e-4, double abs_tol = 1e-7,
                                    double floor = 1e-4);

void merge(GradientAgreement& into, const GradientAgreement& other);

}  // namespace auxst
