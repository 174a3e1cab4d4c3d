#include "auxst/gradcheck.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "auxst/errors.h"

namespace auxst {

std::vector<Tensor> finite_difference_gradient(const std::function<double()>& f,
                                               std::span<Tensor* const> params,
                                               double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("finite_difference_gradient: epsilon must be positive");
  }
  auto eval = [&] {
    const double v = f();
    if (!std::isfinite(v)) {
      throw NumericalError("finite_difference_gradient: objective is not finite");
    }
    return v;
  };

  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (Tensor* p : params) {
    Tensor g(p->shape());
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = (*p)[i];
      (*p)[i] = saved + epsilon;
      const double up = eval();
      (*p)[i] = saved - epsilon;
      const double down = eval();
      (*p)[i] = saved;
      g[i] = (up - down) / (2.0 * epsilon);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

GradientAgreement compare_gradients(const Tensor& analytic, const Tensor& numeric,
                                    double rel_tol, double abs_tol, double floor) {
  if (!analytic.same_shape(numeric)) {
    throw std::invalid_argument("compare_gradients: shape mismatch " +
                                analytic.shape_string() + " vs " +
                                numeric.shape_string());
  }
  GradientAgreement out;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double scale = std::max(std::abs(a), std::abs(n));
    const double diff = std::abs(a - n);
    if (!std::isfinite(diff)) {
      out.ok = false;
      out.max_relative_error = INFINITY;
      continue;
    }
    if (scale < floor) {
      out.max_absolute_error = std::max(out.max_absolute_error, diff);
      if (diff >= abs_tol) out.ok = false;
    } else {
      const double rel = diff / scale;
      out.max_relative_error = std::max(out.max_relative_error, rel);
      if (rel >= rel_tol) out.ok = false;
    }
  }
  return out;
}

void merge(GradientAgreement& into, const GradientAgreement& other) {
  into.max_relative_error = std::max(into.max_relative_error, other.max_relative_error);
  into.max_absolute_error = std::max(into.max_absolute_error, other.max_absolute_error);
  into.ok = into.ok && other.ok;
}

}  // namespace auxst
