#include <cmath>
#include <limits>

#include "rwre/kernels.hpp"

namespace rwre::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_value_ref(const double* x, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double log_sum_exp_ref(const double* x, std::size_t n) {
  const double m = max_value_ref(x, n);
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(x[i] - m);
  return m + std::log(sum);
}

double softmax_mean_ref(const double* w, const double* v, std::size_t n) {
  const double m = max_value_ref(w, n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(w[i] - m);
    num += e * v[i];
    den += e;
  }
  return num / den;
}

double tilted_sum_above_ref(const double* x, std::size_t n, double shift, double threshold) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] >= threshold) sum += std::exp(-x[i] - shift);
  }
  return sum;
}

void exp_array_ref(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

constexpr KernelTable kScalar{
    "scalar", &log_sum_exp_ref, &softmax_mean_ref, &tilted_sum_above_ref, &max_value_ref, &exp_array_ref,
};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace rwre::kernels
