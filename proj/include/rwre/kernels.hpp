#pragma once

// Data-parallel reductions used by the regime, exact and brw modules.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA
// variant. The variant is picked once per process from CPUID; setting the
// environment variable RWRE_SIMD=scalar forces the reference path.
//
// The two paths agree to a few ulps (summation order and the polynomial exp
// differ); tests/test_kernels.cpp pins the tolerance.

#include <cstddef>
#include <span>

namespace rwre::kernels {

struct KernelTable {
  const char* name;
  // log(sum exp(x_i)); -inf for an empty input.
  double (*log_sum_exp)(const double* x, std::size_t n);
  // sum exp(w_i) v_i / sum exp(w_i), computed with the max of w factored out.
  double (*softmax_mean)(const double* w, const double* v, std::size_t n);
  // sum over i with x_i >= threshold of exp(-x_i - shift).
  double (*tilted_sum_above)(const double* x, std::size_t n, double shift, double threshold);
  // max x_i; -inf for an empty input.
  double (*max_value)(const double* x, std::size_t n);
  // out_i = exp(x_i); exposed for equivalence testing.
  void (*exp_array)(const double* x, double* out, std::size_t n);
};

const KernelTable& scalar();

// Null when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2();

// The table selected for this process.
const KernelTable& active();

inline double log_sum_exp(std::span<const double> x) { return active().log_sum_exp(x.data(), x.size()); }

inline double softmax_mean(std::span<const double> w, std::span<const double> v) {
  return active().softmax_mean(w.data(), v.data(), w.size());
}

inline double tilted_sum_above(std::span<const double> x, double shift, double threshold) {
  return active().tilted_sum_above(x.data(), x.size(), shift, threshold);
}

inline double max_value(std::span<const double> x) { return active().max_value(x.data(), x.size()); }

namespace detail {
const KernelTable* avx2_table_if_built();
}  // namespace detail

}  // namespace rwre::kernels
