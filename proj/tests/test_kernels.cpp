#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rwre/kernels.hpp"

using namespace rwre;
namespace k = rwre::kernels;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const auto& s = k::scalar();
  const std::vector<double> x{0.0, std::log(3.0)};
  CHECK(s.log_sum_exp(x.data(), 2) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(s.log_sum_exp(nullptr, 0) == -kInf);
  CHECK(s.max_value(nullptr, 0) == -kInf);
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(s.log_sum_exp(big.data(), 2) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  const std::vector<double> w{0.0, std::log(3.0)};
  const std::vector<double> v{1.0, 5.0};
  CHECK(s.softmax_mean(w.data(), v.data(), 2) == doctest::Approx(4.0).epsilon(1e-15));
  const std::vector<double> t{0.0, 1.0, 2.0};
  CHECK(s.tilted_sum_above(t.data(), 3, 0.5, 1.0) == doctest::Approx(std::exp(-1.5) + std::exp(-2.5)).epsilon(1e-15));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const auto* a = k::avx2();
  if (a == nullptr) {
    MESSAGE("AVX2 variant not available on this build or CPU");
    return;
  }
  const auto& s = k::scalar();
  std::mt19937_64 rng(2024);
  for (std::size_t n = 0; n <= 67; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      auto x = random_vector(rng, n, -40.0, 40.0);
      auto v = random_vector(rng, n, -3.0, 3.0);
      CHECK(close(a->log_sum_exp(x.data(), n), s.log_sum_exp(x.data(), n), 1e-13));
      CHECK(a->max_value(x.data(), n) == s.max_value(x.data(), n));
      if (n > 0) CHECK(close(a->softmax_mean(x.data(), v.data(), n), s.softmax_mean(x.data(), v.data(), n), 1e-12));
      const double thr = n ? x[n / 2] : 0.0;
      const double ts = s.tilted_sum_above(x.data(), n, 0.3, thr);
      CHECK(close(a->tilted_sum_above(x.data(), n, 0.3, thr), ts, 1e-13 * std::max(1.0, ts)));
    }
  }
}

TEST_CASE("AVX2 exp over the full double range") {
  const auto* a = k::avx2();
  if (a == nullptr) return;
  std::vector<double> x;
  for (double t = -760.0; t <= 720.0; t += 0.37) x.push_back(t);
  x.push_back(-kInf);
  x.push_back(0.0);
  x.push_back(-0.0);
  x.push_back(709.78);
  x.push_back(-708.39);
  std::vector<double> out(x.size());
  a->exp_array(x.data(), out.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ref = std::exp(x[i]);
    if (std::isinf(ref)) {
      CHECK(std::isinf(out[i]));
    } else if (ref < 1e-300) {
      CHECK(out[i] >= 0.0);
      CHECK(out[i] <= 1e-300);
    } else {
      CHECK(std::abs(out[i] - ref) <= 4e-16 * ref);
    }
  }
}

TEST_CASE("active table is one of the two variants") {
  const auto& act = k::active();
  CHECK((&act == &k::scalar() || &act == k::avx2()));
  MESSAGE("active kernels: " << act.name);
}
