#pragma once

#include <cmath>
#include <string>

#include "rwre/env.hpp"

namespace rwre::testing {

inline EnvironmentSpec binary(double a) {
  EnvironmentSpec s;
  s.offspring.support = {{2, 1.0}};
  s.weights.support = {{a, 1.0}};
  return s;
}

inline EnvironmentSpec two_point(double hi, double p_hi, double lo, double p_lo) {
  EnvironmentSpec s;
  s.offspring.support = {{2, 1.0}};
  s.weights.support = {{hi, p_hi}, {lo, p_lo}};
  return s;
}

// N = 2, A in {2 w.p. 0.1, 1/3 w.p. 0.9}.
inline EnvironmentSpec kappa_two() { return two_point(2.0, 0.1, 1.0 / 3.0, 0.9); }

// N = 2, E[sum A] = 1 and E[sum A log A] = 0 (solved offline in extended precision).
inline EnvironmentSpec critical() {
  return two_point(2.0, 0.17933201957987431, 0.17222063515612864, 0.82066798042012569);
}

// N = 2, A in {0.25 w.p. 0.3, 0.45 w.p. 0.7}: psi(1) = log 0.78.
inline EnvironmentSpec mixed_chi_neg() { return two_point(0.45, 0.7, 0.25, 0.3); }

inline EnvironmentSpec offspring_0_3() {
  EnvironmentSpec s;
  s.offspring.support = {{0, 0.1}, {3, 0.9}};
  s.weights.support = {{0.3, 0.5}, {0.35, 0.5}};
  return s;
}

inline std::string env_path(const std::string& name) { return std::string(RWRE_ENV_DIR) + "/" + name; }

}  // namespace rwre::testing
