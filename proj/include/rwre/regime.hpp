#pragma once

// psi(t) = log E[sum_{i<=N} A_i^t] and the constants derived from it.

#include <optional>
#include <string_view>

#include "rwre/env.hpp"

namespace rwre {

inline constexpr double kDefaultRegimeTolerance = 1e-9;

enum class Regime {
  kTransient,
  kPositiveRecurrentChiNegative,
  kPositiveRecurrentBoundary,
  kNullRecurrentCritical,
  kNullRecurrentSubdiffusive,
};

enum class XStarScaling { kLogN, kLogNCubed, kPoly };

std::string_view to_string(Regime r);
std::string_view to_string(XStarScaling s);

// Limit constants; unset fields do not apply to the regime.
struct PredictedConstants {
  std::optional<double> r_limit;       // lim R_n / log n
  std::optional<double> rtilde_limit;  // lim R~_n / log n = 1/gamma~
  std::optional<double> root_local_time_exponent;
  std::optional<XStarScaling> xstar_scaling;
  std::optional<double> nu;        // 1 - 1/min(kappa,2), subdiffusive regime only
  std::optional<double> nu_prime;  // 1/min(kappa,2), subdiffusive regime only
};

struct RegimeReport {
  double psi0 = 0;
  double psi1 = 0;
  double chi = 0;
  double psi_prime_1 = 0;
  std::optional<double> kappa;        // may be +inf; set only in the subdiffusive regime
  std::optional<double> gamma_tilde;  // set only in recurrent regimes
  Regime regime = Regime::kTransient;
  PredictedConstants predicted;
};

double psi(const EnvironmentSpec& spec, double t);
double psi_prime(const EnvironmentSpec& spec, double t);

// inf over [0,1] of psi.
double chi(const EnvironmentSpec& spec, double tol = kDefaultRegimeTolerance);

// inf{t > 1 : psi(t) = 0}, possibly +inf. Requires |psi(1)| <= tol and psi'(1) < -tol.
double kappa(const EnvironmentSpec& spec, double tol = kDefaultRegimeTolerance);

// inf_{t >= 0} psi(-t) - a t, possibly -inf. Requires a > 0.
double j_tilde(const EnvironmentSpec& spec, double a, double tol = kDefaultRegimeTolerance);

// sup{a : J~(a) > 0}. Requires a recurrent spec (chi <= tol).
double gamma_tilde(const EnvironmentSpec& spec, double tol = kDefaultRegimeTolerance);

RegimeReport classify(const EnvironmentSpec& spec, double tol = kDefaultRegimeTolerance);

}  // namespace rwre
