#include "rwre/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/kernels.hpp"

namespace rwre {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2
constexpr double kKappaCapStart = 4.0;
constexpr double kKappaCapMax = 512.0;

struct LogTerms {
  std::vector<double> log_p;
  std::vector<double> log_a;
};

LogTerms log_terms(const EnvironmentSpec& spec) {
  LogTerms terms;
  for (const auto& [a, p] : spec.weights.support) {
    if (p <= 0.0) continue;
    terms.log_p.push_back(std::log(p));
    terms.log_a.push_back(std::log(a));
  }
  return terms;
}

// log E[A^t] in log-sum-exp form.
double log_weight_moment(const LogTerms& terms, double t) {
  std::vector<double> x(terms.log_p.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = terms.log_p[j] + t * terms.log_a[j];
  return kernels::log_sum_exp(x);
}

template <class F>
double golden_section_argmin(F&& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Root of a function with f(lo) < 0 < f(hi) (or the reverse), to width tol.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  const bool lo_negative = f(lo) < 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kTransient: return "TRANSIENT";
    case Regime::kPositiveRecurrentChiNegative: return "POS_REC_CHI_NEG";
    case Regime::kPositiveRecurrentBoundary: return "POS_REC_BOUNDARY";
    case Regime::kNullRecurrentCritical: return "NULL_REC_CRITICAL";
    case Regime::kNullRecurrentSubdiffusive: return "NULL_REC_SUBDIFFUSIVE";
  }
  return "?";
}

std::string_view to_string(XStarScaling s) {
  switch (s) {
    case XStarScaling::kLogN: return "LOG_N";
    case XStarScaling::kLogNCubed: return "LOG_N_CUBED";
    case XStarScaling::kPoly: return "POLY";
  }
  return "?";
}

double psi(const EnvironmentSpec& spec, double t) {
  return std::log(spec.offspring.mean()) + log_weight_moment(log_terms(spec), t);
}

double psi_prime(const EnvironmentSpec& spec, double t) {
  const LogTerms terms = log_terms(spec);
  std::vector<double> w(terms.log_p.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = terms.log_p[j] + t * terms.log_a[j];
  return kernels::softmax_mean(w, terms.log_a);
}

double chi(const EnvironmentSpec& spec, double tol) {
  const double log_mean = std::log(spec.offspring.mean());
  const LogTerms terms = log_terms(spec);
  auto f = [&](double t) { return log_mean + log_weight_moment(terms, t); };
  const double t_star = golden_section_argmin(f, 0.0, 1.0, tol);
  // The infimum of a convex function on [0,1] is often attained at an endpoint.
  return std::min({f(t_star), f(0.0), f(1.0)});
}

double kappa(const EnvironmentSpec& spec, double tol) {
  const double psi1 = psi(spec, 1.0);
  const double dpsi1 = psi_prime(spec, 1.0);
  if (!(std::abs(psi1) <= tol && dpsi1 < -tol)) {
    throw UsageError("kappa requires |psi(1)| <= tol and psi'(1) < -tol");
  }
  if (spec.weights.max_value() <= 1.0) return kInf;

  const double log_mean = std::log(spec.offspring.mean());
  const LogTerms terms = log_terms(spec);
  auto f = [&](double t) { return log_mean + log_weight_moment(terms, t); };

  double cap = kKappaCapStart;
  while (!(f(cap) > 0.0)) {
    cap *= 2.0;
    if (cap > kKappaCapMax) {
      throw ConfigError("kappa: psi stays non-positive on (1, 512]; environment outside supported range");
    }
  }
  // psi < 0 just right of 1; its minimiser on [1, cap] brackets the root from the left.
  const double t_min = golden_section_argmin(f, 1.0, cap, tol);
  double lo = t_min;
  if (!(f(lo) < 0.0)) {
    // Minimum numerically indistinguishable from 0: the root sits next to 1.
    lo = 1.0;
  }
  return bisect(f, lo, cap, tol);
}

double j_tilde(const EnvironmentSpec& spec, double a, double tol) {
  if (!(a > 0.0)) throw UsageError("j_tilde requires a > 0");
  const double a_min = spec.weights.min_value();
  const double slope_inf = std::log(1.0 / a_min);
  const double log_mean = std::log(spec.offspring.mean());
  if (a > slope_inf) return -kInf;
  if (a == slope_inf) return std::log(spec.offspring.mean() * spec.weights.mass_at_min());

  const LogTerms terms = log_terms(spec);
  auto g = [&](double t) { return log_mean + log_weight_moment(terms, -t) - a * t; };
  auto dg = [&](double t) {
    std::vector<double> w(terms.log_p.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = terms.log_p[j] - t * terms.log_a[j];
    return -kernels::softmax_mean(w, terms.log_a) - a;
  };
  if (dg(0.0) >= 0.0) return g(0.0);
  double hi = 1.0;
  while (dg(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("j_tilde: failed to bracket the minimiser");
  }
  const double t_star = golden_section_argmin(g, 0.0, hi, tol);
  return std::min(g(t_star), g(0.0));
}

double gamma_tilde(const EnvironmentSpec& spec, double tol) {
  if (chi(spec, tol) > tol) throw UsageError("gamma_tilde requires a recurrent environment (chi <= tol)");
  const double slope_inf = std::log(1.0 / spec.weights.min_value());
  if (j_tilde(spec, slope_inf, tol) > 0.0) return slope_inf;
  // J~ is nonincreasing with J~(0+) = psi(0) > 0 and J~(slope_inf) <= 0.
  auto f = [&](double a) { return j_tilde(spec, a, tol) > 0.0 ? -1.0 : 1.0; };
  return bisect(f, 0.0 + std::numeric_limits<double>::min(), slope_inf, tol);
}

RegimeReport classify(const EnvironmentSpec& spec, double tol) {
  require_valid(spec);
  RegimeReport r;
  r.psi0 = psi(spec, 0.0);
  r.psi1 = psi(spec, 1.0);
  r.chi = chi(spec, tol);
  r.psi_prime_1 = psi_prime(spec, 1.0);

  if (r.chi > tol) {
    r.regime = Regime::kTransient;
    return r;
  }
  if (r.chi < -tol) {
    r.regime = Regime::kPositiveRecurrentChiNegative;
  } else if (r.psi_prime_1 > tol) {
    r.regime = Regime::kPositiveRecurrentBoundary;
  } else if (r.psi_prime_1 >= -tol) {
    r.regime = Regime::kNullRecurrentCritical;
  } else {
    r.regime = Regime::kNullRecurrentSubdiffusive;
  }

  const double gt = gamma_tilde(spec, tol);
  r.gamma_tilde = gt;
  auto& p = r.predicted;
  p.rtilde_limit = 1.0 / gt;
  switch (r.regime) {
    case Regime::kPositiveRecurrentChiNegative:
      p.r_limit = 1.0 / gt;
      p.root_local_time_exponent = 1.0;
      p.xstar_scaling = XStarScaling::kLogN;
      break;
    case Regime::kPositiveRecurrentBoundary:
    case Regime::kNullRecurrentCritical:
      p.r_limit = 1.0 / gt;
      p.root_local_time_exponent = 1.0;
      p.xstar_scaling = XStarScaling::kLogNCubed;
      break;
    case Regime::kNullRecurrentSubdiffusive: {
      const double k = kappa(spec, tol);
      r.kappa = k;
      const double k2 = std::min(k, 2.0);
      p.r_limit = 1.0 / (gt * k2);
      p.root_local_time_exponent = 1.0 / k2;
      p.xstar_scaling = XStarScaling::kPoly;
      p.nu_prime = 1.0 / k2;
      p.nu = 1.0 - 1.0 / k2;
      break;
    }
    case Regime::kTransient:
      break;
  }
  return r;
}

}  // namespace rwre
