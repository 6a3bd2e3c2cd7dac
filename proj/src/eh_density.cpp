#include "ehvac/eh_density.hpp"

#include <cmath>
#include <stdexcept>

namespace ehvac {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kPrefactor = 1.0 / (8.0 * kPi * kPi);

ProperTimeWeight mass_weight(double mass) {
  const double msq = mass * mass;
  ProperTimeWeight w;
  w.w = [msq](double s) { return std::exp(-msq * s); };
  w.decay_rate = msq;
  w.small_s_order = 0;
  return w;
}
}  // namespace

QuadResult f_eh_quad(double x, double mass, const QuadratureConfig& cfg) {
  if (!(mass > 0.0)) throw std::domain_error("f_eh: requires mass > 0");
  if (!(x >= 0.0)) throw std::domain_error("f_eh: requires x >= 0");
  if (x == 0.0) {
    QuadResult r;
    r.converged = true;
    return r;
  }
  ProperTimeIntegrand g;
  g.g = [x](double s) { return coth_reduced_sub(s * x); };
  g.small_s_order = 4;
  g.large_s_power = 2;
  QuadratureConfig local = cfg;
  local.split_point = std::min(1.0 / x, 1.0 / (mass * mass));
  QuadResult r = proper_time_integrate(g, 3.0, mass_weight(mass), local);
  r.value *= kPrefactor;
  r.abs_error *= kPrefactor;
  return r;
}

double f_eh(double x, double mass, const QuadratureConfig& cfg) {
  return quad_value(f_eh_quad(x, mass, cfg), "f_eh");
}

double f_eh_deriv(double x, double mass, const QuadratureConfig& cfg) {
  if (!(mass > 0.0)) throw std::domain_error("f_eh_deriv: requires mass > 0");
  if (!(x >= 0.0)) throw std::domain_error("f_eh_deriv: requires x >= 0");
  if (x == 0.0) return 0.0;
  // d/dx of the integrand replaces the reduced kernel by its derivative in
  // the first argument times s; one power of s moves from s^-3 to s^-2.
  ProperTimeIntegrand g;
  g.g = [x](double s) { return coth_reduced_sub_deriv(s * x); };
  g.small_s_order = 3;
  g.large_s_power = 1;
  QuadratureConfig local = cfg;
  local.split_point = std::min(1.0 / x, 1.0 / (mass * mass));
  QuadResult r = proper_time_integrate(g, 2.0, mass_weight(mass), local);
  return quad_value(r, "f_eh_deriv") * kPrefactor;
}

double f_eh_orthogonal(double x_e, double x_b, double mass, const QuadratureConfig& cfg) {
  if (!(x_e >= 0.0) || !(x_b >= 0.0))
    throw std::domain_error("f_eh_orthogonal: requires x_e >= 0 and x_b >= 0");
  if (x_e == 0.0 && x_b == 0.0) return 0.0;
  if (x_e >= x_b)
    throw std::domain_error(
        "f_eh_orthogonal: requires x_e < x_b (electric-dominated backgrounds unsupported)");
  const double invariant = std::sqrt((x_b - x_e) * (x_b + x_e));
  return f_eh(invariant, mass, cfg);
}

double eh_series_coefficient(int n, double mass) {
  if (n < 2) throw std::domain_error("eh_series_coefficient: requires n >= 2");
  if (!(mass > 0.0)) throw std::domain_error("eh_series_coefficient: requires mass > 0");
  // a_n = (mass^4/8 pi^2) B_{2n} / (2n (2n-1)(2n-2)) * (2/mass^2)^{2n}
  const double b2n = bernoulli_even_value(n);
  const double denom = 2.0 * n * (2.0 * n - 1.0) * (2.0 * n - 2.0);
  const double ratio = std::pow(2.0 / (mass * mass), 2.0 * n);
  return (mass * mass * mass * mass) * kPrefactor * b2n / denom * ratio;
}

EhSeries eh_taylor_series(double mass, int n_max) {
  if (n_max < 2 || n_max > 64)
    throw std::domain_error("eh_taylor_series: requires 2 <= n_max <= 64");
  EhSeries ser;
  ser.mass = mass;
  ser.n_max = n_max;
  ser.coeffs.assign(static_cast<size_t>(n_max) + 1, 0.0);
  for (int n = 2; n <= n_max; ++n) ser.coeffs[static_cast<size_t>(n)] = eh_series_coefficient(n, mass);
  return ser;
}

TruncatedEval optimal_truncation_eval(double x, double mass, int n_max) {
  if (!(mass > 0.0)) throw std::domain_error("optimal_truncation_eval: requires mass > 0");
  if (!(x >= 0.0) || x > 0.3 * mass * mass)
    throw std::domain_error("optimal_truncation_eval: requires 0 <= x <= 0.3 * mass^2");
  if (n_max < 2 || n_max > 64)
    throw std::domain_error("optimal_truncation_eval: requires 2 <= n_max <= 64");
  TruncatedEval out;
  if (x == 0.0) {
    out.value = 0.0;
    out.order_used = 4;
    out.error_estimate = 0.0;
    return out;
  }
  long double sum = 0.0L;
  double prev_mag = 0.0;
  int n = 2;
  for (; n <= n_max; ++n) {
    const double term = eh_series_coefficient(n, mass) * std::pow(x, 2.0 * n);
    const double mag = std::abs(term);
    if (n > 2 && mag >= prev_mag) {
      out.error_estimate = mag;  // first omitted term
      break;
    }
    sum += static_cast<long double>(term);
    out.order_used = 2 * n;
    prev_mag = mag;
  }
  if (n > n_max) {
    // Ran off the table while still decreasing: estimate with the next term.
    out.error_estimate = (n_max < 64)
                             ? std::abs(eh_series_coefficient(n_max + 1, mass) *
                                        std::pow(x, 2.0 * (n_max + 1)))
                             : prev_mag;
  }
  out.value = static_cast<double>(sum);
  return out;
}

}  // namespace ehvac
