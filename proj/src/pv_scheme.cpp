#include "ehvac/pv_scheme.hpp"

#include <cmath>
#include <stdexcept>

#include "ehvac/eh_density.hpp"

namespace ehvac {

PvScheme make_scheme(double m0, double m1, double m2) {
  if (!(m0 > 0.0) || !(m1 > m0) || !(m2 > m1))
    throw std::domain_error("make_scheme: requires 0 < m0 < m1 < m2");
  PvScheme sch;
  sch.m0 = m0;
  sch.m1 = m1;
  sch.m2 = m2;
  const double s0 = m0 * m0, s1 = m1 * m1, s2 = m2 * m2;
  sch.c0 = 1.0;
  sch.c1 = -(s2 - s0) / (s2 - s1);
  sch.c2 = (s1 - s0) / (s2 - s1);
  sch.log_lambda = -(std::log(m0) + sch.c1 * std::log(m1) + sch.c2 * std::log(m2));
  return sch;
}

double pv_weight(const PvScheme& sch, double s) {
  const double y0 = s * sch.m0 * sch.m0;
  const double y1 = s * sch.m1 * sch.m1;
  const double y2 = s * sch.m2 * sch.m2;
  // The k=0 and k=1 Taylor terms of c0 e^{-y0} + c1 e^{-y1} + c2 e^{-y2}
  // vanish by construction of the coefficients, so for small arguments the
  // direct sum loses all significant digits (the true value is O(s^2) while
  // each term is O(1)).  Sum the Taylor series from k=2 instead; every term
  // is bounded by y2^k / k!, so no cancellation amplification remains.
  if (y2 <= 0.5) {
    long double t0 = y0 * y0, t1 = y1 * y1, t2 = y2 * y2;  // y^k at k=2
    long double acc = 0.0L, fact = 2.0L;                    // k! at k=2
    double sign = 1.0;
    for (int k = 2; k <= 40; ++k) {
      const long double term =
          sign * (sch.c0 * t0 + sch.c1 * t1 + sch.c2 * t2) / fact;
      acc += term;
      if (std::fabs((double)term) <= 1e-22 * std::fabs((double)acc)) break;
      t0 *= y0;
      t1 *= y1;
      t2 *= y2;
      fact *= k + 1;
      sign = -sign;
    }
    return (double)acc;
  }
  return sch.c0 * std::exp(-y0) + sch.c1 * std::exp(-y1) + sch.c2 * std::exp(-y2);
}

ProperTimeWeight pv_weight_spec(const PvScheme& sch) {
  ProperTimeWeight w;
  w.w = [sch](double s) { return pv_weight(sch, s); };
  w.decay_rate = sch.m0 * sch.m0;
  w.small_s_order = 2;
  return w;
}

double pv_resolvent_weight(const PvScheme& sch, double x) {
  if (!(x >= 0.0)) throw std::domain_error("pv_resolvent_weight: requires x >= 0");
  return sch.c0 / (x + sch.m0 * sch.m0) + sch.c1 / (x + sch.m1 * sch.m1) +
         sch.c2 / (x + sch.m2 * sch.m2);
}

double pv_resolvent_weight_rational(const PvScheme& sch, double x) {
  if (!(x >= 0.0))
    throw std::domain_error("pv_resolvent_weight_rational: requires x >= 0");
  const double s0 = sch.m0 * sch.m0, s1 = sch.m1 * sch.m1, s2 = sch.m2 * sch.m2;
  // Partial-fraction recombination around the pole at -m0^2:
  //   sum_j c_j/(x+m_j^2) = sum_{j>0} c_j (m_j^2-m0^2)^2 / ((x+m_j^2)(x+m0^2)^2)
  // which follows from c_j/(x+s_j) - c_j/(x+s_0) + c_j (s_j-s_0)/(x+s_0)^2
  // summing to zero against the two coefficient conditions.
  const double d0 = x + s0;
  const double t1 = sch.c1 * (s1 - s0) * (s1 - s0) / ((x + s1) * d0 * d0);
  const double t2 = sch.c2 * (s2 - s0) * (s2 - s0) / ((x + s2) * d0 * d0);
  return t1 + t2;
}

double pv_mass_sqrt_sum(const PvScheme& sch, double lambda) {
  if (!(lambda + sch.m0 * sch.m0 >= 0.0))
    throw std::domain_error("pv_mass_sqrt_sum: lambda + m0^2 must be >= 0");
  return sch.c0 * std::sqrt(lambda + sch.m0 * sch.m0) +
         sch.c1 * std::sqrt(lambda + sch.m1 * sch.m1) +
         sch.c2 * std::sqrt(lambda + sch.m2 * sch.m2);
}

double pv_longitudinal_weight(const PvScheme& sch, double lambda) {
  if (!(lambda + sch.m0 * sch.m0 > 0.0))
    throw std::domain_error("pv_longitudinal_weight: lambda + m0^2 must be > 0");
  const double a0 = lambda + sch.m0 * sch.m0;
  const double a1 = lambda + sch.m1 * sch.m1;
  const double a2 = lambda + sch.m2 * sch.m2;
  constexpr double kQuarterInvPi = 1.0 / (4.0 * 3.14159265358979323846);
  return kQuarterInvPi *
         (sch.c0 * a0 * std::log(a0) + sch.c1 * a1 * std::log(a1) + sch.c2 * a2 * std::log(a2));
}

QuadResult f_pv_quad(const PvScheme& sch, double x, const QuadratureConfig& cfg) {
  if (!(x >= 0.0)) throw std::domain_error("f_pv: requires x >= 0");
  if (x == 0.0) {
    QuadResult r;
    r.converged = true;
    return r;
  }
  ProperTimeIntegrand g;
  g.g = [x](double s) { return coth_reduced(s * x); };
  g.small_s_order = 2;
  g.large_s_power = 1;
  QuadratureConfig local = cfg;
  local.split_point = std::min(1.0 / x, 1.0 / (sch.m0 * sch.m0));
  QuadResult r = proper_time_integrate(g, 3.0, pv_weight_spec(sch), local);
  constexpr double kPi = 3.14159265358979323846;
  const double pref = 1.0 / (8.0 * kPi * kPi);
  r.value *= pref;
  r.abs_error *= pref;
  return r;
}

double f_pv(const PvScheme& sch, double x, const QuadratureConfig& cfg) {
  return quad_value(f_pv_quad(sch, x, cfg), "f_pv");
}

double relation_quadratic_coefficient(const PvScheme& sch) {
  constexpr double kPi = 3.14159265358979323846;
  return sch.log_lambda / (12.0 * kPi * kPi);
}

RelationBreakdown relation_residual(const PvScheme& sch, double x, const QuadratureConfig& cfg) {
  if (!(x >= 0.0)) throw std::domain_error("relation_residual: requires x >= 0");
  RelationBreakdown out;
  out.f_pv_value = f_pv(sch, x, cfg);
  const double m0sq = sch.m0 * sch.m0;
  const double r1 = sch.m1 * sch.m1 / m0sq;  // mass ratios squared
  const double r2 = sch.m2 * sch.m2 / m0sq;
  const double base = f_eh(x, sch.m0, cfg);
  const double t1 = sch.c1 * (r1 * r1) * f_eh(x / r1, sch.m0, cfg);
  const double t2 = sch.c2 * (r2 * r2) * f_eh(x / r2, sch.m0, cfg);
  out.eh_sum = base + t1 + t2;
  out.quadratic_term = relation_quadratic_coefficient(sch) * x * x;
  out.residual = out.f_pv_value - out.eh_sum - out.quadratic_term;
  out.scale = std::max({std::abs(out.f_pv_value), std::abs(base), std::abs(t1), std::abs(t2),
                        std::abs(out.quadratic_term)});
  return out;
}

}  // namespace ehvac
