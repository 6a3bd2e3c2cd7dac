#pragma once

// Three-mass regulator scheme: coefficients c_j are fixed by the two
// cancellation conditions
//     c_0 + c_1 + c_2 = 0,       c_0 m_0^2 + c_1 m_1^2 + c_2 m_2^2 = 0,
// with c_0 = 1, which make the regulated weight sum_j c_j exp(-s m_j^2)
// vanish to second order at s = 0.  The averaged cutoff is
//     log Lambda = -(c_0 log m_0 + c_1 log m_1 + c_2 log m_2).

#include "ehvac/quadrature.hpp"

namespace ehvac {

struct PvScheme {
  double m0 = 1.0, m1 = 2.0, m2 = 3.0;
  double c0 = 1.0, c1 = 0.0, c2 = 0.0;
  double log_lambda = 0.0;
};

// Requires 0 < m0 < m1 < m2 (strict); throws std::domain_error otherwise.
PvScheme make_scheme(double m0, double m1, double m2);

// sum_j c_j exp(-s m_j^2); O(s^2) at s = 0 by the two conditions above.
double pv_weight(const PvScheme& sch, double s);

// The same weight packaged for proper_time_integrate (decay rate m0^2,
// small-s order 2).
ProperTimeWeight pv_weight_spec(const PvScheme& sch);

// sum_j c_j/(x + m_j^2) for x >= 0: O(x^-3) at infinity by the same two
// conditions.
double pv_resolvent_weight(const PvScheme& sch, double x);

// Algebraically equivalent single-fraction form of pv_resolvent_weight; the
// j = 0 term drops out identically:
//   sum_{j=1,2} c_j (m_j^2 - m0^2)^2 / ((x + m_j^2)(x + m0^2)^2)
// Used as the cross-check route for the resolvent identity.
double pv_resolvent_weight_rational(const PvScheme& sch, double x);

// sum_j c_j sqrt(lambda + m_j^2); O(lambda^-3/2) at infinity.
double pv_mass_sqrt_sum(const PvScheme& sch, double lambda);

// (1/4pi) sum_j c_j (lambda + m_j^2) log(lambda + m_j^2): the per-eigenvalue
// weight of a transverse (2d) spectrum once the longitudinal momentum
// integral has been carried out analytically.  Nonnegative and convex in
// lambda; O(lambda^-1) at infinity.
double pv_longitudinal_weight(const PvScheme& sch, double lambda);

// Regulated vacuum-energy density of a constant field, x = e|B|:
//   f_pv(x) = (1/8 pi^2) integral_0^inf w(s) (s x coth(s x) - 1) s^-3 ds.
// Nonnegative, convex, increasing; ~ x^2 logLambda/(12 pi^2) for x -> 0 and
// ~ x (1/8 pi^2) sum_j c_j m_j^2 log m_j^2 for x -> inf.
double f_pv(const PvScheme& sch, double x, const QuadratureConfig& cfg = QuadratureConfig{});
QuadResult f_pv_quad(const PvScheme& sch, double x, const QuadratureConfig& cfg = QuadratureConfig{});

// Quadratic coefficient connecting the regulated and unregulated densities:
// q = 2 logLambda/(24 pi^2) = logLambda/(12 pi^2).  (The factor 2 comes from
// integral_0^inf w(s)/s ds = -sum_j c_j log m_j^2 = 2 logLambda.)
double relation_quadratic_coefficient(const PvScheme& sch);

struct RelationBreakdown {
  double f_pv_value = 0.0;        // direct regulated density
  double eh_sum = 0.0;            // f_eh(x) + sum_{j=1,2} c_j (m_j^4/m0^4) f_eh(m0^2 x/m_j^2)
  double quadratic_term = 0.0;    // logLambda/(12 pi^2) * x^2
  double residual = 0.0;          // f_pv_value - eh_sum - quadratic_term
  double scale = 0.0;             // max magnitude among the compared pieces
};

// Dual-route identity check: the direct regulated quadrature against the
// rescaled unregulated densities plus the quadratic term.  The residual is
// pure numerical error; |residual|/scale is the meaningful relative figure.
RelationBreakdown relation_residual(const PvScheme& sch, double x,
                                    const QuadratureConfig& cfg = QuadratureConfig{});

}  // namespace ehvac
