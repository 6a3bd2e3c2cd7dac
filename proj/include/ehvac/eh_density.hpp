#pragma once

// Renormalized one-loop vacuum-energy density of a constant magnetic field
// (x = e|B|, electron mass m):
//
//   f_eh(x) = (1/8 pi^2) integral_0^inf exp(-m^2 s)
//                (s x coth(s x) - 1 - (s x)^2/3) s^-3 ds
//
// Nonpositive, concave in x^2; ~ -x^4/(360 pi^2 m^4) for x -> 0 and
// ~ -x^2 log x/(24 pi^2) for x -> inf.  The divergent asymptotic series at
// x = 0 has coefficients built from even Bernoulli numbers and is summed here
// to its optimal truncation point.

#include <vector>

#include "ehvac/quadrature.hpp"

namespace ehvac {

// Quadrature route.  Requires x >= 0, mass > 0; f_eh(0) = 0 exactly.
double f_eh(double x, double mass, const QuadratureConfig& cfg = QuadratureConfig{});
QuadResult f_eh_quad(double x, double mass, const QuadratureConfig& cfg = QuadratureConfig{});

// d f_eh/dx via differentiation under the integral; f_eh_deriv(0) = 0.
double f_eh_deriv(double x, double mass, const QuadratureConfig& cfg = QuadratureConfig{});

// Constant crossed electric/magnetic background with E.B = 0 and
// x_e = e|E| < x_b = e|B|: the proper-time kernel depends only on the
// Lorentz invariant through sqrt(x_b^2 - x_e^2):
//   f_eh_orthogonal(x_e, x_b) = f_eh(sqrt(x_b^2 - x_e^2)).
// Throws std::domain_error when x_e >= x_b > 0 (no convergent proper-time
// representation in that regime).
double f_eh_orthogonal(double x_e, double x_b, double mass,
                       const QuadratureConfig& cfg = QuadratureConfig{});

// Asymptotic series at x = 0:  f_eh(x) ~ sum_{n>=2} a_n x^{2n} with
//   a_n = (mass^4/8 pi^2) * B_{2n} / (2n (2n-1)(2n-2)) * (2/mass^2)^{2n},
// sign(a_n) = (-1)^{n+1}; the series has radius of convergence zero.
struct EhSeries {
  double mass = 1.0;
  int n_max = 0;                // largest n included (order x^{2 n_max})
  std::vector<double> coeffs;   // coeffs[n] multiplies x^{2n}; entries 0,1 are zero
};
EhSeries eh_taylor_series(double mass, int n_max);
double eh_series_coefficient(int n, double mass);  // a_n, n >= 2

struct TruncatedEval {
  double value = 0.0;           // partial sum through the smallest term
  int order_used = 4;           // 2n of the last term kept
  double error_estimate = 0.0;  // magnitude of the first omitted term
};

// Sums the divergent series to its optimal truncation point: terms are added
// while their magnitude decreases, stopping before the first term that grows.
// Requires 0 <= x <= 0.3 * mass^2 so the optimal point is past n = 2.
TruncatedEval optimal_truncation_eval(double x, double mass, int n_max = 64);

}  // namespace ehvac
