#pragma once

// Proper-time quadrature core: the semi-infinite integrals
//     integral_0^inf  w(s) g(s) s^{-p} ds
// that every vacuum-energy density in this library reduces to, plus the
// reduced-coth kernels and exact Bernoulli numbers used by their series
// expansions.

#include <functional>
#include <stdexcept>
#include <string>

namespace ehvac {

struct QuadratureConfig {
  double rel_tol = 1e-11;     // target relative accuracy
  double abs_tol = 0.0;       // absolute floor (0 = purely relative target)
  int max_subdivisions = 4000;
  double split_point = 1.0;   // s-scale separating small-s from large-s regimes
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;     // estimated absolute error (tails included)
  bool converged = false;
  int subdivisions = 0;
  long evaluations = 0;
};

// Thrown by the density evaluators when the underlying quadrature fails to
// converge; carries the best estimate and its residual so callers can report
// instead of silently using a bad number.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, const QuadResult& partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadResult& partial() const { return partial_; }

 private:
  QuadResult partial_;
};

// x*coth(x) - 1.  Accurate to <= 1e-14 relative for all x >= 0:
// degree-8 Taylor polynomial for x <= 1e-2, extended series to x = 0.25
// (plain x*coth(x)-1 in double loses ~3*eps/x^2 to cancellation there),
// stable expm1 form above.  Throws std::domain_error for x < 0.
double coth_reduced(double x);

// x*coth(x) - 1 - x^2/3, the twice-subtracted kernel.  Series branch for
// x <= 1 starts at -x^4/45 and avoids the cancellation of the x^2 terms.
double coth_reduced_sub(double x);

// d/dx of coth_reduced_sub(x).
double coth_reduced_sub_deriv(double x);

// Exact Bernoulli number B_{2n} (standard convention: B_2 = 1/6,
// B_4 = -1/30, B_6 = 1/42, ...) for 1 <= n <= 64.
struct BernoulliRational {
  std::string numerator;    // decimal string, sign included
  std::string denominator;  // decimal string, positive
  double value;             // correctly rounded to nearest double
};
BernoulliRational bernoulli_even(int n);
double bernoulli_even_value(int n);  // cached float view

struct ProperTimeIntegrand {
  std::function<double(double)> g;  // evaluated at s > 0
  double small_s_order = 0.0;       // g(s) = O(s^order) as s -> 0
  double large_s_power = 0.0;       // |g(s)| <= C s^power as s -> inf
};

struct ProperTimeWeight {
  std::function<double(double)> w;  // e.g. exp(-m^2 s) or a regulated sum
  double decay_rate = 1.0;          // |w(s)| <= C exp(-decay_rate*s), s -> inf
  double small_s_order = 0.0;       // w(s) = O(s^order) as s -> 0
};

// integral_0^inf w(s) g(s) s^{-p} ds, computed on u = log s with adaptive
// Gauss-Kronrod panels, deterministic left-to-right summation, and a full
// node-doubling verification pass.  The integrable window is derived from the
// declared small-s orders and the weight's decay rate, then extended by
// probing until both tails are negligible.  Never throws on convergence
// failure: the result carries converged=false with the best estimate.
QuadResult proper_time_integrate(const ProperTimeIntegrand& g, double p,
                                 const ProperTimeWeight& w,
                                 const QuadratureConfig& cfg = QuadratureConfig{});

// Generic adaptive Gauss-Kronrod on a finite interval [a, b]; same panel
// bookkeeping and determinism guarantees as proper_time_integrate.
QuadResult adaptive_integrate(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol = 0.0,
                              int max_subdivisions = 4000);

// Unwrap a QuadResult, throwing ConvergenceError when it did not converge.
double quad_value(const QuadResult& r, const char* context);

// The 15-point Gauss-Kronrod rule mapped to [a, b]: fills nodes[0..14] and
// weights[0..14] so that sum_i weights[i] f(nodes[i]) approximates the
// integral over [a, b].  Building block for the tensor-product quadratures
// used on localized traces and semigroup checks.
void gk15_rule(double a, double b, double nodes[15], double weights[15]);

}  // namespace ehvac
