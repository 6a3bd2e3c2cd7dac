#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ehvac/eh_density.hpp"

using namespace ehvac;

namespace {
// 400-bit arbitrary-precision references for the subtracted proper-time
// integral at mass 1.
constexpr double kFeh_1em2 = -2.8143165282744669975807776e-12;
constexpr double kFeh_05 = -1.5774732648836744415184463e-05;
constexpr double kFeh_1 = -2.0846699133026194500243214e-04;
constexpr double kFeh_10 = -3.0278855354350708235359173e-01;
constexpr double kFeh_1e6 = -4.8649556414895457140402689e+10;
// Central differences of the reference integral with exactly representable
// steps 2^-24, 2^-25 and one Richardson pass.
constexpr double kFehD_05 = -1.20645982272396e-04;
constexpr double kFehD_1 = -7.52313609051069e-04;
constexpr double kFehD_10 = -8.37300052795439e-02;
}  // namespace

TEST_CASE("f_eh frozen reference values") {
  CHECK(f_eh(0.0, 1.0) == 0.0);
  CHECK(f_eh(1e-2, 1.0) == doctest::Approx(kFeh_1em2).epsilon(5e-11));
  CHECK(f_eh(0.5, 1.0) == doctest::Approx(kFeh_05).epsilon(5e-11));
  CHECK(f_eh(1.0, 1.0) == doctest::Approx(kFeh_1).epsilon(5e-11));
  CHECK(f_eh(10.0, 1.0) == doctest::Approx(kFeh_10).epsilon(5e-11));
  CHECK(f_eh(1e6, 1.0) == doctest::Approx(kFeh_1e6).epsilon(5e-11));
}

TEST_CASE("f_eh weak-field coefficient") {
  // f_eh(x) = -x^4/(360 pi^2) + O(x^6) at mass 1.
  const double x = 1e-2;
  CHECK(f_eh(x, 1.0) * 360.0 * M_PI * M_PI / std::pow(x, 4) ==
        doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("f_eh mass scaling") {
  // f_eh(x; m) = m^4 f_eh(x/m^2; 1).
  const QuadratureConfig cfg{};
  for (double m : {0.5, 2.0}) {
    for (double x : {0.3, 2.0}) {
      CHECK(f_eh(x, m) ==
            doctest::Approx(std::pow(m, 4) * f_eh(x / (m * m), 1.0)).epsilon(5.0 * cfg.rel_tol));
    }
  }
}

TEST_CASE("f_eh is nonpositive, decreasing, concave on a log grid") {
  std::vector<double> xs(46), fs(46);
  for (int i = 0; i < 46; ++i) {
    xs[i] = 1e-3 * std::pow(1e9, i / 45.0);
    fs[i] = f_eh(xs[i], 1.0);
    CHECK(fs[i] <= 0.0);
    if (i) CHECK(fs[i] < fs[i - 1]);
  }
  for (int i = 1; i + 1 < 46; ++i) {
    const double d2 = (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]) -
                      (fs[i] - fs[i - 1]) / (xs[i] - xs[i - 1]);
    CHECK(d2 <= 1e-14 * std::fabs(fs[i]) / xs[i]);
  }
}

TEST_CASE("f_eh_deriv frozen values and finite-difference consistency") {
  CHECK(f_eh_deriv(0.0, 1.0) == 0.0);
  CHECK(f_eh_deriv(0.5, 1.0) == doctest::Approx(kFehD_05).epsilon(1e-8));
  CHECK(f_eh_deriv(1.0, 1.0) == doctest::Approx(kFehD_1).epsilon(1e-8));
  CHECK(f_eh_deriv(10.0, 1.0) == doctest::Approx(kFehD_10).epsilon(1e-8));
  for (double x : {0.1, 1.0, 10.0}) {
    const double h = x * std::ldexp(1.0, -17);
    const double fd = (f_eh(x + h, 1.0) - f_eh(x - h, 1.0)) / (2.0 * h);
    CHECK(f_eh_deriv(x, 1.0) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("f_eh_orthogonal reduces through the Lorentz invariant") {
  const QuadratureConfig cfg{};
  CHECK(f_eh_orthogonal(0.0, 0.7, 1.0) == f_eh(0.7, 1.0));
  CHECK(f_eh_orthogonal(0.3, 0.5, 1.0) ==
        doctest::Approx(f_eh(0.4, 1.0)).epsilon(2.0 * cfg.rel_tol));
  CHECK_THROWS_AS(f_eh_orthogonal(0.5, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(f_eh_orthogonal(0.6, 0.5, 1.0), std::domain_error);
  // Small-field ratio against the quartic coefficient.
  const double xe = 0.006, xb = 0.01;
  const double inv = xb * xb - xe * xe;
  CHECK(f_eh_orthogonal(xe, xb, 1.0) / (inv * inv) ==
        doctest::Approx(-1.0 / (360.0 * M_PI * M_PI)).epsilon(1e-3));
}

TEST_CASE("series coefficients: quartic anchor, signs, divergence") {
  CHECK(eh_series_coefficient(2, 1.0) ==
        doctest::Approx(-1.0 / (360.0 * M_PI * M_PI)).epsilon(1e-12));
  // Alternating signs from the Bernoulli alternation.
  for (int n = 2; n <= 20; ++n) {
    const double a = eh_series_coefficient(n, 1.0);
    CHECK(a * ((n % 2 == 0) ? -1.0 : 1.0) > 0.0);  // sign(a_n) = (-1)^{n+1}
  }
  // Super-geometric growth of the coefficient ratios (zero radius of
  // convergence): the ratio |a_{n+1}/a_n| itself grows without bound.
  const double r10 = std::fabs(eh_series_coefficient(11, 1.0) / eh_series_coefficient(10, 1.0));
  const double r30 = std::fabs(eh_series_coefficient(31, 1.0) / eh_series_coefficient(30, 1.0));
  const double r60 = std::fabs(eh_series_coefficient(61, 1.0) / eh_series_coefficient(60, 1.0));
  CHECK(r30 > 5.0 * r10);
  CHECK(r60 > 3.0 * r30);
  // Mass enters as m^{4-4n}: a_2 at mass 2 is 2^{-4} of mass 1.
  CHECK(eh_series_coefficient(2, 2.0) ==
        doctest::Approx(eh_series_coefficient(2, 1.0) / 16.0).epsilon(1e-14));
}

TEST_CASE("eh_taylor_series packs the coefficient table") {
  EhSeries ser = eh_taylor_series(1.0, 12);
  CHECK(ser.n_max == 12);
  CHECK(ser.coeffs.size() == 13);
  CHECK(ser.coeffs[0] == 0.0);
  CHECK(ser.coeffs[1] == 0.0);
  for (int n = 2; n <= 12; ++n) CHECK(ser.coeffs[n] == eh_series_coefficient(n, 1.0));
  CHECK_THROWS_AS(eh_taylor_series(1.0, 1), std::domain_error);
  CHECK_THROWS_AS(eh_taylor_series(1.0, 65), std::domain_error);
}

TEST_CASE("optimal truncation of the divergent series") {
  TruncatedEval z = optimal_truncation_eval(0.0, 1.0);
  CHECK(z.value == 0.0);
  CHECK(z.order_used == 4);
  CHECK(z.error_estimate == 0.0);

  // Deep asymptotic regime: the optimally-truncated sum is far more accurate
  // than the first-omitted-term estimate suggests.
  TruncatedEval a = optimal_truncation_eval(0.05, 1.0);
  CHECK(std::fabs(a.value - f_eh(0.05, 1.0)) < 1e-12);

  // Edge of the useful regime: the error model still brackets the truth.
  TruncatedEval b = optimal_truncation_eval(0.2, 1.0);
  CHECK(std::fabs(b.value - f_eh(0.2, 1.0)) <= 2.0 * b.error_estimate);
  CHECK(b.order_used >= 4);

  CHECK_THROWS_AS(optimal_truncation_eval(0.31, 1.0), std::domain_error);
  CHECK_THROWS_AS(optimal_truncation_eval(-0.1, 1.0), std::domain_error);
}
