#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ehvac/pv_scheme.hpp"

using namespace ehvac;

namespace {
// 400-bit arbitrary-precision reference values for the proper-time integral
// (trapezoid on u = log s, step halved until stable to 25 digits).
constexpr double kFpv123_1em4 = 3.7984308278769790749959368e-11;
constexpr double kFpv123_05 = 9.3544670748012920523529511e-04;
constexpr double kFpv123_1 = 3.6151348077070353466290280e-03;
constexpr double kFpv123_10 = 1.8558882001688730548305132e-01;
constexpr double kFpv123_1e3 = 3.7058812914096770684676284e+01;
constexpr double kFpv123_1e5 = 3.7887914466064700717988947e+03;
constexpr double kFpv123_1e7 = 3.7903128747539355071070331e+05;
constexpr double kFpv_1_15_2_at1 = 1.5549893424293110278118904e-03;
constexpr double kFpv_1_10_20_at1 = 1.7301951895626870575771745e-02;
constexpr double kFpv_1_10_20_at1e3 = 1.7106073731012877041102067e+03;
}  // namespace

TEST_CASE("make_scheme solves the two cancellation conditions") {
  PvScheme s = make_scheme(1, 2, 3);
  CHECK(s.c0 == 1.0);
  CHECK(s.c1 == doctest::Approx(-1.6).epsilon(1e-15));
  CHECK(s.c2 == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(std::fabs(s.c0 + s.c1 + s.c2) <= 1e-12);
  CHECK(std::fabs(s.c0 * 1 + s.c1 * 4 + s.c2 * 9) <= 1e-12);
  CHECK(s.log_lambda ==
        doctest::Approx(1.6 * std::log(2.0) - 0.6 * std::log(3.0)).epsilon(1e-14));
  CHECK(s.log_lambda > 0.0);
}

TEST_CASE("make_scheme input validation") {
  CHECK_THROWS_AS(make_scheme(2, 1, 3), std::domain_error);
  CHECK_THROWS_AS(make_scheme(1, 3, 3), std::domain_error);
  CHECK_THROWS_AS(make_scheme(1, 1, 2), std::domain_error);
  CHECK_THROWS_AS(make_scheme(0, 1, 2), std::domain_error);
  CHECK_THROWS_AS(make_scheme(-1, 1, 2), std::domain_error);
}

TEST_CASE("make_scheme heavy-mass limit at fixed ratio") {
  // m1 = M, m2 = 2M: c1 -> -(4M^2-1)/(3M^2) -> -4/3, c2 -> 1/3.
  PvScheme s = make_scheme(1, 1e4, 2e4);
  CHECK(s.c1 == doctest::Approx(-4.0 / 3.0).epsilon(1e-7));
  CHECK(s.c2 == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  CHECK(std::fabs(s.c0 + s.c1 + s.c2) <= 1e-12);
  CHECK(std::fabs(s.c0 + s.c1 * 1e8 + s.c2 * 4e8) <= 1e-12 * 4e8);
}

TEST_CASE("pv_weight: both sum rules at s = 0") {
  PvScheme s = make_scheme(1, 2, 3);
  CHECK(pv_weight(s, 0.0) == 0.0);
  // w(s) = O(s^2): the forward difference slope at step h is w''(0) h/2 + O(h^2)
  // with w''(0) = sum_j c_j m_j^4 = 24 for (1,2,3).
  const double h = 1e-6;
  const double slope = pv_weight(s, h) / h;
  CHECK(slope == doctest::Approx(12.0 * h).epsilon(1e-2));
}

TEST_CASE("pv_weight direct-evaluation anchor and branch continuity") {
  PvScheme s = make_scheme(1, 2, 3);
  const double direct = std::exp(-1.0) - 1.6 * std::exp(-4.0) + 0.6 * std::exp(-9.0);
  CHECK(pv_weight(s, 1.0) == doctest::Approx(direct).epsilon(1e-15));
  // The small-s series branch hands over to the direct sum at s m2^2 = 0.5;
  // both branches agree to near machine precision at the seam.
  const double seam = 0.5 / 9.0;
  CHECK(pv_weight(s, seam * (1.0 - 1e-9)) ==
        doctest::Approx(pv_weight(s, seam * (1.0 + 1e-9))).epsilon(1e-10));
  // Series branch against a long-double direct sum at moderate s where the
  // cancellation still leaves ~8 significant digits.
  const double sm = 0.01;
  const long double ref = std::exp(-0.01L) - 1.6L * std::exp(-0.04L) + 0.6L * std::exp(-0.09L);
  CHECK(pv_weight(s, sm) == doctest::Approx((double)ref).epsilon(1e-7));
}

TEST_CASE("pv_weight_spec matches the scalar weight") {
  PvScheme s = make_scheme(1, 2, 3);
  ProperTimeWeight w = pv_weight_spec(s);
  CHECK(w.decay_rate == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.small_s_order == doctest::Approx(2.0).epsilon(1e-15));
  for (double t : {1e-6, 1e-2, 0.5, 3.0}) CHECK(w.w(t) == pv_weight(s, t));
}

TEST_CASE("pv_resolvent_weight values and identity") {
  PvScheme s = make_scheme(1, 2, 3);
  CHECK(pv_resolvent_weight(s, 0.0) ==
        doctest::Approx(1.0 - 1.6 / 4.0 + 0.6 / 9.0).epsilon(1e-15));
  for (double x : {0.0, 1.0, 100.0}) {
    const double a = pv_resolvent_weight(s, x);
    const double b = pv_resolvent_weight_rational(s, x);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    CHECK(a >= 0.0);
  }
  // x^3 w(x) -> sum_j c_j m_j^4 = 24 with O(1/x) corrections; x = 1e6 keeps
  // the subtraction noise (~x^2 eps) far below the asymptote.
  CHECK(1e18 * pv_resolvent_weight(s, 1e6) == doctest::Approx(24.0).epsilon(1e-4));
}

TEST_CASE("pv_mass_sqrt_sum tail and anchor") {
  PvScheme s = make_scheme(1, 2, 3);
  CHECK(pv_mass_sqrt_sum(s, 0.0) == doctest::Approx(1.0 - 1.6 * 2.0 + 0.6 * 3.0).epsilon(1e-14));
  // sqrt(lambda + m^2) = sqrt(lambda)(1 + m^2/2l - m^4/8l^2 + ...):
  // lambda^{3/2} S -> -sum_j c_j m_j^4 / 8 = -3, corrections O(1/lambda).
  CHECK(std::pow(1e6, 1.5) * pv_mass_sqrt_sum(s, 1e6) == doctest::Approx(-3.0).epsilon(1e-4));
}

TEST_CASE("pv_longitudinal_weight is nonnegative, convex, O(1/lambda)") {
  PvScheme s = make_scheme(1, 2, 3);
  std::vector<double> ls(60), vs(60);
  for (int i = 0; i < 60; ++i) {
    ls[i] = 1e-3 * std::pow(1e9, i / 59.0);
    vs[i] = pv_longitudinal_weight(s, ls[i]);
    CHECK(vs[i] >= 0.0);
  }
  for (int i = 1; i + 1 < 60; ++i) {
    const double d2 = (vs[i + 1] - vs[i]) / (ls[i + 1] - ls[i]) -
                      (vs[i] - vs[i - 1]) / (ls[i] - ls[i - 1]);
    CHECK(d2 >= -1e-12 * std::fabs(vs[i]));
  }
  // lambda w(lambda) -> sum_j c_j m_j^4 / (8 pi) = 3/pi, corrections O(1/lambda).
  CHECK(1e6 * pv_longitudinal_weight(s, 1e6) == doctest::Approx(3.0 / M_PI).epsilon(1e-4));
}

TEST_CASE("f_pv frozen reference values, scheme (1,2,3)") {
  PvScheme s = make_scheme(1, 2, 3);
  CHECK(f_pv(s, 0.0) == 0.0);
  CHECK(f_pv(s, 1e-4) == doctest::Approx(kFpv123_1em4).epsilon(5e-11));
  CHECK(f_pv(s, 0.5) == doctest::Approx(kFpv123_05).epsilon(5e-11));
  CHECK(f_pv(s, 1.0) == doctest::Approx(kFpv123_1).epsilon(5e-11));
  CHECK(f_pv(s, 10.0) == doctest::Approx(kFpv123_10).epsilon(5e-11));
  CHECK(f_pv(s, 1e3) == doctest::Approx(kFpv123_1e3).epsilon(5e-11));
  CHECK(f_pv(s, 1e5) == doctest::Approx(kFpv123_1e5).epsilon(5e-11));
  CHECK(f_pv(s, 1e7) == doctest::Approx(kFpv123_1e7).epsilon(5e-11));
}

TEST_CASE("f_pv frozen reference values, other schemes") {
  CHECK(f_pv(make_scheme(1, 1.5, 2), 1.0) == doctest::Approx(kFpv_1_15_2_at1).epsilon(5e-11));
  PvScheme wide = make_scheme(1, 10, 20);
  CHECK(f_pv(wide, 1.0) == doctest::Approx(kFpv_1_10_20_at1).epsilon(5e-11));
  CHECK(f_pv(wide, 1e3) == doctest::Approx(kFpv_1_10_20_at1e3).epsilon(5e-11));
}

TEST_CASE("f_pv asymptotes") {
  PvScheme s = make_scheme(1, 2, 3);
  // Weak field: f_pv/x^2 -> logLambda/(12 pi^2).
  const double q = relation_quadratic_coefficient(s);
  CHECK(q == doctest::Approx(s.log_lambda / (12.0 * M_PI * M_PI)).epsilon(1e-15));
  CHECK(f_pv(s, 1e-4) / 1e-8 == doctest::Approx(q).epsilon(1e-8));
  // Strong field: f_pv/x -> (1/8 pi^2) sum_j c_j m_j^2 log m_j^2; the
  // approach is O(log x / x), so the window at x = 1e7 is ~1e-5.
  const double slope =
      (1.0 * 0.0 - 1.6 * 4.0 * std::log(4.0) + 0.6 * 9.0 * std::log(9.0)) /
      (8.0 * M_PI * M_PI);
  CHECK(f_pv(s, 1e7) / 1e7 == doctest::Approx(slope).epsilon(1e-4));
}

TEST_CASE("f_pv scaling covariance") {
  // All masses x2 and field x4 multiplies the density by 2^4.
  PvScheme base = make_scheme(1, 2, 3);
  PvScheme scaled = make_scheme(2, 4, 6);
  const QuadratureConfig cfg{};
  for (double x : {0.3, 1.3, 7.0}) {
    CHECK(f_pv(scaled, 4.0 * x) == doctest::Approx(16.0 * f_pv(base, x)).epsilon(5.0 * cfg.rel_tol));
  }
}

TEST_CASE("f_pv is nonnegative, increasing, convex on a log grid") {
  PvScheme s = make_scheme(1, 2, 3);
  std::vector<double> xs(40), fs(40);
  for (int i = 0; i < 40; ++i) {
    xs[i] = 1e-2 * std::pow(1e4, i / 39.0);
    fs[i] = f_pv(s, xs[i]);
    CHECK(fs[i] >= 0.0);
    if (i) CHECK(fs[i] > fs[i - 1]);
  }
  for (int i = 1; i + 1 < 40; ++i) {
    const double d2 = (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]) -
                      (fs[i] - fs[i - 1]) / (xs[i] - xs[i - 1]);
    CHECK(d2 >= 0.0);
  }
}

TEST_CASE("relation_residual ties the regulated and physical densities") {
  PvScheme s = make_scheme(1, 2, 3);
  RelationBreakdown z = relation_residual(s, 0.0);
  CHECK(z.f_pv_value == 0.0);
  CHECK(z.residual == 0.0);
  for (double x : {0.5, 1.0, 10.0}) {
    RelationBreakdown r = relation_residual(s, x);
    CHECK(std::fabs(r.residual) <= 1e-9 * r.scale);
    // Internal consistency of the breakdown.
    CHECK(r.residual ==
          doctest::Approx(r.f_pv_value - r.eh_sum - r.quadratic_term).epsilon(1e-15));
    CHECK(r.quadratic_term ==
          doctest::Approx(relation_quadratic_coefficient(s) * x * x).epsilon(1e-15));
    CHECK(r.scale >= std::fabs(r.f_pv_value));
  }
}

TEST_CASE("regulator positivity for convex test functions") {
  // sum_j c_j f(m_j^2) >= 0 for convex f; exercised for the three families
  // the densities are built from.
  std::vector<PvScheme> schemes = {make_scheme(1, 2, 3), make_scheme(1, 1.5, 2),
                                   make_scheme(1, 10, 20), make_scheme(2, 3, 5)};
  for (const PvScheme& s : schemes) {
    for (int i = 0; i < 40; ++i) {
      const double t = 1e-4 * std::pow(1e7, i / 39.0);
      CHECK(pv_weight(s, t) >= 0.0);        // f = exp(-s t)
      CHECK(pv_resolvent_weight(s, t) >= 0.0);  // f = 1/(t + x)
    }
    // f = t log t.
    const double tlogt = s.c0 * s.m0 * s.m0 * std::log(s.m0 * s.m0) +
                         s.c1 * s.m1 * s.m1 * std::log(s.m1 * s.m1) +
                         s.c2 * s.m2 * s.m2 * std::log(s.m2 * s.m2);
    CHECK(tlogt >= 0.0);
  }
}
