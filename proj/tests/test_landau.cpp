#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "ehvac/landau.hpp"

using namespace ehvac;

TEST_CASE("make_landau_spectrum: levels, order, degeneracy") {
  LandauSpectrum ls = make_landau_spectrum(2.0, 3);
  CHECK(ls.degeneracy_density == doctest::Approx(2.0 / (2.0 * M_PI)).epsilon(1e-15));
  REQUIRE(ls.levels.size() == 8);
  // (2n + 1 + nu) b, ordered by energy with nu = -1 first on ties.
  const int n_exp[8] = {0, 1, 0, 2, 1, 3, 2, 3};
  const int nu_exp[8] = {-1, -1, 1, -1, 1, -1, 1, 1};
  const double e_exp[8] = {0, 4, 4, 8, 8, 12, 12, 16};
  for (int i = 0; i < 8; ++i) {
    CHECK(ls.levels[i].n == n_exp[i]);
    CHECK(ls.levels[i].nu == nu_exp[i]);
    CHECK(ls.levels[i].energy == e_exp[i]);
  }
  CHECK(ls.levels[0].energy == 0.0);  // exact zero mode
  CHECK_THROWS_AS(make_landau_spectrum(0.0, 3), std::domain_error);
  CHECK_THROWS_AS(make_landau_spectrum(1.0, -1), std::domain_error);
}

TEST_CASE("landau_heat_density: two routes agree; closed form is explicit") {
  for (double s : {0.05, 0.3, 1.0, 7.0}) {
    for (double b : {0.05, 1.0, 20.0}) {
      HeatRoutes hr = landau_heat_density(s, b);
      CHECK(hr.truncation_sufficient);
      CHECK(hr.closed_route ==
            doctest::Approx(coth_reduced(s * b) / (4.0 * std::pow(M_PI, 1.5) * std::pow(s, 1.5)))
                .epsilon(1e-15));
      CHECK(hr.sum_route == doctest::Approx(hr.closed_route).epsilon(1e-12));
    }
  }
  HeatRoutes zero = landau_heat_density(1.0, 0.0);
  CHECK(zero.sum_route == 0.0);
  CHECK(zero.closed_route == 0.0);
}

TEST_CASE("landau_heat_density: frozen anchor and truncation bookkeeping") {
  HeatRoutes hr = landau_heat_density(1.0, 1.0);
  CHECK(hr.closed_route == doctest::Approx(0.0140542765116137).epsilon(1e-13));
  CHECK(hr.n_terms > 0);
  CHECK(hr.tail_bound < 1e-13);
  // Forcing a too-early truncation must be reported, not silently accepted.
  HeatRoutes trunc = landau_heat_density(0.05, 1.0, 2);
  CHECK_FALSE(trunc.truncation_sufficient);
  CHECK(trunc.tail_bound > 1e-12);
}

TEST_CASE("pauli_heat_kernel: free limit and diagonal closed form") {
  const Vec3 x{0.3, -0.2, 0.5}, y{-0.1, 0.4, 0.1};
  const double s = 0.7;
  SpinKernel free_k = pauli_heat_kernel(s, 0.0, x, y);
  const double dx = x.x - y.x, dy = x.y - y.y, dz = x.z - y.z;
  const double r2 = dx * dx + dy * dy + dz * dz;
  const double scalar = std::exp(-r2 / (4.0 * s)) / std::pow(4.0 * M_PI * s, 1.5);
  CHECK(free_k.up.real() == doctest::Approx(scalar).epsilon(1e-13));
  CHECK(free_k.down.real() == doctest::Approx(scalar).epsilon(1e-13));
  CHECK(std::fabs(free_k.up.imag()) < 1e-15);

  // Diagonal at b > 0: spin trace equals s b coth(s b)/(4 pi^{3/2} s^{3/2}).
  const double b = 1.7;
  SpinKernel diag = pauli_heat_kernel(s, b, x, x);
  const double tr = diag.up.real() + diag.down.real();
  const double expect =
      (coth_reduced(s * b) + 1.0) / (4.0 * std::pow(M_PI, 1.5) * std::pow(s, 1.5));
  CHECK(tr == doctest::Approx(expect).epsilon(1e-13));
  CHECK(std::fabs(diag.up.imag()) < 1e-15);
  // The spin component that keeps the lowest level at zero saturates at
  // large s b while the shifted component dies off exponentially.
  SpinKernel cold = pauli_heat_kernel(20.0, 1.0, x, x);
  CHECK(std::abs(cold.up) > 1e3 * std::abs(cold.down));
}

TEST_CASE("GaussianLocalizer normalization") {
  for (double rho : {0.3, 1.0, 2.5}) {
    GaussianLocalizer g{rho};
    // integral g^2 = prefactor^2 (pi rho^2 / 2)^{3/2} = 1.
    const double norm =
        g.prefactor() * g.prefactor() * std::pow(M_PI * rho * rho / 2.0, 1.5);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(Vec3{0, 0, 0}) == g.prefactor());
    CHECK(g(Vec3{rho, 0, 0}) == doctest::Approx(g.prefactor() * std::exp(-1.0)).epsilon(1e-14));
  }
}

TEST_CASE("localized_heat_trace: frozen values and rho independence") {
  GaussianLocalizer g1{1.0};
  CHECK(localized_heat_trace(1.0, 1.0, g1) ==
        doctest::Approx(0.05895105704290477).epsilon(1e-12));
  CHECK(localized_heat_trace(2.0, 3.0, g1) ==
        doctest::Approx(0.09524162426369828).epsilon(1e-12));
  // Free value 2 (4 pi s)^{-3/2}.
  CHECK(localized_heat_trace(1.0, 0.0, g1) ==
        doctest::Approx(2.0 / std::pow(4.0 * M_PI, 1.5)).epsilon(1e-12));
  // Independence of the localizer width (translation invariance of the
  // diagonal): two decades of rho.
  const double ref = localized_heat_trace(1.0, 1.0, GaussianLocalizer{1.0});
  for (double rho : {0.25, 4.0}) {
    CHECK(localized_heat_trace(1.0, 1.0, GaussianLocalizer{rho}) ==
          doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("pauli_resolvent_kernel: free limit and gauge phase") {
  const Vec3 x{0.5, 0.2, -0.3}, y{-0.2, -0.1, 0.4};
  const double dx = x.x - y.x, dy = x.y - y.y, dz = x.z - y.z;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  const double mu = 1.0;
  SpinKernel k = pauli_resolvent_kernel(mu, 1e-8, x, y);
  const double yukawa = std::exp(-mu * r) / (4.0 * M_PI * r);
  CHECK(k.up.real() == doctest::Approx(yukawa).epsilon(1e-6));
  CHECK(k.down.real() == doctest::Approx(yukawa).epsilon(1e-6));
  // Points separated only longitudinally: the transverse gauge phase
  // b (x1 y2 - x2 y1)/2 vanishes, the kernel is real.
  SpinKernel axial = pauli_resolvent_kernel(1.0, 2.0, Vec3{0.3, 0.4, 1.0}, Vec3{0.3, 0.4, -0.2});
  CHECK(std::fabs(axial.up.imag()) < 1e-12 * std::fabs(axial.up.real()));
  CHECK_THROWS_AS(pauli_resolvent_kernel(0.0, 1.0, x, y), std::domain_error);
  CHECK_THROWS_AS(pauli_resolvent_kernel(1.0, 1.0, x, x), std::domain_error);
}

TEST_CASE("pauli_resolvent_derivative: free limit matches the Yukawa gradient") {
  const Vec3 x{0.9, 0.1, 0.2}, y{0.1, -0.3, -0.4};
  const double dx[3] = {x.x - y.x, x.y - y.y, x.z - y.z};
  const double r = std::sqrt(dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]);
  const double mu = 1.3;
  const double grad_mag = (mu / r + 1.0 / (r * r)) * std::exp(-mu * r) / (4.0 * M_PI);
  for (int j = 0; j < 3; ++j) {
    SpinKernel d = pauli_resolvent_derivative(mu, 1e-8, x, y, j);
    const double expect = grad_mag * std::fabs(dx[j]) / r;
    CHECK(std::abs(d.up) == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("kernel_bound_samples is deterministic and respects the separation floor") {
  auto a = kernel_bound_samples(50, 12345);
  auto b = kernel_bound_samples(50, 12345);
  auto c = kernel_bound_samples(50, 54321);
  REQUIRE(a.size() == 50);
  bool identical = true, different = false;
  for (size_t i = 0; i < 50; ++i) {
    identical = identical && a[i].first.x == b[i].first.x && a[i].second.z == b[i].second.z;
    different = different || a[i].first.x != c[i].first.x;
    const double ddx = a[i].first.x - a[i].second.x;
    const double ddy = a[i].first.y - a[i].second.y;
    const double ddz = a[i].first.z - a[i].second.z;
    CHECK(std::sqrt(ddx * ddx + ddy * ddy + ddz * ddz) >= 0.05);
    CHECK(std::fabs(a[i].first.x) <= 2.5);
    CHECK(std::fabs(a[i].second.y) <= 2.5);
  }
  CHECK(identical);
  CHECK(different);
}

TEST_CASE("check_kernel_bounds: pointwise decay bounds hold with margin") {
  auto pairs = kernel_bound_samples(100, 2024);
  KernelBoundReport rep = check_kernel_bounds(1.0, 0.5, pairs);
  CHECK(rep.samples == 100);
  CHECK(rep.all_nonnegative);
  CHECK(rep.min_resolvent_margin > 0.0);
  CHECK(rep.min_gradient_margin > 0.0);
  CHECK(rep.worst_resolvent.resolvent_bound >= rep.worst_resolvent.resolvent_value);
  CHECK(rep.worst_gradient.gradient_bound >= rep.worst_gradient.gradient_value);
}

TEST_CASE("frequency-resolved density recovers f_pv") {
  PvScheme s = make_scheme(1, 2, 3);
  const double b = 1.0;
  // Even in omega, positive, decaying.
  const double w0 = f_pv_omega(s, 0.0, b);
  CHECK(w0 > 0.0);
  CHECK(f_pv_omega(s, 1.3, b) == doctest::Approx(f_pv_omega(s, -1.3, b)).epsilon(1e-13));
  CHECK(f_pv_omega(s, 8.0, b) < w0);
  // (1/pi) integral omega^2 f_pv_omega domega = f_pv(b).
  CHECK(f_pv_via_omega(s, b) == doctest::Approx(f_pv(s, b)).epsilon(1e-7));
}
