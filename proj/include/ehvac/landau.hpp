#pragma once

// Spectral side of the constant-field problem: Landau levels of the 3d Pauli
// operator P_b = (-i grad - A)^2 - sigma_3 b with A = (b/2)(-x2, x1, 0), its
// heat kernel in closed form, localized traces, and resolvent kernels with
// pointwise decay bounds.
//
// The transverse spectrum is {(2n + 1 + nu) b : n >= 0, nu = +-1} with
// degeneracy b/2pi per unit area; the nu = -1, n = 0 level sits exactly at
// zero.  Tracing exp(-s P_b) per unit volume and subtracting the free (b = 0)
// value reproduces the proper-time integrand of the vacuum-energy density:
//
//   (1/4 pi s)^{1/2} (b/2pi) sum_levels exp(-s E) - 2 (4 pi s)^{-3/2}
//     = (s b coth(s b) - 1) / (4 pi^{3/2} s^{3/2}).

#include <complex>
#include <utility>
#include <vector>

#include "ehvac/pv_scheme.hpp"
#include "ehvac/quadrature.hpp"
#include "ehvac/vec3.hpp"

namespace ehvac {

struct LandauLevel {
  int n = 0;      // oscillator index
  int nu = -1;    // spin label, -1 or +1
  double energy = 0.0;  // (2n + 1 + nu) b
};

struct LandauSpectrum {
  double b = 0.0;
  int n_max = 0;
  double degeneracy_density = 0.0;  // b / 2pi per unit area per level
  std::vector<LandauLevel> levels;  // ordered by energy, nu = -1 before +1 on ties
};

// Requires b > 0 and n_max >= 0.
LandauSpectrum make_landau_spectrum(double b, int n_max);

struct HeatRoutes {
  double sum_route = 0.0;     // truncated level sum, compensated in extended precision
  double closed_route = 0.0;  // coth_reduced(s b) / (4 pi^{3/2} s^{3/2})
  int n_terms = 0;            // oscillator indices actually summed
  double tail_bound = 0.0;    // bound on the dropped tail, relative to the result
  bool truncation_sufficient = true;  // tail_bound small enough for 1e-12 agreement
};

// Free-subtracted diagonal heat trace per unit volume by both routes:
// longitudinal Gaussian factor (4 pi s)^{-1/2} times the degeneracy-weighted
// level sum, minus the free density 2 (4 pi s)^{-3/2}; and the closed form.
// n_max < 0 selects the truncation automatically so the dropped tail is
// below 1e-14 of the result.  Requires s > 0, b >= 0; b = 0 gives 0 exactly.
HeatRoutes landau_heat_density(double s, double b, int n_max = -1);

// Diagonal 2x2 spin structure of kernels of P_b; the operator is diagonal in
// the sigma_3 basis, up = spin aligned with the field.
struct SpinKernel {
  std::complex<double> up{0.0, 0.0};
  std::complex<double> down{0.0, 0.0};
};

// exp(-s P_b)(x, y); reduces to the scalar heat kernel times the identity at
// b = 0.  Stable for any s b (the sinh factors are evaluated in expm1 form).
SpinKernel pauli_heat_kernel(double s, double b, const Vec3& x, const Vec3& y);

// Normalized Gaussian localizer g(x) = (pi rho^2/2)^{-3/4} exp(-|x|^2/rho^2),
// with integral of g^2 equal to 1.
struct GaussianLocalizer {
  double rho = 1.0;
  double prefactor() const;
  double operator()(const Vec3& v) const;
};

// integral g(x)^2 tr_2 exp(-s P_b)(x, x) dx by tensor-product quadrature over
// the localizer; equals sb coth(sb) / (4 pi^{3/2} s^{3/2}) independent of rho.
// Accepts b = 0 (free value 2 (4 pi s)^{-3/2}).
double localized_heat_trace(double s, double b, const GaussianLocalizer& loc);

// (P_b + mu^2)^{-1}(x, y) via the proper-time representation; requires
// mu > 0, x != y.  The complex phase is the s-independent gauge factor.
SpinKernel pauli_resolvent_kernel(double mu, double b, const Vec3& x, const Vec3& y,
                                  const QuadratureConfig& cfg = QuadratureConfig{});

// Kernel of Pi_j (P_b + mu^2)^{-1} where Pi = -i grad - A is the magnetic
// momentum; j in {0, 1, 2} indexes the component.
SpinKernel pauli_resolvent_derivative(double mu, double b, const Vec3& x, const Vec3& y, int j,
                                      const QuadratureConfig& cfg = QuadratureConfig{});

struct KernelBoundSample {
  Vec3 x, y;
  double resolvent_value = 0.0;   // sup-norm of the resolvent kernel
  double resolvent_bound = 0.0;   // (1/4pi)(1/r + 2b/mu) exp(-mu r)
  double gradient_value = 0.0;    // worst component sup-norm of Pi_j resolvent
  double gradient_bound = 0.0;    // (b/2pi + 2/(pi r^2) + 2mu/(pi r) + 5b^2 dperp/(4pi mu)) exp(-mu r)
};

struct KernelBoundReport {
  int samples = 0;
  double min_resolvent_margin = 0.0;  // bound - value, minimized over samples
  double min_gradient_margin = 0.0;
  bool all_nonnegative = false;
  KernelBoundSample worst_resolvent;  // sample attaining min_resolvent_margin
  KernelBoundSample worst_gradient;
};

// Verifies on each supplied point pair the pointwise decay bounds
//   |(P_b + mu^2)^{-1}(x,y)|_inf      <= (1/4pi) (1/r + 2 b/mu) exp(-mu r)
//   |Pi_j (P_b + mu^2)^{-1}(x,y)|_inf <= (b/2pi + 2/(pi r^2) + 2 mu/(pi r)
//                                         + 5 b^2 |dperp|/(4 pi mu)) exp(-mu r)
// for every component j.  Requires mu > 0 and all pairs distinct.
KernelBoundReport check_kernel_bounds(double mu, double b,
                                      const std::vector<std::pair<Vec3, Vec3>>& samples,
                                      const QuadratureConfig& cfg = QuadratureConfig{});

// Deterministic sample-pair generator for the bound checks: pairs uniform in
// [-box_side/2, box_side/2]^3, rejecting separations below min_separation
// (std::mt19937_64 with the given seed).
std::vector<std::pair<Vec3, Vec3>> kernel_bound_samples(int n, unsigned long long seed,
                                                        double box_side = 5.0,
                                                        double min_separation = 0.05);

// Frequency-resolved density: the longitudinal momentum integral of the
// regulated trace at fixed frequency omega,
//   f_pv_omega(omega, b) = (1/4 pi^{3/2}) integral w(s) e^{-s omega^2}
//                              (s b coth(s b) - 1) s^{-3/2} ds,
// with (1/pi) integral_{-inf}^{inf} f_pv_omega omega^2 d omega = f_pv(b).
double f_pv_omega(const PvScheme& sch, double omega, double b,
                  const QuadratureConfig& cfg = QuadratureConfig{});

// Recovers f_pv(b) from the frequency representation; the omega tail beyond
// the adaptive window is controlled by the rigorous envelope
// |f_pv_omega| <= C7 / omega^7 and added to the error budget.
double f_pv_via_omega(const PvScheme& sch, double b,
                      const QuadratureConfig& cfg = QuadratureConfig{});

}  // namespace ehvac
