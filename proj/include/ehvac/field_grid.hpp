#pragma once

// Magnetic-field ingestion on a periodic torus: sampled 3-vector grids,
// spectral Biot-Savart reconstruction of the divergence-free vector
// potential, potential rescaling A_eps(x) = eps^-1 A(eps x), the radial-gauge
// Taylor remainder, and the local-density (LDA) vacuum energy
// sum_nodes f_pv(e |B(node)|) h^3.

#include <functional>
#include <string>
#include <vector>

#include "ehvac/pv_scheme.hpp"
#include "ehvac/quadrature.hpp"
#include "ehvac/vec3.hpp"

namespace ehvac {

struct FieldGrid {
  int n = 0;              // nodes per dimension
  double spacing = 0.0;   // node distance
  std::string profile_tag;  // analytic-profile provenance, "-" if none
  std::vector<Vec3> values; // node (i,j,k) at index (k*n + j)*n + i

  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(k) * n + j) * n + i;
  }
  const Vec3& at(int i, int j, int k) const { return values[idx(i, j, k)]; }
  Vec3& at(int i, int j, int k) { return values[idx(i, j, k)]; }
  double side() const { return n * spacing; }
};

// Analytic profile: field b(x), optionally a compatible potential a(x) with
// curl a = b (used by the gauge checks).
struct AnalyticField {
  std::string tag;
  std::function<Vec3(const Vec3&)> b;
  std::function<Vec3(const Vec3&)> a;  // may be empty
};

// Mean-zero solenoidal field localized well inside [0, box]^3:
//   potential w = (0, 0, amplitude * exp(-|x-c|^2/(2 sigma^2))), c = box/2,
//   b = curl w  (so div b = 0 identically and the mean vanishes).
AnalyticField gaussian_envelope_profile(double box_side, double sigma, double amplitude);

// Single band-limited mode: b = (0, 0, amplitude cos(2 pi x1/box)),
// a = (0, amplitude box/(2 pi) sin(2 pi x1/box), 0).
AnalyticField fourier_mode_profile(double box_side, double amplitude);

// b(x) = b0 + M x with trace(M) = 0 (required for div b = 0); no potential.
AnalyticField linear_profile(const Vec3& b0, const double m[3][3]);

AnalyticField constant_profile(const Vec3& b0);

// Evaluates the profile at the n^3 nodes j*spacing, spacing = box_side/n.
FieldGrid sample_profile(const AnalyticField& f, int n, double box_side);

// Divergence-free periodic vector potential with curl A = B, computed
// spectrally: A_hat(k) = i k x B_hat(k)/|k|^2, A_hat(0) = 0, Nyquist planes
// zeroed (band-limited inputs assumed).  Throws std::domain_error when B has
// a nonzero mean (no periodic potential exists) or fails the spectral
// divergence-free test.
FieldGrid biot_savart(const FieldGrid& b);

// Spectral curl and relative spectral divergence (max_k |k . v_hat| over
// max_k |k| |v_hat|).
FieldGrid curl_spectral(const FieldGrid& v);
double divergence_rel_spectral(const FieldGrid& v);

// A_eps(x) = eps^-1 A(eps x) on an n_out^3 grid over the enlarged torus of
// side side/eps, via exact trigonometric resampling.  Requires 0 < eps <= 1
// and n_out >= n (no information loss).
FieldGrid scale_potential(const FieldGrid& a, double eps, int n_out);

// Radial-gauge Taylor remainder
//   R_{eps,y}(x) = x X integral_0^1 [b(y) - b(y + t eps x)] / eps * t dt,
// one adaptive quadrature per component.  Exactly zero for constant b.
Vec3 poincare_remainder(const AnalyticField& profile, double eps, const Vec3& y, const Vec3& x,
                        const QuadratureConfig& cfg = QuadratureConfig{});

// Residual of the radial-gauge reconstruction identity
//   a(y+x) = grad_x [ x . integral_0^1 a(y+tx) dt ]
//            - x X integral_0^1 (curl a)(y+tx) t dt,
// with the gradient taken by central finite differences of the quadrature
// scalar.  Requires the profile to carry both a and b (= curl a).
Vec3 poincare_gauge_check(const AnalyticField& profile, const Vec3& y, const Vec3& x,
                          const QuadratureConfig& cfg = QuadratureConfig{});

// Fast f_pv evaluator: local 6-point Lagrange interpolation of
// f_pv(x)/x^2 on a uniform log-x table; below the table the weak-field
// quadratic logLambda x^2/(12 pi^2) is used.  Relative accuracy ~1e-9
// against direct quadrature over the covered range (worst at the one-sided
// windows near the table edges).
class FpvInterpolant {
 public:
  FpvInterpolant(const PvScheme& sch, double x_min, double x_max, int points = 240,
                 const QuadratureConfig& cfg = QuadratureConfig{});
  double operator()(double x) const;
  double x_min() const { return x_lo_; }
  double x_max() const { return x_hi_; }

 private:
  PvScheme sch_;
  double x_lo_ = 0.0, x_hi_ = 0.0;
  double u_lo_ = 0.0, du_ = 0.0;
  std::vector<double> g_;  // f_pv(e^u)/e^{2u} at the table nodes
};

// sum_nodes f_pv(e_charge |B(node)|) spacing^3; nonnegative, monotone under
// pointwise |B| increase.
double lda_energy(const FieldGrid& b, double e_charge, const PvScheme& sch,
                  const QuadratureConfig& cfg = QuadratureConfig{});

// Versioned textual container (header: magic+version, n, spacing, profile
// tag; then n^3 "x y z" rows, i fastest).  Round-trips exactly via
// shortest-round-trip formatting.
void save_grid(const std::string& path, const FieldGrid& g);
FieldGrid load_grid(const std::string& path);

// CSV histogram of |B| over the nodes: header "bin_lo,bin_hi,count",
// `bins` uniform bins spanning [0, max |B|].
std::string histogram_csv(const FieldGrid& g, int bins);

}  // namespace ehvac
