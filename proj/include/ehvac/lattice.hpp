#pragma once

// Finite-dimensional spectral oracle: a gauge-covariant discrete Pauli
// operator on a periodic torus (Peierls link phases), the regulated vacuum
// energy extracted from its dense spectrum, and the semiclassical sweep that
// compares scaled lattice energies against the local-density value.

#include "ehvac/pv_scheme.hpp"
#include "ehvac/vec3.hpp"

#include <complex>
#include <string>
#include <vector>

namespace ehvac {

struct LatticeSpec {
  int n = 8;            // sites per dimension
  double a = 1.0;       // lattice spacing
  int flux_quanta = 0;  // integer flux per plane for constant-field runs
  int dims = 2;         // 2 or 3
};

// Number of sites n^dims.
long lattice_sites(const LatticeSpec& spec);

// Constant field consistent with torus flux quantization:
//   b = 2 pi flux_quanta / (n a)^2.
double constant_field_of(const LatticeSpec& spec);

// Link phase assignment: theta[d][site] is the phase of the unit-modulus
// hopping factor exp(i theta) on the link from `site` to `site + e_d`.
// Site index layout matches FieldGrid: site = (k n + j) n + i in 3d,
// site = j n + i in 2d, with i the x index.
struct LinkPhases {
  int n = 0;
  int dims = 2;
  std::vector<std::vector<double>> theta;
};

LinkPhases zero_link_phases(const LatticeSpec& spec);

// Torus gauge for the constant field of `spec` (flux 2 pi Q / n^2 through
// every x-y plaquette): theta_y(i,j) = phi i, theta_x = 0 except on the
// wrapping column where theta_x(n-1, j) = -phi n j, phi = 2 pi Q / n^2.
LinkPhases constant_field_links(const LatticeSpec& spec);

// Gauge for an x-dependent field: column i of x-y plaquettes carries the
// prescribed flux (same for every j and every z layer).  Requires the total
// flux n * sum_i phi_i to be an integer multiple of 2 pi (tolerance 1e-6);
// throws std::domain_error otherwise.
LinkPhases column_flux_links(const LatticeSpec& spec,
                             const std::vector<double>& plaquette_flux_per_column);

// Principal-value flux through each x-y plaquette of layer z_layer, indexed
// like sites of a 2d slice.  Each flux is reported in (-pi, pi].
std::vector<double> plaquette_fluxes_xy(const LinkPhases& phases, int z_layer = 0);

// Lattice gauge transformation theta_d(s) -> theta_d(s) + chi(s+e_d) - chi(s);
// leaves every plaquette flux and the spectrum invariant.
LinkPhases gauge_transformed(const LinkPhases& phases, const std::vector<double>& chi);

// Dense Hermitian matrix, column-major, dimension 2 n^dims (spin-up block
// first).
struct PauliMatrix {
  int dim = 0;
  std::vector<std::complex<double>> a;
};

// Covariant 5/7-point Laplacian with the given link phases, minus the 2x2
// Zeeman block sigma . zeeman(site).  Hermitian by construction.
PauliMatrix build_pauli(const LatticeSpec& spec, const LinkPhases& potential,
                        const std::vector<Vec3>& zeeman);

// Full sorted spectrum via a dense Hermitian eigensolver.  Throws
// std::runtime_error on solver failure, std::domain_error when the dimension
// exceeds the dense-solver guard (2 n^dims <= 20000).
std::vector<double> dense_eigenvalues(const PauliMatrix& h);

// Closed-form spectrum at zero field: 2 sum_d (1 - cos(2 pi k_d / n)) / a^2,
// every value doubled for spin.  Sorted ascending.
std::vector<double> free_pauli_eigenvalues(const LatticeSpec& spec);

// Fast path when the Zeeman field points along e_3 everywhere: the two spin
// blocks decouple into L -+ diag(bz), solved independently.  `bz` is per
// site; pass a single element for a constant field.  Returns the sorted
// union of both blocks (same multiset as dense_eigenvalues of build_pauli
// with zeeman = bz e_3, which tests assert).
std::vector<double> pauli_block_eigenvalues(const LatticeSpec& spec, const LinkPhases& potential,
                                            const std::vector<double>& bz);

struct SpectralEnergy {
  std::vector<double> eigenvalues_free;   // sorted, spin multiplicity included
  std::vector<double> eigenvalues_field;  // sorted, spin multiplicity included
  double density = 0.0;                   // regulated energy per volume
  PvScheme scheme;
};

// Regulated vacuum energy per volume of the constant field b on the torus:
//   density = (1/V) sum_k sum_j c_j ( sqrt(lambda0_k + m_j^2)
//                                   - sqrt(lambda_k + m_j^2) ).
// Requires b to match constant_field_of(spec) (flux quantization) and
// lambda_min + m0^2 > 0.  dims = 2 uses the longitudinal-analytic weight
// instead of the square roots (see pv_density_longitudinal) so the density
// is always per unit 3-volume.
SpectralEnergy pv_energy_density(const LatticeSpec& spec, double b, const PvScheme& scheme);

// Energy per unit 3-volume from a transverse (2d) spectrum, carrying out the
// longitudinal momentum integral analytically:
//   (1/V2) sum_k [ phi(lambda_k) - phi(lambda0_k) ],
// phi = pv_longitudinal_weight.  Both spectra sorted ascending.
double pv_density_longitudinal(const LatticeSpec& spec, const std::vector<double>& free_eigs,
                               const std::vector<double>& field_eigs, const PvScheme& scheme);

// Same combination with the 3d square-root weight, per unit 3-volume.
double pv_density_sqrt(const LatticeSpec& spec, const std::vector<double>& free_eigs,
                       const std::vector<double>& field_eigs, const PvScheme& scheme);

// Polynomial extrapolation of values(a) to a = 0 in powers of a^2 (Neville
// tableau on h = a^2); the discretization error of the covariant Laplacian
// is even in a.
double richardson_extrapolate(const std::vector<double>& spacings,
                              const std::vector<double>& values);

struct SweepRow {
  double eps = 0.0;
  double lattice_energy_density = 0.0;  // eps^dims * E_lattice(A_eps)
  double lda_value = 0.0;               // integral of f_pv(b(u)) over the period cell
  double deviation = 0.0;               // |lattice - lda_value|
  double runtime_s = 0.0;
  double matched_lda = 0.0;        // same integral against the equal-spacing lattice density
  double matched_deviation = 0.0;  // |lattice - matched_lda|
};

struct SweepReport {
  std::string profile;
  std::vector<SweepRow> rows;
  double fitted_rate = 0.0;          // LSQ slope of log deviation vs log eps
  double matched_fitted_rate = 0.0;  // same for the matched deviation
  bool monotone = false;             // deviation decreases along descending eps
  bool matched_monotone = false;
  bool resolution_ok = true;  // >= 4 lattice points per field variation length
  std::string warning;
};

// Scaled-field sweep: the profile b(u) lives on a period cell of side
// P = spec.n * eps_min * spec.a; at scale eps the field B_eps(x) = b(eps x)
// is realized on a torus of side P/eps with the same spacing, so the finest
// entry of eps_list uses spec.n sites per dimension.  Profiles (all varying
// in u_1 only, exactly flux-quantized through column-integrated plaquette
// fluxes):
//   constant - b(u) = bbar
//   cosine   - b(u) = bbar (1 + cos(2 pi u1/P)/2)
//   stripes  - b(u) = bbar/2 outside [P/4, 3P/4), 3 bbar/2 inside
//   gaussian - b(u) = bbar (1 + g(u1) - mean g), g = exp(-(u1-P/2)^2/(2 (P/8)^2))
// with bbar = 2 pi flux_quanta / P^2.  eps_list must be descending and each
// spec.n * eps_min / eps must be an integer site count.
SweepReport semiclassical_sweep(const std::string& profile, const std::vector<double>& eps_list,
                                const LatticeSpec& spec, const PvScheme& scheme);

}  // namespace ehvac
