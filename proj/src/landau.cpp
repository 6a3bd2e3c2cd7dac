#include "ehvac/landau.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ehvac {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kFourPi32 = 4.0 * std::pow(kPi, 1.5);  // 4 pi^{3/2}

// Spin-resolved amplitude b e^{sigma b s}/sinh(b s), stable for every b s:
//   up:   2b / (1 - e^{-2bs})   (saturates at 2b)
//   down: 2b / (e^{2bs} - 1)    (decays to 0; expm1 overflow gives 0)
double spin_amplitude(double b, double bs, int sigma) {
  if (sigma > 0) return 2.0 * b / (-std::expm1(-2.0 * bs));
  const double den = std::expm1(2.0 * bs);
  return std::isinf(den) ? 0.0 : 2.0 * b / den;
}
}  // namespace

LandauSpectrum make_landau_spectrum(double b, int n_max) {
  if (!(b > 0.0)) throw std::domain_error("make_landau_spectrum: requires b > 0");
  if (n_max < 0) throw std::domain_error("make_landau_spectrum: requires n_max >= 0");
  LandauSpectrum sp;
  sp.b = b;
  sp.n_max = n_max;
  sp.degeneracy_density = b / (2.0 * kPi);
  sp.levels.reserve(2 * static_cast<size_t>(n_max) + 2);
  for (int n = 0; n <= n_max; ++n)
    for (int nu : {-1, +1})
      sp.levels.push_back({n, nu, (2.0 * n + 1.0 + nu) * b});
  std::stable_sort(sp.levels.begin(), sp.levels.end(),
                   [](const LandauLevel& a, const LandauLevel& c) {
                     if (a.energy != c.energy) return a.energy < c.energy;
                     return a.nu < c.nu;
                   });
  return sp;
}

HeatRoutes landau_heat_density(double s, double b, int n_max) {
  if (!(s > 0.0)) throw std::domain_error("landau_heat_density: requires s > 0");
  if (!(b >= 0.0)) throw std::domain_error("landau_heat_density: requires b >= 0");
  HeatRoutes out;
  if (b == 0.0) return out;  // both routes vanish identically

  const long double z = static_cast<long double>(s) * static_cast<long double>(b);
  // Tail of the level sum past index N is e^{-2Nz}(...) <= 3 e^{-2Nz}/ (2z) of
  // the remaining geometric series; relative to the result ~ z^2/3 (small z)
  // this needs 2 N z >= 33 + 2 log(1/z) for 1e-14 headroom.
  int n_auto = static_cast<int>(std::ceil(
      (33.0 + 2.0 * std::max(0.0, -std::log(static_cast<double>(z)))) /
      (2.0 * static_cast<double>(z))));
  n_auto = std::max(n_auto, 2);
  const int n_used = (n_max < 0) ? n_auto : n_max;
  out.n_terms = n_used + 1;

  // Level sum S = sum_{n<=N} (e^{-2nz} + e^{-(2n+2)z}), smallest terms first,
  // Neumaier-compensated in extended precision.
  long double sum = 0.0L, comp = 0.0L;
  const long double decay = std::exp(-2.0L * z);
  for (int n = n_used; n >= 0; --n) {
    const long double e_lo = std::exp(-2.0L * static_cast<long double>(n) * z);
    const long double term = e_lo + e_lo * decay;
    const long double t = sum + term;
    comp += (std::fabs(sum) >= std::fabs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const long double level_sum = sum + comp;

  // (b/2pi) S (4 pi s)^{-1/2} - 2 (4 pi s)^{-3/2} = (z S - 1)/(4 pi^{3/2} s^{3/2})
  const long double denom =
      4.0L * std::pow(3.14159265358979323846264338328L, 1.5L) *
      std::pow(static_cast<long double>(s), 1.5L);
  out.sum_route = static_cast<double>((z * level_sum - 1.0L) / denom);
  out.closed_route = coth_reduced(s * b) / (kFourPi32 * std::pow(s, 1.5));

  // Dropped tail: sum_{n>N} terms < 2 e^{-2(N+1)z}/(1 - e^{-2z});
  // express relative to the closed-route value.
  const double zd = static_cast<double>(z);
  const double tail_abs =
      2.0 * std::exp(-2.0 * (n_used + 1) * zd) / (-std::expm1(-2.0 * zd));
  const double result_scale = std::max(std::abs(out.closed_route) * kFourPi32 * std::pow(s, 1.5),
                                       1e-300);  // = coth_reduced(z) scale
  out.tail_bound = zd * tail_abs / result_scale;
  out.truncation_sufficient = out.tail_bound < 1e-13;
  return out;
}

SpinKernel pauli_heat_kernel(double s, double b, const Vec3& x, const Vec3& y) {
  if (!(s > 0.0)) throw std::domain_error("pauli_heat_kernel: requires s > 0");
  if (!(b >= 0.0)) throw std::domain_error("pauli_heat_kernel: requires b >= 0");
  const double d1 = x.x - y.x, d2 = x.y - y.y, d3 = x.z - y.z;
  const double dperp2 = d1 * d1 + d2 * d2;
  const double phase = -(b / 2.0) * (x.x * y.y - x.y * y.x);
  const std::complex<double> gauge(std::cos(phase), std::sin(phase));

  // b coth(b s) = (coth_reduced(b s) + 1)/s covers b = 0 smoothly.
  const double bcoth = (coth_reduced(b * s) + 1.0) / s;
  const double expo = -0.25 * bcoth * dperp2 - d3 * d3 / (4.0 * s);
  const double scale = std::exp(expo) / (8.0 * std::pow(kPi, 1.5) * std::sqrt(s));

  double amp_up, amp_down;
  if (b == 0.0) {
    amp_up = amp_down = 1.0 / s;
  } else {
    const double bs = b * s;
    amp_up = spin_amplitude(b, bs, +1);
    amp_down = spin_amplitude(b, bs, -1);
  }
  SpinKernel k;
  k.up = gauge * (scale * amp_up);
  k.down = gauge * (scale * amp_down);
  return k;
}

double GaussianLocalizer::prefactor() const {
  return std::pow(kPi * rho * rho / 2.0, -0.75);
}

double GaussianLocalizer::operator()(const Vec3& v) const {
  return prefactor() * std::exp(-dot(v, v) / (rho * rho));
}

double localized_heat_trace(double s, double b, const GaussianLocalizer& loc) {
  if (!(s > 0.0)) throw std::domain_error("localized_heat_trace: requires s > 0");
  if (!(b >= 0.0)) throw std::domain_error("localized_heat_trace: requires b >= 0");
  if (!(loc.rho > 0.0)) throw std::domain_error("localized_heat_trace: requires rho > 0");
  // Tensor-product Gauss-Kronrod over [-5 rho, 5 rho]^3 (localizer tail there
  // is e^{-50}); 6 panels of 15 nodes per axis.
  constexpr int kPanels = 6;
  constexpr int kNodes = 15 * kPanels;
  double nodes[kNodes], weights[kNodes];
  const double lim = 5.0 * loc.rho;
  for (int p = 0; p < kPanels; ++p) {
    const double a = -lim + 2.0 * lim * p / kPanels;
    const double c = -lim + 2.0 * lim * (p + 1) / kPanels;
    gk15_rule(a, c, nodes + 15 * p, weights + 15 * p);
  }
  long double acc = 0.0L;
  for (int i = 0; i < kNodes; ++i)
    for (int j = 0; j < kNodes; ++j)
      for (int k = 0; k < kNodes; ++k) {
        const Vec3 p{nodes[i], nodes[j], nodes[k]};
        const double g = loc(p);
        const SpinKernel ker = pauli_heat_kernel(s, b, p, p);
        const double tr = ker.up.real() + ker.down.real();
        acc += static_cast<long double>(weights[i] * weights[j] * weights[k] * g * g * tr);
      }
  return static_cast<double>(acc);
}

namespace {

// Shared machinery for resolvent-type proper-time integrals: the phase is
// s-independent, so each spin component is exp(i phase) times a real positive
// integral of kern_extra(s) * heat-magnitude(s) * exp(-s mu^2).
struct ResolventGeometry {
  double b = 0.0;
  double dperp2 = 0.0;
  double d3 = 0.0;
  double r = 0.0;
  std::complex<double> gauge{1.0, 0.0};
};

ResolventGeometry resolvent_geometry(double b, const Vec3& x, const Vec3& y) {
  ResolventGeometry geo;
  geo.b = b;
  const double d1 = x.x - y.x, d2 = x.y - y.y;
  geo.d3 = x.z - y.z;
  geo.dperp2 = d1 * d1 + d2 * d2;
  geo.r = std::sqrt(geo.dperp2 + geo.d3 * geo.d3);
  const double phase = -(b / 2.0) * (x.x * y.y - x.y * y.x);
  geo.gauge = {std::cos(phase), std::sin(phase)};
  return geo;
}

// Real positive magnitude of the spin-sigma heat kernel at separation geo.
double heat_magnitude(const ResolventGeometry& geo, double s, int sigma) {
  const double b = geo.b;
  const double bcoth = (coth_reduced(b * s) + 1.0) / s;
  const double expo = -0.25 * bcoth * geo.dperp2 - geo.d3 * geo.d3 / (4.0 * s);
  const double amp = (b == 0.0) ? 1.0 / s : spin_amplitude(b, b * s, sigma);
  return amp * std::exp(expo) / (8.0 * std::pow(kPi, 1.5) * std::sqrt(s));
}

// integral_0^inf extra(s) * heat_magnitude(s) * e^{-s mu^2} ds
double resolvent_integral(const ResolventGeometry& geo, double mu, int sigma,
                          const std::function<double(double)>& extra, double extra_power,
                          const QuadratureConfig& cfg) {
  ProperTimeIntegrand g;
  g.g = [&geo, sigma, &extra](double s) { return heat_magnitude(geo, s, sigma) * extra(s); };
  // The Gaussian e^{-r^2/4s} suppresses s -> 0 superexponentially; declare a
  // conservative positive order so the log-window derivation stays finite.
  g.small_s_order = 4;
  g.large_s_power = extra_power;
  ProperTimeWeight w;
  const double musq = mu * mu;
  w.w = [musq](double s) { return std::exp(-musq * s); };
  w.decay_rate = musq;
  w.small_s_order = 0;
  QuadratureConfig local = cfg;
  local.split_point = std::max(geo.r / (2.0 * mu), 1e-6);
  return quad_value(proper_time_integrate(g, 0.0, w, local), "resolvent kernel");
}

const std::function<double(double)> kUnitExtra = [](double) { return 1.0; };
}  // namespace

SpinKernel pauli_resolvent_kernel(double mu, double b, const Vec3& x, const Vec3& y,
                                  const QuadratureConfig& cfg) {
  if (!(mu > 0.0)) throw std::domain_error("pauli_resolvent_kernel: requires mu > 0");
  if (!(b >= 0.0)) throw std::domain_error("pauli_resolvent_kernel: requires b >= 0");
  const ResolventGeometry geo = resolvent_geometry(b, x, y);
  if (!(geo.r > 0.0))
    throw std::domain_error("pauli_resolvent_kernel: coincident points (kernel diverges)");
  SpinKernel out;
  out.up = geo.gauge * resolvent_integral(geo, mu, +1, kUnitExtra, 0.0, cfg);
  out.down = geo.gauge * resolvent_integral(geo, mu, -1, kUnitExtra, 0.0, cfg);
  return out;
}

SpinKernel pauli_resolvent_derivative(double mu, double b, const Vec3& x, const Vec3& y, int j,
                                      const QuadratureConfig& cfg) {
  if (!(mu > 0.0)) throw std::domain_error("pauli_resolvent_derivative: requires mu > 0");
  if (!(b >= 0.0)) throw std::domain_error("pauli_resolvent_derivative: requires b >= 0");
  if (j < 0 || j > 2) throw std::domain_error("pauli_resolvent_derivative: j must be 0, 1, or 2");
  const ResolventGeometry geo = resolvent_geometry(b, x, y);
  if (!(geo.r > 0.0))
    throw std::domain_error("pauli_resolvent_derivative: coincident points");
  const double d1 = x.x - y.x, d2 = x.y - y.y, d3 = x.z - y.z;

  SpinKernel out;
  if (j == 2) {
    // Pi_3 kernel = i (x3 - y3)/(2s) times the heat kernel.
    const std::function<double(double)> half_inv_s = [](double s) { return 0.5 / s; };
    for (int sigma : {+1, -1}) {
      const double val = (d3 == 0.0) ? 0.0
                                     : d3 * resolvent_integral(geo, mu, sigma, half_inv_s, -1.0, cfg);
      const std::complex<double> comp = geo.gauge * std::complex<double>(0.0, val);
      (sigma > 0 ? out.up : out.down) = comp;
    }
    return out;
  }

  // Transverse components:
  //   Pi_1 kernel = (b/2) [ (x2-y2) + i coth(bs) (x1-y1) ] K
  //   Pi_2 kernel = (b/2) [ (y1-x1) + i coth(bs) (x2-y2) ] K
  // The coth part folds to ((coth_reduced(bs)+1)/2s) which stays finite at b = 0.
  const double b_half = b / 2.0;
  const double real_coeff = (j == 0) ? b_half * d2 : -b_half * d1;
  const double imag_coeff = (j == 0) ? d1 : d2;
  const std::function<double(double)> coth_half_inv_s = [b](double s) {
    return (coth_reduced(b * s) + 1.0) / (2.0 * s);
  };
  for (int sigma : {+1, -1}) {
    const double re_int =
        (real_coeff == 0.0) ? 0.0 : real_coeff * resolvent_integral(geo, mu, sigma, kUnitExtra, 0.0, cfg);
    const double im_int =
        (imag_coeff == 0.0) ? 0.0
                            : imag_coeff * resolvent_integral(geo, mu, sigma, coth_half_inv_s, 0.0, cfg);
    const std::complex<double> comp = geo.gauge * std::complex<double>(re_int, im_int);
    (sigma > 0 ? out.up : out.down) = comp;
  }
  return out;
}

std::vector<std::pair<Vec3, Vec3>> kernel_bound_samples(int n, unsigned long long seed,
                                                        double box_side, double min_separation) {
  if (n < 0) throw std::domain_error("kernel_bound_samples: requires n >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box_side / 2.0, box_side / 2.0);
  std::vector<std::pair<Vec3, Vec3>> out;
  out.reserve(static_cast<size_t>(n));
  while (out.size() < static_cast<size_t>(n)) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    const Vec3 y{u(rng), u(rng), u(rng)};
    if (norm(x - y) >= min_separation) out.emplace_back(x, y);
  }
  return out;
}

KernelBoundReport check_kernel_bounds(double mu, double b,
                                      const std::vector<std::pair<Vec3, Vec3>>& samples,
                                      const QuadratureConfig& cfg) {
  if (!(mu > 0.0)) throw std::domain_error("check_kernel_bounds: requires mu > 0");
  if (!(b >= 0.0)) throw std::domain_error("check_kernel_bounds: requires b >= 0");
  QuadratureConfig local = cfg;
  local.rel_tol = std::max(cfg.rel_tol, 1e-9);  // margins are O(1) relative

  KernelBoundReport rep;
  rep.samples = static_cast<int>(samples.size());
  bool first = true;
  for (const auto& [x, y] : samples) {
    const double r = norm(x - y);
    if (!(r > 0.0)) throw std::domain_error("check_kernel_bounds: coincident sample pair");
    const double dperp = std::hypot(x.x - y.x, x.y - y.y);
    const double damp = std::exp(-mu * r);

    KernelBoundSample smp;
    smp.x = x;
    smp.y = y;
    const SpinKernel res = pauli_resolvent_kernel(mu, b, x, y, local);
    smp.resolvent_value = std::max(std::abs(res.up), std::abs(res.down));
    smp.resolvent_bound = (1.0 / (4.0 * kPi)) * (1.0 / r + 2.0 * b / mu) * damp;

    smp.gradient_bound = (b / (2.0 * kPi) + 2.0 / (kPi * r * r) + 2.0 * mu / (kPi * r) +
                          5.0 * b * b * dperp / (4.0 * kPi * mu)) *
                         damp;
    smp.gradient_value = 0.0;
    for (int j = 0; j < 3; ++j) {
      const SpinKernel der = pauli_resolvent_derivative(mu, b, x, y, j, local);
      smp.gradient_value =
          std::max({smp.gradient_value, std::abs(der.up), std::abs(der.down)});
    }

    const double res_margin = smp.resolvent_bound - smp.resolvent_value;
    const double grad_margin = smp.gradient_bound - smp.gradient_value;
    if (first || res_margin < rep.min_resolvent_margin) {
      rep.min_resolvent_margin = res_margin;
      rep.worst_resolvent = smp;
    }
    if (first || grad_margin < rep.min_gradient_margin) {
      rep.min_gradient_margin = grad_margin;
      rep.worst_gradient = smp;
    }
    first = false;
  }
  rep.all_nonnegative =
      rep.samples > 0 && rep.min_resolvent_margin >= 0.0 && rep.min_gradient_margin >= 0.0;
  return rep;
}

double f_pv_omega(const PvScheme& sch, double omega, double b, const QuadratureConfig& cfg) {
  if (!(b >= 0.0)) throw std::domain_error("f_pv_omega: requires b >= 0");
  if (b == 0.0) return 0.0;
  // (1/4 pi^{3/2}) integral w(s) e^{-s omega^2} coth_reduced(s b) s^{-3/2} ds
  ProperTimeIntegrand g;
  g.g = [b](double s) { return coth_reduced(s * b); };
  g.small_s_order = 2;
  g.large_s_power = 1;
  ProperTimeWeight w;
  const double osq = omega * omega;
  w.w = [&sch, osq](double s) { return pv_weight(sch, s) * std::exp(-osq * s); };
  w.decay_rate = sch.m0 * sch.m0 + osq;
  w.small_s_order = 2;
  QuadratureConfig local = cfg;
  local.split_point = std::min(1.0 / b, 1.0 / w.decay_rate);
  QuadResult r = proper_time_integrate(g, 1.5, w, local);
  const double pref = 1.0 / kFourPi32;
  return quad_value(r, "f_pv_omega") * pref;
}

double f_pv_via_omega(const PvScheme& sch, double b, const QuadratureConfig& cfg) {
  if (!(b >= 0.0)) throw std::domain_error("f_pv_via_omega: requires b >= 0");
  if (b == 0.0) return 0.0;
  // (1/pi) integral_R f_omega omega^2 domega = (2/pi) integral_0^inf ...;
  // the integrand envelope C7/omega^7 fixes the outer cutoff analytically:
  //   |f_omega| <= (1/4 pi^{3/2}) (alpha b^2/3) Gamma(7/2) / omega^7,
  //   alpha = (1/2) sum |c_j| m_j^4.
  QuadratureConfig inner = cfg;
  inner.rel_tol = std::max(1e-12, cfg.rel_tol * 0.03);
  auto f = [&](double omega) { return f_pv_omega(sch, omega, b, inner) * omega * omega; };

  const double alpha = 0.5 * (std::abs(sch.c0) * std::pow(sch.m0, 4) +
                              std::abs(sch.c1) * std::pow(sch.m1, 4) +
                              std::abs(sch.c2) * std::pow(sch.m2, 4));
  const double c7 = (1.0 / kFourPi32) * (alpha * b * b / 3.0) * (15.0 / 8.0) * std::sqrt(kPi);
  double cutoff = 8.0 * std::max({sch.m2, std::sqrt(b), 1.0});
  QuadResult first = adaptive_integrate(f, 0.0, cutoff, cfg.rel_tol, 0.0, cfg.max_subdivisions);
  const double scale = std::max(std::abs(first.value), 1e-300);
  // Tail of the omega^2-weighted integrand beyond the cutoff: C7/(4 cutoff^4).
  double target = 0.3 * cfg.rel_tol * scale;
  double tail = c7 / (4.0 * std::pow(cutoff, 4));
  while (tail > target && cutoff < 1e6) {
    const double next = cutoff * 1.5;
    QuadResult ext = adaptive_integrate(f, cutoff, next, cfg.rel_tol, target, cfg.max_subdivisions);
    first.value += ext.value;
    first.abs_error += ext.abs_error;
    first.converged = first.converged && ext.converged;
    cutoff = next;
    tail = c7 / (4.0 * std::pow(cutoff, 4));
  }
  first.abs_error += tail;
  if (!first.converged)
    throw ConvergenceError("f_pv_via_omega: frequency integral did not converge", first);
  return (2.0 / kPi) * first.value;
}

}  // namespace ehvac
