#include "ehvac/field_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ehvac {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using Cplx = std::complex<double>;

// Forward c2c FFT of one component, unnormalized (FFTW sign convention -1).
std::vector<Cplx> fft3(const FieldGrid& g, int comp, int sign) {
  const int n = g.n;
  std::vector<Cplx> data(static_cast<size_t>(n) * n * n);
  for (size_t i = 0; i < data.size(); ++i) {
    const Vec3& v = g.values[i];
    data[i] = Cplx(comp == 0 ? v.x : comp == 1 ? v.y : v.z, 0.0);
  }
  fftw_plan plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(data.data()),
                                    reinterpret_cast<fftw_complex*>(data.data()), sign,
                                    FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return data;
}

std::vector<Cplx> ifft3_raw(std::vector<Cplx>& spec, int n) {
  fftw_plan plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(spec.data()),
                                    reinterpret_cast<fftw_complex*>(spec.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return spec;
}

// FFTW's 3D c2c layout is row-major over (dim0, dim1, dim2); our grid index
// is (k*n + j)*n + i with i fastest, so dim0 = k, dim1 = j, dim2 = i and the
// flat offsets coincide.
int freq_of(int m, int n) { return (m <= n / 2) ? m : m - n; }

struct SpectralField {
  std::array<std::vector<Cplx>, 3> comp;
  int n = 0;
  double side = 0.0;
};

SpectralField forward(const FieldGrid& g) {
  SpectralField s;
  s.n = g.n;
  s.side = g.side();
  for (int c = 0; c < 3; ++c) s.comp[static_cast<size_t>(c)] = fft3(g, c, FFTW_FORWARD);
  return s;
}

FieldGrid inverse(SpectralField& s, double spacing, const std::string& tag) {
  FieldGrid out;
  out.n = s.n;
  out.spacing = spacing;
  out.profile_tag = tag;
  const size_t total = static_cast<size_t>(s.n) * s.n * s.n;
  out.values.assign(total, Vec3{});
  const double norm_factor = 1.0 / static_cast<double>(total);
  for (int c = 0; c < 3; ++c) {
    ifft3_raw(s.comp[static_cast<size_t>(c)], s.n);
    for (size_t i = 0; i < total; ++i) {
      const double re = s.comp[static_cast<size_t>(c)][i].real() * norm_factor;
      if (c == 0)
        out.values[i].x = re;
      else if (c == 1)
        out.values[i].y = re;
      else
        out.values[i].z = re;
    }
  }
  return out;
}

double max_abs(const FieldGrid& g) {
  double m = 0.0;
  for (const Vec3& v : g.values) m = std::max(m, norm(v));
  return m;
}
}  // namespace

AnalyticField gaussian_envelope_profile(double box_side, double sigma, double amplitude) {
  if (!(box_side > 0.0) || !(sigma > 0.0))
    throw std::domain_error("gaussian_envelope_profile: requires box_side, sigma > 0");
  const Vec3 c{box_side / 2.0, box_side / 2.0, box_side / 2.0};
  const double s2 = sigma * sigma;
  auto w = [c, s2, amplitude](const Vec3& p) {
    const Vec3 d = p - c;
    return amplitude * std::exp(-dot(d, d) / (2.0 * s2));
  };
  AnalyticField f;
  f.tag = "gaussian-envelope";
  // b = curl (0,0,w) = (dw/dx2, -dw/dx1, 0)
  f.b = [c, s2, w](const Vec3& p) {
    const double v = w(p);
    return Vec3{-(p.y - c.y) * v / s2, (p.x - c.x) * v / s2, 0.0};
  };
  f.a = [w](const Vec3& p) { return Vec3{0.0, 0.0, w(p)}; };
  return f;
}

AnalyticField fourier_mode_profile(double box_side, double amplitude) {
  if (!(box_side > 0.0)) throw std::domain_error("fourier_mode_profile: requires box_side > 0");
  const double k = 2.0 * kPi / box_side;
  AnalyticField f;
  f.tag = "fourier-mode";
  f.b = [k, amplitude](const Vec3& p) { return Vec3{0.0, 0.0, amplitude * std::cos(k * p.x)}; };
  f.a = [k, amplitude](const Vec3& p) {
    return Vec3{0.0, amplitude / k * std::sin(k * p.x), 0.0};
  };
  return f;
}

AnalyticField linear_profile(const Vec3& b0, const double m[3][3]) {
  const double tr = m[0][0] + m[1][1] + m[2][2];
  if (std::abs(tr) > 1e-14)
    throw std::domain_error("linear_profile: matrix must be traceless (div b = 0)");
  std::array<std::array<double, 3>, 3> mm{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mm[static_cast<size_t>(i)][static_cast<size_t>(j)] = m[i][j];
  AnalyticField f;
  f.tag = "linear";
  f.b = [b0, mm](const Vec3& p) {
    return Vec3{b0.x + mm[0][0] * p.x + mm[0][1] * p.y + mm[0][2] * p.z,
                b0.y + mm[1][0] * p.x + mm[1][1] * p.y + mm[1][2] * p.z,
                b0.z + mm[2][0] * p.x + mm[2][1] * p.y + mm[2][2] * p.z};
  };
  return f;
}

AnalyticField constant_profile(const Vec3& b0) {
  AnalyticField f;
  f.tag = "constant";
  f.b = [b0](const Vec3&) { return b0; };
  f.a = [b0](const Vec3& p) { return cross(b0, p) * 0.5; };
  return f;
}

FieldGrid sample_profile(const AnalyticField& f, int n, double box_side) {
  if (n < 2 || !(box_side > 0.0))
    throw std::domain_error("sample_profile: requires n >= 2 and box_side > 0");
  FieldGrid g;
  g.n = n;
  g.spacing = box_side / n;
  g.profile_tag = f.tag;
  g.values.resize(static_cast<size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        g.at(i, j, k) = f.b(Vec3{i * g.spacing, j * g.spacing, k * g.spacing});
  return g;
}

FieldGrid biot_savart(const FieldGrid& b) {
  if (b.n < 2) throw std::domain_error("biot_savart: empty grid");
  const int n = b.n;
  const double scale = max_abs(b);
  SpectralField s = forward(b);
  const size_t total = static_cast<size_t>(n) * n * n;

  // Mean must vanish for a periodic potential to exist.  The tolerance matches
  // the grid's divergence budget (1e-10 relative): localized profiles sampled
  // on a finite box carry periodization tails of that order.
  const double mean_mag =
      std::abs(s.comp[0][0]) + std::abs(s.comp[1][0]) + std::abs(s.comp[2][0]);
  if (mean_mag > 1e-10 * static_cast<double>(total) * std::max(scale, 1e-300))
    throw std::domain_error("biot_savart: field has nonzero mean on the torus");

  // Spectral divergence check (relative to the |k||v_hat| scale).
  double div_max = 0.0, kv_max = 0.0;
  const double kfac = 2.0 * kPi / b.side();
  for (int mk = 0; mk < n; ++mk)
    for (int mj = 0; mj < n; ++mj)
      for (int mi = 0; mi < n; ++mi) {
        const size_t id = (static_cast<size_t>(mk) * n + mj) * n + mi;
        const double kx = kfac * freq_of(mi, n), ky = kfac * freq_of(mj, n),
                     kz = kfac * freq_of(mk, n);
        const Cplx bx = s.comp[0][id], by = s.comp[1][id], bz = s.comp[2][id];
        const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
        const double vmag = std::sqrt(std::norm(bx) + std::norm(by) + std::norm(bz));
        div_max = std::max(div_max, std::abs(kx * bx + ky * by + kz * bz));
        kv_max = std::max(kv_max, kmag * vmag);
      }
  if (kv_max > 0.0 && div_max > 1e-8 * kv_max)
    throw std::domain_error("biot_savart: input grid is not divergence-free");

  SpectralField a;
  a.n = n;
  a.side = s.side;
  for (int c = 0; c < 3; ++c) a.comp[static_cast<size_t>(c)].assign(total, Cplx{});
  const Cplx iunit(0.0, 1.0);
  for (int mk = 0; mk < n; ++mk)
    for (int mj = 0; mj < n; ++mj)
      for (int mi = 0; mi < n; ++mi) {
        const size_t id = (static_cast<size_t>(mk) * n + mj) * n + mi;
        const bool nyquist = (n % 2 == 0) && (mi == n / 2 || mj == n / 2 || mk == n / 2);
        if (nyquist) continue;  // odd-symmetry modes have no consistent derivative
        const double kx = kfac * freq_of(mi, n), ky = kfac * freq_of(mj, n),
                     kz = kfac * freq_of(mk, n);
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;  // A_hat(0) = 0 gauge choice
        const Cplx bx = s.comp[0][id], by = s.comp[1][id], bz = s.comp[2][id];
        a.comp[0][id] = iunit * (ky * bz - kz * by) / k2;
        a.comp[1][id] = iunit * (kz * bx - kx * bz) / k2;
        a.comp[2][id] = iunit * (kx * by - ky * bx) / k2;
      }
  return inverse(a, b.spacing, "potential:" + b.profile_tag);
}

FieldGrid curl_spectral(const FieldGrid& v) {
  if (v.n < 2) throw std::domain_error("curl_spectral: empty grid");
  const int n = v.n;
  SpectralField s = forward(v);
  const size_t total = static_cast<size_t>(n) * n * n;
  SpectralField c;
  c.n = n;
  c.side = s.side;
  for (int cc = 0; cc < 3; ++cc) c.comp[static_cast<size_t>(cc)].assign(total, Cplx{});
  const double kfac = 2.0 * kPi / v.side();
  const Cplx iunit(0.0, 1.0);
  for (int mk = 0; mk < n; ++mk)
    for (int mj = 0; mj < n; ++mj)
      for (int mi = 0; mi < n; ++mi) {
        const size_t id = (static_cast<size_t>(mk) * n + mj) * n + mi;
        const bool nyquist = (n % 2 == 0) && (mi == n / 2 || mj == n / 2 || mk == n / 2);
        if (nyquist) continue;
        const double kx = kfac * freq_of(mi, n), ky = kfac * freq_of(mj, n),
                     kz = kfac * freq_of(mk, n);
        const Cplx vx = s.comp[0][id], vy = s.comp[1][id], vz = s.comp[2][id];
        c.comp[0][id] = iunit * (ky * vz - kz * vy);
        c.comp[1][id] = iunit * (kz * vx - kx * vz);
        c.comp[2][id] = iunit * (kx * vy - ky * vx);
      }
  return inverse(c, v.spacing, "curl:" + v.profile_tag);
}

double divergence_rel_spectral(const FieldGrid& v) {
  if (v.n < 2) throw std::domain_error("divergence_rel_spectral: empty grid");
  const int n = v.n;
  SpectralField s = forward(v);
  double div_max = 0.0, kv_max = 0.0;
  const double kfac = 2.0 * kPi / v.side();
  for (int mk = 0; mk < n; ++mk)
    for (int mj = 0; mj < n; ++mj)
      for (int mi = 0; mi < n; ++mi) {
        const size_t id = (static_cast<size_t>(mk) * n + mj) * n + mi;
        const double kx = kfac * freq_of(mi, n), ky = kfac * freq_of(mj, n),
                     kz = kfac * freq_of(mk, n);
        const Cplx vx = s.comp[0][id], vy = s.comp[1][id], vz = s.comp[2][id];
        const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
        const double vmag = std::sqrt(std::norm(vx) + std::norm(vy) + std::norm(vz));
        div_max = std::max(div_max, std::abs(kx * vx + ky * vy + kz * vz));
        kv_max = std::max(kv_max, kmag * vmag);
      }
  return (kv_max > 0.0) ? div_max / kv_max : 0.0;
}

FieldGrid scale_potential(const FieldGrid& a, double eps, int n_out) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::domain_error("scale_potential: requires 0 < eps <= 1");
  if (n_out < a.n)
    throw std::domain_error("scale_potential: n_out must be >= the input resolution");
  if (n_out > 512) throw std::domain_error("scale_potential: resolution overflow guard (n_out > 512)");
  const int n = a.n;
  SpectralField s = forward(a);
  const size_t total_out = static_cast<size_t>(n_out) * n_out * n_out;
  SpectralField o;
  o.n = n_out;
  o.side = a.side() / eps;
  for (int c = 0; c < 3; ++c) o.comp[static_cast<size_t>(c)].assign(total_out, Cplx{});
  const double norm_factor = 1.0 / (static_cast<double>(n) * n * n);
  // Copy each retained input mode (Nyquist dropped) to the same frequency slot
  // of the larger spectrum; amplitude scaled by 1/eps for A_eps = eps^-1 A(eps x).
  for (int mk = 0; mk < n; ++mk)
    for (int mj = 0; mj < n; ++mj)
      for (int mi = 0; mi < n; ++mi) {
        const bool nyquist = (n % 2 == 0) && (mi == n / 2 || mj == n / 2 || mk == n / 2);
        if (nyquist) continue;
        const int fi = freq_of(mi, n), fj = freq_of(mj, n), fk = freq_of(mk, n);
        const size_t src = (static_cast<size_t>(mk) * n + mj) * n + mi;
        const int oi = (fi + n_out) % n_out, oj = (fj + n_out) % n_out, ok = (fk + n_out) % n_out;
        const size_t dst = (static_cast<size_t>(ok) * n_out + oj) * n_out + oi;
        for (int c = 0; c < 3; ++c)
          o.comp[static_cast<size_t>(c)][dst] =
              s.comp[static_cast<size_t>(c)][src] * (norm_factor / eps);
      }
  // inverse() divides by n_out^3, but the coefficients above are already true
  // Fourier amplitudes; compensate so the resample is exact.
  for (int c = 0; c < 3; ++c)
    for (Cplx& z : o.comp[static_cast<size_t>(c)]) z *= static_cast<double>(total_out);
  FieldGrid out = inverse(o, (a.side() / eps) / n_out, "scaled:" + a.profile_tag);
  return out;
}

Vec3 poincare_remainder(const AnalyticField& profile, double eps, const Vec3& y, const Vec3& x,
                        const QuadratureConfig& cfg) {
  if (!(eps > 0.0)) throw std::domain_error("poincare_remainder: requires eps > 0");
  if (!profile.b) throw std::domain_error("poincare_remainder: profile has no field callable");
  const Vec3 by = profile.b(y);
  auto component = [&](int c) {
    auto f = [&, c](double t) {
      const Vec3 diff = (by - profile.b(y + (t * eps) * x)) * (t / eps);
      return c == 0 ? diff.x : c == 1 ? diff.y : diff.z;
    };
    return quad_value(adaptive_integrate(f, 0.0, 1.0, std::min(cfg.rel_tol, 1e-10), 1e-16,
                                         cfg.max_subdivisions),
                      "poincare_remainder");
  };
  const Vec3 integral{component(0), component(1), component(2)};
  return cross(x, integral);
}

Vec3 poincare_gauge_check(const AnalyticField& profile, const Vec3& y, const Vec3& x,
                          const QuadratureConfig& cfg) {
  if (!profile.a || !profile.b)
    throw std::domain_error("poincare_gauge_check: profile must carry both a and b = curl a");
  const double rel = std::min(cfg.rel_tol, 1e-13);
  auto line_integral = [&](const std::function<double(double)>& f) {
    return quad_value(adaptive_integrate(f, 0.0, 1.0, rel, 1e-16, cfg.max_subdivisions),
                      "poincare_gauge_check");
  };
  // phi(x) = x . integral_0^1 a(y + t x) dt
  auto phi = [&](const Vec3& xx) {
    double out = 0.0;
    for (int c = 0; c < 3; ++c) {
      auto f = [&, c](double t) {
        const Vec3 av = profile.a(y + t * xx);
        return c == 0 ? av.x : c == 1 ? av.y : av.z;
      };
      const double ic = line_integral(f);
      out += (c == 0 ? xx.x : c == 1 ? xx.y : xx.z) * ic;
    }
    return out;
  };
  const double h = 1e-5 * (1.0 + norm(x));
  Vec3 grad;
  grad.x = (phi(x + Vec3{h, 0, 0}) - phi(x - Vec3{h, 0, 0})) / (2.0 * h);
  grad.y = (phi(x + Vec3{0, h, 0}) - phi(x - Vec3{0, h, 0})) / (2.0 * h);
  grad.z = (phi(x + Vec3{0, 0, h}) - phi(x - Vec3{0, 0, h})) / (2.0 * h);

  Vec3 curl_int;
  for (int c = 0; c < 3; ++c) {
    auto f = [&, c](double t) {
      const Vec3 bv = profile.b(y + t * x);
      const double comp = c == 0 ? bv.x : c == 1 ? bv.y : bv.z;
      return comp * t;
    };
    const double ic = line_integral(f);
    (c == 0 ? curl_int.x : c == 1 ? curl_int.y : curl_int.z) = ic;
  }
  const Vec3 reconstructed = grad - cross(x, curl_int);
  return profile.a(y + x) - reconstructed;
}

FpvInterpolant::FpvInterpolant(const PvScheme& sch, double x_min, double x_max, int points,
                               const QuadratureConfig& cfg)
    : sch_(sch) {
  if (!(x_min > 0.0) || !(x_max > x_min))
    throw std::domain_error("FpvInterpolant: requires 0 < x_min < x_max");
  if (points < 16) throw std::domain_error("FpvInterpolant: requires points >= 16");
  x_lo_ = x_min;
  x_hi_ = x_max;
  u_lo_ = std::log(x_min);
  const double u_hi = std::log(x_max);
  du_ = (u_hi - u_lo_) / (points - 1);
  g_.resize(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = std::exp(u_lo_ + i * du_);
    g_[static_cast<size_t>(i)] = f_pv(sch_, x, cfg) / (x * x);
  }
}

double FpvInterpolant::operator()(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("FpvInterpolant: requires x >= 0");
  if (x < x_lo_) return relation_quadratic_coefficient(sch_) * x * x;
  if (x > x_hi_ * (1.0 + 1e-12))
    throw std::domain_error("FpvInterpolant: argument above the tabulated range");
  const double u = std::log(std::min(x, x_hi_));
  const int npts = static_cast<int>(g_.size());
  int j = static_cast<int>(std::floor((u - u_lo_) / du_)) - 2;  // 6-point window start
  j = std::max(0, std::min(j, npts - 6));
  // Local Lagrange interpolation of g(u) on nodes j..j+5.
  double val = 0.0;
  for (int a = j; a < j + 6; ++a) {
    double ell = 1.0;
    const double ua = u_lo_ + a * du_;
    for (int b = j; b < j + 6; ++b) {
      if (b == a) continue;
      const double ub = u_lo_ + b * du_;
      ell *= (u - ub) / (ua - ub);
    }
    val += g_[static_cast<size_t>(a)] * ell;
  }
  return val * x * x;
}

double lda_energy(const FieldGrid& b, double e_charge, const PvScheme& sch,
                  const QuadratureConfig& cfg) {
  if (!(e_charge >= 0.0)) throw std::domain_error("lda_energy: requires e >= 0");
  if (b.n < 1) throw std::domain_error("lda_energy: empty grid");
  double x_max = 0.0;
  for (const Vec3& v : b.values) x_max = std::max(x_max, e_charge * norm(v));
  const double h3 = b.spacing * b.spacing * b.spacing;
  if (x_max == 0.0) return 0.0;
  const FpvInterpolant fpv(sch, std::max(1e-6 * x_max, 1e-12), x_max * (1.0 + 1e-9), 240, cfg);
  long double acc = 0.0L;
  for (const Vec3& v : b.values) acc += static_cast<long double>(fpv(e_charge * norm(v)));
  return static_cast<double>(acc) * h3;
}

void save_grid(const std::string& path, const FieldGrid& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_grid: cannot open " + path);
  out << "ehvac-grid 1\n";
  out << "n " << g.n << "\n";
  out << "spacing " << format_shortest(g.spacing) << "\n";
  out << "profile " << (g.profile_tag.empty() ? "-" : g.profile_tag) << "\n";
  out << "data\n";
  for (const Vec3& v : g.values)
    out << format_shortest(v.x) << ' ' << format_shortest(v.y) << ' ' << format_shortest(v.z)
        << '\n';
  if (!out) throw std::runtime_error("save_grid: write failure on " + path);
}

FieldGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_grid: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "ehvac-grid" || version != 1)
    throw std::runtime_error("load_grid: unrecognized grid file format in " + path);
  FieldGrid g;
  std::string key;
  in >> key >> g.n;
  if (key != "n" || g.n < 1) throw std::runtime_error("load_grid: malformed n header");
  in >> key >> g.spacing;
  if (key != "spacing" || !(g.spacing > 0.0))
    throw std::runtime_error("load_grid: malformed spacing header");
  in >> key >> g.profile_tag;
  if (key != "profile") throw std::runtime_error("load_grid: malformed profile header");
  in >> key;
  if (key != "data") throw std::runtime_error("load_grid: missing data section");
  const size_t total = static_cast<size_t>(g.n) * g.n * g.n;
  g.values.resize(total);
  for (size_t i = 0; i < total; ++i) {
    if (!(in >> g.values[i].x >> g.values[i].y >> g.values[i].z))
      throw std::runtime_error("load_grid: truncated data section");
  }
  return g;
}

std::string histogram_csv(const FieldGrid& g, int bins) {
  if (bins < 1) throw std::domain_error("histogram_csv: requires bins >= 1");
  const double top = max_abs(g);
  std::vector<long> counts(static_cast<size_t>(bins), 0);
  const double width = (top > 0.0) ? top / bins : 1.0;
  for (const Vec3& v : g.values) {
    int idx = (top > 0.0) ? static_cast<int>(norm(v) / width) : 0;
    idx = std::min(idx, bins - 1);
    ++counts[static_cast<size_t>(idx)];
  }
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (int i = 0; i < bins; ++i)
    out << format_shortest(i * width) << ',' << format_shortest((i + 1) * width) << ','
        << counts[static_cast<size_t>(i)] << '\n';
  return out.str();
}

}  // namespace ehvac
