#include "ehvac/quadrature.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

namespace ehvac {

namespace {

// ---------------------------------------------------------------------------
// Bernoulli numbers, exact.  B_m from the defining recurrence
//   sum_{j=0}^{m} C(m+1, j) B_j = 0,  B_0 = 1,
// computed once in exact rational arithmetic up to B_128.
// ---------------------------------------------------------------------------
const std::vector<mpq_class>& bernoulli_table() {
  static const std::vector<mpq_class> table = [] {
    const int max_m = 128;
    std::vector<mpq_class> b(max_m + 1);
    b[0] = 1;
    for (int m = 1; m <= max_m; ++m) {
      if (m > 1 && m % 2 == 1) {
        b[m] = 0;
        continue;
      }
      // sum_{j=0}^{m-1} C(m+1, j) B_j, binomial updated incrementally
      mpz_class binom = 1;  // C(m+1, 0)
      mpq_class acc = 0;
      for (int j = 0; j < m; ++j) {
        acc += mpq_class(binom) * b[j];
        binom = binom * (m + 1 - j) / (j + 1);  // -> C(m+1, j+1), exact
      }
      b[m] = -acc / mpq_class(m + 1);
      b[m].canonicalize();
    }
    return b;
  }();
  return table;
}

double mpq_to_double_nearest(const mpq_class& q) {
  mpfr_t t;
  mpfr_init2(t, 53);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
  double v = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return v;
}

// Series coefficients of x*coth(x) = 1 + sum_{n>=1} a_n x^{2n},
// a_n = B_{2n} 4^n / (2n)!, generated from the exact rationals so no
// hand-typed literal can drift.
const std::array<double, 21>& coth_series_coeffs() {
  static const std::array<double, 21> coeffs = [] {
    std::array<double, 21> a{};
    const auto& b = bernoulli_table();
    mpq_class four_n = 1;
    mpz_class fact = 1;
    for (int n = 1; n <= 20; ++n) {
      four_n *= 4;
      fact *= (2 * n - 1);
      fact *= (2 * n);
      a[static_cast<size_t>(n)] =
          mpq_to_double_nearest(b[static_cast<size_t>(2 * n)] * four_n / mpq_class(fact));
    }
    return a;
  }();
  return coeffs;
}

// ---------------------------------------------------------------------------
// 15-point Gauss-Kronrod rule (7-point Gauss embedded), standard abscissae.
// ---------------------------------------------------------------------------
constexpr std::array<double, 8> kGkNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> kGkWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEval {
  double kronrod = 0.0;
  double err = 0.0;
  long evals = 0;
};

PanelEval gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  long double kron = 0.0L;
  long double gauss = 0.0L;
  // Center node (index 7): Kronrod weight 7, Gauss weight 3.
  std::array<double, 15> fv{};
  for (int i = 0; i < 7; ++i) {
    fv[static_cast<size_t>(i)] = f(c - h * kGkNodes[static_cast<size_t>(i)]);
    fv[static_cast<size_t>(14 - i)] = f(c + h * kGkNodes[static_cast<size_t>(i)]);
  }
  fv[7] = f(c);
  for (int i = 0; i < 7; ++i) {
    kron += (long double)kGkWeights[static_cast<size_t>(i)] *
            ((long double)fv[static_cast<size_t>(i)] + (long double)fv[static_cast<size_t>(14 - i)]);
  }
  kron += (long double)kGkWeights[7] * (long double)fv[7];
  // Gauss nodes are the odd-index Kronrod nodes.
  for (int i = 0; i < 3; ++i) {
    gauss += (long double)kGaussWeights[static_cast<size_t>(i)] *
             ((long double)fv[static_cast<size_t>(2 * i + 1)] + (long double)fv[static_cast<size_t>(13 - 2 * i)]);
  }
  gauss += (long double)kGaussWeights[3] * (long double)fv[7];
  PanelEval out;
  out.kronrod = static_cast<double>(kron * h);
  out.err = static_cast<double>(std::fabs((kron - gauss) * h));
  out.evals = 15;
  return out;
}

struct Panel {
  double right;
  double value;
  double err;
};

// Adaptive bisection with deterministic refinement (worst panel, leftmost on
// ties) and deterministic ascending-order summation of the final panel list.
QuadResult adaptive_core(const std::function<double(double)>& f, double a,
                         double b, double rel_tol, double abs_tol,
                         int max_subdivisions, int initial_panels) {
  QuadResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::map<double, Panel> panels;  // keyed by left endpoint
  const double w = (b - a) / initial_panels;
  for (int i = 0; i < initial_panels; ++i) {
    const double l = a + i * w;
    const double r = (i + 1 == initial_panels) ? b : a + (i + 1) * w;
    PanelEval pe = gk15(f, l, r);
    panels[l] = Panel{r, pe.kronrod, pe.err};
    res.evaluations += pe.evals;
  }

  auto totals = [&panels](long double& value, long double& err) {
    value = 0.0L;
    err = 0.0L;
    for (const auto& [l, p] : panels) {
      (void)l;
      value += p.value;
      err += p.err;
    }
  };

  long double total = 0.0L;
  long double total_err = 0.0L;
  totals(total, total_err);
  while (true) {
    const double tol = std::max(abs_tol, rel_tol * std::fabs(static_cast<double>(total)));
    if (static_cast<double>(total_err) <= tol) break;
    if (res.subdivisions >= max_subdivisions) break;
    // Worst panel; std::map iteration order makes ties resolve leftmost.
    auto worst = panels.begin();
    for (auto it = panels.begin(); it != panels.end(); ++it) {
      if (it->second.err > worst->second.err) worst = it;
    }
    const double l = worst->first;
    const double r = worst->second.right;
    const double m = 0.5 * (l + r);
    if (!(m > l && m < r)) break;  // interval exhausted at double precision
    PanelEval left = gk15(f, l, m);
    PanelEval right = gk15(f, m, r);
    res.evaluations += left.evals + right.evals;
    panels.erase(worst);
    panels[l] = Panel{m, left.kronrod, left.err};
    panels[m] = Panel{r, right.kronrod, right.err};
    ++res.subdivisions;
    totals(total, total_err);
  }

  // Node-doubling verification: recompute every panel split in half and use
  // the refined value; the coarse/fine discrepancy joins the error estimate.
  long double fine = 0.0L;
  long double fine_err = 0.0L;
  for (const auto& [l, p] : panels) {
    const double m = 0.5 * (l + p.right);
    if (!(m > l && m < p.right)) {
      fine += p.value;
      fine_err += p.err;
      continue;
    }
    PanelEval le = gk15(f, l, m);
    PanelEval re = gk15(f, m, p.right);
    res.evaluations += le.evals + re.evals;
    fine += (long double)le.kronrod + (long double)re.kronrod;
    fine_err += (long double)le.err + (long double)re.err;
  }
  const double doubling_diff = std::fabs(static_cast<double>(fine - total));
  res.value = static_cast<double>(fine);
  res.abs_error = static_cast<double>(fine_err) + doubling_diff;
  const double tol = std::max(abs_tol, rel_tol * std::fabs(res.value));
  res.converged = res.abs_error <= 3.0 * tol || res.abs_error == 0.0;
  return res;
}

}  // namespace

BernoulliRational bernoulli_even(int n) {
  if (n < 1 || n > 64) {
    throw std::domain_error("bernoulli_even: n must be in [1, 64]");
  }
  const mpq_class& q = bernoulli_table()[static_cast<size_t>(2 * n)];
  BernoulliRational out;
  out.numerator = q.get_num().get_str();
  out.denominator = q.get_den().get_str();
  out.value = mpq_to_double_nearest(q);
  return out;
}

double bernoulli_even_value(int n) {
  if (n < 1 || n > 64) {
    throw std::domain_error("bernoulli_even_value: n must be in [1, 64]");
  }
  static const std::array<double, 65> cache = [] {
    std::array<double, 65> c{};
    for (int k = 1; k <= 64; ++k) {
      c[static_cast<size_t>(k)] = mpq_to_double_nearest(bernoulli_table()[static_cast<size_t>(2 * k)]);
    }
    return c;
  }();
  return cache[static_cast<size_t>(n)];
}

double coth_reduced(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw std::domain_error("coth_reduced: requires x >= 0");
  }
  if (x == 0.0) return 0.0;
  const auto& a = coth_series_coeffs();
  const double x2 = x * x;
  if (x <= 1e-2) {
    // Degree-8 polynomial: truncation below 1e-20 relative here.
    return x2 * (a[1] + x2 * (a[2] + x2 * (a[3] + x2 * a[4])));
  }
  if (x <= 0.25) {
    long double acc = 0.0L;
    for (int n = 10; n >= 1; --n) {
      acc = acc * (long double)x2 + (long double)a[static_cast<size_t>(n)];
    }
    return static_cast<double>(acc * (long double)x2);
  }
  const long double xl = x;
  if (xl > 360.0L) return static_cast<double>(xl - 1.0L);  // coth == 1 at double precision
  return static_cast<double>((xl - 1.0L) + 2.0L * xl / expm1l(2.0L * xl));
}

double coth_reduced_sub(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw std::domain_error("coth_reduced_sub: requires x >= 0");
  }
  if (x == 0.0) return 0.0;
  const auto& a = coth_series_coeffs();
  if (x <= 1.0) {
    const long double x2 = (long double)x * (long double)x;
    long double acc = 0.0L;
    for (int n = 20; n >= 2; --n) {
      acc = acc * x2 + (long double)a[static_cast<size_t>(n)];
    }
    return static_cast<double>(acc * x2 * x2);
  }
  const long double xl = x;
  long double l;
  if (xl > 360.0L) {
    l = xl - 1.0L;
  } else {
    l = (xl - 1.0L) + 2.0L * xl / expm1l(2.0L * xl);
  }
  return static_cast<double>(l - xl * xl / 3.0L);
}

double coth_reduced_sub_deriv(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw std::domain_error("coth_reduced_sub_deriv: requires x >= 0");
  }
  if (x == 0.0) return 0.0;
  const auto& a = coth_series_coeffs();
  if (x <= 1.0) {
    const long double x2 = (long double)x * (long double)x;
    long double acc = 0.0L;
    for (int n = 20; n >= 2; --n) {
      acc = acc * x2 + (long double)(2 * n) * (long double)a[static_cast<size_t>(n)];
    }
    return static_cast<double>(acc * x2 * (long double)x);
  }
  const long double xl = x;
  long double coth, csch2;
  if (xl > 360.0L) {
    coth = 1.0L;
    csch2 = 0.0L;
  } else {
    const long double e = expm1l(2.0L * xl);  // e^{2x} - 1
    coth = 1.0L + 2.0L / e;
    const long double em = expl(-2.0L * xl);
    const long double om = -expm1l(-2.0L * xl);  // 1 - e^{-2x}
    csch2 = 4.0L * em / (om * om);
  }
  return static_cast<double>(coth - xl * csch2 - 2.0L * xl / 3.0L);
}

QuadResult adaptive_integrate(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol,
                              int max_subdivisions) {
  return adaptive_core(f, a, b, rel_tol, abs_tol, max_subdivisions, 8);
}

QuadResult proper_time_integrate(const ProperTimeIntegrand& g, double p,
                                 const ProperTimeWeight& w,
                                 const QuadratureConfig& cfg) {
  const double sigma_tot = g.small_s_order + w.small_s_order + 1.0 - p;
  if (!(sigma_tot > 0.0)) {
    throw std::domain_error(
        "proper_time_integrate: integrand does not vanish at s=0 "
        "(small-s order + weight order + 1 - p must be positive)");
  }
  if (!(w.decay_rate > 0.0)) {
    throw std::domain_error("proper_time_integrate: weight must decay");
  }
  if (!(cfg.split_point > 0.0)) {
    throw std::domain_error("proper_time_integrate: split_point must be positive");
  }

  auto integrand = [&](double u) {
    const double s = std::exp(u);
    const double val = w.w(s) * g.g(s) * std::pow(s, 1.0 - p);
    return std::isfinite(val) ? val : 0.0;
  };

  // Window from the declared asymptotic orders...
  const double u0 = std::log(cfg.split_point);
  double u_lo = u0 - std::min(54.0 / sigma_tot, 60.0) - 4.0;
  const double tau = g.large_s_power + 1.0 - p;
  double s_hi = 54.0 / w.decay_rate;
  for (int it = 0; it < 3; ++it) {
    s_hi = (54.0 + std::max(tau, 0.0) * std::log(std::max(s_hi, 2.0))) / w.decay_rate;
  }
  double u_hi = std::max(std::log(s_hi), u0 + 2.0);

  // ...then extended by probing until both tails are genuinely negligible.
  double peak = 0.0;
  for (int i = 0; i <= 16; ++i) {
    peak = std::max(peak, std::fabs(integrand(u_lo + (u_hi - u_lo) * i / 16.0)));
  }
  const double tail_floor = (peak > 0.0 ? peak : 1.0) * 1e-22;
  for (int k = 0; k < 40 && std::fabs(integrand(u_lo)) > tail_floor; ++k) u_lo -= 3.0;
  for (int k = 0; k < 40 && std::fabs(integrand(u_hi)) > tail_floor; ++k) u_hi += 3.0;

  QuadResult res = adaptive_core(integrand, u_lo, u_hi, cfg.rel_tol, cfg.abs_tol,
                                 cfg.max_subdivisions, 32);
  // Tail guard: both endpoints were driven below tail_floor, and the
  // integrands here decay at least exponentially in u, so a few unit widths
  // of the endpoint magnitude bound what the window misses.
  res.abs_error += 8.0 * (std::fabs(integrand(u_lo)) + std::fabs(integrand(u_hi)));
  return res;
}

double quad_value(const QuadResult& r, const char* context) {
  if (!r.converged) {
    throw ConvergenceError(std::string(context) +
                               ": quadrature did not converge (best estimate " +
                               std::to_string(r.value) + ", residual " +
                               std::to_string(r.abs_error) + ")",
                           r);
  }
  return r.value;
}

void gk15_rule(double a, double b, double nodes[15], double weights[15]) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (int i = 0; i < 7; ++i) {
    nodes[i] = c - h * kGkNodes[static_cast<size_t>(i)];
    nodes[14 - i] = c + h * kGkNodes[static_cast<size_t>(i)];
    weights[i] = weights[14 - i] = h * kGkWeights[static_cast<size_t>(i)];
  }
  nodes[7] = c;
  weights[7] = h * kGkWeights[7];
}

}  // namespace ehvac
