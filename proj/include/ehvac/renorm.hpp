#pragma once

// Charge renormalization in the three-mass regulator scheme:
//
//   Z3 = 1 / (1 + (2 e^2 / 3 pi) logLambda),   0 < Z3 < 1,
//   e_ph = sqrt(Z3) e,                         b_ph = b / sqrt(Z3),
//
// so that e_ph b_ph = e b.  The regulated energy of (e, b) differs from the
// renormalized energy of (e_ph, b_ph) by a sum of rescaled unregulated
// densities that is exponentially small in the cutoff:
//
//   [b^2/8pi + f_pv(e b)] - [b_ph^2/8pi + f_eh(e_ph b_ph)]
//     = sum_{j=1,2} c_j (m_j^4/m0^4) f_eh(m0^2 e b / m_j^2)
//
// with |LHS| <= K |c_1| (e_ph b_ph / m0)^4 exp(-6 pi (1 - Z3) / e_ph^2) where
// K = max_x 2 m^4 |f_eh(x; m)| / x^4 = 1/(180 pi^2), attained as x -> 0.

#include "ehvac/pv_scheme.hpp"
#include "ehvac/quadrature.hpp"

namespace ehvac {

struct RenormState {
  PvScheme scheme;
  double e = 0.0;     // bare charge
  double z3 = 1.0;    // wave-function constant, in (0, 1]
  double e_ph = 0.0;  // renormalized charge sqrt(Z3) e
};

// Requires e >= 0.  e = 0 gives z3 = 1 exactly.
RenormState renormalize(double e, const PvScheme& sch);

// Renormalized field strength b / sqrt(Z3); e_ph * bph_of(b) == e * b.
double bph_of(const RenormState& st, double b);

// K = max over x > 0 of 2 mass^4 |f_eh(x; mass)| / x^4, located by golden-
// section search on log x; the maximum sits at the x -> 0 endpoint with value
// 1/(180 pi^2).  Independent of mass by the scaling f_eh(x; m) = m^4 f_eh(x/m^2; 1).
double k_constant(double mass, const QuadratureConfig& cfg = QuadratureConfig{});

struct EnergyDifference {
  double difference = 0.0;            // bracket difference, assembled from both routes
  double exact_identity_value = 0.0;  // closed-form value of the same difference
  double suppression_bound = 0.0;     // K |c1| (e_ph b_ph/m0)^4 exp(-6 pi (1-Z3)/e_ph^2)
  double k_used = 0.0;                // the constant K entering the bound
  double b_ph = 0.0;
};

// Evaluates both sides of the cancellation identity at field strength b >= 0.
// `difference` uses the two energy brackets (independent quadratures);
// `exact_identity_value` uses the closed form; they agree up to quadrature
// error.  Internally tightens the quadrature tolerance because the brackets
// cancel to many digits.
EnergyDifference energy_difference(const RenormState& st, double b,
                                   const QuadratureConfig& cfg = QuadratureConfig{});

}  // namespace ehvac
