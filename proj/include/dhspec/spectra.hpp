#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dhspec/poly.hpp"
#include "dhspec/rational.hpp"

namespace dhspec {

/// Eigenfunction label: harmonic degree l, radial order k, harmonic
/// label n in 1..N_l.
struct EigenIndex {
  unsigned l = 0;
  unsigned n = 1;
  unsigned k = 0;
};

struct SpectrumEntry {
  unsigned l = 0;
  unsigned k = 0;
  Rational lambda;
  Rational mu;
  Integer multiplicity;
  unsigned degree = 0;  // l + 2k
};

/// Throws InvalidIndex unless (l,k) != (0,0) and, for N = 1, l <= 1.
void validate_pair(unsigned l, unsigned k, unsigned N);

/// Porous-medium eigenvalue l + 2k + 2k(k + l + N/2 - 1)(m - 1).
Rational lambda_eig(unsigned l, unsigned k, const Rational& m, unsigned N);
/// Fourth-order eigenvalue (lambda^2 + N(m-1) lambda) / (1 + N(m-1)).
Rational mu_eig(unsigned l, unsigned k, const Rational& m, unsigned N);
Rational mu_from_lambda(const Rational& lambda, const Rational& m, unsigned N);

/// Dimension of the space of degree-l spherical harmonics in R^N.
Integer multiplicity(unsigned l, unsigned N);

/// Coefficients (ascending in z) of the probabilists' Hermite polynomial
/// of degree n, built by psi_{n+1} = z psi_n - psi_n'.
std::vector<Rational> hermite_1d(unsigned n);
/// Product Hermite polynomial psi_a1(x1) ... psi_aN(xN).
MultiPoly hermite(const Exponents& alpha);

/// Coefficients of the terminating Gauss series F(-k, b; c; z), degree k.
std::vector<Rational> hypergeom_poly(unsigned k, const Rational& b, const Rational& c);
/// Coefficients of the terminating Kummer series 1F1(-k; c; z), degree k.
std::vector<Rational> confluent_hypergeom_poly(unsigned k, const Rational& c);

/// Homogeneous harmonic polynomial of degree l, basis element n.
///
/// Basis per dimension (each element scaled to unit leading coefficient
/// in graded lex order):
///   N = 1: 1 (l = 0), x1 (l = 1).
///   N = 2: n = 1 -> Re (x1 + i x2)^l, n = 2 -> Im (x1 + i x2)^l.
///   N = 3: pairs (cos, sin) of order j = l, l-1, ..., 1, followed by the
///          zonal j = 0 element, i.e. P_l^j(x3, r) Re/Im (x1 + i x2)^j.
///          For l = 1 this yields x1, x2, x3.
MultiPoly solid_harmonic(unsigned l, unsigned n, unsigned N);

/// Polynomial eigenfunction of HE and HI of degree l + 2k.
///
/// m > 1: F(-k, 1/(m-1) + l + N/2 - 1 + k; l + N/2; |x|^2) Y_ln.
/// m = 1: 1F1(-k; l + N/2; |x|^2 / 2) Y_ln, the Laguerre form of the
///        Ornstein-Uhlenbeck eigenfunction; it is a combination of product
///        Hermite polynomials of total degree l + 2k (see hermite_expansion).
MultiPoly eigenfunction(const EigenIndex& idx, const Rational& m, unsigned N);

/// Coefficients of p in the product Hermite basis, keyed by multi-index.
MultiPoly::TermMap hermite_expansion(const MultiPoly& p);

struct EpsLambda {
  double epsilon = 0;
  double lambda = 0;
};

/// Converts an HI eigenvalue mu into the HE eigenvalue lambda through the
/// shift epsilon = a/2 + sqrt(mu (1 + a) + a^2/4), lambda = mu (1 + a)/epsilon,
/// a = N(m - 1).
EpsLambda mu_to_lambda(double mu, double m, unsigned N);

struct ExactEpsLambda {
  Rational epsilon;
  Rational lambda;
};
/// Exact variant; empty when the radical is irrational.
std::optional<ExactEpsLambda> mu_to_lambda_exact(const Rational& mu, const Rational& m, unsigned N);

struct CrossingRoot {
  double a = 0;  // N(m - 1)
  double m = 1;
  std::optional<Rational> exact_a;
  std::optional<Rational> exact_m;
};

struct CrossingSet {
  bool all_m = false;  // the two eigenvalue branches coincide identically
  std::vector<CrossingRoot> roots;
};

/// All m >= 1 where mu_A(m) = mu_B(m). The eigenvalue branches are used
/// formally, without the N = 1 restriction on l.
CrossingSet crossing(unsigned lA, unsigned kA, unsigned lB, unsigned kB, unsigned N);

/// Entries with l + 2k <= max_degree, ascending in mu, ties by (l, k).
std::vector<SpectrumEntry> spectrum_table(const Rational& m, unsigned N, unsigned max_degree);

/// Every valid (l, n, k) with l + 2k <= max_degree, in (degree, l, k, n) order.
std::vector<EigenIndex> eigen_indices(unsigned N, unsigned max_degree);

}  // namespace dhspec
