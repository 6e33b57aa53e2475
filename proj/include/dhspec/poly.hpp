#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dhspec/rational.hpp"

namespace dhspec {

/// Exponent vector of a monomial x1^a1 ... xN^aN.
using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents& e);

/// Graded lexicographic order: lower total degree first, then
/// lexicographic on the exponent vector.
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial over the rationals. Zero coefficients are
/// never stored, so structural equality is polynomial equality.
class MultiPoly {
 public:
  using TermMap = std::map<Exponents, Rational, GradedLex>;

  explicit MultiPoly(unsigned dim);

  static MultiPoly constant(unsigned dim, const Rational& c);
  /// The coordinate function x_{i+1} (i is zero based).
  static MultiPoly variable(unsigned dim, unsigned i);
  static MultiPoly monomial(const Exponents& e, const Rational& c = Rational(1));
  /// |x|^2 = x1^2 + ... + xN^2.
  static MultiPoly radius_squared(unsigned dim);

  unsigned dimension() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Maximum total degree over stored terms; -1 for the zero polynomial.
  int degree() const;
  Rational coefficient(const Exponents& e) const;
  /// Coefficient of the largest term in graded lex order (0 for the zero polynomial).
  Rational leading_coefficient() const;

  void add_term(const Exponents& e, const Rational& c);

  MultiPoly& operator+=(const MultiPoly& q);
  MultiPoly& operator-=(const MultiPoly& q);
  MultiPoly& operator*=(const Rational& c);
  MultiPoly scaled(const Rational& c) const;
  MultiPoly operator-() const;

  friend MultiPoly operator+(MultiPoly p, const MultiPoly& q) { return p += q; }
  friend MultiPoly operator-(MultiPoly p, const MultiPoly& q) { return p -= q; }
  friend MultiPoly operator*(const MultiPoly& p, const MultiPoly& q);
  friend MultiPoly operator*(MultiPoly p, const Rational& c) { return p *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly p) { return p *= c; }
  friend bool operator==(const MultiPoly& p, const MultiPoly& q) {
    return p.dim_ == q.dim_ && p.terms_ == q.terms_;
  }

  MultiPoly pow(unsigned k) const;

  double evaluate(std::span<const double> x) const;

  /// Text form `c * x1^a x2^b`, terms in descending graded lex order,
  /// joined by " + ". Unit exponents print without `^1`; the zero
  /// polynomial prints as "0".
  std::string to_string() const;

 private:
  void require_same_dim(const MultiPoly& q) const;

  unsigned dim_;
  TermMap terms_;
};

/// Inverse of MultiPoly::to_string. Also accepts `-` separators and bare
/// monomials such as `x1 x2`.
MultiPoly parse_poly(std::string_view text, unsigned dim);

enum class PolyOp { add, sub, mul };

/// Exact add/sub/mul; throws DimensionMismatch when dimensions differ.
MultiPoly poly_arith(const MultiPoly& p, const MultiPoly& q, PolyOp op);

MultiPoly partial(const MultiPoly& p, unsigned i);
MultiPoly laplacian(const MultiPoly& p);
/// x . grad p; multiplies each monomial by its total degree.
MultiPoly euler_grad(const MultiPoly& p);
bool is_harmonic(const MultiPoly& p);

/// Explicit displacement Hessian of the confined porous-medium flow:
///   m = 1:  -lap p + x . grad p
///   m > 1:  -(m-1)/2 (1 - |x|^2) lap p + x . grad p
MultiPoly apply_HE(const MultiPoly& p, const Rational& m, unsigned N);

/// (HE^2 + N(m-1) HE) / (1 + N(m-1)), composed from two apply_HE calls.
MultiPoly apply_HI(const MultiPoly& p, const Rational& m, unsigned N);

/// Same operator as apply_HI, evaluated in one pass over the terms of p
/// through the matrix of HE on the monomial basis. Never calls apply_HE.
MultiPoly apply_HI_direct(const MultiPoly& p, const Rational& m, unsigned N);

/// Image of a single monomial under HE, from the closed-form action on x^a.
MultiPoly he_monomial_image(const Exponents& e, const Rational& m);

}  // namespace dhspec
