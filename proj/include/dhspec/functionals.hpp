#pragma once

#include <string>
#include <vector>

#include "dhspec/poly.hpp"
#include "dhspec/weighted.hpp"

namespace dhspec {

enum class SupportTag { full, unit_ball_compatible };

/// A density represented by a weighted sample of its mass: integrals
/// int F(v, grad v, y) dy are evaluated as sum_i w_i F_i / v_i.
struct TestDensity {
  unsigned N = 1;
  std::string label;
  SupportTag support = SupportTag::full;
  std::vector<double> weights;   // mass carried by each sample
  std::vector<double> points;    // sample locations y_i, N per sample
  std::vector<double> values;    // v(y_i)
  std::vector<double> pressure;  // v^{m-1} grad ln v at y_i, N per sample
  double mass() const;
  std::size_t size() const { return weights.size(); }
};

/// Push-forward of v_* under x -> x + s grad psi, carried by the nodes of rule.
/// Throws DomainError unless I + s D^2 psi is positive definite at every node.
TestDensity pushforward_density(const MultiPoly& psi, double s, const QuadratureRule& rule, const std::string& label = "");

struct GaussianComponent {
  double weight = 1;
  std::vector<double> mean;
  double variance = 1;
};

/// Mixture of isotropic Gaussians sampled on a tensor trapezoid grid on
/// [-L, L]^N with `per_axis` points per axis (m = 1 families only).
/// Throws DivergentIntegral if the density at the grid edge is not negligible.
TestDensity gaussian_mixture(unsigned N, const std::vector<GaussianComponent>& parts, double L, unsigned per_axis,
                             const std::string& label = "");

/// E(v) = int e(v) + 1/2 int |x|^2 v.
double entropy_E(const TestDensity& v, double m);
/// I_theta(v) = theta/(2m-1) int |grad v^{m-1/2}|^2 + 1/2 int |x|^2 v.
double fisher_I(const TestDensity& v, double m);
/// int v |grad(e'(v) + |x|^2/2)|^2.
double gradE_gnorm(const TestDensity& v, double m);

struct RelationTerms {
  double lhs = 0;  // (N(m-1)+1) I - G/2
  double rhs = 0;  // N M (m = 1) or N(m-1) E (m > 1)
  double residual = 0;
};
/// Residual |lhs - rhs| / (1 + |rhs|) of the entropy-information relation.
RelationTerms relation_terms(const TestDensity& v, double m);
double relation_residual(const TestDensity& v, double m);

/// The documented family (>= 20 members) for (m, N): v_*, translations,
/// dilations, polynomial push-forwards and, at m = 1, Gaussian mixtures.
/// `samples` caps the family size; at least 20 members are always built.
std::vector<TestDensity> relation_family(const Rational& m, unsigned N, unsigned samples = 20, unsigned seed = 1);

struct HessianCheck {
  double fd_information = 0;  // (a+1) d^2 I / ds^2 by central differences
  double fd_relation = 0;     // d^2 (G/2 + rhs) / ds^2 by central differences
  double quadratic_form = 0;  // int v_* |grad HE psi|^2 + a int v_* grad psi . grad HE psi
  double rel_error_information = 0;
  double rel_error_relation = 0;
};
/// Second differences along s -> push-forward by id + s grad psi against
/// the linearized quadratic form. psi is first scaled so that
/// max |D^2 psi| <= 1 on the nodes; all reported values refer to the scaled psi.
HessianCheck hessian_spot_check(const MultiPoly& psi, const Rational& m, unsigned N, double step, const QuadratureRule& rule);

}  // namespace dhspec
