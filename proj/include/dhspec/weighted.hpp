#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dhspec/poly.hpp"

namespace dhspec {

/// Product rule (radial Gauss x angular) on the support of v_*. The weights
/// carry the factor v_*, so sum_i w_i f(x_i) approximates int v_* f dx.
struct QuadratureRule {
  double m = 1;
  unsigned N = 1;
  unsigned radial_order = 0;
  unsigned angular_order = 0;
  std::vector<double> points;   // N coordinates per node
  std::vector<double> weights;  // > 0
  std::vector<double> density;  // v_* at each node
  /// Polynomials of total degree <= this are integrated exactly against v_*.
  unsigned exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const { return {points.data() + i * N, N}; }
};

/// Radial Gauss-Jacobi in t = 2r^2 - 1 (m > 1) or generalized Gauss-Laguerre
/// in t = r^2/2 (m = 1), times an angular rule: {+1, -1} for N = 1, 2a+2
/// equispaced angles for N = 2, Gauss-Legendre(a+1) in cos(theta) times
/// 2a+2 equispaced azimuths for N = 3 (a = angular_order).
QuadratureRule build_rule(double m, unsigned N, unsigned radial_order, unsigned angular_order);

/// Values of p at every node of the rule.
std::vector<double> values_at_nodes(const MultiPoly& p, const QuadratureRule& rule);
/// sum_i w_i f_i with pairwise summation.
double integrate(const QuadratureRule& rule, const std::vector<double>& f);

/// int v_* grad(psi) . grad(phi) dx.
double h_inner(const MultiPoly& psi, const MultiPoly& phi, const QuadratureRule& rule, const Rational& m, unsigned N);

enum class GramOp { none, HE, HI, HE_squared };

/// G_ij = h_inner(psi_i, Op psi_j); HE_squared means h_inner(HE psi_i, HE psi_j).
Eigen::MatrixXd gram(const std::vector<MultiPoly>& basis, const QuadratureRule& rule, const Rational& m, unsigned N, GramOp op);

/// max_ij |G_ij| / sqrt(G_ii G_jj) over i != j.
double max_offdiag_relative(const Eigen::MatrixXd& G);
/// max |G - G^T| / max |G|.
double asymmetry(const Eigen::MatrixXd& G);

/// max |G_HI - (G_HE_squared + a G_HE)/(1 + a)| / max |G_HI|, a = N(m-1).
double operator_identity_residual(const std::vector<MultiPoly>& basis, const QuadratureRule& rule, const Rational& m,
                                  unsigned N);

/// max over nodes of |-m v_*^{m-2} div(v_* grad psi) - HE psi|, with the
/// divergence expanded through the exact radial derivative of v_*.
double divergence_form_residual(const MultiPoly& psi, const QuadratureRule& rule, const Rational& m, unsigned N);

/// For k = 1..levels: max over angular samples of |v_*(r) d_r psi| at r = 1 - 10^{-k}.
std::vector<double> boundary_flux(const MultiPoly& psi, double m, unsigned N, unsigned levels = 8);

/// inf_c int (1+|x|^2) v_* (psi - c)^2 / int v_* |grad psi|^2; the optimal c
/// is the (1+|x|^2) v_* weighted mean of psi.
double poincare_ratio(const MultiPoly& psi, const QuadratureRule& rule, const Rational& m, unsigned N);

}  // namespace dhspec
