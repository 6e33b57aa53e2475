#include "dhspec/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dhspec/errors.hpp"
#include "dhspec/gauss.hpp"
#include "dhspec/profiles.hpp"

namespace dhspec {

namespace {

struct Direction {
  std::vector<double> u;
  double weight;
};

std::vector<Direction> angular_rule(unsigned N, unsigned order) {
  const double two_pi = 2 * std::numbers::pi;
  std::vector<Direction> dirs;
  if (N == 1) {
    dirs.push_back({{1.0}, 1.0});
    dirs.push_back({{-1.0}, 1.0});
  } else if (N == 2) {
    const unsigned K = 2 * order + 2;
    for (unsigned j = 0; j < K; ++j) {
      const double phi = two_pi * j / K;
      dirs.push_back({{std::cos(phi), std::sin(phi)}, two_pi / K});
    }
  } else {
    const unsigned K = 2 * order + 2;
    const GaussRule1D g = gauss_legendre(order + 1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double c = g.nodes[i], s = std::sqrt(1 - c * c);
      for (unsigned j = 0; j < K; ++j) {
        const double phi = two_pi * j / K;
        dirs.push_back({{s * std::cos(phi), s * std::sin(phi), c}, g.weights[i] * two_pi / K});
      }
    }
  }
  return dirs;
}

void check_rule(const QuadratureRule& rule, const Rational& m, unsigned N) {
  if (rule.N != N || rule.m != m.get_d()) throw DomainError("quadrature rule was built for different (m, N)");
}

using GradValues = std::vector<std::vector<double>>;  // [coordinate][node]

GradValues gradient_at_nodes(const MultiPoly& p, const QuadratureRule& rule) {
  GradValues g(rule.N);
  for (unsigned k = 0; k < rule.N; ++k) g[k] = values_at_nodes(partial(p, k), rule);
  return g;
}

double h_inner_values(const GradValues& a, const GradValues& b, const QuadratureRule& rule) {
  std::vector<double> f(rule.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += a[k][i] * b[k][i];
  return integrate(rule, f);
}

}  // namespace

QuadratureRule build_rule(double m, unsigned N, unsigned radial_order, unsigned angular_order) {
  if (!(m >= 1)) throw DomainError("build_rule: m must satisfy m >= 1");
  if (N == 0 || N > 3) throw Unsupported("build_rule: dimensions 1..3 only");
  if (radial_order == 0 || angular_order == 0) throw DomainError("build_rule: orders must be positive");
  QuadratureRule rule;
  rule.m = m;
  rule.N = N;
  rule.radial_order = radial_order;
  rule.angular_order = angular_order;

  const double h = 0.5 * N;
  std::vector<double> radii, rweights;
  if (m == 1) {
    const GaussRule1D g = gauss_laguerre(radial_order, h - 1);
    const double scale = std::exp(-0.5) * std::pow(2.0, h - 1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      radii.push_back(std::sqrt(2 * g.nodes[i]));
      rweights.push_back(scale * g.weights[i]);
    }
  } else {
    const double p = 1 / (m - 1);
    const GaussRule1D g = gauss_jacobi(radial_order, p, h - 1);
    const double scale = std::pow((m - 1) / (2 * m), p) * std::pow(2.0, -p - h - 1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      radii.push_back(std::sqrt(0.5 * (1 + g.nodes[i])));
      rweights.push_back(scale * g.weights[i]);
    }
  }

  const std::vector<Direction> dirs = angular_rule(N, angular_order);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double v = barenblatt(radii[i], m);
    for (const Direction& d : dirs) {
      for (double u : d.u) rule.points.push_back(radii[i] * u);
      rule.weights.push_back(rweights[i] * d.weight);
      rule.density.push_back(v);
    }
  }
  rule.exactness_degree = 4 * radial_order - 1;
  if (N > 1) rule.exactness_degree = std::min(rule.exactness_degree, 2 * angular_order + 1);
  return rule;
}

std::vector<double> values_at_nodes(const MultiPoly& p, const QuadratureRule& rule) {
  if (p.dimension() != rule.N) throw DimensionMismatch("polynomial and rule dimensions differ");
  const unsigned N = rule.N;
  const int deg = std::max(p.degree(), 0);
  std::vector<std::pair<Exponents, double>> terms;
  for (const auto& [e, c] : p.terms()) terms.emplace_back(e, c.get_d());
  std::vector<double> out(rule.size(), 0.0);
  std::vector<double> powers(N * (deg + 1));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto x = rule.point(i);
    for (unsigned k = 0; k < N; ++k) {
      powers[k * (deg + 1)] = 1;
      for (int j = 1; j <= deg; ++j) powers[k * (deg + 1) + j] = powers[k * (deg + 1) + j - 1] * x[k];
    }
    double s = 0;
    for (const auto& [e, c] : terms) {
      double t = c;
      for (unsigned k = 0; k < N; ++k) t *= powers[k * (deg + 1) + e[k]];
      s += t;
    }
    out[i] = s;
  }
  return out;
}

double integrate(const QuadratureRule& rule, const std::vector<double>& f) {
  std::vector<double> terms(rule.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.weights[i] * f[i];
  return pairwise_sum(terms);
}

double h_inner(const MultiPoly& psi, const MultiPoly& phi, const QuadratureRule& rule, const Rational& m, unsigned N) {
  check_rule(rule, m, N);
  return h_inner_values(gradient_at_nodes(psi, rule), gradient_at_nodes(phi, rule), rule);
}

Eigen::MatrixXd gram(const std::vector<MultiPoly>& basis, const QuadratureRule& rule, const Rational& m, unsigned N,
                     GramOp op) {
  check_rule(rule, m, N);
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  std::vector<GradValues> left, right;
  for (const MultiPoly& b : basis) {
    switch (op) {
      case GramOp::none:
        left.push_back(gradient_at_nodes(b, rule));
        break;
      case GramOp::HE:
        left.push_back(gradient_at_nodes(b, rule));
        right.push_back(gradient_at_nodes(apply_HE(b, m, N), rule));
        break;
      case GramOp::HI:
        left.push_back(gradient_at_nodes(b, rule));
        right.push_back(gradient_at_nodes(apply_HI(b, m, N), rule));
        break;
      case GramOp::HE_squared:
        left.push_back(gradient_at_nodes(apply_HE(b, m, N), rule));
        break;
    }
  }
  const std::vector<GradValues>& rhs = right.empty() ? left : right;
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = h_inner_values(left[i], rhs[j], rule);
  return G;
}

double max_offdiag_relative(const Eigen::MatrixXd& G) {
  double worst = 0;
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(G(i, j)) / std::sqrt(std::abs(G(i, i) * G(j, j))));
  return worst;
}

double asymmetry(const Eigen::MatrixXd& G) {
  const double scale = G.cwiseAbs().maxCoeff();
  return scale == 0 ? 0 : (G - G.transpose()).cwiseAbs().maxCoeff() / scale;
}

double operator_identity_residual(const std::vector<MultiPoly>& basis, const QuadratureRule& rule, const Rational& m,
                                  unsigned N) {
  const double a = N * (m.get_d() - 1);
  const Eigen::MatrixXd GI = gram(basis, rule, m, N, GramOp::HI);
  const Eigen::MatrixXd GE = gram(basis, rule, m, N, GramOp::HE);
  const Eigen::MatrixXd GE2 = gram(basis, rule, m, N, GramOp::HE_squared);
  const Eigen::MatrixXd combo = (GE2 + a * GE) / (1 + a);
  return (GI - combo).cwiseAbs().maxCoeff() / GI.cwiseAbs().maxCoeff();
}

double divergence_form_residual(const MultiPoly& psi, const QuadratureRule& rule, const Rational& m, unsigned N) {
  check_rule(rule, m, N);
  const double md = m.get_d();
  const GradValues g = gradient_at_nodes(psi, rule);
  const std::vector<double> lap = values_at_nodes(laplacian(psi), rule);
  const std::vector<double> he = values_at_nodes(apply_HE(psi, m, N), rule);
  double worst = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto x = rule.point(i);
    double r2 = 0, xg = 0;
    for (unsigned k = 0; k < N; ++k) {
      r2 += x[k] * x[k];
      xg += x[k] * g[k][i];
    }
    const double r = std::sqrt(r2);
    const double v = rule.density[i];
    const double vr_over_r = r > 0 ? barenblatt_dr(r, md) / r : 0.0;
    const double div = vr_over_r * xg + v * lap[i];
    const double value = -md * std::pow(v, md - 2) * div;
    worst = std::max(worst, std::abs(value - he[i]));
  }
  return worst;
}

std::vector<double> boundary_flux(const MultiPoly& psi, double m, unsigned N, unsigned levels) {
  if (!(m > 1)) throw DomainError("boundary_flux: requires m > 1");
  if (psi.dimension() != N) throw DimensionMismatch("polynomial dimension differs from N");
  std::vector<MultiPoly> grad;
  for (unsigned k = 0; k < N; ++k) grad.push_back(partial(psi, k));
  const std::vector<Direction> dirs = angular_rule(N, 8);
  std::vector<double> out;
  std::vector<double> x(N);
  for (unsigned level = 1; level <= levels; ++level) {
    const double r = 1 - std::pow(10.0, -static_cast<double>(level));
    const double v = barenblatt(r, m);
    double worst = 0;
    for (const Direction& d : dirs) {
      for (unsigned k = 0; k < N; ++k) x[k] = r * d.u[k];
      double dr = 0;
      for (unsigned k = 0; k < N; ++k) dr += d.u[k] * grad[k].evaluate(x);
      worst = std::max(worst, std::abs(v * dr));
    }
    out.push_back(worst);
  }
  return out;
}

double poincare_ratio(const MultiPoly& psi, const QuadratureRule& rule, const Rational& m, unsigned N) {
  check_rule(rule, m, N);
  if (psi.degree() <= 0) throw DomainError("poincare_ratio: psi must be nonconstant");
  const std::vector<double> f = values_at_nodes(psi, rule);
  std::vector<double> weight(rule.size()), wf(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double r2 = 0;
    for (double xi : rule.point(i)) r2 += xi * xi;
    weight[i] = 1 + r2;
    wf[i] = weight[i] * f[i];
  }
  const double c = integrate(rule, wf) / integrate(rule, weight);
  std::vector<double> lhs(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) lhs[i] = weight[i] * (f[i] - c) * (f[i] - c);
  return integrate(rule, lhs) / h_inner(psi, psi, rule, m, N);
}

}  // namespace dhspec
