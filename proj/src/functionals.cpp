#include "dhspec/functionals.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "dhspec/errors.hpp"
#include "dhspec/gauss.hpp"
#include "dhspec/profiles.hpp"
#include "dhspec/spectra.hpp"

namespace dhspec {

namespace {

double theta_of(double m, unsigned N) { return 2 * m * m / ((2 * m - 1) * (N * (m - 1) + 1)); }

template <class F>
double sample_sum(const TestDensity& v, F per_mass) {
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = v.weights[i] * per_mass(i);
  return pairwise_sum(terms);
}

double squared_norm(const std::vector<double>& data, std::size_t i, unsigned N) {
  double s = 0;
  for (unsigned k = 0; k < N; ++k) s += data[i * N + k] * data[i * N + k];
  return s;
}

void check_density(const TestDensity& v, double m) {
  if (!(m >= 1)) throw DomainError("m must satisfy m >= 1");
  if (v.size() == 0) throw DomainError("empty test density");
  for (double x : v.values)
    if (!(x > 0) || !std::isfinite(x)) throw DivergentIntegral("test density has a nonpositive or nonfinite sample");
}

// max over nodes of the Frobenius norm of D^2 psi
double max_hessian(const MultiPoly& psi, const QuadratureRule& rule) {
  const unsigned N = rule.N;
  std::vector<double> norm2(rule.size(), 0.0);
  for (unsigned i = 0; i < N; ++i)
    for (unsigned j = 0; j < N; ++j) {
      const std::vector<double> h = values_at_nodes(partial(partial(psi, i), j), rule);
      for (std::size_t n = 0; n < h.size(); ++n) norm2[n] += h[n] * h[n];
    }
  double worst = 0;
  for (double v : norm2) worst = std::max(worst, v);
  return std::sqrt(worst);
}

}  // namespace

double TestDensity::mass() const { return pairwise_sum(weights); }

TestDensity pushforward_density(const MultiPoly& psi, double s, const QuadratureRule& rule, const std::string& label) {
  const unsigned N = rule.N;
  if (psi.dimension() != N) throw DimensionMismatch("psi and rule dimensions differ");
  const double m = rule.m;

  std::vector<std::vector<double>> grad(N), hess(N * N), third(N * N * N);
  for (unsigned i = 0; i < N; ++i) {
    const MultiPoly di = partial(psi, i);
    grad[i] = values_at_nodes(di, rule);
    for (unsigned j = 0; j < N; ++j) {
      const MultiPoly dij = partial(di, j);
      hess[i * N + j] = values_at_nodes(dij, rule);
      for (unsigned k = 0; k < N; ++k) third[(i * N + j) * N + k] = values_at_nodes(partial(dij, k), rule);
    }
  }

  TestDensity out;
  out.N = N;
  out.label = label;
  out.support = m > 1 ? SupportTag::unit_ball_compatible : SupportTag::full;
  out.weights = rule.weights;
  out.points.resize(rule.points.size());
  out.values.resize(rule.size());
  out.pressure.resize(rule.points.size());

  Eigen::MatrixXd A(N, N), dH(N, N);
  Eigen::VectorXd dlogJ(N), rhs(N);
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const auto x = rule.point(n);
    for (unsigned i = 0; i < N; ++i)
      for (unsigned j = 0; j < N; ++j) A(i, j) = (i == j ? 1.0 : 0.0) + s * hess[i * N + j][n];
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw DomainError("push-forward map is not injective at a quadrature node" + (label.empty() ? std::string() : " (" + label + ")"));
    const double J = A.determinant();
    const Eigen::MatrixXd Ainv = llt.solve(Eigen::MatrixXd::Identity(N, N));
    for (unsigned k = 0; k < N; ++k) {
      for (unsigned i = 0; i < N; ++i)
        for (unsigned j = 0; j < N; ++j) dH(i, j) = s * third[(i * N + j) * N + k][n];
      dlogJ(k) = (Ainv * dH).trace();
    }
    const double v = rule.density[n] / J;
    // v^{m-1} grad_x ln v = -x/(m J^{m-1}) - v^{m-1} grad ln J, using v_*^{m-1} grad ln v_* = -x/m
    const double vm1 = std::pow(v, m - 1);
    const double Jm1 = std::pow(J, m - 1);
    for (unsigned k = 0; k < N; ++k) rhs(k) = -x[k] / (m * Jm1) - vm1 * dlogJ(k);
    const Eigen::VectorXd P = Ainv * rhs;
    for (unsigned k = 0; k < N; ++k) {
      out.points[n * N + k] = x[k] + s * grad[k][n];
      out.pressure[n * N + k] = P(k);
    }
    out.values[n] = v;
  }
  return out;
}

TestDensity gaussian_mixture(unsigned N, const std::vector<GaussianComponent>& parts, double L, unsigned per_axis,
                             const std::string& label) {
  if (N == 0 || N > 3) throw Unsupported("gaussian_mixture: dimensions 1..3 only");
  if (parts.empty() || per_axis < 3) throw DomainError("gaussian_mixture: empty mixture or grid");
  const double h = 2 * L / (per_axis - 1);
  std::size_t total = 1;
  for (unsigned k = 0; k < N; ++k) total *= per_axis;

  TestDensity out;
  out.N = N;
  out.label = label;
  out.support = SupportTag::full;
  std::vector<double> x(N), grad(N);
  double edge = 0, peak = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double cell = 1;
    bool on_edge = false;
    for (unsigned k = 0; k < N; ++k) {
      const std::size_t idx = rest % per_axis;
      rest /= per_axis;
      x[k] = -L + h * idx;
      const bool end = idx == 0 || idx + 1 == per_axis;
      cell *= end ? 0.5 * h : h;
      on_edge = on_edge || end;
    }
    double v = 0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const GaussianComponent& c : parts) {
      if (c.mean.size() != N) throw DimensionMismatch("mixture component mean has wrong dimension");
      double d2 = 0;
      for (unsigned k = 0; k < N; ++k) d2 += (x[k] - c.mean[k]) * (x[k] - c.mean[k]);
      const double g = c.weight * std::pow(2 * std::numbers::pi * c.variance, -0.5 * N) * std::exp(-0.5 * d2 / c.variance);
      v += g;
      for (unsigned k = 0; k < N; ++k) grad[k] -= g * (x[k] - c.mean[k]) / c.variance;
    }
    peak = std::max(peak, v);
    if (on_edge) edge = std::max(edge, v);
    if (v <= 0) continue;  // underflow far in the tail carries no mass
    out.weights.push_back(cell * v);
    out.values.push_back(v);
    for (unsigned k = 0; k < N; ++k) {
      out.points.push_back(x[k]);
      out.pressure.push_back(grad[k] / v);
    }
  }
  if (edge > 1e-16 * peak) throw DivergentIntegral("gaussian_mixture: density does not decay inside the grid (" + label + ")");
  return out;
}

double entropy_E(const TestDensity& v, double m) {
  check_density(v, m);
  const unsigned N = v.N;
  return sample_sum(v, [&](std::size_t i) {
    const double z = v.values[i];
    const double e_over_v = m == 1 ? std::log(z) : std::pow(z, m - 1) / (m - 1);
    return e_over_v + 0.5 * squared_norm(v.points, i, N);
  });
}

double fisher_I(const TestDensity& v, double m) {
  check_density(v, m);
  const unsigned N = v.N;
  const double c = theta_of(m, N) / (2 * m - 1) * (m - 0.5) * (m - 0.5);
  return sample_sum(v, [&](std::size_t i) { return c * squared_norm(v.pressure, i, N) + 0.5 * squared_norm(v.points, i, N); });
}

double gradE_gnorm(const TestDensity& v, double m) {
  check_density(v, m);
  const unsigned N = v.N;
  return sample_sum(v, [&](std::size_t i) {
    double s = 0;
    for (unsigned k = 0; k < N; ++k) {
      const double g = m * v.pressure[i * N + k] + v.points[i * N + k];
      s += g * g;
    }
    return s;
  });
}

RelationTerms relation_terms(const TestDensity& v, double m) {
  const unsigned N = v.N;
  const double a = N * (m - 1);
  RelationTerms t;
  t.lhs = (a + 1) * fisher_I(v, m) - 0.5 * gradE_gnorm(v, m);
  t.rhs = m == 1 ? N * v.mass() : a * entropy_E(v, m);
  t.residual = std::abs(t.lhs - t.rhs) / (1 + std::abs(t.rhs));
  return t;
}

double relation_residual(const TestDensity& v, double m) { return relation_terms(v, m).residual; }

std::vector<TestDensity> relation_family(const Rational& m, unsigned N, unsigned samples, unsigned seed) {
  if (N == 0 || N > 2) throw Unsupported("relation_family: dimensions 1 and 2 only");
  const double md = m.get_d();
  const QuadratureRule rule = build_rule(md, N, 48, N == 1 ? 1 : 40);
  auto x = [&](unsigned i) { return MultiPoly::variable(N, i); };
  const MultiPoly r2 = MultiPoly::radius_squared(N).scaled(rat(1, 2));

  std::vector<TestDensity> family;
  auto push = [&](const MultiPoly& psi, double s, const std::string& label) {
    family.push_back(pushforward_density(psi, s, rule, label));
  };
  push(MultiPoly(N), 0.0, "ground state");
  for (double s : {-0.2, -0.05, 0.1, 0.3}) push(x(0) + (N > 1 ? x(1).scaled(rat(1, 2)) : MultiPoly(N)), s, "translation");
  for (double s : {-0.3, -0.1, 0.1, 0.4}) push(r2, s, "dilation");
  push(r2 + x(0), 0.2, "dilation with translation");
  push(r2 - x(0), -0.15, "dilation with translation");
  if (N > 1) {
    push(x(0) * x(1), 0.2, "shear");
    push(x(0) * x(0) - x(1) * x(1), 0.15, "anisotropic stretch");
  }
  if (md > 1) {
    // higher-degree maps stay injective on the compact support once s |D^2 psi| < 1
    auto push_relative = [&](const MultiPoly& psi, double strength, const std::string& label) {
      push(psi, strength / max_hessian(psi, rule), label);
    };
    push_relative(x(0).pow(3), 0.3, "cubic perturbation");
    push_relative(x(0).pow(3), -0.3, "cubic perturbation");
    push_relative(x(0).pow(4), 0.3, "quartic perturbation");
    push_relative(r2 * r2, 0.4, "radial quartic perturbation");
    push_relative(r2 * r2, -0.3, "radial quartic perturbation");
    push_relative(x(0).pow(3) + r2, 0.3, "cubic with dilation");
    for (const EigenIndex& idx : eigen_indices(N, 4)) {
      if (idx.l + 2 * idx.k < 2) continue;
      push_relative(eigenfunction(idx, m, N), 0.25, "eigenmode push-forward");
    }
  } else {
    const double L = 15.0;
    const unsigned per_axis = 151;  // h = 0.2; trapezoid error ~ exp(-2 pi^2 var / h^2)
    std::vector<double> origin(N, 0.0), right(N, 0.0), left(N, 0.0);
    right[0] = 1.5;
    left[0] = -1.0;
    if (N > 1) left[1] = 0.5;
    family.push_back(gaussian_mixture(N, {{1.0, origin, 1.0}}, L, per_axis, "standard gaussian"));
    family.push_back(gaussian_mixture(N, {{2.0, right, 0.7}}, L, per_axis, "off-center gaussian"));
    family.push_back(gaussian_mixture(N, {{1.0, left, 1.0}, {1.0, right, 1.0}}, L, per_axis, "two-bump mixture"));
    family.push_back(gaussian_mixture(N, {{0.3, left, 0.5}, {0.7, right, 1.6}}, L, per_axis, "unequal mixture"));
    family.push_back(gaussian_mixture(N, {{1.0, origin, 0.6}, {0.5, right, 2.0}, {0.2, left, 0.8}}, L, per_axis,
                                      "three-bump mixture"));
    family.push_back(gaussian_mixture(N, {{1.0, origin, 2.5}}, L, per_axis, "wide gaussian"));
  }
  // seeded extra members: small random translations and dilations
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coef(-0.3, 0.3);
  const std::size_t target = std::max<std::size_t>(samples, 20);
  while (family.size() < target) {
    MultiPoly psi = r2.scaled(Rational(coef(gen)));
    for (unsigned i = 0; i < N; ++i) psi += x(i).scaled(Rational(coef(gen)));
    push(psi, 1.0, "random affine push-forward");
  }
  return family;
}

HessianCheck hessian_spot_check(const MultiPoly& generator, const Rational& m, unsigned N, double step,
                                const QuadratureRule& rule) {
  const double md = m.get_d();
  const double hmax = max_hessian(generator, rule);
  const MultiPoly psi = hmax > 1 ? generator.scaled(Rational(1 / hmax)) : generator;
  const double a = N * (md - 1);
  auto lhs_info = [&](double s) { return (a + 1) * fisher_I(pushforward_density(psi, s, rule), md); };
  auto rel = [&](double s) {
    const TestDensity v = pushforward_density(psi, s, rule);
    return 0.5 * gradE_gnorm(v, md) + (md == 1 ? N * v.mass() : a * entropy_E(v, md));
  };
  HessianCheck h;
  h.fd_information = (lhs_info(step) - 2 * lhs_info(0) + lhs_info(-step)) / (step * step);
  h.fd_relation = (rel(step) - 2 * rel(0) + rel(-step)) / (step * step);
  const MultiPoly he = apply_HE(psi, m, N);
  h.quadratic_form = h_inner(he, he, rule, m, N) + a * h_inner(psi, he, rule, m, N);
  h.rel_error_information = std::abs(h.fd_information - h.quadratic_form) / std::abs(h.quadratic_form);
  h.rel_error_relation = std::abs(h.fd_relation - h.quadratic_form) / std::abs(h.quadratic_form);
  return h;
}

}  // namespace dhspec
