#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dhspec/errors.hpp"
#include "dhspec/profiles.hpp"
#include "dhspec/spectra.hpp"
#include "dhspec/weighted.hpp"

using namespace dhspec;

namespace {

MultiPoly x(unsigned dim, unsigned i) { return MultiPoly::variable(dim, i); }

// int v_* x^alpha dx for even multi-indices, by the Dirichlet / Gaussian moment formulas
double moment_oracle(const Exponents& alpha, double m) {
  const unsigned N = static_cast<unsigned>(alpha.size());
  for (unsigned a : alpha)
    if (a % 2) return 0;
  if (m == 1) {
    double r = std::exp(-0.5);
    for (unsigned a : alpha) r *= std::exp(0.5 * (a + 1) * std::log(2.0) + std::lgamma(0.5 * (a + 1)));
    return r;
  }
  const double p = 1 / (m - 1);
  double lg = std::lgamma(p + 1);
  double half_sum = 0;
  for (unsigned a : alpha) {
    lg += std::lgamma(0.5 * (a + 1));
    half_sum += 0.5 * (a + 1);
  }
  lg -= std::lgamma(half_sum + p + 1);
  (void)N;
  return std::pow((m - 1) / (2 * m), p) * std::exp(lg);
}

std::vector<MultiPoly> eigenbasis(const Rational& m, unsigned N, unsigned d) {
  std::vector<MultiPoly> out;
  for (const EigenIndex& idx : eigen_indices(N, d)) out.push_back(eigenfunction(idx, m, N));
  return out;
}

}  // namespace

TEST_SUITE("weighted") {

TEST_CASE("build_rule examples") {
  const QuadratureRule rule = build_rule(2, 1, 6, 1);
  for (unsigned j = 0; j <= 11; ++j) {
    // int_{-1}^{1} (1 - x^2) x^j / 4 dx
    const double exact = (j % 2) ? 0.0 : 0.25 * (2.0 / (j + 1) - 2.0 / (j + 3));
    CHECK(integrate(rule, values_at_nodes(x(1, 0).pow(j), rule)) == doctest::Approx(exact).epsilon(1e-13).scale(1e-13));
  }
  for (double m : {1.0, 1.25, 1.5, 2.0, 3.0})
    for (unsigned N = 1; N <= 3; ++N) {
      const QuadratureRule r = build_rule(m, N, 8, 8);
      CHECK(integrate(r, std::vector<double>(r.size(), 1.0)) == doctest::Approx(profile_mass(m, N)).epsilon(1e-12));
      for (double w : r.weights) CHECK(w > 0);
      if (m > 1)
        for (std::size_t i = 0; i < r.size(); ++i) {
          double r2 = 0;
          for (double xi : r.point(i)) r2 += xi * xi;
          CHECK(r2 < 1);
        }
    }
  CHECK_THROWS_AS(build_rule(2, 4, 4, 4), Unsupported);
  CHECK_THROWS_AS(build_rule(0.5, 1, 4, 4), DomainError);
}

TEST_CASE("rules are exact through their stated degree against moment oracles") {
  std::mt19937_64 gen(5);
  for (double m : {1.0, 1.25, 1.5, 2.0, 3.0, std::sqrt(2.0)}) {
    for (unsigned N = 1; N <= 3; ++N) {
      const QuadratureRule rule = build_rule(m, N, 4, 7);
      REQUIRE(rule.exactness_degree >= 10);
      for (int trial = 0; trial < 30; ++trial) {
        Exponents e(N, 0);
        std::uniform_int_distribution<unsigned> pick(0, N - 1);
        const unsigned d = trial % (rule.exactness_degree + 1);
        for (unsigned s = 0; s < d; ++s) ++e[pick(gen)];
        const std::vector<double> f = values_at_nodes(MultiPoly::monomial(e), rule);
        std::vector<double> f_abs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) f_abs[i] = std::abs(f[i]);
        const double q = integrate(rule, f);
        // odd moments cancel to zero, so the scale is the integral of |x^alpha|
        const double scale = std::max(1.0, integrate(rule, f_abs));
        const double exact = moment_oracle(e, m);
        CHECK(std::abs(q - exact) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("h_inner examples") {
  const Rational m = rat(2);
  const QuadratureRule rule = build_rule(2, 1, 6, 1);
  CHECK(h_inner(x(1, 0), x(1, 0), rule, m, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  const MultiPoly dil = eigenfunction({0, 1, 1}, m, 1);
  CHECK(std::abs(h_inner(x(1, 0), dil, rule, m, 1)) < 1e-15);
  CHECK(h_inner(MultiPoly::constant(1, rat(5)), dil, rule, m, 1) == 0);
  CHECK_THROWS_AS(h_inner(x(1, 0), x(1, 0), rule, rat(3), 1), DomainError);
  const QuadratureRule r2 = build_rule(2, 2, 4, 4);
  CHECK(h_inner(x(2, 0), x(2, 1), r2, m, 2) == 0);
}

TEST_CASE("eigenfunction Gram matrices are diagonal with lambda entries") {
  for (Rational m : {rat(1), rat(5, 4), rat(3, 2), rat(2), rat(3)}) {
    for (unsigned N = 1; N <= 3; ++N) {
      const unsigned d = N == 3 ? 4 : 6;
      const QuadratureRule rule = build_rule(m.get_d(), N, d + 2, 2 * d + 1);
      const auto idx = eigen_indices(N, d);
      const auto basis = eigenbasis(m, N, d);
      const Eigen::MatrixXd G0 = gram(basis, rule, m, N, GramOp::none);
      const Eigen::MatrixXd GE = gram(basis, rule, m, N, GramOp::HE);
      const Eigen::MatrixXd GI = gram(basis, rule, m, N, GramOp::HI);
      CHECK(max_offdiag_relative(G0) < 1e-10);
      CHECK(max_offdiag_relative(GE) < 1e-10);
      CHECK(max_offdiag_relative(GI) < 1e-10);
      CHECK(asymmetry(GE) < 1e-10);
      CHECK(asymmetry(GI) < 1e-10);
      for (Eigen::Index i = 0; i < G0.rows(); ++i) {
        CHECK(G0(i, i) > 0);
        const double lam = lambda_eig(idx[i].l, idx[i].k, m, N).get_d();
        CHECK(GE(i, i) == doctest::Approx(lam * G0(i, i)).epsilon(1e-11));
      }
      CHECK(operator_identity_residual(basis, rule, m, N) < 1e-10);
      CHECK(gram({basis[0]}, rule, m, N, GramOp::none)(0, 0) == h_inner(basis[0], basis[0], rule, m, N));
    }
  }
}

TEST_CASE("operator Gram matrices on a non-eigen basis are symmetric PSD and recover the spectrum") {
  for (Rational m : {rat(1), rat(3, 2), rat(2)}) {
    for (unsigned N = 1; N <= 2; ++N) {
      const unsigned d = N == 1 ? 7 : 4;
      std::vector<MultiPoly> basis;
      for (unsigned deg = 1; deg <= d; ++deg) {
        if (N == 1) {
          basis.push_back(x(1, 0).pow(deg));
        } else {
          for (unsigned i = 0; i <= deg; ++i) basis.push_back(x(2, 0).pow(i) * x(2, 1).pow(deg - i));
        }
      }
      std::vector<double> expected;
      for (const EigenIndex& idx : eigen_indices(N, d))
        if (N > 1 || idx.l + 2 * idx.k <= d) expected.push_back(lambda_eig(idx.l, idx.k, m, N).get_d());
      if (N == 1) {
        // in one dimension the eigenfunctions of degree j are x, 1-type k-modes: one per degree
        expected.clear();
        for (unsigned j = 1; j <= d; ++j) expected.push_back(lambda_eig(j % 2, j / 2, m, 1).get_d());
      }
      std::sort(expected.begin(), expected.end());
      for (double scale : {1.0, std::exp(0.5)}) {
        QuadratureRule rule = build_rule(m.get_d(), N, d + 2, 2 * d + 2);
        for (double& w : rule.weights) w *= scale;
        const Eigen::MatrixXd G0 = gram(basis, rule, m, N, GramOp::none);
        const Eigen::MatrixXd GE = gram(basis, rule, m, N, GramOp::HE);
        CHECK(asymmetry(GE) < 1e-10);
        const Eigen::MatrixXd sym = 0.5 * (GE + GE.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(sym);
        CHECK(plain.eigenvalues().minCoeff() > -1e-10 * plain.eigenvalues().maxCoeff());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sym, G0);
        REQUIRE(static_cast<std::size_t>(ges.eigenvalues().size()) == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
          CHECK(ges.eigenvalues()(static_cast<Eigen::Index>(i)) == doctest::Approx(expected[i]).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("divergence form agrees with the explicit operator") {
  for (Rational m : {rat(1), rat(3, 2), rat(2), rat(3)}) {
    for (unsigned N = 1; N <= 2; ++N) {
      const QuadratureRule rule = build_rule(m.get_d(), N, 8, 8);
      for (const MultiPoly& psi : eigenbasis(m, N, 6)) CHECK(divergence_form_residual(psi, rule, m, N) <= 1e-8);
    }
  }
}

TEST_CASE("boundary flux vanishes at the edge of the support") {
  const auto flux = boundary_flux(x(1, 0), 2, 1, 8);
  for (std::size_t k = 0; k < flux.size(); ++k) {
    const double r = 1 - std::pow(10.0, -static_cast<double>(k + 1));
    CHECK(flux[k] == doctest::Approx(0.25 * (1 - r * r)).epsilon(1e-12));
  }
  for (Rational m : {rat(3, 2), rat(2), rat(3)})
    for (unsigned N = 1; N <= 3; ++N)
      for (const MultiPoly& psi : eigenbasis(m, N, N == 3 ? 3 : 5)) {
        const auto f = boundary_flux(psi, m.get_d(), N, 8);
        // v_* ~ (1 - r)^{1/(m-1)}, so seven decades in 1 - r gain at least 10^{-3.5} in v_*
        for (std::size_t k = 1; k < f.size(); ++k) CHECK(f[k] <= f[k - 1]);
        CHECK(f.back() <= 1e-2 * std::max(f.front(), 1e-300));
      }
  for (double v : boundary_flux(MultiPoly::constant(2, rat(3)), 2, 2)) CHECK(v == 0);
  CHECK_THROWS_AS(boundary_flux(x(1, 0), 1, 1), DomainError);
}

TEST_CASE("poincare_ratio examples") {
  const QuadratureRule rule = build_rule(1, 1, 12, 1);
  const Rational one = rat(1);
  CHECK(poincare_ratio(x(1, 0), rule, one, 1) == doctest::Approx(4).epsilon(1e-12));
  CHECK(poincare_ratio(x(1, 0) + MultiPoly::constant(1, rat(7)), rule, one, 1) == doctest::Approx(4).epsilon(1e-12));
  for (unsigned n = 1; n <= 6; ++n) {
    const double ratio = poincare_ratio(hermite({n}), rule, one, 1);
    // Hermite moments give (2n + 2)/n for n != 2 and 5/2 for n = 2
    const double oracle = n == 2 ? 2.5 : (2.0 * n + 2) / n;
    CHECK(ratio == doctest::Approx(oracle).epsilon(1e-11));
    CHECK(ratio <= 10);
  }
  CHECK_THROWS_AS(poincare_ratio(MultiPoly::constant(1, rat(2)), rule, one, 1), DomainError);
}

}  // TEST_SUITE
