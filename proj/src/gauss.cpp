#include "dhspec/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "dhspec/errors.hpp"

namespace dhspec {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first eigenvector components.
GaussRule1D golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag_sq, double mu0) {
  const Eigen::Index n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) J(i, i) = diag[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = std::sqrt(offdiag_sq[i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

GaussRule1D gauss_jacobi(unsigned n, double a, double b) {
  if (n == 0) throw DomainError("gauss_jacobi: need at least one node");
  if (a <= -1 || b <= -1) throw DomainError("gauss_jacobi: exponents must exceed -1");
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (unsigned k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag[k] = (k == 0) ? (b - a) / (a + b + 2) : (b * b - a * a) / (s * (s + 2));
  }
  for (unsigned k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    off[k - 1] = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1));
  }
  const double mu0 = std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
  return golub_welsch(diag, off, mu0);
}

GaussRule1D gauss_laguerre(unsigned n, double a) {
  if (n == 0) throw DomainError("gauss_laguerre: need at least one node");
  if (a <= -1) throw DomainError("gauss_laguerre: exponent must exceed -1");
  std::vector<double> diag(n), off(n - 1);
  for (unsigned k = 0; k < n; ++k) diag[k] = 2.0 * k + a + 1;
  for (unsigned k = 1; k < n; ++k) off[k - 1] = k * (k + a);
  return golub_welsch(diag, off, std::tgamma(a + 1));
}

GaussRule1D gauss_legendre(unsigned n) { return gauss_jacobi(n, 0.0, 0.0); }

double pairwise_sum(const double* data, std::size_t count) {
  if (count <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

}  // namespace dhspec
