#pragma once

#include <vector>

namespace dhspec {

struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule for the weight (1 - t)^a (1 + t)^b on [-1, 1]; a, b > -1.
GaussRule1D gauss_jacobi(unsigned n, double a, double b);
/// n-point rule for the weight t^a e^{-t} on [0, inf); a > -1.
GaussRule1D gauss_laguerre(unsigned n, double a);
GaussRule1D gauss_legendre(unsigned n);

/// Pairwise (cascade) sum; fixed order, so results are reproducible.
double pairwise_sum(const double* data, std::size_t count);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace dhspec
