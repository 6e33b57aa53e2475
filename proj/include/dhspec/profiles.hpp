#pragma once

#include <span>

#include "dhspec/rational.hpp"

namespace dhspec {

/// Exponent and scaling constants of the self-similar solution.
struct Params {
  Rational m;
  unsigned N = 1;
  Rational alpha;     // 1/(N(2m-2)+4)
  Rational gamma_sq;  // alpha m^2 / (2(2m-1)(N(m-1)+1))
  Rational theta;     // 2m^2 / ((2m-1)(N(m-1)+1))
  double gamma = 0;
  double sigma_M = 0;
  double A = 0;
  double B = 0;
  double M = 0;  // mass of the unrescaled solution, B A^N times the mass of v_*
};

struct EntropyValue {
  double e = 0;
  double e_prime = 0;
};

/// e(z) = z ln z (m = 1) or z^m/(m-1) (m > 1), with e'(z) = ln z + 1 at m = 1.
EntropyValue entropy_density(double z, double m);

/// v_*(r): ((m-1)/(2m) (1-r^2)_+)^{1/(m-1)} for m > 1, exp(-1/2 - r^2/2) for m = 1.
double barenblatt(double r, double m);
/// d v_* / dr.
double barenblatt_dr(double r, double m);
/// v_* at a point of R^N.
double barenblatt_at(std::span<const double> x, double m);

/// alpha, gamma^2, theta exactly; numeric fields are left for with_sigma.
Params derive_constants(const Rational& m, unsigned N);
/// Fills sigma_M, A, B and M.
Params with_sigma(Params p, double sigma_M);

struct ScalingAB {
  double A = 0;
  double B = 0;
};
ScalingAB scaling_AB(const Rational& m, unsigned N, double sigma_M);

/// Surface measure of the unit sphere in R^N.
double sphere_area(unsigned N);

/// Mass of v_* by radial Gauss quadrature with the given number of nodes.
double profile_mass(double m, unsigned N, unsigned order = 24);

/// sigma_M for which the self-similar solution has mass M (bisection, 1e-12).
double sigma_for_mass(const Rational& m, unsigned N, double M);

/// Radial self-similar solution u_*(t, |x|) of the unrescaled equation.
double self_similar_u(double t, double r, const Params& p);

struct SpaceTimeValue {
  double t = 0;
  double x = 0;  // one coordinate; the map acts componentwise
  double value = 0;
};

enum class RescaleDirection { forward, inverse };

/// forward: (t, x, u) -> (alpha ln t, x/(A t^alpha), t^{N alpha} u / B);
/// inverse: the algebraic inverse of forward.
SpaceTimeValue rescale_map(RescaleDirection dir, const SpaceTimeValue& in, const Params& p);

}  // namespace dhspec
