#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dhspec/poly.hpp"

namespace dhspec {

enum class BoundaryTag { zero_flux };

/// Uniform nodes x_i = -L + i h on [-L, L].
struct Grid1D {
  double L = 1.5;
  std::size_t n = 601;
  double h = 0.005;
  BoundaryTag boundary = BoundaryTag::zero_flux;
  double x(std::size_t i) const { return -L + h * static_cast<double>(i); }
};
Grid1D make_grid(double L, std::size_t n);

/// Nodal values; trapezoid control volumes (h/2 at both ends) carry the mass.
struct State1D {
  Grid1D grid;
  std::vector<double> values;
  double time = 0;
};

/// v_* sampled at the nodes.
State1D barenblatt_state(const Grid1D& grid, double m);

/// v_s with v_s(x + s psi'(x)) (1 + s psi''(x)) = v_*(x), sampled at the
/// nodes and rescaled to the trapezoid mass of v_* on the same grid.
/// Throws DomainError if 1 + s psi'' <= 0 somewhere on the support.
State1D pushforward_perturb(const MultiPoly& psi, double s, double m, const Grid1D& grid);

struct StepStats {
  int newton_iterations = 0;
  int substeps = 0;
  std::size_t floored = 0;  // nodes clipped from round-off negatives to zero
};

/// One backward Euler step of  d_t v = d_x(v d_x(x^2/2 + e'(v)))  (porous medium, confined).
State1D step_pme(const State1D& state, double dt, double m, StepStats* stats = nullptr);
/// One backward Euler step of  d_t v = d_x(v d_x(x^2/2 - theta v^{m-3/2} d_xx v^{m-1/2})),
/// m in {1, 3/2}.
State1D step_fourth(const State1D& state, double dt, double m, double theta, StepStats* stats = nullptr);

/// Quadratic Wasserstein distance between equal-mass states on the same
/// grid, through piecewise-linear quantile functions.
double wasserstein_1d(const State1D& v, const State1D& w);

/// Trapezoid value of int x^order v dx, order in {0, 1, 2}.
double moment(const State1D& state, unsigned order);

struct RateFit {
  double rate = 0;  // minus the least-squares slope of ln d against t
  double r2 = 1;    // goodness of fit; 1 when ln d has no spread
  double t0 = 0;
  double t1 = 0;
  std::size_t points = 0;
};
/// Fit over samples with t0 <= t <= t1. Throws DomainError on d <= 0 there
/// or on fewer than two samples.
RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t0, double t1);

enum class Equation { pme, fourth };

struct SimulationConfig {
  Equation eq = Equation::pme;
  Rational m = Rational(1);
  unsigned l = 1;  // perturbation mode (l, k); the generator is the N = 1
  unsigned k = 0;  // eigenfunction scaled to leading coefficient 1/(l + 2k)
  double eps = 0.05;
  std::size_t grid = 0;  // 0 selects the default for (eq, m)
  double L = 0;          // 0 selects the default for m
  double dt = 1e-3;
  double tmax = 5;
  double record_every = 0.05;
};

struct SimulationRecord {
  double t = 0;
  double mass = 0;
  double moment1 = 0;
  double moment2 = 0;
  double wasserstein = 0;
  double linf_to_star = 0;
};

struct SimulationResult {
  SimulationConfig config;  // with defaults resolved
  std::vector<SimulationRecord> records;
  std::size_t floored = 0;
  int substeps = 0;
};

/// Resolves the grid defaults. m = 1: L = 7, 561 nodes. m > 1: 602 nodes and,
/// unless L is given, L chosen near 1.5 so that x = +-1 fall midway between
/// nodes (L = 1.5025, h = 0.005 by default; 1202 nodes give h = 0.0025).
SimulationConfig resolve_defaults(SimulationConfig c);
/// Same run with h and dt halved (grid defaults re-resolved for m > 1).
SimulationConfig refined(SimulationConfig c);
/// Generator psi for the (l, k) mode in one dimension.
MultiPoly mode_generator(unsigned l, unsigned k, const Rational& m);
SimulationResult simulate(const SimulationConfig& config);

std::vector<std::pair<double, double>> wasserstein_series(const SimulationResult& r);
std::vector<std::pair<double, double>> moment1_series(const SimulationResult& r);

}  // namespace dhspec
