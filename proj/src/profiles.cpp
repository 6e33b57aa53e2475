#include "dhspec/profiles.hpp"

#include <cmath>
#include <numbers>

#include "dhspec/errors.hpp"
#include "dhspec/gauss.hpp"

namespace dhspec {

namespace {

void require_m(double m) {
  if (!(m >= 1)) throw DomainError("m must satisfy m >= 1");
}

}  // namespace

EntropyValue entropy_density(double z, double m) {
  require_m(m);
  if (m == 1) {
    if (!(z > 0)) throw DomainError("entropy_density: z must be positive at m = 1");
    return {z * std::log(z), std::log(z) + 1};
  }
  if (z < 0) throw DomainError("entropy_density: z must be nonnegative");
  return {std::pow(z, m) / (m - 1), m * std::pow(z, m - 1) / (m - 1)};
}

double barenblatt(double r, double m) {
  require_m(m);
  if (m == 1) return std::exp(-0.5 - 0.5 * r * r);
  const double s = 1 - r * r;
  if (s <= 0) return 0;
  return std::pow((m - 1) / (2 * m) * s, 1 / (m - 1));
}

double barenblatt_dr(double r, double m) {
  require_m(m);
  if (m == 1) return -r * barenblatt(r, m);
  const double s = 1 - r * r;
  if (s <= 0) return 0;
  // v = (c s)^p, dv/dr = -2 r p v / s
  const double p = 1 / (m - 1);
  return -2 * r * p * barenblatt(r, m) / s;
}

double barenblatt_at(std::span<const double> x, double m) {
  double r2 = 0;
  for (double xi : x) r2 += xi * xi;
  return barenblatt(std::sqrt(r2), m);
}

Params derive_constants(const Rational& m, unsigned N) {
  if (m < 1) throw DomainError("m must satisfy m >= 1");
  if (N == 0) throw DomainError("dimension must be positive");
  Params p;
  p.m = m;
  p.N = N;
  const Rational a = Rational(N) * (m - 1);
  p.alpha = Rational(1) / (2 * a + 4);
  p.alpha.canonicalize();
  p.gamma_sq = p.alpha * m * m / (2 * (2 * m - 1) * (a + 1));
  p.gamma_sq.canonicalize();
  p.theta = 2 * m * m / ((2 * m - 1) * (a + 1));
  p.theta.canonicalize();
  p.gamma = std::sqrt(p.gamma_sq.get_d());
  return p;
}

ScalingAB scaling_AB(const Rational& m, unsigned N, double sigma_M) {
  const Params p = derive_constants(m, N);
  if (m == 1) return {std::pow(2.0, 0.25), std::exp(sigma_M - 0.5)};
  if (!(sigma_M > 0)) throw DomainError("scaling_AB: sigma_M must be positive for m > 1");
  const double md = m.get_d();
  return {std::sqrt(sigma_M / p.gamma), std::pow(2 * sigma_M, 1 / (md - 1))};
}

Params with_sigma(Params p, double sigma_M) {
  const ScalingAB ab = scaling_AB(p.m, p.N, sigma_M);
  p.sigma_M = sigma_M;
  p.A = ab.A;
  p.B = ab.B;
  p.M = p.B * std::pow(p.A, static_cast<double>(p.N)) * profile_mass(p.m.get_d(), p.N);
  return p;
}

double sphere_area(unsigned N) {
  const double h = 0.5 * N;
  return 2 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double profile_mass(double m, unsigned N, unsigned order) {
  require_m(m);
  if (N == 0) throw DomainError("dimension must be positive");
  const double h = 0.5 * N;
  double radial = 0;
  if (m == 1) {
    // t = r^2/2: int_0^inf e^{-r^2/2} r^{N-1} dr = 2^{N/2-1} int t^{N/2-1} e^{-t} dt
    const GaussRule1D g = gauss_laguerre(order, h - 1);
    radial = std::exp(-0.5) * std::pow(2.0, h - 1) * pairwise_sum(g.weights);
  } else {
    // t = 2r^2 - 1: int_0^1 (1-r^2)^p r^{N-1} dr = 2^{-p-N/2-1} int (1-t)^p (1+t)^{N/2-1} dt
    const double p = 1 / (m - 1);
    const GaussRule1D g = gauss_jacobi(order, p, h - 1);
    radial = std::pow((m - 1) / (2 * m), p) * std::pow(2.0, -p - h - 1) * pairwise_sum(g.weights);
  }
  return N == 1 ? 2 * radial : sphere_area(N) * radial;
}

double sigma_for_mass(const Rational& m, unsigned N, double M) {
  if (!(M > 0)) throw DomainError("sigma_for_mass: mass must be positive");
  const double unit = profile_mass(m.get_d(), N);
  // bisect in s = x (m = 1) or s = e^x (m > 1); mass is increasing in x
  const bool log_scale = m != 1;
  auto sigma_of = [&](double x) { return log_scale ? std::exp(x) : x; };
  auto mass = [&](double x) {
    const ScalingAB ab = scaling_AB(m, N, sigma_of(x));
    return ab.B * std::pow(ab.A, static_cast<double>(N)) * unit;
  };
  double lo = -1, hi = 1;
  while (mass(lo) > M) lo *= 2;
  while (mass(hi) < M) hi *= 2;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mass(mid) < M ? lo : hi) = mid;
  }
  return sigma_of(0.5 * (lo + hi));
}

double self_similar_u(double t, double r, const Params& p) {
  if (!(t > 0)) throw DomainError("self_similar_u: t must be positive");
  const double alpha = p.alpha.get_d();
  const double ta = std::pow(t, alpha);
  return p.B / std::pow(t, p.N * alpha) * barenblatt(r / (p.A * ta), p.m.get_d());
}

SpaceTimeValue rescale_map(RescaleDirection dir, const SpaceTimeValue& in, const Params& p) {
  const double alpha = p.alpha.get_d();
  const double Na = p.N * alpha;
  if (dir == RescaleDirection::forward) {
    if (!(in.t > 0)) throw DomainError("rescale_map: t must be positive");
    return {alpha * std::log(in.t), in.x / (p.A * std::pow(in.t, alpha)), std::pow(in.t, Na) * in.value / p.B};
  }
  const double t = std::exp(in.t / alpha);
  return {t, in.x * p.A * std::pow(t, alpha), p.B * in.value / std::pow(t, Na)};
}

}  // namespace dhspec
