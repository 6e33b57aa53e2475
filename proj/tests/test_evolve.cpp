#include <cmath>

#include "doctest.h"
#include "dhspec/errors.hpp"
#include "dhspec/evolve.hpp"
#include "dhspec/profiles.hpp"

using namespace dhspec;

namespace {

MultiPoly x1() { return MultiPoly::variable(1, 0); }
MultiPoly half_x2() { return MultiPoly::radius_squared(1).scaled(rat(1, 2)); }

double linf(const State1D& a, const State1D& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

State1D shifted(const State1D& s, long k) {
  State1D out = s;
  for (long i = 0; i < static_cast<long>(s.grid.n); ++i) {
    const long j = i - k;
    out.values[static_cast<std::size_t>(i)] = j >= 0 && j < static_cast<long>(s.grid.n) ? s.values[static_cast<std::size_t>(j)] : 0.0;
  }
  return out;
}

}  // namespace

TEST_SUITE("evolve") {

TEST_CASE("grid and moments") {
  const Grid1D g = make_grid(1.5, 601);
  CHECK(g.h == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(g.x(100) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_THROWS_AS(make_grid(0, 100), DomainError);
  CHECK_THROWS_AS(make_grid(1, 3), DomainError);

  const State1D star = barenblatt_state(g, 2);
  CHECK(moment(star, 0) == doctest::Approx(1.0 / 3).epsilon(1e-4));
  CHECK(moment(star, 1) == doctest::Approx(0).epsilon(1e-15));
  CHECK(std::abs(moment(star, 1)) < 1e-16);
  CHECK(moment(star, 2) == doctest::Approx(1.0 / 15).epsilon(1e-4));
  CHECK_THROWS_AS(moment(star, 3), DomainError);
}

TEST_CASE("grid defaults keep the support edge between nodes") {
  for (std::size_t n : {std::size_t(0), std::size_t(602), std::size_t(1202), std::size_t(801)}) {
    SimulationConfig c;
    c.m = rat(2);
    c.grid = n;
    c = resolve_defaults(c);
    const Grid1D g = make_grid(c.L, c.grid);
    const double k = (1 + g.L) / g.h;
    CHECK(k - std::floor(k) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SimulationConfig c;
  c.m = rat(3, 2);
  const SimulationConfig c0 = resolve_defaults(c), c1 = refined(c);
  CHECK(make_grid(c1.L, c1.grid).h == doctest::Approx(make_grid(c0.L, c0.grid).h / 2).epsilon(1e-14));
  CHECK(c1.dt == doctest::Approx(c0.dt / 2));
  c.m = rat(1);
  const SimulationConfig d1 = refined(c);
  CHECK(d1.grid == 1121);
  CHECK(d1.L == 7.0);
  c.m = rat(1, 2);
  CHECK_THROWS_AS(resolve_defaults(c), DomainError);
}

TEST_CASE("pushforward_perturb examples") {
  const Grid1D g = make_grid(1.5, 601);
  const State1D star = barenblatt_state(g, 2);
  CHECK(linf(pushforward_perturb(x1(), 0, 2, g), star) < 1e-15);
  // psi = x translates by s: a shift by 20 h is a node shift
  const double s = 20 * g.h;
  const State1D t = pushforward_perturb(x1(), s, 2, g);
  CHECK(linf(t, shifted(star, 20)) < 1e-12);
  CHECK(moment(t, 1) == doctest::Approx(s * moment(star, 0)).epsilon(1e-10));
  // psi = x^2/2 dilates by 1 + s: second moment scales by (1 + s)^2
  const State1D d = pushforward_perturb(half_x2(), 0.1, 2, g);
  CHECK(moment(d, 0) == doctest::Approx(moment(star, 0)).epsilon(1e-14));
  CHECK(moment(d, 2) / moment(d, 0) == doctest::Approx(1.21 / 5).epsilon(1e-4));
  CHECK_THROWS_AS(pushforward_perturb(half_x2(), -1.5, 2, g), DomainError);
  CHECK_THROWS_AS(pushforward_perturb(MultiPoly::radius_squared(2), 0.1, 2, g), DimensionMismatch);
}

TEST_CASE("ground state is a discrete steady state") {
  SUBCASE("porous medium") {
    for (double m : {1.0, 1.5, 2.0}) {
      const Grid1D g = m > 1 ? make_grid(1.5025, 602) : make_grid(7, 561);
      State1D s = barenblatt_state(g, m);
      const State1D star = s;
      for (int i = 0; i < 10; ++i) s = step_pme(s, 0.1, m);
      CHECK(linf(s, star) < 1e-8);
    }
  }
  SUBCASE("fourth order") {
    for (double m : {1.0, 1.5}) {
      const Grid1D g = m > 1 ? make_grid(1.5025, 602) : make_grid(7, 561);
      const double theta = derive_constants(m == 1 ? rat(1) : rat(3, 2), 1).theta.get_d();
      State1D s = barenblatt_state(g, m);
      const State1D star = s;
      for (int i = 0; i < 10; ++i) s = step_fourth(s, 0.1, m, theta);
      CHECK(linf(s, star) < 1e-6);
    }
    CHECK_THROWS_AS(step_fourth(barenblatt_state(make_grid(1.5, 601), 2), 0.1, 2, 1), Unsupported);
  }
}

TEST_CASE("mass conservation and the first moment") {
  SimulationConfig c;
  c.eq = Equation::pme;
  c.m = rat(2);
  c.l = 1;
  c.k = 0;
  c.tmax = 1;
  c.record_every = 0.1;
  const SimulationResult r = simulate(c);
  const double M = r.records.front().mass;
  for (const auto& rec : r.records) {
    CHECK(std::abs(rec.mass - M) < 1e-10 * M);
    // d<x>/dt = -<x> exactly for the confined flow
    CHECK(rec.moment1 == doctest::Approx(r.records.front().moment1 * std::exp(-rec.t)).epsilon(1e-2));
  }
  CHECK(r.substeps >= 1000);
}

TEST_CASE("wasserstein_1d examples") {
  const Grid1D g = make_grid(1.5, 601);
  const State1D star = barenblatt_state(g, 2);
  const double M = moment(star, 0);
  CHECK(wasserstein_1d(star, star) == 0);
  for (long k : {1L, 7L, -30L}) {
    const double c = static_cast<double>(k) * g.h;
    CHECK(wasserstein_1d(shifted(star, k), star) == doctest::Approx(std::abs(c) * std::sqrt(M)).epsilon(1e-10));
  }
  // dilation x -> (1 + s) x of v_* (m = 2): W^2 = s^2 int x^2 v_* = s^2 / 15
  const double s = 0.05;
  CHECK(wasserstein_1d(pushforward_perturb(half_x2(), s, 2, g), star) == doctest::Approx(s / std::sqrt(15.0)).epsilon(2e-3));
  State1D heavier = star;
  for (double& v : heavier.values) v *= 1.01;
  CHECK_THROWS_AS(wasserstein_1d(heavier, star), DomainError);
  CHECK_THROWS_AS(wasserstein_1d(barenblatt_state(make_grid(1.5, 301), 2), star), DimensionMismatch);
}

TEST_CASE("fit_decay_rate examples") {
  std::vector<std::pair<double, double>> pure, mixed, flat;
  for (int i = 0; i <= 80; ++i) {
    const double t = 0.1 * i;
    pure.emplace_back(t, 3 * std::exp(-t));
    mixed.emplace_back(t, 0.9 * std::exp(-t) + 0.1 * std::exp(-5 * t));
    flat.emplace_back(t, 2.0);
  }
  const RateFit a = fit_decay_rate(pure, 1, 4);
  CHECK(a.rate == doctest::Approx(1).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1).epsilon(1e-12));
  CHECK(fit_decay_rate(mixed, 2, 6).rate == doctest::Approx(1).epsilon(1e-2));
  CHECK(std::abs(fit_decay_rate(flat, 1, 4).rate) < 1e-14);
  flat[20].second = 0;
  CHECK_THROWS_AS(fit_decay_rate(flat, 1, 4), DomainError);
  CHECK_THROWS_AS(fit_decay_rate(pure, 10, 12), DomainError);
}

TEST_CASE("mode generator") {
  CHECK(mode_generator(1, 0, rat(2)).to_string() == x1().to_string());
  // dilation generator is x^2/2 up to a constant
  const MultiPoly d = mode_generator(0, 1, rat(2));
  const MultiPoly diff = d - half_x2();
  CHECK(diff.degree() == 0);
}

}  // TEST_SUITE
