#include "dhspec/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "dhspec/errors.hpp"
#include "dhspec/gauss.hpp"
#include "dhspec/profiles.hpp"
#include "dhspec/spectra.hpp"

namespace dhspec {

namespace {

double pos(double g) { return g > 0 ? g : 0.0; }

double control_volume(const Grid1D& g, std::size_t i) { return (i == 0 || i + 1 == g.n) ? 0.5 * g.h : g.h; }

// Phi_j and its derivatives with respect to w_{j-1}, w_j, w_{j+1}.
struct PhiValue {
  double value = 0;
  double d[5] = {0, 0, 0, 0, 0};  // offsets -2 .. 2
};

struct FluxModel {
  bool log_variable = false;  // unknown w = ln v instead of v
  std::size_t first_face = 0;
  std::size_t last_face = 0;  // exclusive; face f joins nodes f and f+1
  std::function<PhiValue(const std::vector<double>& w, std::size_t j)> phi;
};

double to_density(const FluxModel& model, double w) { return model.log_variable ? std::exp(w) : w; }

struct Assembly {
  std::vector<double> flux;  // per face, zero outside the active range
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
};

Assembly assemble(const FluxModel& model, const Grid1D& grid, const std::vector<double>& w,
                  const std::vector<double>& v_old, double dt, bool with_jacobian) {
  const std::size_t n = grid.n;
  const double h = grid.h;
  Assembly a;
  a.flux.assign(n - 1, 0.0);
  a.residual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> v(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = to_density(model, w[i]);
    dv[i] = model.log_variable ? v[i] : 1.0;
    const double V = control_volume(grid, i);
    a.residual(static_cast<Eigen::Index>(i)) = V * (v[i] - v_old[i]) / dt;
    if (with_jacobian) trip.emplace_back(i, i, V * dv[i] / dt);
  }
  std::vector<PhiValue> phi(n);
  const std::size_t phi_lo = model.first_face, phi_hi = model.last_face;  // nodes phi_lo .. phi_hi
  for (std::size_t j = phi_lo; j <= phi_hi && j < n; ++j) phi[j] = model.phi(w, j);

  for (std::size_t f = model.first_face; f < model.last_face; ++f) {
    const std::size_t ia = f, ib = f + 1;
    const double g = -(phi[ib].value - phi[ia].value) / h;
    const double F = v[ia] * pos(g) - v[ib] * pos(-g);
    a.flux[f] = F;
    a.residual(static_cast<Eigen::Index>(ia)) += F;
    a.residual(static_cast<Eigen::Index>(ib)) -= F;
    if (!with_jacobian) continue;
    auto add = [&](std::size_t col, double dF) {
      trip.emplace_back(ia, col, dF);
      trip.emplace_back(ib, col, -dF);
    };
    add(ia, pos(g) * dv[ia]);
    add(ib, -pos(-g) * dv[ib]);
    const double dFdg = g > 0 ? v[ia] : (g < 0 ? v[ib] : 0.5 * (v[ia] + v[ib]));
    for (int o = -2; o <= 2; ++o) {
      const long ka = static_cast<long>(ia) + o, kb = static_cast<long>(ib) + o;
      if (ka >= 0 && ka < static_cast<long>(n)) add(static_cast<std::size_t>(ka), dFdg * phi[ia].d[o + 2] / h);
      if (kb >= 0 && kb < static_cast<long>(n)) add(static_cast<std::size_t>(kb), -dFdg * phi[ib].d[o + 2] / h);
    }
  }
  if (with_jacobian) {
    a.jacobian.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.jacobian.setFromTriplets(trip.begin(), trip.end());
  }
  return a;
}

// One backward Euler step by Newton; false on non-convergence.
bool newton_step(const FluxModel& model, const Grid1D& grid, const std::vector<double>& v_old, double dt,
                 std::vector<double>& v_new, StepStats& stats) {
  const std::size_t n = grid.n;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = model.log_variable ? std::log(v_old[i]) : v_old[i];
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) scale += control_volume(grid, i) * v_old[i];

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  const double tol = 1e-15 * scale;  // residual times dt, in mass units
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    Assembly a = assemble(model, grid, w, v_old, dt, true);
    const double res = a.residual.cwiseAbs().maxCoeff() * dt;
    if (!std::isfinite(res)) return false;
    // a negligible Newton correction means the residual sits at its round-off floor
    const bool stagnated = last_step <= 1e-11 && res <= 1e-9 * scale;
    if (res <= tol || stagnated) {
      // conservative update from the converged fluxes: exact telescoping of the mass
      v_new.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double div = (i + 1 < n ? a.flux[i] : 0.0) - (i > 0 ? a.flux[i - 1] : 0.0);
        double value = v_old[i] - dt * div / control_volume(grid, i);
        if (model.log_variable && !(value > 0)) {
          value = std::exp(w[i]);
          ++stats.floored;
        } else if (value < 0) {
          value = 0;
          ++stats.floored;
        }
        v_new[i] = value;
      }
      return true;
    }
    if (!analyzed) {
      lu.analyzePattern(a.jacobian);
      analyzed = true;
    }
    lu.factorize(a.jacobian);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd delta = lu.solve(-a.residual);
    if (lu.info() != Eigen::Success || !delta.allFinite()) return false;
    ++stats.newton_iterations;
    // backtracking on the residual
    double lambda = 1;
    std::vector<double> trial(n);
    for (int bt = 0; bt < 12; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] + lambda * delta(static_cast<Eigen::Index>(i));
      const Assembly b = assemble(model, grid, trial, v_old, dt, false);
      const double r = b.residual.cwiseAbs().maxCoeff() * dt;
      if (std::isfinite(r) && (r < res || r <= tol)) break;
      lambda *= 0.5;
    }
    double w_scale = 0, step_size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w_scale = std::max(w_scale, std::abs(w[i]));
      step_size = std::max(step_size, std::abs(trial[i] - w[i]));
    }
    last_step = model.log_variable ? step_size : step_size / std::max(w_scale, 1e-300);
    w = trial;
  }
  return false;
}

State1D advance(const FluxModel& model, const State1D& state, double dt, StepStats* stats) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  StepStats local;
  std::vector<double> v = state.values;
  double done = 0, sub = dt;
  int halvings = 0;
  while (done < dt) {
    const double step = std::min(sub, dt - done);
    std::vector<double> next;
    if (newton_step(model, state.grid, v, step, next, local)) {
      v = std::move(next);
      done += step;
      ++local.substeps;
    } else {
      if (++halvings > 12) throw SolverError("Newton iteration did not converge");
      sub *= 0.5;
    }
  }
  if (stats) {
    stats->newton_iterations += local.newton_iterations;
    stats->substeps += local.substeps;
    stats->floored += local.floored;
  }
  State1D out{state.grid, std::move(v), state.time + dt};
  return out;
}

void check_state(const State1D& s) {
  if (s.values.size() != s.grid.n || s.grid.n < 5) throw DimensionMismatch("state does not match its grid");
}

}  // namespace

Grid1D make_grid(double L, std::size_t n) {
  if (!(L > 0) || n < 5) throw DomainError("grid needs L > 0 and at least 5 nodes");
  Grid1D g;
  g.L = L;
  g.n = n;
  g.h = 2 * L / static_cast<double>(n - 1);
  return g;
}

State1D barenblatt_state(const Grid1D& grid, double m) {
  State1D s{grid, std::vector<double>(grid.n), 0};
  for (std::size_t i = 0; i < grid.n; ++i) s.values[i] = barenblatt(std::abs(grid.x(i)), m);
  return s;
}

State1D pushforward_perturb(const MultiPoly& psi, double s, double m, const Grid1D& grid) {
  if (psi.dimension() != 1) throw DimensionMismatch("pushforward_perturb: one-dimensional generator expected");
  const MultiPoly d1 = partial(psi, 0), d2 = partial(d1, 0);
  auto eval = [](const MultiPoly& p, double x) { return p.evaluate(std::span<const double>(&x, 1)); };
  auto T = [&](double x) { return x + s * eval(d1, x); };
  const double lo = m > 1 ? -1.0 : -grid.L - 1, hi = m > 1 ? 1.0 : grid.L + 1;
  for (int i = 0; i <= 4000; ++i) {
    const double x = lo + (hi - lo) * i / 4000.0;
    if (!(1 + s * eval(d2, x) > 0)) throw DomainError("pushforward_perturb: map is not injective on the support");
  }
  const State1D star = barenblatt_state(grid, m);
  State1D out{grid, std::vector<double>(grid.n, 0.0), 0};
  const double Tlo = T(lo), Thi = T(hi);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y = grid.x(i);
    if (y <= Tlo || y >= Thi) {
      out.values[i] = m > 1 ? 0.0 : barenblatt(std::abs(y), m);  // m = 1 tails lie beyond the checked window
      continue;
    }
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      (T(mid) < y ? a : b) = mid;
    }
    const double x = 0.5 * (a + b);
    out.values[i] = barenblatt(std::abs(x), m) / (1 + s * eval(d2, x));
  }
  const double target = moment(star, 0), have = moment(out, 0);
  for (double& v : out.values) v *= target / have;
  return out;
}

State1D step_pme(const State1D& state, double dt, double m, StepStats* stats) {
  check_state(state);
  if (!(m >= 1)) throw DomainError("step_pme: m must satisfy m >= 1");
  const Grid1D& g = state.grid;
  FluxModel model;
  model.first_face = 0;
  model.last_face = g.n - 1;
  if (m == 1) {
    model.log_variable = true;
    for (double v : state.values)
      if (!(v > 0)) throw DomainError("step_pme: m = 1 states must be positive");
    model.phi = [g](const std::vector<double>& w, std::size_t j) {
      PhiValue p;
      const double x = g.x(j);
      p.value = 0.5 * x * x + w[j] + 1;
      p.d[2] = 1;
      return p;
    };
  } else {
    model.phi = [g, m](const std::vector<double>& w, std::size_t j) {
      PhiValue p;
      const double x = g.x(j);
      const double v = std::max(w[j], 0.0);
      p.value = 0.5 * x * x + m / (m - 1) * std::pow(v, m - 1);
      p.d[2] = m * std::pow(std::max(v, 1e-12), m - 2);
      return p;
    };
  }
  return advance(model, state, dt, stats);
}

State1D step_fourth(const State1D& state, double dt, double m, double theta, StepStats* stats) {
  check_state(state);
  const Grid1D& g = state.grid;
  const double h2 = g.h * g.h;
  FluxModel model;
  model.first_face = 0;
  model.last_face = g.n - 1;
  // second difference at node j; the missing neighbour at either end is the
  // quadratic extrapolation 3a - 3b + c, returned as weights on offsets -2 .. 2
  struct Stencil {
    double lo, mid, hi;
    double d[3][5];
  };
  auto neighbours = [n = g.n](const std::vector<double>& u, std::size_t j) {
    Stencil s{};
    s.mid = u[j];
    s.d[1][2] = 1;
    if (j > 0) {
      s.lo = u[j - 1];
      s.d[0][1] = 1;
    } else {
      s.lo = 3 * u[0] - 3 * u[1] + u[2];
      s.d[0][2] = 3;
      s.d[0][3] = -3;
      s.d[0][4] = 1;
    }
    if (j + 1 < n) {
      s.hi = u[j + 1];
      s.d[2][3] = 1;
    } else {
      s.hi = 3 * u[j] - 3 * u[j - 1] + u[j - 2];
      s.d[2][2] = 3;
      s.d[2][1] = -3;
      s.d[2][0] = 1;
    }
    return s;
  };
  if (m == 1) {
    model.log_variable = true;
    for (double v : state.values)
      if (!(v > 0)) throw DomainError("step_fourth: m = 1 states must be positive");
    // v^{-1/2} (v^{1/2})'' = u''/2 + (u')^2/4 with u = ln v
    model.phi = [g, h2, theta, neighbours](const std::vector<double>& u, std::size_t j) {
      PhiValue p;
      const double x = g.x(j);
      const Stencil s = neighbours(u, j);
      const double fwd = s.hi - s.mid, bwd = s.mid - s.lo;
      p.value = 0.5 * x * x - theta * (0.5 * (fwd - bwd) + 0.25 * fwd * bwd) / h2;
      const double dlo = -theta * (0.5 - 0.25 * fwd) / h2;
      const double dmid = -theta * (-1.0 + 0.25 * (fwd - bwd)) / h2;
      const double dhi = -theta * (0.5 + 0.25 * bwd) / h2;
      for (int o = 0; o < 5; ++o) p.d[o] = dlo * s.d[0][o] + dmid * s.d[1][o] + dhi * s.d[2][o];
      return p;
    };
  } else if (m == 1.5) {
    model.phi = [g, h2, theta, neighbours](const std::vector<double>& v, std::size_t j) {
      PhiValue p;
      const double x = g.x(j);
      const Stencil s = neighbours(v, j);
      p.value = 0.5 * x * x - theta * (s.hi - 2 * s.mid + s.lo) / h2;
      for (int o = 0; o < 5; ++o) p.d[o] = -theta * (s.d[0][o] - 2 * s.d[1][o] + s.d[2][o]) / h2;
      return p;
    };
  } else {
    throw Unsupported("step_fourth: only m = 1 and m = 3/2 are supported");
  }
  return advance(model, state, dt, stats);
}

double moment(const State1D& state, unsigned order) {
  if (order > 2) throw DomainError("moment: order must be 0, 1 or 2");
  std::vector<double> terms(state.grid.n);
  for (std::size_t i = 0; i < state.grid.n; ++i) {
    const double x = state.grid.x(i);
    terms[i] = control_volume(state.grid, i) * state.values[i] * (order == 0 ? 1.0 : order == 1 ? x : x * x);
  }
  return pairwise_sum(terms);
}

double wasserstein_1d(const State1D& v, const State1D& w) {
  check_state(v);
  check_state(w);
  if (v.grid.n != w.grid.n || v.grid.L != w.grid.L) throw DimensionMismatch("wasserstein_1d: states live on different grids");
  const Grid1D& g = v.grid;
  auto cumulative = [&](const std::vector<double>& f) {
    std::vector<double> c(g.n, 0.0);
    for (std::size_t i = 0; i + 1 < g.n; ++i) c[i + 1] = c[i] + 0.5 * g.h * (f[i] + f[i + 1]);
    return c;
  };
  const std::vector<double> cv = cumulative(v.values), cw = cumulative(w.values);
  const double Mv = cv.back(), Mw = cw.back();
  if (!(Mv > 0) || std::abs(Mv - Mw) > 1e-8 * std::max(Mv, Mw)) throw DomainError("wasserstein_1d: masses differ");
  const double M = std::min(Mv, Mw);

  // quantile in cell j at mass level s
  auto quantile = [&](const std::vector<double>& c, std::size_t j, double s) {
    const double width = c[j + 1] - c[j];
    const double t = width > 0 ? std::clamp((s - c[j]) / width, 0.0, 1.0) : 0.0;
    return g.x(j) + g.h * t;
  };
  auto advance_cell = [&](const std::vector<double>& c, std::size_t j, double s) {
    while (j + 2 < g.n && c[j + 1] <= s) ++j;
    return j;
  };
  std::size_t jv = advance_cell(cv, 0, 0.0), jw = advance_cell(cw, 0, 0.0);
  double s = 0, total = 0;
  while (s < M) {
    const double next = std::min({cv[jv + 1], cw[jw + 1], M});
    if (next > s) {
      const double da = quantile(cv, jv, s) - quantile(cw, jw, s);
      const double db = quantile(cv, jv, next) - quantile(cw, jw, next);
      total += (next - s) * (da * da + da * db + db * db) / 3;
    }
    if (next >= M) break;
    s = next;
    jv = advance_cell(cv, jv, s);
    jw = advance_cell(cw, jw, s);
    if (cv[jv + 1] <= s && cw[jw + 1] <= s) break;  // both exhausted up to round-off
  }
  return std::sqrt(total);
}

RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t0, double t1) {
  std::vector<double> ts, ys;
  for (const auto& [t, d] : series) {
    if (t < t0 || t > t1) continue;
    if (!(d > 0)) throw DomainError("fit_decay_rate: nonpositive value inside the fit window");
    ts.push_back(t);
    ys.push_back(std::log(d));
  }
  if (ts.size() < 2) throw DomainError("fit_decay_rate: fewer than two samples in the window");
  const double n = static_cast<double>(ts.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (stt == 0) throw DomainError("fit_decay_rate: window holds a single time");
  RateFit fit;
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.r2 = syy > 0 ? slope * sty / syy : 1.0;
  fit.t0 = t0;
  fit.t1 = t1;
  fit.points = ts.size();
  return fit;
}

SimulationConfig resolve_defaults(SimulationConfig c) {
  if (c.m < 1) throw DomainError("m must satisfy m >= 1");
  if (c.m == 1) {
    if (c.L == 0) c.L = 7.0;
    if (c.grid == 0) c.grid = 561;
    return c;
  }
  if (c.L != 0) {
    if (c.grid == 0) c.grid = static_cast<std::size_t>(std::lround(2 * c.L / 0.005)) + 1;
    return c;
  }
  if (c.grid == 0) c.grid = 602;
  if (c.grid < 8) throw DomainError("simulate: grid needs at least 8 nodes");
  // keep x = +-1 midway between nodes: 1/h = (n - 1)/2 + k + 1/2 for an integer k
  const double n1 = static_cast<double>(c.grid - 1);
  const double inv_h = c.grid % 2 == 0 ? std::round(n1 / 3) : std::floor(n1 / 3) + 0.5;
  c.L = n1 / (2 * inv_h);
  return c;
}

SimulationConfig refined(SimulationConfig c) {
  c = resolve_defaults(c);
  c.dt /= 2;
  if (c.m == 1) {
    c.grid = 2 * c.grid - 1;
    return c;
  }
  c.grid = 2 * c.grid - 2;
  c.L = 0;
  return resolve_defaults(c);
}

MultiPoly mode_generator(unsigned l, unsigned k, const Rational& m) {
  const MultiPoly psi = eigenfunction({l, 1, k}, m, 1);
  Rational target(1, l + 2 * k);
  target.canonicalize();
  return psi.scaled(target / psi.leading_coefficient());
}

SimulationResult simulate(const SimulationConfig& config) {
  SimulationResult result;
  result.config = resolve_defaults(config);
  const SimulationConfig& c = result.config;
  if (!(c.dt > 0) || !(c.tmax > 0) || !(c.record_every > 0)) throw DomainError("simulate: dt, tmax and record interval must be positive");
  const double m = c.m.get_d();
  const double theta = derive_constants(c.m, 1).theta.get_d();
  const Grid1D grid = make_grid(c.L, c.grid);
  const State1D star = barenblatt_state(grid, m);
  State1D state = pushforward_perturb(mode_generator(c.l, c.k, c.m), c.eps, m, grid);

  auto record = [&](const State1D& s) {
    SimulationRecord r;
    r.t = s.time;
    r.mass = moment(s, 0);
    r.moment1 = moment(s, 1);
    r.moment2 = moment(s, 2);
    r.wasserstein = wasserstein_1d(s, star);
    for (std::size_t i = 0; i < grid.n; ++i) r.linf_to_star = std::max(r.linf_to_star, std::abs(s.values[i] - star.values[i]));
    result.records.push_back(r);
  };
  record(state);
  const long steps = std::lround(c.tmax / c.dt);
  const long every = std::max(1L, std::lround(c.record_every / c.dt));
  StepStats stats;
  for (long step = 1; step <= steps; ++step) {
    state = c.eq == Equation::pme ? step_pme(state, c.dt, m, &stats) : step_fourth(state, c.dt, m, theta, &stats);
    state.time = step * c.dt;
    if (step % every == 0 || step == steps) record(state);
  }
  result.floored = stats.floored;
  result.substeps = stats.substeps;
  return result;
}

std::vector<std::pair<double, double>> wasserstein_series(const SimulationResult& r) {
  std::vector<std::pair<double, double>> out;
  for (const auto& rec : r.records) out.emplace_back(rec.t, rec.wasserstein);
  return out;
}

std::vector<std::pair<double, double>> moment1_series(const SimulationResult& r) {
  std::vector<std::pair<double, double>> out;
  for (const auto& rec : r.records) out.emplace_back(rec.t, std::abs(rec.moment1));
  return out;
}

}  // namespace dhspec
