#include "dhspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dhspec/errors.hpp"

namespace dhspec {

namespace {

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer factorial(unsigned n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Rational pochhammer(const Rational& s, unsigned j) {
  Rational r(1);
  for (unsigned i = 0; i < j; ++i) r *= s + i;
  return r;
}

void require_m(const Rational& m) {
  if (m < 1) throw DomainError("m must satisfy m >= 1, got m = " + to_string(m));
}

// Sum_j c_j (|x|^2)^j Y, with an extra factor scale^j on the radial variable.
MultiPoly radial_times(const std::vector<Rational>& coeffs, const Rational& scale, const MultiPoly& y) {
  const unsigned N = y.dimension();
  const MultiPoly r2 = MultiPoly::radius_squared(N).scaled(scale);
  MultiPoly radial(N);
  MultiPoly power = MultiPoly::constant(N, Rational(1));
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    radial += power.scaled(coeffs[j]);
    if (j + 1 < coeffs.size()) power = power * r2;
  }
  return radial * y;
}

// Re and Im of (x1 + i x2)^j in dimension dim.
std::pair<MultiPoly, MultiPoly> complex_power(unsigned j, unsigned dim) {
  MultiPoly re = MultiPoly::constant(dim, Rational(1));
  MultiPoly im(dim);
  const MultiPoly x1 = MultiPoly::variable(dim, 0);
  const MultiPoly x2 = MultiPoly::variable(dim, 1);
  for (unsigned i = 0; i < j; ++i) {
    MultiPoly next_re = re * x1 - im * x2;
    MultiPoly next_im = re * x2 + im * x1;
    re = std::move(next_re);
    im = std::move(next_im);
  }
  return {re, im};
}

// Associated-Legendre factor of the degree-l, order-j solid harmonic in R^3.
MultiPoly legendre_factor(unsigned l, unsigned j) {
  const MultiPoly r2 = MultiPoly::radius_squared(3);
  const MultiPoly z = MultiPoly::variable(3, 2);
  MultiPoly out(3);
  for (unsigned k = 0; 2 * k + j <= l; ++k) {
    Rational c(binomial(l, k) * binomial(2 * l - 2 * k, l) * factorial(l - 2 * k), factorial(l - 2 * k - j));
    c.canonicalize();
    if (k % 2 == 1) c = -c;
    out += (r2.pow(k) * z.pow(l - 2 * k - j)).scaled(c);
  }
  return out;
}

MultiPoly unit_leading(const MultiPoly& p) { return p.scaled(Rational(1) / p.leading_coefficient()); }

}  // namespace

void validate_pair(unsigned l, unsigned k, unsigned N) {
  if (N == 0) throw InvalidIndex("dimension N must be positive");
  if (l == 0 && k == 0) throw InvalidIndex("(l,k) = (0,0) is the constant mode and carries no eigenvalue");
  if (N == 1 && l > 1) throw InvalidIndex("N = 1 admits only l in {0,1}, got l = " + std::to_string(l));
}

Rational lambda_eig(unsigned l, unsigned k, const Rational& m, unsigned N) {
  validate_pair(l, k, N);
  require_m(m);
  const Rational half_N(N, 2);
  Rational lam = Rational(l + 2 * k) + Rational(2 * k) * (Rational(k + l) + half_N - 1) * (m - 1);
  lam.canonicalize();
  return lam;
}

Rational mu_from_lambda(const Rational& lambda, const Rational& m, unsigned N) {
  const Rational a = N * (m - 1);
  Rational mu = (lambda * lambda + a * lambda) / (1 + a);
  mu.canonicalize();
  return mu;
}

Rational mu_eig(unsigned l, unsigned k, const Rational& m, unsigned N) {
  return mu_from_lambda(lambda_eig(l, k, m, N), m, N);
}

Integer multiplicity(unsigned l, unsigned N) {
  if (N == 0) throw InvalidIndex("dimension N must be positive");
  if (N == 1) {
    if (l > 1) throw InvalidIndex("N = 1 admits only l in {0,1}, got l = " + std::to_string(l));
    return Integer(1);
  }
  if (l == 0) return Integer(1);
  // (N+l-3)! (N+2l-2) / (l! (N-2)!)
  Integer num = factorial(N + l - 3) * (N + 2 * l - 2);
  Integer den = factorial(l) * factorial(N - 2);
  return num / den;
}

std::vector<Rational> hermite_1d(unsigned n) {
  std::vector<Rational> psi{Rational(1)};
  for (unsigned step = 0; step < n; ++step) {
    std::vector<Rational> next(psi.size() + 1, Rational(0));
    for (std::size_t i = 0; i < psi.size(); ++i) next[i + 1] += psi[i];   // z psi
    for (std::size_t i = 1; i < psi.size(); ++i) next[i - 1] -= psi[i] * static_cast<unsigned>(i);  // -psi'
    psi = std::move(next);
  }
  return psi;
}

MultiPoly hermite(const Exponents& alpha) {
  const unsigned N = static_cast<unsigned>(alpha.size());
  MultiPoly out = MultiPoly::constant(N, Rational(1));
  for (unsigned i = 0; i < N; ++i) {
    const std::vector<Rational> c = hermite_1d(alpha[i]);
    MultiPoly factor(N);
    for (unsigned d = 0; d < c.size(); ++d) {
      Exponents e(N, 0);
      e[i] = d;
      factor.add_term(e, c[d]);
    }
    out = out * factor;
  }
  return out;
}

std::vector<Rational> hypergeom_poly(unsigned k, const Rational& b, const Rational& c) {
  if (c <= 0 && is_integer(c)) throw DomainError("hypergeometric parameter c must not be a nonpositive integer");
  std::vector<Rational> coeffs;
  coeffs.reserve(k + 1);
  const Rational a = -Rational(k);
  for (unsigned j = 0; j <= k; ++j) {
    Rational t = pochhammer(a, j) * pochhammer(b, j) / (pochhammer(c, j) * factorial(j));
    t.canonicalize();
    coeffs.push_back(t);
  }
  return coeffs;
}

std::vector<Rational> confluent_hypergeom_poly(unsigned k, const Rational& c) {
  if (c <= 0 && is_integer(c)) throw DomainError("hypergeometric parameter c must not be a nonpositive integer");
  std::vector<Rational> coeffs;
  const Rational a = -Rational(k);
  for (unsigned j = 0; j <= k; ++j) {
    Rational t = pochhammer(a, j) / (pochhammer(c, j) * factorial(j));
    t.canonicalize();
    coeffs.push_back(t);
  }
  return coeffs;
}

MultiPoly solid_harmonic(unsigned l, unsigned n, unsigned N) {
  if (N == 0) throw InvalidIndex("dimension N must be positive");
  if (N > 3) throw Unsupported("explicit harmonic basis is implemented for N <= 3 only");
  const Integer count = multiplicity(l, N);
  if (n < 1 || Integer(n) > count)
    throw InvalidIndex("harmonic label n = " + std::to_string(n) + " outside 1.." + count.get_str());
  if (l == 0) return MultiPoly::constant(N, Rational(1));
  if (N == 1) return MultiPoly::variable(1, 0);
  if (N == 2) {
    auto [re, im] = complex_power(l, 2);
    return unit_leading(n == 1 ? re : im);
  }
  // N = 3
  if (n == 2 * l + 1) return unit_leading(legendre_factor(l, 0));
  const unsigned j = l - (n - 1) / 2;
  auto [re, im] = complex_power(j, 3);
  const MultiPoly radial = legendre_factor(l, j);
  return unit_leading(radial * ((n % 2 == 1) ? re : im));
}

MultiPoly eigenfunction(const EigenIndex& idx, const Rational& m, unsigned N) {
  validate_pair(idx.l, idx.k, N);
  require_m(m);
  const MultiPoly y = solid_harmonic(idx.l, idx.n, N);
  const Rational c = Rational(idx.l) + Rational(N, 2);
  if (m == 1) return radial_times(confluent_hypergeom_poly(idx.k, c), Rational(1, 2), y);
  const Rational b = Rational(1) / (m - 1) + Rational(idx.l) + Rational(N, 2) - 1 + Rational(idx.k);
  return radial_times(hypergeom_poly(idx.k, b, c), Rational(1), y);
}

MultiPoly::TermMap hermite_expansion(const MultiPoly& p) {
  MultiPoly::TermMap coeffs;
  MultiPoly rest = p;
  while (!rest.is_zero()) {
    const auto& [top, c] = *rest.terms().rbegin();
    const Exponents alpha = top;
    const Rational coef = c;
    coeffs.emplace(alpha, coef);
    rest -= hermite(alpha).scaled(coef);
  }
  return coeffs;
}

EpsLambda mu_to_lambda(double mu, double m, unsigned N) {
  if (!(mu > 0)) throw DomainError("mu_to_lambda requires mu > 0");
  if (!(m >= 1)) throw DomainError("mu_to_lambda requires m >= 1");
  const double a = N * (m - 1);
  const double eps = a / 2 + std::sqrt(mu * (1 + a) + a * a / 4);
  return {eps, mu * (1 + a) / eps};
}

std::optional<ExactEpsLambda> mu_to_lambda_exact(const Rational& mu, const Rational& m, unsigned N) {
  if (sgn(mu) <= 0) throw DomainError("mu_to_lambda requires mu > 0");
  require_m(m);
  const Rational a = N * (m - 1);
  Rational root;
  if (!exact_sqrt(Rational(mu * (1 + a) + a * a / 4), root)) return std::nullopt;
  Rational eps = a / 2 + root;
  Rational lam = mu * (1 + a) / eps;
  eps.canonicalize();
  lam.canonicalize();
  return ExactEpsLambda{eps, lam};
}

namespace {

// lambda_{lk} = p + q a with a = N(m-1).
std::pair<Rational, Rational> lambda_branch(unsigned l, unsigned k, unsigned N) {
  Rational p(l + 2 * k);
  Rational q = Rational(2 * k) * (Rational(k + l) + Rational(N, 2) - 1) / N;
  q.canonicalize();
  return {p, q};
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CrossingSet crossing(unsigned lA, unsigned kA, unsigned lB, unsigned kB, unsigned N) {
  if (N == 0) throw InvalidIndex("dimension N must be positive");
  auto [pA, qA] = lambda_branch(lA, kA, N);
  auto [pB, qB] = lambda_branch(lB, kB, N);
  // (1 + a)(mu_A - mu_B) = c0 + c1 a + c2 a^2
  const Rational c0 = pA * pA - pB * pB;
  const Rational c1 = 2 * pA * qA - 2 * pB * qB + pA - pB;
  const Rational c2 = qA * qA - qB * qB + qA - qB;
  CrossingSet out;
  if (sgn(c0) == 0 && sgn(c1) == 0 && sgn(c2) == 0) {
    out.all_m = true;
    return out;
  }
  std::vector<Rational> exact;
  std::vector<double> approx;
  if (sgn(c2) == 0) {
    if (sgn(c1) != 0) exact.push_back(-c0 / c1);
  } else {
    const Rational disc = c1 * c1 - 4 * c2 * c0;
    if (sgn(disc) == 0) {
      exact.push_back(-c1 / (2 * c2));
    } else if (sgn(disc) > 0) {
      Rational root;
      if (exact_sqrt(disc, root)) {
        exact.push_back((-c1 - root) / (2 * c2));
        exact.push_back((-c1 + root) / (2 * c2));
      } else {
        const double d0 = c0.get_d(), d1 = c1.get_d(), d2 = c2.get_d();
        const double sq = std::sqrt(disc.get_d());
        auto f = [&](double a) { return d0 + a * (d1 + a * d2); };
        for (double guess : {(-d1 - sq) / (2 * d2), (-d1 + sq) / (2 * d2)}) {
          const double width = 1e-6 * std::max(1.0, std::abs(guess));
          double lo = guess - width, hi = guess + width;
          if ((f(lo) < 0) != (f(hi) < 0)) guess = bisect(f, lo, hi);
          approx.push_back(guess);
        }
      }
    }
  }
  for (Rational a : exact) {
    a.canonicalize();
    if (sgn(a) < 0) continue;
    Rational m = 1 + a / N;
    m.canonicalize();
    out.roots.push_back({a.get_d(), m.get_d(), a, m});
  }
  for (double a : approx) {
    if (a < 0) continue;
    out.roots.push_back({a, 1 + a / N, std::nullopt, std::nullopt});
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  return out;
}

std::vector<SpectrumEntry> spectrum_table(const Rational& m, unsigned N, unsigned max_degree) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be at least 1");
  if (N == 0) throw InvalidIndex("dimension N must be positive");
  require_m(m);
  std::vector<SpectrumEntry> out;
  for (unsigned l = 0; l <= max_degree; ++l) {
    if (N == 1 && l > 1) break;
    for (unsigned k = 0; l + 2 * k <= max_degree; ++k) {
      if (l == 0 && k == 0) continue;
      SpectrumEntry e;
      e.l = l;
      e.k = k;
      e.lambda = lambda_eig(l, k, m, N);
      e.mu = mu_from_lambda(e.lambda, m, N);
      e.multiplicity = multiplicity(l, N);
      e.degree = l + 2 * k;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.l != b.l) return a.l < b.l;
    return a.k < b.k;
  });
  return out;
}

std::vector<EigenIndex> eigen_indices(unsigned N, unsigned max_degree) {
  std::vector<EigenIndex> out;
  for (unsigned d = 1; d <= max_degree; ++d) {
    for (unsigned l = d % 2; l <= d; l += 2) {
      if (N == 1 && l > 1) break;
      const unsigned k = (d - l) / 2;
      const unsigned long count = multiplicity(l, N).get_ui();
      for (unsigned n = 1; n <= count; ++n) out.push_back({l, n, k});
    }
  }
  return out;
}

}  // namespace dhspec
