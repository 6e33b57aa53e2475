#include "dhspec/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dhspec/errors.hpp"

namespace dhspec {

unsigned total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0u); }

bool GradedLex::operator()(const Exponents& a, const Exponents& b) const {
  const unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

MultiPoly::MultiPoly(unsigned dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("polynomial dimension must be positive");
}

MultiPoly MultiPoly::constant(unsigned dim, const Rational& c) {
  MultiPoly p(dim);
  p.add_term(Exponents(dim, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(unsigned dim, unsigned i) {
  if (i >= dim) throw DimensionMismatch("variable index out of range");
  Exponents e(dim, 0);
  e[i] = 1;
  return monomial(e);
}

MultiPoly MultiPoly::monomial(const Exponents& e, const Rational& c) {
  MultiPoly p(static_cast<unsigned>(e.size()));
  p.add_term(e, c);
  return p;
}

MultiPoly MultiPoly::radius_squared(unsigned dim) {
  MultiPoly p(dim);
  for (unsigned i = 0; i < dim; ++i) {
    Exponents e(dim, 0);
    e[i] = 2;
    p.add_term(e, Rational(1));
  }
  return p;
}

int MultiPoly::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(total_degree(terms_.rbegin()->first));
}

Rational MultiPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational MultiPoly::leading_coefficient() const {
  return terms_.empty() ? Rational(0) : terms_.rbegin()->second;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c) {
  if (e.size() != dim_) throw DimensionMismatch("monomial dimension does not match polynomial");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

void MultiPoly::require_same_dim(const MultiPoly& q) const {
  if (dim_ != q.dim_)
    throw DimensionMismatch("polynomial dimensions differ: " + std::to_string(dim_) + " vs " +
                            std::to_string(q.dim_));
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& q) {
  require_same_dim(q);
  for (const auto& [e, c] : q.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& q) {
  require_same_dim(q);
  for (const auto& [e, c] : q.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coef] : terms_) coef *= c;
  return *this;
}

MultiPoly MultiPoly::scaled(const Rational& c) const {
  MultiPoly p = *this;
  p *= c;
  return p;
}

MultiPoly MultiPoly::operator-() const { return scaled(Rational(-1)); }

MultiPoly operator*(const MultiPoly& p, const MultiPoly& q) {
  p.require_same_dim(q);
  MultiPoly r(p.dim_);
  Exponents e(p.dim_);
  for (const auto& [ep, cp] : p.terms_) {
    for (const auto& [eq, cq] : q.terms_) {
      for (unsigned i = 0; i < p.dim_; ++i) e[i] = ep[i] + eq[i];
      r.add_term(e, cp * cq);
    }
  }
  return r;
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result = constant(dim_, Rational(1));
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

double MultiPoly::evaluate(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionMismatch("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c.get_d();
    for (unsigned i = 0; i < dim_; ++i) {
      for (unsigned k = 0; k < e[i]; ++k) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += dhspec::to_string(it->second);
    std::string mono;
    for (unsigned i = 0; i < dim_; ++i) {
      if (it->first[i] == 0) continue;
      if (!mono.empty()) mono += ' ';
      mono += 'x' + std::to_string(i + 1);
      if (it->first[i] > 1) mono += '^' + std::to_string(it->first[i]);
    }
    if (!mono.empty()) out += " * " + mono;
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, unsigned dim) : text_(text), dim_(dim) {}

  MultiPoly parse() {
    MultiPoly p(dim_);
    skip_space();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      bool negative = false;
      bool saw_sign = false;
      while (!at_end() && (peek() == '+' || peek() == '-')) {
        negative ^= peek() == '-';
        saw_sign = true;
        ++pos_;
        skip_space();
      }
      if (!first && !saw_sign) fail("expected '+' or '-' between terms");
      first = false;
      parse_term(p, negative);
      skip_space();
    }
    return p;
  }

 private:
  void parse_term(MultiPoly& p, bool negative) {
    Rational coef(1);
    bool have_coef = false;
    if (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
      const std::size_t start = pos_;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/' || peek() == '.'))
        ++pos_;
      coef = parse_rational(text_.substr(start, pos_ - start));
      have_coef = true;
      skip_space();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_space();
      }
    }
    Exponents e(dim_, 0);
    bool have_var = false;
    while (!at_end() && peek() == 'x') {
      ++pos_;
      const unsigned index = read_uint();
      if (index == 0 || index > dim_) fail("variable index out of range");
      unsigned power = 1;
      skip_space();
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip_space();
        power = read_uint();
      }
      e[index - 1] += power;
      have_var = true;
      skip_space();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_space();
      }
    }
    if (!have_coef && !have_var) fail("expected a term");
    p.add_term(e, negative ? Rational(-coef) : coef);
  }

  unsigned read_uint() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("cannot parse polynomial '" + std::string(text_) + "': " + what +
                                " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  unsigned dim_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, unsigned dim) { return PolyParser(text, dim).parse(); }

MultiPoly poly_arith(const MultiPoly& p, const MultiPoly& q, PolyOp op) {
  switch (op) {
    case PolyOp::add: return p + q;
    case PolyOp::sub: return p - q;
    case PolyOp::mul: return p * q;
  }
  throw std::invalid_argument("unknown polynomial operation");
}

MultiPoly partial(const MultiPoly& p, unsigned i) {
  if (i >= p.dimension()) throw DimensionMismatch("partial derivative index out of range");
  MultiPoly r(p.dimension());
  for (const auto& [e, c] : p.terms()) {
    if (e[i] == 0) continue;
    Exponents d = e;
    --d[i];
    r.add_term(d, c * e[i]);
  }
  return r;
}

MultiPoly laplacian(const MultiPoly& p) {
  MultiPoly r(p.dimension());
  for (const auto& [e, c] : p.terms()) {
    for (unsigned i = 0; i < p.dimension(); ++i) {
      if (e[i] < 2) continue;
      Exponents d = e;
      d[i] -= 2;
      r.add_term(d, c * (e[i] * (e[i] - 1)));
    }
  }
  return r;
}

MultiPoly euler_grad(const MultiPoly& p) {
  MultiPoly r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.add_term(e, c * total_degree(e));
  return r;
}

bool is_harmonic(const MultiPoly& p) { return laplacian(p).is_zero(); }

namespace {

void require_admissible(const MultiPoly& p, const Rational& m, unsigned N) {
  if (m < 1) throw DomainError("displacement Hessian requires m >= 1, got m = " + to_string(m));
  if (p.dimension() != N)
    throw DimensionMismatch("polynomial dimension " + std::to_string(p.dimension()) + " does not match N = " +
                            std::to_string(N));
}

}  // namespace

MultiPoly apply_HE(const MultiPoly& p, const Rational& m, unsigned N) {
  require_admissible(p, m, N);
  MultiPoly lap = laplacian(p);
  MultiPoly out = euler_grad(p);
  if (m == 1) return out - lap;
  const Rational half_m1 = (m - 1) / 2;
  MultiPoly confinement = MultiPoly::constant(N, Rational(1)) - MultiPoly::radius_squared(N);
  out -= (confinement * lap).scaled(half_m1);
  return out;
}

MultiPoly apply_HI(const MultiPoly& p, const Rational& m, unsigned N) {
  require_admissible(p, m, N);
  const Rational a = N * (m - 1);
  MultiPoly he = apply_HE(p, m, N);
  MultiPoly out = apply_HE(he, m, N) + he.scaled(a);
  out *= Rational(1) / (1 + a);
  return out;
}

MultiPoly he_monomial_image(const Exponents& e, const Rational& m) {
  // x.grad x^e = |e| x^e;  lap x^e = sum_i e_i(e_i-1) x^(e-2e_i).
  // For m > 1 the |x|^2 lap part raises each lowered monomial by 2e_j.
  const unsigned dim = static_cast<unsigned>(e.size());
  MultiPoly r(dim);
  r.add_term(e, Rational(total_degree(e)));
  const Rational diffusion = (m == 1) ? Rational(1) : Rational((m - 1) / 2);
  const bool confined = m != 1;
  for (unsigned i = 0; i < dim; ++i) {
    if (e[i] < 2) continue;
    const Rational w = diffusion * (e[i] * (e[i] - 1));
    Exponents lowered = e;
    lowered[i] -= 2;
    r.add_term(lowered, -w);
    if (!confined) continue;
    for (unsigned j = 0; j < dim; ++j) {
      Exponents raised = lowered;
      raised[j] += 2;
      r.add_term(raised, w);
    }
  }
  return r;
}

MultiPoly apply_HI_direct(const MultiPoly& p, const Rational& m, unsigned N) {
  require_admissible(p, m, N);
  const Rational a = N * (m - 1);
  const Rational norm = Rational(1) / (1 + a);
  // Column cache of the HE matrix on the monomial basis.
  std::map<Exponents, MultiPoly, GradedLex> column;
  auto he_column = [&](const Exponents& e) -> const MultiPoly& {
    auto it = column.find(e);
    if (it == column.end()) it = column.emplace(e, he_monomial_image(e, m)).first;
    return it->second;
  };
  MultiPoly out(N);
  for (const auto& [e, c] : p.terms()) {
    // Row of (M^2 + a M) for this monomial, scaled by c / (1 + a).
    const MultiPoly& first = he_column(e);
    for (const auto& [f, cf] : first.terms()) {
      const Rational w = c * cf * norm;
      out.add_term(f, w * a);
      for (const auto& [g, cg] : he_column(f).terms()) out.add_term(g, w * cg);
    }
  }
  return out;
}

}  // namespace dhspec
