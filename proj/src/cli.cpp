#include "dhspec/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dhspec/errors.hpp"
#include "dhspec/evolve.hpp"
#include "dhspec/functionals.hpp"
#include "dhspec/poly.hpp"
#include "dhspec/profiles.hpp"
#include "dhspec/spectra.hpp"
#include "dhspec/weighted.hpp"

namespace dhspec {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rational parse_m(const std::string& text) {
  Rational m;
  try {
    m = parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError("--m: not a rational number: " + text);
  }
  if (m < 1) throw UsageError("--m " + text + ": the model requires m >= 1");
  return m;
}

void check_N(unsigned N) {
  if (N < 1) throw UsageError("--N must be at least 1");
}

Json header(const std::string& command, Json config) {
  Json j;
  j["tool"] = "dhspec";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  return j;
}

Json rule_json(const QuadratureRule& r) {
  return Json{{"radial_order", r.radial_order}, {"angular_order", r.angular_order}, {"nodes", r.size()},
              {"exactness_degree", r.exactness_degree}};
}

void write_comment_header(std::ostream& out, const Json& h) { out << "# " << h.dump() << "\n"; }

// ---- spectrum ------------------------------------------------------------

struct SpectrumArgs {
  std::string m = "1";
  unsigned N = 1;
  unsigned max_degree = 4;
};

int cmd_spectrum(const SpectrumArgs& a, const std::string& format, std::ostream& out) {
  const Rational m = parse_m(a.m);
  check_N(a.N);
  const auto table = spectrum_table(m, a.N, a.max_degree);
  Json h = header("spectrum", {{"m", to_string(m)}, {"N", a.N}, {"max_degree", a.max_degree}});
  if (format == "csv") {
    write_comment_header(out, h);
    out << "l,k,lambda,mu,multiplicity,degree\n";
    for (const auto& e : table)
      out << e.l << ',' << e.k << ',' << to_string(e.lambda) << ',' << to_string(e.mu) << ',' << e.multiplicity.get_str() << ','
          << e.degree << '\n';
    return exit_pass;
  }
  Json rows = Json::array();
  for (const auto& e : table)
    rows.push_back({{"l", e.l}, {"k", e.k}, {"lambda", to_string(e.lambda)}, {"mu", to_string(e.mu)},
                    {"multiplicity", e.multiplicity.get_si()}, {"degree", e.degree}});
  h["spectrum"] = rows;
  out << h.dump(2) << "\n";
  return exit_pass;
}

// ---- eigenfunction -------------------------------------------------------

struct EigenArgs {
  std::string m = "1";
  unsigned N = 1;
  unsigned l = 1, n = 1, k = 0;
};

int cmd_eigenfunction(const EigenArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  check_N(a.N);
  const EigenIndex idx{a.l, a.n, a.k};
  const MultiPoly psi = eigenfunction(idx, m, a.N);
  Json h = header("eigenfunction", {{"m", to_string(m)}, {"N", a.N}, {"l", a.l}, {"n", a.n}, {"k", a.k}});
  h["lambda"] = to_string(lambda_eig(a.l, a.k, m, a.N));
  h["mu"] = to_string(mu_eig(a.l, a.k, m, a.N));
  h["degree"] = psi.degree();
  h["polynomial"] = psi.to_string();
  out << h.dump(2) << "\n";
  return exit_pass;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string m = "2";
  unsigned N = 1;
  unsigned max_degree = 0;  // 0: per-target default
  double tol = 0;           // 0: per-target default
  std::string family = "all";
  unsigned samples = 20;
  unsigned seed = 1;
};

Json index_json(const EigenIndex& i) { return Json{{"l", i.l}, {"n", i.n}, {"k", i.k}}; }

std::vector<MultiPoly> eigen_basis(const std::vector<EigenIndex>& ids, const Rational& m, unsigned N) {
  std::vector<MultiPoly> basis;
  for (const auto& i : ids) basis.push_back(eigenfunction(i, m, N));
  return basis;
}

QuadratureRule rule_for_degree(double m, unsigned N, unsigned degree) { return build_rule(m, N, degree + 4, N == 1 ? 1 : 2 * degree + 2); }

int verify_eigen(const VerifyArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  const unsigned d = a.max_degree ? a.max_degree : 8;
  Json h = header("verify eigen", {{"m", to_string(m)}, {"N", a.N}, {"max_degree", d}});
  Json cases = Json::array();
  bool ok = true;
  for (const auto& i : eigen_indices(a.N, d)) {
    const MultiPoly psi = eigenfunction(i, m, a.N);
    const MultiPoly rE = apply_HE(psi, m, a.N) - psi.scaled(lambda_eig(i.l, i.k, m, a.N));
    const MultiPoly rI = apply_HI(psi, m, a.N) - psi.scaled(mu_eig(i.l, i.k, m, a.N));
    const bool exact = rE.is_zero() && rI.is_zero();
    ok = ok && exact;
    cases.push_back({{"index", index_json(i)}, {"residual_HE", rE.is_zero() ? "0" : rE.to_string()},
                     {"residual_HI", rI.is_zero() ? "0" : rI.to_string()}, {"pass", exact}});
  }
  h["cases"] = cases;
  h["pass"] = ok;
  out << h.dump(2) << "\n";
  return ok ? exit_pass : exit_failed;
}

bool family_member(const std::string& family, const std::string& label) {
  const bool gaussian = label.find("gaussian") != std::string::npos || label.find("mixture") != std::string::npos;
  if (family == "all") return true;
  if (family == "pushforward") return !gaussian;
  return gaussian;
}

int verify_relation(const VerifyArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  if (a.family != "all" && a.family != "pushforward" && a.family != "mixture") throw UsageError("--family must be all, pushforward or mixture");
  const double tol = a.tol > 0 ? a.tol : 1e-8;
  const auto family = relation_family(m, a.N, a.samples, a.seed);
  Json h = header("verify relation",
                  {{"m", to_string(m)}, {"N", a.N}, {"family", a.family}, {"samples", a.samples}, {"seed", a.seed}, {"tol", tol}});
  Json cases = Json::array();
  bool ok = true;
  std::size_t used = 0;
  for (const auto& v : family) {
    if (!family_member(a.family, v.label)) continue;
    ++used;
    const RelationTerms t = relation_terms(v, m.get_d());
    const bool pass = t.residual <= tol;
    ok = ok && pass;
    cases.push_back({{"label", v.label}, {"samples", v.size()}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"residual", t.residual}, {"pass", pass}});
  }
  if (used == 0) throw UsageError("--family " + a.family + " has no members for this m");
  h["cases"] = cases;
  h["pass"] = ok;
  out << h.dump(2) << "\n";
  return ok ? exit_pass : exit_failed;
}

int verify_operator(const VerifyArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  const unsigned d = a.max_degree ? a.max_degree : 6;
  const double tol = a.tol > 0 ? a.tol : 1e-8;
  const QuadratureRule rule = rule_for_degree(m.get_d(), a.N, d);
  Json h = header("verify operator", {{"m", to_string(m)}, {"N", a.N}, {"max_degree", d}, {"tol", tol}});
  h["resolution"] = rule_json(rule);
  Json cases = Json::array();
  bool ok = true;
  for (const auto& i : eigen_indices(a.N, d)) {
    const double r = divergence_form_residual(eigenfunction(i, m, a.N), rule, m, a.N);
    ok = ok && r <= tol;
    cases.push_back({{"index", index_json(i)}, {"residual", r}, {"pass", r <= tol}});
  }
  h["cases"] = cases;
  h["pass"] = ok;
  out << h.dump(2) << "\n";
  return ok ? exit_pass : exit_failed;
}

int verify_orthogonality(const VerifyArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  const unsigned d = a.max_degree ? a.max_degree : 4;
  const double tol = a.tol > 0 ? a.tol : 1e-10;
  const QuadratureRule rule = rule_for_degree(m.get_d(), a.N, d);
  const auto ids = eigen_indices(a.N, d);
  const auto basis = eigen_basis(ids, m, a.N);
  const double off = max_offdiag_relative(gram(basis, rule, m, a.N, GramOp::none));
  const double opres = operator_identity_residual(basis, rule, m, a.N);
  Json h = header("verify orthogonality", {{"m", to_string(m)}, {"N", a.N}, {"max_degree", d}, {"tol", tol}});
  h["resolution"] = rule_json(rule);
  h["basis_size"] = basis.size();
  h["max_offdiag_relative"] = off;
  h["operator_identity_residual"] = opres;
  const bool ok = off <= tol && opres <= tol;
  h["pass"] = ok;
  out << h.dump(2) << "\n";
  return ok ? exit_pass : exit_failed;
}

int verify_poincare(const VerifyArgs& a, std::ostream& out) {
  const Rational m = parse_m(a.m);
  const unsigned d = a.max_degree ? a.max_degree : 4;
  const QuadratureRule rule = rule_for_degree(m.get_d(), a.N, d + 1);
  Json h = header("verify poincare", {{"m", to_string(m)}, {"N", a.N}, {"max_degree", d}});
  h["resolution"] = rule_json(rule);
  Json cases = Json::array();
  bool ok = true;
  double worst = 0;
  for (const auto& i : eigen_indices(a.N, d)) {
    const double r = poincare_ratio(eigenfunction(i, m, a.N), rule, m, a.N);
    const bool pass = std::isfinite(r) && r > 0;
    ok = ok && pass;
    worst = std::max(worst, r);
    cases.push_back({{"index", index_json(i)}, {"ratio", r}, {"pass", pass}});
  }
  h["cases"] = cases;
  h["max_ratio"] = worst;
  h["pass"] = ok;
  out << h.dump(2) << "\n";
  return ok ? exit_pass : exit_failed;
}

// ---- crossings -----------------------------------------------------------

struct CrossingArgs {
  std::vector<std::string> pairs;
  unsigned N = 1;
};

int cmd_crossings(const CrossingArgs& a, std::ostream& out) {
  check_N(a.N);
  Json h = header("crossings", {{"pairs", a.pairs}, {"N", a.N}});
  Json results = Json::array();
  for (const std::string& p : a.pairs) {
    unsigned lA, kA, lB, kB;
    char c1, c2, c3;
    std::istringstream in(p);
    if (!(in >> lA >> c1 >> kA >> c2 >> lB >> c3 >> kB) || c1 != ',' || c2 != ':' || c3 != ',' || !in.eof())
      throw UsageError("--pairs expects lA,kA:lB,kB, got " + p);
    const CrossingSet s = crossing(lA, kA, lB, kB, a.N);
    Json roots = Json::array();
    for (const auto& r : s.roots) {
      Json jr;
      jr["m"] = r.exact_m ? to_string(*r.exact_m) : fmt(r.m);
      jr["a"] = r.exact_a ? to_string(*r.exact_a) : fmt(r.a);
      jr["exact"] = r.exact_m.has_value();
      roots.push_back(jr);
    }
    results.push_back({{"A", {{"l", lA}, {"k", kA}}}, {"B", {{"l", lB}, {"k", kB}}}, {"all_m", s.all_m}, {"roots", roots}});
  }
  h["crossings"] = results;
  out << h.dump(2) << "\n";
  return exit_pass;
}

// ---- profile -------------------------------------------------------------

struct ProfileArgs {
  std::string m = "2";
  unsigned N = 1;
  std::string at;
  unsigned points = 101;
  double rmax = 0;
};

// v_*(r) exactly when 1/(m-1) is a positive integer and r is rational
std::optional<Rational> exact_profile(const Rational& m, const Rational& r) {
  if (m == 1) return std::nullopt;
  Rational p = 1 / (m - 1);
  p.canonicalize();
  if (!is_integer(p)) return std::nullopt;
  Rational base = (m - 1) / (2 * m) * (1 - r * r);
  base.canonicalize();
  if (base <= 0) return Rational(0);
  Rational v(1);
  for (long i = 0; i < p.get_num().get_si(); ++i) v *= base;
  v.canonicalize();
  return v;
}

int cmd_profile(const ProfileArgs& a, const std::string& format, std::ostream& out) {
  const Rational m = parse_m(a.m);
  check_N(a.N);
  const Params p = derive_constants(m, a.N);
  Json params{{"m", to_string(p.m)}, {"N", p.N}, {"alpha", to_string(p.alpha)}, {"gamma_sq", to_string(p.gamma_sq)},
              {"theta", to_string(p.theta)}, {"mass_v_star", profile_mass(m.get_d(), a.N)}};
  Json config{{"m", to_string(m)}, {"N", a.N}};
  if (!a.at.empty()) {
    Rational r;
    try {
      r = parse_rational(a.at);
    } catch (const std::exception&) {
      throw UsageError("--at: not a number: " + a.at);
    }
    config["at"] = to_string(r);
    Json h = header("profile", config);
    h["params"] = params;
    h["r"] = to_string(r);
    h["value"] = barenblatt(std::abs(r.get_d()), m.get_d());
    if (auto e = exact_profile(m, r)) h["exact"] = to_string(*e);
    out << h.dump(2) << "\n";
    return exit_pass;
  }
  if (a.points < 2) throw UsageError("--points must be at least 2");
  const double rmax = a.rmax > 0 ? a.rmax : (m == 1 ? 5.0 : 1.0);
  config["points"] = a.points;
  config["rmax"] = rmax;
  Json h = header("profile", config);
  h["params"] = params;
  if (format == "csv") {
    write_comment_header(out, h);
    out << "r,v\n";
    for (unsigned i = 0; i < a.points; ++i) {
      const double r = rmax * i / (a.points - 1);
      out << fmt(r) << ',' << fmt(barenblatt(r, m.get_d())) << '\n';
    }
    return exit_pass;
  }
  Json rows = Json::array();
  for (unsigned i = 0; i < a.points; ++i) {
    const double r = rmax * i / (a.points - 1);
    rows.push_back({r, barenblatt(r, m.get_d())});
  }
  h["rows"] = rows;
  out << h.dump(2) << "\n";
  return exit_pass;
}

// ---- simulate / rate -----------------------------------------------------

struct SimulateArgs {
  std::string eq = "pme";
  std::string m = "1";
  std::string mode = "l=1,k=0";
  double eps = 0.05;
  std::size_t grid = 0;
  double L = 0;
  double dt = 1e-3;
  double tmax = 5;
  double record_every = 0.05;
  std::string out_path;
};

std::pair<unsigned, unsigned> parse_mode(const std::string& text) {
  unsigned l = 0, k = 0;
  if (std::sscanf(text.c_str(), "l=%u,k=%u", &l, &k) != 2) throw UsageError("--mode expects l=<l>,k=<k>, got " + text);
  return {l, k};
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimulationConfig c;
  if (a.eq == "pme")
    c.eq = Equation::pme;
  else if (a.eq == "fourth")
    c.eq = Equation::fourth;
  else
    throw UsageError("--eq must be pme or fourth");
  c.m = parse_m(a.m);
  std::tie(c.l, c.k) = parse_mode(a.mode);
  if (c.l + 2 * c.k == 0 || c.l > 1) throw UsageError("--mode: one-dimensional modes need l <= 1 and l + 2k >= 1");
  c.eps = a.eps;
  c.grid = a.grid;
  c.L = a.L;
  c.dt = a.dt;
  c.tmax = a.tmax;
  c.record_every = a.record_every;
  const SimulationConfig r = resolve_defaults(c);
  const Grid1D g = make_grid(r.L, r.grid);

  const SimulationResult res = simulate(c);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) throw UsageError("cannot open " + a.out_path);
    sink = &file;
  }
  Json h = header("simulate", {{"eq", a.eq}, {"m", to_string(c.m)}, {"mode", {{"l", c.l}, {"k", c.k}}}, {"eps", c.eps}, {"dt", c.dt},
                               {"tmax", c.tmax}, {"record_every", c.record_every}});
  h["resolution"] = {{"L", r.L}, {"grid", r.grid}, {"h", g.h}, {"dt", r.dt}};
  write_comment_header(*sink, h);
  *sink << "t,mass,moment1,moment2,wasserstein,linf_to_star\n";
  for (const auto& rec : res.records)
    *sink << fmt(rec.t) << ',' << fmt(rec.mass) << ',' << fmt(rec.moment1) << ',' << fmt(rec.moment2) << ',' << fmt(rec.wasserstein)
          << ',' << fmt(rec.linf_to_star) << '\n';
  *sink << "# " << Json{{"substeps", res.substeps}, {"floored", res.floored}}.dump() << "\n";
  if (sink != &out) out << Json{{"written", a.out_path}, {"records", res.records.size()}}.dump() << "\n";
  return exit_pass;
}

struct RateArgs {
  std::string in_path;
  std::string column = "wasserstein";
  double t0 = 1, t1 = 4;
};

int cmd_rate(const RateArgs& a, std::ostream& out) {
  std::ifstream in(a.in_path);
  if (!in) throw UsageError("cannot read " + a.in_path);
  std::string line;
  std::vector<std::string> columns;
  std::vector<std::pair<double, double>> series;
  long col = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (columns.empty()) {
      columns = cells;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == a.column) col = static_cast<long>(i);
      if (columns.empty() || columns[0] != "t" || col < 0) throw UsageError("CSV lacks the columns t and " + a.column);
      continue;
    }
    if (cells.size() != columns.size()) throw UsageError("ragged CSV row: " + line);
    series.emplace_back(std::stod(cells[0]), std::stod(cells[static_cast<std::size_t>(col)]));
  }
  if (a.column == "moment1")
    for (auto& s : series) s.second = std::abs(s.second);
  const RateFit f = fit_decay_rate(series, a.t0, a.t1);
  Json h = header("rate", {{"in", a.in_path}, {"column", a.column}});
  h["rate"] = f.rate;
  h["r2"] = f.r2;
  h["window"] = {f.t0, f.t1};
  h["points"] = f.points;
  out << h.dump(2) << "\n";
  return exit_pass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of the displacement Hessians of the confined porous-medium and fourth-order flows", "dhspec"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue table up to a degree");
  spectrum->add_option("--m", sa.m, "nonlinearity exponent, p/q or decimal");
  spectrum->add_option("--N", sa.N, "dimension");
  spectrum->add_option("--max-degree", sa.max_degree, "largest l + 2k");
  spectrum->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  EigenArgs ea;
  auto* eigen = app.add_subcommand("eigenfunction", "polynomial eigenfunction psi_lnk");
  eigen->add_option("--m", ea.m);
  eigen->add_option("--N", ea.N);
  eigen->add_option("--l", ea.l);
  eigen->add_option("--n", ea.n);
  eigen->add_option("--k", ea.k);

  VerifyArgs va;
  std::string target;
  auto* verify = app.add_subcommand("verify", "verification reports");
  verify->add_option("target", target, "eigen, relation, operator, orthogonality or poincare")
      ->required()
      ->check(CLI::IsMember({"eigen", "relation", "operator", "orthogonality", "poincare"}));
  verify->add_option("--m", va.m);
  verify->add_option("--N", va.N);
  verify->add_option("--max-degree", va.max_degree);
  verify->add_option("--tol", va.tol);
  verify->add_option("--family", va.family, "all, pushforward or mixture");
  verify->add_option("--samples", va.samples);
  verify->add_option("--seed", va.seed);

  CrossingArgs ca;
  auto* cross = app.add_subcommand("crossings", "values of m where two mu branches meet");
  cross->add_option("--pairs", ca.pairs, "lA,kA:lB,kB")->required();
  cross->add_option("--N", ca.N);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "the stationary profile v_*");
  profile->add_option("--m", pa.m);
  profile->add_option("--N", pa.N);
  profile->add_option("--at", pa.at, "single radius");
  profile->add_option("--points", pa.points);
  profile->add_option("--rmax", pa.rmax);
  profile->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "one-dimensional relaxation run, CSV output");
  sim->add_option("--eq", ma.eq, "pme or fourth");
  sim->add_option("--m", ma.m);
  sim->add_option("--mode", ma.mode, "l=<l>,k=<k>");
  sim->add_option("--eps", ma.eps);
  sim->add_option("--grid", ma.grid);
  sim->add_option("--L", ma.L);
  sim->add_option("--dt", ma.dt);
  sim->add_option("--tmax", ma.tmax);
  sim->add_option("--record-every", ma.record_every);
  sim->add_option("--out", ma.out_path);

  RateArgs ra;
  auto* rate = app.add_subcommand("rate", "decay rate fitted to a simulate CSV");
  rate->add_option("in", ra.in_path)->required();
  rate->add_option("--column", ra.column);
  rate->add_option("--t0", ra.t0);
  rate->add_option("--t1", ra.t1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (*spectrum) return cmd_spectrum(sa, format, out);
    if (*eigen) return cmd_eigenfunction(ea, out);
    if (*verify) {
      check_N(va.N);
      if (target == "eigen") return verify_eigen(va, out);
      if (target == "relation") return verify_relation(va, out);
      if (target == "operator") return verify_operator(va, out);
      if (target == "orthogonality") return verify_orthogonality(va, out);
      return verify_poincare(va, out);
    }
    if (*cross) return cmd_crossings(ca, out);
    if (*profile) return cmd_profile(pa, format, out);
    if (*sim) return cmd_simulate(ma, out);
    return cmd_rate(ra, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {  // DimensionMismatch, InvalidIndex, Unsupported
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failed;
  }
}

}  // namespace dhspec
