#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "syzlab/acceptance.hpp"
#include "syzlab/cycles.hpp"
#include "syzlab/errors.hpp"
#include "syzlab/legendre.hpp"
#include "syzlab/ma_solver.hpp"
#include "syzlab/semiflat.hpp"
#include "syzlab/sl2actions.hpp"
#include "syzlab/svg.hpp"

namespace syzlab::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string precision = "double";
  int threads = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
  return cfg;
}

Rational rational_value(const json& v, const std::string& key) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return parse_rational(v.dump());
  throw ValidationError(key + ": expected a number or a rational string");
}

double number(const json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  return to_double(rational_value(cfg[key], key));
}

double positive(const json& cfg, const std::string& key, double fallback) {
  double v = number(cfg, key, fallback);
  if (!(v > 0)) throw ValidationError(key + " must be positive");
  return v;
}

int integer(const json& cfg, const std::string& key, int fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_integer()) throw ValidationError(key + ": expected an integer");
  return cfg[key].get<int>();
}

std::vector<double> doubles(const json& v, const std::string& key) {
  if (!v.is_array()) throw ValidationError(key + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(to_double(rational_value(x, key)));
  return out;
}

Matrix<Rational> rational_matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ValidationError(key + ": expected a square matrix");
  const std::size_t n = v.size();
  Matrix<Rational> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) throw ValidationError(key + ": expected a square matrix");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rational_value(v[i][j], key);
  }
  return m;
}

Eigen::MatrixXd eigen_matrix(const json& v, const std::string& key) {
  auto m = rational_matrix(v, key);
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

Domain domain_from(const json& cfg) {
  if (!cfg.contains("domain")) return Domain::unit_ball(2);
  const auto& d = cfg["domain"];
  std::string kind = d.value("kind", "ball");
  if (kind == "ball") {
    int n = integer(d, "n", 2);
    auto center = d.contains("center") ? doubles(d["center"], "center") : std::vector<double>(n, 0.0);
    return Domain::ball(n, center, positive(d, "radius", 1.0));
  }
  if (kind == "box") {
    if (!d.contains("lo") || !d.contains("hi")) throw ValidationError("box domain needs lo and hi");
    return Domain::box(doubles(d["lo"], "lo"), doubles(d["hi"], "hi"));
  }
  throw ValidationError("domain kind must be ball or box");
}

SolveOptions solve_options(const json& cfg, int threads) {
  SolveOptions opt;
  opt.tol = positive(cfg, "tol", opt.tol);
  opt.max_iter = integer(cfg, "max_iter", opt.max_iter);
  if (opt.max_iter < 1) throw ValidationError("max_iter must be positive");
  if (threads < 1) throw ValidationError("threads must be positive");
  opt.threads = threads;
  std::string seed = cfg.value("initial_guess", "quadratic");
  if (seed == "quadratic") opt.seed = Seed::quadratic;
  else if (seed == "distance") opt.seed = Seed::distance;
  else throw ValidationError("initial_guess must be quadratic or distance");
  return opt;
}

void require_double(const Globals& g, const std::string& command) {
  if (g.precision != "double") throw ValidationError(command + " works in double precision only");
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << text;
}

fs::path out_dir(const Globals& g) {
  fs::path p(g.out);
  fs::create_directories(p);
  return p;
}

std::string csv_text(const GridPotential& g, const std::string& name) {
  std::ostringstream s;
  write_csv(g, s, name);
  return s.str();
}

// The potential named by "input", or a fresh solve.
GridPotential potential_from(const json& cfg, const Globals& g, SolveReport* rep) {
  if (cfg.contains("input")) {
    std::ifstream in(cfg["input"].get<std::string>());
    if (!in) throw ValidationError("cannot read input grid");
    return read_csv(in);
  }
  return solve_real_ma(domain_from(cfg), positive(cfg, "c", 1.0), positive(cfg, "h", 1.0 / 32), solve_options(cfg, g.threads), rep);
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

int ma_solve(const json& cfg, const Globals& g, std::ostream& out) {
  require_double(g, "ma-solve");
  SolveReport rep;
  auto phi = solve_real_ma(domain_from(cfg), positive(cfg, "c", 1.0), positive(cfg, "h", 1.0 / 32), solve_options(cfg, g.threads), &rep);
  auto dir = out_dir(g);
  write_file(dir / "phi.csv", csv_text(phi, "phi"));
  ojson r = {{"c", positive(cfg, "c", 1.0)},      {"h", phi.h},          {"iterations", rep.iterations},
             {"restarts", rep.restarts},          {"residual", rep.residual}, {"convex", rep.convex},
             {"history", rep.history}};
  write_file(dir / "ma_report.json", dump(r));
  std::vector<double> it(rep.history.size());
  for (std::size_t k = 0; k < it.size(); ++k) it[k] = static_cast<double>(k);
  write_file(dir / "convergence.svg", line_plot({"Newton convergence", "iteration", "max |det D2 phi - c|", false, true},
                                                {{"residual", it, rep.history}}));
  out << "residual " << format_double(rep.residual) << " iterations " << rep.iterations << "\n";
  return 0;
}

DualityOptions duality_options(const json& cfg) {
  DualityOptions opt;
  if (cfg.contains("margin")) opt.margin = number(cfg, "margin", -1);
  return opt;
}

DualGridSpec dual_spec(const json& cfg) {
  DualGridSpec s;
  if (cfg.contains("dual_h")) s.h = positive(cfg, "dual_h", 0);
  return s;
}

ojson residuals_json(const DualityResiduals& r) {
  return {{"involution", r.involution}, {"hessian_inverse", r.hessian_inverse}, {"det_product", r.det_product},
          {"matched", r.matched},       {"margin", r.margin}};
}

int legendre(const json& cfg, const Globals& g, std::ostream& out) {
  require_double(g, "legendre");
  auto phi = potential_from(cfg, g, nullptr);
  LegendreReport lr;
  auto psi = legendre_transform(phi, dual_spec(cfg), &lr);
  auto res = duality_residuals(phi, psi, duality_options(cfg));
  auto dir = out_dir(g);
  write_file(dir / "psi.csv", csv_text(psi, "psi"));
  write_file(dir / "legendre_report.json", dump({{"nodes", lr.nodes}, {"masked", lr.masked}, {"duality", residuals_json(res)}}));
  out << "involution " << format_double(res.involution) << " hessian_inverse " << format_double(res.hessian_inverse) << " det_product "
      << format_double(res.det_product) << "\n";
  return 0;
}

std::size_t nearest_interior(const GridPotential& phi, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != phi.n) throw ValidationError("point dimension does not match the grid");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.data(), phi.n);
  std::size_t best = 0;
  double d = INFINITY;
  for (auto i : phi.interior_nodes()) {
    double r = (phi.coords(i) - x).norm();
    if (r < d) d = r, best = i;
  }
  if (!std::isfinite(d)) throw ValidationError("grid has no interior nodes");
  return best;
}

int mirror(const json& cfg, const Globals& g, std::ostream& out) {
  require_double(g, "mirror");
  auto phi = potential_from(cfg, g, nullptr);
  std::vector<std::vector<double>> points;
  if (cfg.contains("points"))
    for (const auto& p : cfg["points"]) points.push_back(doubles(p, "points"));
  else
    points.push_back(std::vector<double>(phi.n, 0.0));
  ojson records = ojson::array();
  for (const auto& p : points) {
    auto node = nearest_interior(phi, p);
    records.push_back(structure_record(build_M(phi, node)));
    records.push_back(structure_record(build_W(phi, node)));
  }
  auto opt = duality_options(cfg);
  GridPotential psi;
  auto rt = mirror_roundtrip(phi, dual_spec(cfg), opt, &psi);
  auto metric = w_metric_agreement(phi, psi, opt);
  ojson report = {{"involution", rt.involution}, {"structure", rt.structure},       {"hessian_inverse", rt.hessian_inverse},
                  {"det_product", rt.det_product}, {"matched", rt.matched},         {"compared", rt.compared},
                  {"margin", rt.margin},           {"w_metric_deviation", metric.max_deviation}};
  if (cfg.contains("bfield")) {
    const auto& b = cfg["bfield"];
    if (!b.contains("H") || !b.contains("eta")) throw ValidationError("bfield needs H and eta");
    auto r = bfield_mirror_check(eigen_matrix(b["H"], "H"), eigen_matrix(b["eta"], "eta"), number(b, "theta", 0), number(b, "phi", 0));
    report["bfield"] = {{"m_normalization", r.m_normalization}, {"m_bfield", r.m_bfield}, {"m_section", r.m_section},
                        {"w_normalization", r.w_normalization}, {"w_section", r.w_section}, {"w_bfield", r.w_bfield}};
  }
  auto dir = out_dir(g);
  write_file(dir / "structures.json", dump(records));
  write_file(dir / "mirror_report.json", dump(report));
  out << "involution " << format_double(rt.involution) << " structure " << format_double(rt.structure) << "\n";
  return 0;
}

int tfamily(const json& cfg, const Globals& g, std::ostream& out) {
  auto H = cfg.contains("H") ? rational_matrix(cfg["H"], "H") : Matrix<Rational>::identity(2);
  std::vector<Rational> ts;
  if (cfg.contains("t_list"))
    for (const auto& t : cfg["t_list"]) ts.push_back(rational_value(t, "t_list"));
  else
    ts = {Rational(1), Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  auto rep = rescaled_limit_report(H, ts);
  ojson rows = ojson::array();
  std::string csv = "t,det_g,fiber_norm,horizontal_defect,fiber_diameter\n";
  std::vector<double> tx, norm, diam;
  for (const auto& r : rep.rows) {
    rows.push_back({{"t", to_string(r.t)},
                    {"det_g", to_string(r.det_g)},
                    {"fiber_norm", r.fiber_norm},
                    {"horizontal_defect", to_string(r.horizontal_defect)},
                    {"fiber_diameter", r.fiber_diameter}});
    csv += to_string(r.t) + "," + to_string(r.det_g) + "," + format_double(r.fiber_norm) + "," + to_string(r.horizontal_defect) + "," +
           format_double(r.fiber_diameter) + "\n";
    tx.push_back(to_double(r.t));
    norm.push_back(r.fiber_norm);
    diam.push_back(r.fiber_diameter);
  }
  auto dir = out_dir(g);
  write_file(dir / "tfamily.json", dump({{"volume_constant", rep.volume_constant}, {"norm_ratios", rep.norm_ratios}, {"rows", rows}}));
  write_file(dir / "tfamily.csv", csv);
  write_file(dir / "tfamily.svg", line_plot({"t-family decay", "t", "size", true, true}, {{"fiber block norm of t g_t", tx, norm}, {"fiber diameter", tx, diam}}));
  out << "volume_constant " << (rep.volume_constant ? "true" : "false") << "\n";
  return 0;
}

ExactForm omega_from(const Matrix<Rational>& H, Frame f) {
  const int n = static_cast<int>(H.rows());
  Layout l = Layout::phase_space(n, f);
  ExactForm w(l);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (!H(j, k).is_zero()) w += wedge(ExactForm::generator(l, j), ExactForm::generator(l, n + k)) * ComplexQ(H(j, k));
  return w;
}

OpMatrix block_diag(const Matrix<Rational>& A) {
  const std::size_t n = A.rows();
  OpMatrix g(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = g(n + i, n + j) = A(i, j);
  return g;
}

int sl2(const json& cfg, const Globals& g, std::ostream& out) {
  Matrix<Rational> H = cfg.contains("H") ? rational_matrix(cfg["H"], "H") : Matrix<Rational>::identity(integer(cfg, "n", 2));
  const int n = static_cast<int>(H.rows());
  if (n < 1 || n > 3) throw ValidationError("sl2: n must be 1 to 3");
  auto Hinv = inverse(H);
  auto a = lefschetz_triple(omega_from(H, Frame::primal), block_diag(Hinv));
  auto b = mirror_sl2(omega_from(Hinv, Frame::dual), block_diag(H));
  auto rep = so4_check(a, b);
  auto weights = weight_table(a.H, b.H, n);
  std::string csv = "degree,h,h_prime,multiplicity\n";
  for (const auto& w : weights)
    csv += std::to_string(w.degree) + "," + std::to_string(w.h) + "," + std::to_string(w.h_prime) + "," + std::to_string(w.multiplicity) + "\n";
  ojson dec = ojson::array();
  for (const auto& [jk, m] : decompose_so4(weights)) dec.push_back({{"2j", jk.first}, {"2k", jk.second}, {"multiplicity", m.str()}});
  ojson report = {{"n", n},
                  {"first_relations", rep.first_relations},
                  {"second_relations", rep.second_relations},
                  {"cross", rep.cross},
                  {"ok", rep.ok()},
                  {"hard_lefschetz", hard_lefschetz_bijective(a.L, n)},
                  {"decomposition", dec}};
  auto dir = out_dir(g);
  write_file(dir / "weights.csv", csv);
  write_file(dir / "sl2_report.json", dump(report));
  out << "so4 " << (rep.ok() ? "ok" : "fails") << "\n";
  return 0;
}

ojson rational_json(const Rational& q) {
  if (is_integer(q)) {
    BigInt z = numerator(q);
    if (z >= std::numeric_limits<long long>::min() && z <= std::numeric_limits<long long>::max()) return z.convert_to<long long>();
  }
  return to_string(q);
}

ojson bps_rows(const BpsTable& b) {
  ojson rows = ojson::array();
  for (const auto& [k, v] : b.entries()) rows.push_back({{"d", k.first}, {"g", k.second}, {"n", rational_json(v)}});
  return rows;
}

int gv(const std::string& mode, const json& cfg, const Globals& g, std::ostream& out) {
  auto dir = out_dir(g);
  if (mode == "forward") {
    int D = integer(cfg, "D", 20), R = integer(cfg, "R", 0);
    if (D < 1 || R < 0) throw ValidationError("need D >= 1 and R >= 0");
    BpsTable b(1, 0);
    if (cfg.contains("table")) {
      int G = 0, Dmax = 1;
      for (const auto& row : cfg["table"]) Dmax = std::max(Dmax, row.value("d", 1)), G = std::max(G, row.value("g", 0));
      b = bps_from_json(cfg["table"], Dmax, G);
    } else {
      b.set(1, 0, 1);
    }
    auto N = gw_from_bps(b, D, R);
    write_file(dir / "gw.json", dump(gw_json(N)));
    std::vector<double> d, v;
    for (int k = 1; k <= D; ++k) d.push_back(k), v.push_back(std::abs(to_double(N.get(k, 0))));
    write_file(dir / "gw_series.svg", line_plot({"genus 0 series coefficients", "d", "|N_d|", false, true}, {{"r = 0", d, v}}));
    out << "entries " << N.entries().size() << "\n";
    return 0;
  }
  if (!cfg.contains("table")) throw ValidationError("gv " + mode + " needs a table");
  int D = 1, R = 0;
  for (const auto& row : cfg["table"]) D = std::max(D, row.value("d", 1)), R = std::max(R, row.value("r", 0));
  D = integer(cfg, "D", D);
  R = integer(cfg, "R", R);
  auto b = bps_from_gw(gw_from_json(cfg["table"], D, R));
  write_file(dir / "bps.json", dump(bps_json(b)));
  auto check = integrality_check(b);
  if (mode == "check") {
    ojson viol = ojson::array();
    for (const auto& e : check.violations) viol.push_back({{"d", e.d}, {"g", e.g}, {"n", to_string(e.value)}});
    write_file(dir / "integrality.json", dump({{"ok", check.ok}, {"violations", viol}}));
    if (!check.ok) {
      const auto& e = check.violations.front();
      throw IntegralityError("n^" + std::to_string(e.g) + "_" + std::to_string(e.d) + " = " + to_string(e.value) + " is not an integer");
    }
  }
  out << "entries " << b.entries().size() << (check.ok ? " integral" : " non-integral") << "\n";
  return 0;
}

int yukawa(const json& cfg, const Globals& g, std::ostream& out) {
  Rational classical = cfg.contains("classical") ? rational_value(cfg["classical"], "classical") : Rational(5);
  std::vector<Rational> N0;
  if (cfg.contains("N0"))
    for (const auto& v : cfg["N0"]) N0.push_back(rational_value(v, "N0"));
  else
    N0 = {2875, 609250, 317206375};
  int D = integer(cfg, "D", static_cast<int>(N0.size()));
  auto c = yukawa_A(classical, N0, D);
  ojson coeffs = ojson::array();
  std::vector<double> d, v;
  for (std::size_t k = 0; k < c.size(); ++k) {
    coeffs.push_back(to_string(c[k]));
    d.push_back(static_cast<double>(k));
    v.push_back(std::abs(to_double(c[k])));
  }
  auto dir = out_dir(g);
  write_file(dir / "yukawa.json", dump({{"classical", to_string(classical)}, {"coefficients", coeffs}}));
  write_file(dir / "yukawa.svg", line_plot({"A-model Yukawa coupling", "power of q", "|coefficient|", false, true}, {{"coefficient", d, v}}));
  out << "coefficients";
  for (const auto& x : c) out << " " << to_string(x);
  out << "\n";
  return 0;
}

template <class T>
T scalar(const json& v, const std::string& key) {
  Rational q = rational_value(v, key);
  if constexpr (std::is_same_v<T, double>) return to_double(q);
  else return q;
}

template <class T>
Form<T> form_field(const json& spec, const std::string& key, Layout layout) {
  if (!spec.contains(key)) return Form<T>(layout);
  const auto& v = spec[key];
  std::string text;
  if (v.is_string()) text = v.get<std::string>();
  else if (v.is_array())
    for (const auto& line : v) text += line.get<std::string>() + "\n";
  else throw ValidationError(key + ": expected form text");
  return form_from_text<T>(layout, text);
}

template <class T>
Form<T> holomorphic_volume(int n) {
  Form<T> out = Form<T>::constant(Layout::phase_space(n), Complex<T>(T(1)));
  for (int j = 1; j <= n; ++j) out = wedge(out, dz<T>(n, j));
  return out;
}

template <class T>
ojson complex_json(const Complex<T>& z) {
  return {{"re", to_double(z.re)}, {"im", to_double(z.im)}};
}

template <class T>
ojson cycle_report(const json& spec) {
  std::string kind = spec.value("kind", "B");
  if (kind != "A" && kind != "B") throw ValidationError("kind must be A or B");
  if (!spec.contains("n") || !spec.contains("m")) throw ValidationError("cycle spec needs n and m");
  int n = spec["n"].get<int>(), m = spec["m"].get<int>();
  if (n < 1 || n > 4 || m < 0 || m > n) throw ValidationError("cycle spec needs 1 <= n <= 4 and 0 <= m <= n");
  CycleSpec<T> c;
  c.kind = kind == "A" ? CycleKind::A : CycleKind::B;
  c.m = m;
  c.omega = form_field<T>(spec, "omega", Layout::phase_space(n));
  if (spec.contains("beta")) c.beta = form_field<T>(spec, "beta", Layout::phase_space(n));
  c.F = form_field<T>(spec, "F", c.kind == CycleKind::B ? Layout::phase_space(m) : Layout::plain(m));
  ojson r = {{"kind", kind}, {"n", n}, {"m", m}};
  if (c.kind == CycleKind::B) {
    bool solved = !spec.contains("theta");
    c.theta = solved ? solve_phase(c) : number(spec, "theta", 0);
    r["theta"] = c.theta;
    r["theta_solved"] = solved;
    r["dhym_top"] = complex_json(dhym_top(c));
    r["dhym_residual"] = dhym_residual(c);
    return r;
  }
  c.theta = number(spec, "theta", 0);
  if (!spec.contains("subtorus")) throw ValidationError("A-cycle spec needs subtorus");
  for (const auto& v : spec["subtorus"]) {
    std::vector<T> row;
    for (const auto& x : v) row.push_back(scalar<T>(x, "subtorus"));
    c.subtorus.push_back(row);
  }
  auto Omega = spec.contains("Omega") ? form_field<T>(spec, "Omega", Layout::phase_space(n)) : holomorphic_volume<T>(n);
  auto res = a_cycle_residuals(c, Omega);
  r["theta"] = c.theta;
  r["lagrangian"] = res.lagrangian;
  r["special"] = res.special;
  r["flat"] = res.flat;
  r["combined"] = res.combined;
  return r;
}

int cycle(const std::string& spec_path, const Globals& g, std::ostream& out) {
  auto spec = load_config(spec_path);
  ojson r = g.precision == "exact" ? cycle_report<Rational>(spec) : cycle_report<double>(spec);
  write_file(out_dir(g) / "cycle_report.json", dump(r));
  out << "cycle " << r["kind"].get<std::string>() << " checked\n";
  return 0;
}

int verify_all(const Globals& g, std::ostream& out) {
  if (!g.seed) throw ValidationError("verify-all requires --seed");
  auto rep = run_acceptance({*g.seed});
  auto dir = out_dir(g);
  auto table = report_table(rep);
  write_file(dir / "acceptance.json", dump(to_json(rep)));
  write_file(dir / "acceptance.txt", table);
  out << table;
  return rep.all_pass() ? 0 : 1;
}

int fail(std::ostream& err, const std::string& kind, const std::string& message, int code, const ojson& extra = ojson::object()) {
  ojson e = {{"error", kind}, {"message", message}};
  for (const auto& [k, v] : extra.items()) e[k] = v;
  err << e.dump() << "\n";
  return code;
}

}  // namespace

ojson bps_json(const BpsTable& b) { return bps_rows(b); }

ojson gw_json(const QTSeries& N) {
  ojson rows = ojson::array();
  for (const auto& [k, v] : N.entries()) rows.push_back({{"d", k.first}, {"r", k.second}, {"N", to_string(v)}});
  return rows;
}

BpsTable bps_from_json(const json& rows, int D, int G) {
  if (!rows.is_array()) throw ValidationError("table must be an array");
  BpsTable b(D, G);
  for (const auto& row : rows) {
    if (!row.contains("d") || !row.contains("g") || !row.contains("n")) throw ValidationError("BPS rows need d, g, n");
    b.set(row["d"].get<int>(), row["g"].get<int>(), rational_value(row["n"], "n"));
  }
  return b;
}

QTSeries gw_from_json(const json& rows, int D, int R) {
  if (!rows.is_array()) throw ValidationError("table must be an array");
  QTSeries N(D, R);
  for (const auto& row : rows) {
    if (!row.contains("d") || !row.contains("r") || !row.contains("N")) throw ValidationError("GW rows need d, r, N");
    N.set(row["d"].get<int>(), row["r"].get<int>(), rational_value(row["N"], "N"));
  }
  return N;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-flat mirror symmetry toolkit", "syzlab"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--precision", g.precision, "exact or double")->check(CLI::IsMember({"exact", "double"}));
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* ma = app.add_subcommand("ma-solve", "real Monge-Ampere solve");
  auto* leg = app.add_subcommand("legendre", "discrete Legendre transform");
  auto* mir = app.add_subcommand("mirror", "semi-flat structures on both sides");
  auto* tf = app.add_subcommand("tfamily", "rescaled metric family");
  auto* sl = app.add_subcommand("sl2", "the two sl(2) actions");
  auto* gvc = app.add_subcommand("gv", "Gopakumar-Vafa tables");
  std::string mode;
  gvc->add_option("mode", mode, "forward, invert or check")->required()->check(CLI::IsMember({"forward", "invert", "check"}));
  auto* yk = app.add_subcommand("yukawa", "A-model Yukawa coupling");
  auto* cy = app.add_subcommand("cycle", "cycle residuals");
  std::string action, spec;
  cy->add_option("action", action)->required()->check(CLI::IsMember({"check"}));
  cy->add_option("--spec", spec, "cycle spec JSON")->required();
  auto* va = app.add_subcommand("verify-all", "acceptance suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(err, "validation", e.what(), 2);
  }

  try {
    if (va->parsed()) return verify_all(g, out);
    if (cy->parsed()) return cycle(spec, g, out);
    auto cfg = load_config(g.config);
    if (ma->parsed()) return ma_solve(cfg, g, out);
    if (leg->parsed()) return legendre(cfg, g, out);
    if (mir->parsed()) return mirror(cfg, g, out);
    if (tf->parsed()) return tfamily(cfg, g, out);
    if (sl->parsed()) return sl2(cfg, g, out);
    if (gvc->parsed()) return gv(mode, cfg, g, out);
    if (yk->parsed()) return yukawa(cfg, g, out);
  } catch (const ConvergenceError& e) {
    return fail(err, e.kind(), e.what(), 3, {{"last_residual", e.last_residual()}, {"iterations", e.iterations()}});
  } catch (const IntegralityError& e) {
    return fail(err, e.kind(), e.what(), 4);
  } catch (const Error& e) {
    return fail(err, e.kind(), e.what(), 2);
  } catch (const json::exception& e) {
    return fail(err, "validation", e.what(), 2);
  } catch (const fs::filesystem_error& e) {
    return fail(err, "validation", e.what(), 2);
  }
  return fail(err, "validation", "no subcommand", 2);
}

}  // namespace syzlab::cli
