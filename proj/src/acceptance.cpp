#include "syzlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "syzlab/cycles.hpp"
#include "syzlab/gvbps.hpp"
#include "syzlab/legendre.hpp"
#include "syzlab/ma_solver.hpp"
#include "syzlab/semiflat.hpp"
#include "syzlab/sl2actions.hpp"

namespace syzlab {

namespace {

using json = nlohmann::ordered_json;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::mt19937_64 stream(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

constexpr int kDiskLevels[] = {32, 64, 128};

struct DiskLevel {
  int N = 0;
  GridPotential phi;
  SolveReport report;
  double error = 0;
  bool fast = false;
};

std::vector<DiskLevel> solve_disk_levels() {
  std::vector<DiskLevel> out;
  for (int N : kDiskLevels) {
    DiskLevel l;
    l.N = N;
    auto start = std::chrono::steady_clock::now();
    l.phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / N, {}, &l.report);
    l.fast = std::chrono::steady_clock::now() - start < std::chrono::seconds(30);
    for (auto i : l.phi.interior_nodes())
      l.error = std::max(l.error, std::abs(l.phi.values[i] - 0.5 * (l.phi.coords(i).squaredNorm() - 1)));
    out.push_back(std::move(l));
  }
  return out;
}

GridPotential box_quadratic(const Eigen::MatrixXd& A, double h) {
  const int n = static_cast<int>(A.rows());
  return make_grid(Domain::box(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)), h)
      .with_values([&](const Eigen::VectorXd& x) { return 0.5 * x.dot(A * x); });
}

Eigen::MatrixXd sample_quadratic() {
  Eigen::MatrixXd A(2, 2);
  A << 2, 0.5, 0.5, 1.5;
  return A;
}

std::size_t centre_node(const GridPotential& phi) {
  std::size_t best = 0;
  double d = INFINITY;
  for (auto i : phi.interior_nodes()) {
    double r = phi.coords(i).norm();
    if (r < d) d = r, best = i;
  }
  return best;
}

CriterionResult monge_ampere(const std::vector<DiskLevel>& levels) {
  CriterionResult r{1, "Monge-Ampere exactness", true, "", json::object()};
  json rows = json::array();
  for (const auto& l : levels) {
    rows.push_back({{"h", "1/" + std::to_string(l.N)},
                    {"max_error", l.error},
                    {"residual", l.report.residual},
                    {"iterations", l.report.iterations},
                    {"under_30s", l.fast}});
    r.pass = r.pass && l.fast;
  }
  json orders = json::array();
  std::string ord;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    double p = std::log2(levels[k].error / levels[k + 1].error);
    orders.push_back(p);
    ord += (k ? ", " : "") + fixed(p, 2);
    r.pass = r.pass && p >= 1.8;
  }
  double final_residual = levels.back().report.residual;
  r.pass = r.pass && final_residual <= 1e-8;
  r.metrics = {{"levels", rows}, {"orders", orders}};
  r.summary = "orders " + ord + "; final residual " + sci(final_residual);
  return r;
}

CriterionResult legendre_duality(const std::vector<DiskLevel>& levels) {
  CriterionResult r{2, "Legendre duality", true, "", json::object()};
  json rows = json::array();
  std::vector<DualityResiduals> res;
  for (const auto& l : levels) {
    auto d = duality_residuals(l.phi, legendre_transform(l.phi));
    rows.push_back({{"h", "1/" + std::to_string(l.N)},
                    {"involution", d.involution},
                    {"hessian_inverse", d.hessian_inverse},
                    {"det_product", d.det_product},
                    {"matched", d.matched}});
    res.push_back(d);
  }
  const auto& mid = res[1];
  r.pass = mid.involution <= 5e-2 && mid.hessian_inverse <= 5e-2 && mid.det_product <= 5e-2;
  for (std::size_t k = 0; k + 1 < res.size(); ++k)
    r.pass = r.pass && res[k + 1].involution < res[k].involution && res[k + 1].hessian_inverse < res[k].hessian_inverse &&
             res[k + 1].det_product < res[k].det_product;

  auto phi = box_quadratic(sample_quadratic(), 1.0 / 16);
  auto q = duality_residuals(phi, legendre_transform(phi));
  double qmax = std::max({q.involution, q.hessian_inverse, q.det_product});
  r.pass = r.pass && qmax <= 1e-12 && q.matched > 0;
  r.metrics = {{"disk", rows}, {"quadratic_max", qmax}, {"quadratic_matched", q.matched}};
  r.summary = "h=1/64 max " + sci(std::max({mid.involution, mid.hessian_inverse, mid.det_product})) + ", shrinking; quadratic " + sci(qmax);
  return r;
}

CriterionResult mirror_inversion(const std::vector<DiskLevel>& levels) {
  CriterionResult r{3, "Mirror inversion", true, "", json::object()};
  auto rt = mirror_roundtrip(levels[1].phi);
  auto phi = box_quadratic(sample_quadratic(), 1.0 / 16);
  GridPotential psi;
  auto qrt = mirror_roundtrip(phi, {}, {}, &psi);
  auto metric = w_metric_agreement(phi, psi);
  r.pass = rt.involution <= 5e-2 && rt.compared > 0 && qrt.involution <= 1e-12 && metric.matched > 0 && metric.max_deviation <= 1e-8;
  r.metrics = {{"disk_involution", rt.involution},
               {"disk_structure", rt.structure},
               {"disk_compared", rt.compared},
               {"quadratic_involution", qrt.involution},
               {"w_metric_deviation", metric.max_deviation},
               {"w_metric_matched", metric.matched}};
  r.summary = "disk double transform " + sci(rt.involution) + "; W metric on quadratic " + sci(metric.max_deviation);
  return r;
}

// UᵀDU with U unimodular integer and D positive diagonal of product 1.
Matrix<Rational> unimodular_hessian(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-3, 3), pos(1, 6);
  Matrix<Rational> U = Matrix<Rational>::identity(n), D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) U(i, j) = small(rng);
  if (n > 1 && rng() % 2)
    for (int j = 0; j < n; ++j) std::swap(U(0, j), U(n - 1, j));
  Rational prod(1);
  for (int i = 0; i + 1 < n; ++i) {
    D(i, i) = Rational(pos(rng), pos(rng));
    prod *= D(i, i);
  }
  D(n - 1, n - 1) = Rational(1) / prod;
  return U.transpose() * D * U;
}

CriterionResult cy_normalization(std::uint64_t seed) {
  CriterionResult r{4, "CY normalization", true, "", json::object()};
  auto rng = stream(seed, 4);
  int trials = 0, zero = 0;
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k < 500; ++k) {
      auto H = unimodular_hessian(n, rng);
      ++trials;
      if (determinant(H) == 1 && cy_normalization_residual(structure_M(H)).zero() && cy_normalization_residual(structure_W(H)).zero()) ++zero;
    }
  r.pass = zero == trials;
  r.metrics = {{"trials", trials}, {"exact_zero", zero}};
  r.summary = std::to_string(zero) + "/" + std::to_string(trials) + " exact zeros on both sides";
  return r;
}

CriterionResult t_family_scaling(const std::vector<DiskLevel>& levels) {
  CriterionResult r{5, "t-family", true, "", json::object()};
  const auto& phi = levels[1].phi;
  auto H = to_exact(to_matrix(hessian(phi, centre_node(phi))));
  std::vector<Rational> ts{Rational(1), Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  auto rep = rescaled_limit_report(H, ts);
  double worst = 0;
  json rows = json::array();
  for (const auto& row : rep.rows)
    rows.push_back({{"t", to_string(row.t)}, {"fiber_norm", row.fiber_norm}, {"fiber_diameter", row.fiber_diameter}});
  for (double q : rep.norm_ratios) worst = std::max(worst, std::abs(q - 4));
  r.pass = rep.volume_constant && rep.norm_ratios.size() == 3 && worst <= 1e-9;
  r.metrics = {{"volume_constant", rep.volume_constant}, {"rows", rows}, {"ratios", rep.norm_ratios}, {"max_ratio_error", worst}};
  r.summary = std::string("volume ") + (rep.volume_constant ? "constant" : "varies") + "; ratio error " + sci(worst);
  return r;
}

CriterionResult multiple_cover(std::uint64_t seed) {
  CriterionResult r{6, "Multiple cover formula", true, "", json::object()};
  BpsTable unit(20, 0);
  unit.set(1, 0, 1);
  auto N = gw_from_bps(unit, 20, 0);
  bool cover = true;
  for (int d = 1; d <= 20; ++d) cover = cover && N.get(d, 0) == Rational(1, d * d * d);
  bool inverse = bps_from_gw(N) == unit;

  auto rng = stream(seed, 6);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int D = 1 + static_cast<int>(rng() % 8), G = static_cast<int>(rng() % 5);
    BpsTable b(D, G);
    for (int d = 1; d <= D; ++d)
      for (int g = 0; g <= G; ++g)
        if (rng() % 3) b.set(d, g, static_cast<int>(rng() % 2001) - 1000);
    if (bps_from_gw(gw_from_bps(b, D, G)) == b) ++ok;
  }
  r.pass = cover && inverse && ok == 100;
  r.metrics = {{"cover_1_over_d3", cover}, {"inverts_to_unit", inverse}, {"random_round_trips", ok}};
  r.summary = std::string("1/d^3 to d=20 ") + (cover ? "exact" : "wrong") + "; inversion " + (inverse ? "exact" : "wrong") +
              "; round trips " + std::to_string(ok) + "/100";
  return r;
}

CriterionResult yukawa() {
  CriterionResult r{7, "Yukawa assembly", true, "", json::object()};
  std::vector<Rational> N0{2875, 609250, 317206375};
  auto c = yukawa_A(5, N0, 3);
  std::vector<Rational> expected{2875, 4876875, 8564575000LL};
  json coeffs = json::array();
  for (int m = 1; m <= 3; ++m) {
    Rational s(0);
    for (int d = 1; d <= m; ++d)
      if (m % d == 0) s += N0[d - 1] * d * d * d;
    r.pass = r.pass && c[m] == s && c[m] == expected[m - 1];
    coeffs.push_back(to_string(c[m]));
  }
  r.metrics = {{"coefficients", coeffs}};
  r.summary = "q^1..q^3 = " + to_string(c[1]) + ", " + to_string(c[2]) + ", " + to_string(c[3]);
  return r;
}

ExactForm flat_omega(int n, Frame f) {
  Layout l = Layout::phase_space(n, f);
  ExactForm w(l);
  for (int j = 0; j < n; ++j) w += wedge(ExactForm::generator(l, j), ExactForm::generator(l, n + j));
  return w;
}

CriterionResult sl2_pair() {
  CriterionResult r{8, "sl(2) x sl(2)", true, "", json::object()};
  json rows = json::array();
  for (int n = 1; n <= 3; ++n) {
    auto a = lefschetz_triple(flat_omega(n, Frame::primal));
    auto b = mirror_sl2(flat_omega(n, Frame::dual));
    auto rep = so4_check(a, b);
    bool lef = hard_lefschetz_bijective(a.L, n);
    auto W = lefschetz_triple(flat_omega(n, Frame::dual));
    auto F = fourier_matrix(n);
    bool intertwines = F * b.L == W.L * F;
    rows.push_back({{"n", n}, {"so4", rep.ok()}, {"hard_lefschetz", lef}, {"intertwining", intertwines}});
    r.pass = r.pass && rep.ok() && lef && intertwines;
  }
  r.metrics = {{"flat", rows}};
  r.summary = r.pass ? "relations, Lefschetz and intertwining exact for n <= 3" : "exact identity failed";
  return r;
}

CriterionResult bps_from_representations() {
  CriterionResult r{9, "BPS from representations", true, "", json::object()};
  json rows = json::array();
  for (int g = 0; g <= 6; ++g) {
    Sl2Table N;
    for (const auto& [w, m] : tensor_power_decompose(g)) N[{w, 0}] = m;
    bool ok = bps_from_sl2(N) == std::map<int, BigInt>{{g, 1}};
    rows.push_back({{"g", g}, {"recovered", ok}});
    r.pass = r.pass && ok;
  }
  r.metrics = {{"genera", rows}};
  r.summary = r.pass ? "n^g = 1 recovered for g <= 6" : "recovery failed";
  return r;
}

RealForm two_form(int n, const std::vector<std::vector<double>>& a) {
  RealForm w(Layout::phase_space(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (a[j][k] != 0) w += wedge(RealForm::dx(n, j + 1), RealForm::dy(n, k + 1)) * ComplexD(a[j][k]);
  return w;
}

RealForm holomorphic_volume(int n) {
  RealForm out = RealForm::constant(Layout::phase_space(n), ComplexD(1));
  for (int j = 1; j <= n; ++j) out = wedge(out, dz<double>(n, j));
  return out;
}

CriterionResult cycle_phases(std::uint64_t seed) {
  CriterionResult r{10, "Cycle phases", true, "", json::object()};
  auto rng = stream(seed, 10);
  std::uniform_real_distribution<double> u(-1, 1), c01(0, 1);
  double worst = 0;
  int solved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + trial % 3;
    std::vector<std::vector<double>> a(n, std::vector<double>(n)), b = a, f = a;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        a[j][k] = u(rng) + (j == k ? 2 : 0);
        b[j][k] = u(rng);
        f[j][k] = u(rng);
      }
    CycleSpec<double> c;
    c.kind = CycleKind::B;
    c.m = n;
    c.omega = two_form(n, a);
    c.beta = two_form(n, b);
    c.F = two_form(n, f) * ComplexD(0, 1);
    c.theta = solve_phase(c);
    worst = std::max(worst, dhym_residual(c));
    ++solved;
  }
  double fiber_worst = 0;
  int fibers = 0;
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k < 8; ++k) {
      std::vector<double> c(n);
      for (auto& x : c) x = c01(rng);
      auto res = a_cycle_residuals(imaginary_part_fiber(n, c), holomorphic_volume(n));
      fiber_worst = std::max({fiber_worst, res.lagrangian, res.special, res.flat, res.combined});
      ++fibers;
    }
  r.pass = solved == 1000 && worst <= 1e-12 && fiber_worst == 0;
  r.metrics = {{"specs", solved}, {"max_dhym_residual", worst}, {"fibers", fibers}, {"max_fiber_residual", fiber_worst}};
  r.summary = "dHYM residual " + sci(worst) + " over 1000 specs; fiber residuals " + sci(fiber_worst);
  return r;
}

}  // namespace

bool AcceptanceReport::all_pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return !criteria.empty();
}

std::vector<CriterionResult> run_criteria(const AcceptanceOptions& opt) {
  auto levels = solve_disk_levels();
  std::vector<CriterionResult> out;
  out.push_back(monge_ampere(levels));
  out.push_back(legendre_duality(levels));
  out.push_back(mirror_inversion(levels));
  out.push_back(cy_normalization(opt.seed));
  out.push_back(t_family_scaling(levels));
  out.push_back(multiple_cover(opt.seed));
  out.push_back(yukawa());
  out.push_back(sl2_pair());
  out.push_back(bps_from_representations());
  out.push_back(cycle_phases(opt.seed));
  return out;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opt) {
  AcceptanceReport rep;
  rep.seed = opt.seed;
  rep.criteria = run_criteria(opt);
  auto dump = [](const std::vector<CriterionResult>& cs) {
    std::string s;
    for (const auto& c : cs) s += to_json(c).dump() + "\n";
    return s;
  };
  std::string first = dump(rep.criteria), second = dump(run_criteria(opt));
  CriterionResult det{11, "Determinism", first == second, "", json::object()};
  det.metrics = {{"bytes", first.size()}, {"identical", det.pass}};
  det.summary = det.pass ? "second run byte-identical" : "second run differs";
  rep.criteria.push_back(det);
  return rep;
}

nlohmann::ordered_json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"metrics", r.metrics}};
}

nlohmann::ordered_json to_json(const AcceptanceReport& r) {
  json cs = json::array();
  int passed = 0;
  for (const auto& c : r.criteria) {
    cs.push_back(to_json(c));
    passed += c.pass;
  }
  return {{"seed", r.seed}, {"passed", passed}, {"total", r.criteria.size()}, {"criteria", cs}};
}

std::string report_table(const AcceptanceReport& r) {
  std::ostringstream out;
  for (const auto& c : r.criteria) {
    char id[8];
    std::snprintf(id, sizeof id, "%2d", c.id);
    out << (c.pass ? "PASS  " : "FAIL  ") << id << "  " << c.title << ": " << c.summary << "\n";
  }
  return out.str();
}

}  // namespace syzlab
