#include <doctest.h>

#include <cmath>
#include <sstream>

#include "syzlab/errors.hpp"
#include "syzlab/ma_solver.hpp"

using namespace syzlab;

namespace {

double max_error(const GridPotential& phi, double scale) {
  double err = 0;
  for (auto i : phi.interior_nodes()) {
    auto x = phi.coords(i);
    err = std::max(err, std::abs(phi.values[i] - scale * (x.squaredNorm() - 1)));
  }
  return err;
}

double max_diff(const GridPotential& a, const GridPotential& b) {
  double d = 0;
  for (auto i : a.interior_nodes()) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

}  // namespace

TEST_CASE("Hessian is exact on quadratics") {
  auto g = make_grid(Domain::box({-1, -1}, {1, 1}), 0.125).with_values([](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); });
  auto xy = g.with_values([](const Eigen::VectorXd& x) { return x[0] * x[1]; });
  for (auto i : g.interior_nodes()) {
    CHECK(hessian(g, i) == Eigen::MatrixXd::Identity(2, 2));
    auto H = hessian(xy, i);
    CHECK(H(0, 0) == 0);
    CHECK(H(1, 1) == 0);
    CHECK(H(0, 1) == 1);
    CHECK(H(1, 0) == 1);
  }
  CHECK(real_ma_residual(g, 1.0) == 0.0);
  CHECK_THROWS_AS(hessian(g, 0), ValidationError);
}

TEST_CASE("Hessian of a quartic has the Taylor remainder 2h^2") {
  for (double h : {0.125, 0.0625, 0.03125}) {
    auto g = make_grid(Domain::box({0}, {2}), h).with_values([](const Eigen::VectorXd& x) { return std::pow(x[0], 4); });
    std::size_t node = static_cast<std::size_t>(std::lround(1.0 / h));
    CHECK(hessian(g, node)(0, 0) == doctest::Approx(12 + 2 * h * h).epsilon(1e-12));
  }
}

TEST_CASE("disk solutions match the radial closed forms") {
  SolveReport rep;
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32, {}, &rep);
  CHECK(rep.residual <= 1e-8);
  CHECK(rep.convex);
  CHECK(real_ma_residual(phi, 1.0) == rep.residual);
  CHECK(max_error(phi, 0.5) <= 2.5 / (32.0 * 32.0));
  CHECK(min_hessian_eigenvalue(phi) > 0);

  auto phi4 = solve_real_ma(Domain::unit_ball(2), 4.0, 1.0 / 32);
  CHECK(max_error(phi4, 1.0) <= 5.0 / (32.0 * 32.0));
}

TEST_CASE("mesh convergence against the exact disk solution") {
  double prev = 0;
  for (int N : {16, 32, 64}) {
    double err = max_error(solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / N), 0.5);
    if (prev > 0) CHECK(std::log2(prev / err) >= 1.7);
    prev = err;
  }
}

TEST_CASE("scaling law: det = lambda^n c is solved by lambda phi") {
  auto phi1 = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16);
  auto phi9 = solve_real_ma(Domain::unit_ball(2), 9.0, 1.0 / 16);
  double d = 0;
  for (auto i : phi1.interior_nodes()) d = std::max(d, std::abs(phi9.values[i] - 3 * phi1.values[i]));
  CHECK(d <= 1e-7);
}

TEST_CASE("uniqueness surrogate: distinct seeds agree within 10 tol") {
  for (const Domain& d : {Domain::unit_ball(2), Domain::unit_square()}) {
    SolveOptions a, b;
    b.seed = Seed::distance;
    auto p = solve_real_ma(d, 1.0, 1.0 / 16, a), q = solve_real_ma(d, 1.0, 1.0 / 16, b);
    CHECK(max_diff(p, q) <= 10 * a.tol);
  }
}

TEST_CASE("unit square: converged, convex, self-convergent under refinement") {
  std::vector<GridPotential> sols;
  for (int N : {8, 16, 32}) {
    SolveReport rep;
    sols.push_back(solve_real_ma(Domain::unit_square(), 1.0, 1.0 / N, {}, &rep));
    CHECK(rep.residual <= 1e-8);
    CHECK(rep.convex);
  }
  // Differences at the shared coarse nodes.
  auto coarse_diff = [](const GridPotential& c, const GridPotential& f) {
    double d = 0;
    for (auto i : c.interior_nodes()) {
      auto idx = c.multi_index(i);
      for (auto& k : idx) k *= 2;
      d = std::max(d, std::abs(c.values[i] - f.values[f.node_at(idx)]));
    }
    return d;
  };
  double d1 = coarse_diff(sols[0], sols[1]), d2 = coarse_diff(sols[1], sols[2]);
  CHECK(d2 < d1);
  CHECK(std::log2(d1 / d2) >= 0.8);
}

TEST_CASE("one and three dimensional balls") {
  SolveReport rep;
  auto p1 = solve_real_ma(Domain::unit_ball(1), 2.0, 1.0 / 32, {}, &rep);
  CHECK(rep.residual <= 1e-8);
  CHECK(max_error(p1, 1.0) <= 4.0 / (32.0 * 32.0));
  auto p3 = solve_real_ma(Domain::unit_ball(3), 1.0, 1.0 / 8, {}, &rep);
  CHECK(rep.residual <= 1e-8);
  CHECK(rep.convex);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(solve_real_ma(Domain::unit_ball(2), 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(solve_real_ma(Domain::unit_ball(2), 1.0, -0.1), ValidationError);
  CHECK_THROWS_AS(make_grid(Domain::unit_square(), 0.3), ValidationError);
  SolveOptions o;
  o.max_iter = 1;
  CHECK_THROWS_AS(solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16, o), ConvergenceError);
}

TEST_CASE("residual grows linearly with a perturbation") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16);
  auto bump = [&](double eps) {
    GridPotential p = phi;
    for (auto i : p.interior_nodes()) {
      auto x = p.coords(i);
      p.values[i] += eps * std::exp(-8 * x.squaredNorm());
    }
    p.apply_ghosts();
    return real_ma_residual(p, 1.0);
  };
  double r1 = bump(1e-4), r2 = bump(2e-4), r4 = bump(4e-4);
  CHECK(r2 / r1 == doctest::Approx(2).epsilon(0.01));
  CHECK(r4 / r2 == doctest::Approx(2).epsilon(0.01));
}

TEST_CASE("threaded evaluation is bit-identical") {
  SolveOptions one, four;
  four.threads = 4;
  auto a = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32, one);
  auto b = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32, four);
  CHECK(a.values == b.values);
  CHECK(real_ma_residual(a, 1.0, 1) == real_ma_residual(a, 1.0, 4));
}

TEST_CASE("complexified Monge-Ampere residual") {
  auto grid = make_grid(Domain::box({-1, -1}, {1, 1}), 0.25);
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16);
  auto eta0 = phi.with_values([](const Eigen::VectorXd&) { return 0.0; });
  CHECK(complexified_ma_residual(phi, eta0, 1.0) == real_ma_residual(phi, 1.0));

  double a = 3, b = -0.75;
  auto g1 = make_grid(Domain::box({-1}, {1}), 0.125);
  auto p1 = g1.with_values([&](const Eigen::VectorXd& x) { return a * x[0] * x[0] / 2; });
  auto e1 = g1.with_values([&](const Eigen::VectorXd& x) { return b * x[0] * x[0] / 2; });
  CHECK(complexified_ma_residual(p1, e1, {a, b}) == 0.0);

  // Commuting Hessians A = [[2,1],[1,2]], B = A/2; closed-form 2x2 determinant oracle.
  auto pA = grid.with_values([](const Eigen::VectorXd& x) { return x[0] * x[0] + x[0] * x[1] + x[1] * x[1]; });
  auto eB = grid.with_values([](const Eigen::VectorXd& x) { return 0.5 * (x[0] * x[0] + x[0] * x[1] + x[1] * x[1]); });
  std::complex<double> a11(2, 1), a12(1, 0.5), a22(2, 1);
  std::complex<double> oracle = a11 * a22 - a12 * a12;
  std::complex<double> C(1, 2);
  CHECK(complexified_ma_residual(pA, eB, C) == doctest::Approx(std::abs(oracle - C)).epsilon(1e-14));
  CHECK(complexified_ma_residual(pA, eB, oracle) <= 1e-13);
  CHECK_THROWS_AS(complexified_ma_residual(pA, e1, C), ValidationError);
}

TEST_CASE("linearized B-field equation") {
  ExactForm w = wedge(ExactForm::dx(2, 1), ExactForm::dy(2, 1)) + wedge(ExactForm::dx(2, 2), ExactForm::dy(2, 2));
  auto same = linearize_bfield(w, w);
  CHECK(same.c_prime == ComplexQ(1));
  CHECK(same.residual == 0);
  ExactForm beta = wedge(ExactForm::dx(2, 1), ExactForm::dy(2, 1)) - wedge(ExactForm::dx(2, 2), ExactForm::dy(2, 2));
  CHECK(linearize_bfield(beta, w).c_prime == ComplexQ(0));
  auto zero = linearize_bfield(ExactForm(w.layout()), w);
  CHECK(zero.c_prime == ComplexQ(0));
  CHECK(zero.residual == 0);
  CHECK_THROWS_AS(linearize_bfield(w, ExactForm(wedge(ExactForm::dx(2, 1), ExactForm::dy(2, 1)))), ValidationError);

  auto phi = make_grid(Domain::box({-1, -1}, {1, 1}), 0.25).with_values([](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); });
  auto eta = phi.with_values([](const Eigen::VectorXd& x) { return 0.25 * (x[0] * x[0] - x[1] * x[1]); });
  auto fit = linearize_bfield(phi, eta);
  CHECK(fit.c_prime.re == 0);
  CHECK(fit.residual == 0);
}

TEST_CASE("grid CSV round trip") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 8);
  std::stringstream ss;
  write_csv(phi, ss);
  std::string first;
  std::getline(ss, first);
  CHECK(first.rfind("# n=2,h=0.125,domain=ball", 0) == 0);
  ss.seekg(0);
  auto back = read_csv(ss);
  CHECK(back.values == phi.values);
  CHECK(back.kind == phi.kind);
  CHECK(back.ghosts.size() == phi.ghosts.size());

  auto box = make_grid(Domain::box({0, 0, 0}, {1, 1, 1}), 0.5).with_values([](const Eigen::VectorXd& x) { return x.sum() / 3; });
  std::stringstream s3;
  write_csv(box, s3);
  CHECK(read_csv(s3).values == box.values);
}
