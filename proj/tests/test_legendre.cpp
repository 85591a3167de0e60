#include <doctest.h>

#include <random>

#include "syzlab/errors.hpp"
#include "syzlab/legendre.hpp"
#include "syzlab/ma_solver.hpp"

using namespace syzlab;

namespace {

GridPotential quadratic(const Eigen::MatrixXd& A, double h = 0.0625) {
  const int n = static_cast<int>(A.rows());
  return make_grid(Domain::box(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)), h)
      .with_values([&](const Eigen::VectorXd& x) { return 0.5 * x.dot(A * x); });
}

}  // namespace

TEST_CASE("dual coordinates of quadratics") {
  auto phi = quadratic(Eigen::MatrixXd::Identity(2, 2));
  auto gs = dual_coordinates(phi);
  CHECK(gs.injective);
  for (std::size_t k = 0; k < gs.nodes.size(); ++k) CHECK((gs.points[k] - phi.coords(gs.nodes[k])).norm() == 0);

  Eigen::MatrixXd a(1, 1);
  a(0, 0) = 3;
  auto p1 = quadratic(a, 0.125);
  auto g1 = dual_coordinates(p1);
  for (std::size_t k = 0; k < g1.nodes.size(); ++k) CHECK(g1.points[k][0] == 3 * p1.coords(g1.nodes[k])[0]);
}

TEST_CASE("concave input is rejected as non-injective") {
  auto phi = quadratic(-Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(dual_coordinates(phi), ValidationError);
}

TEST_CASE("gradient image of the disk solution fills a near-disk") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32);
  auto gs = dual_coordinates(phi);
  CHECK(gs.injective);
  double rmax = 0;
  for (const auto& p : gs.points) rmax = std::max(rmax, p.norm());
  CHECK(rmax == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t k = 0; k < gs.nodes.size(); ++k) CHECK((gs.points[k] - phi.coords(gs.nodes[k])).norm() < 0.05);
}

TEST_CASE("quadratics transform exactly") {
  auto phi = quadratic(Eigen::MatrixXd::Identity(2, 2));
  auto psi = legendre_transform(phi);
  for (auto i : psi.interior_nodes()) CHECK(std::abs(psi.values[i] - 0.5 * psi.coords(i).squaredNorm()) <= 1e-12);

  Eigen::MatrixXd a(1, 1);
  a(0, 0) = 2;
  auto p1 = quadratic(a, 0.125);
  auto s1 = legendre_transform(p1, {0.125});
  std::size_t defined = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1.kind[i] == NodeKind::masked) continue;
    ++defined;
    double y = s1.coords(i)[0];
    CHECK(std::abs(s1.values[i] - y * y / 4) <= 1e-12);
  }
  CHECK(defined > 10);

  Eigen::MatrixXd A(2, 2);
  A << 2, 0.5, 0.5, 1.5;
  auto pa = quadratic(A);
  auto sa = legendre_transform(pa);
  Eigen::MatrixXd Ainv = A.inverse();
  for (auto i : sa.interior_nodes()) {
    auto y = sa.coords(i);
    CHECK(std::abs(sa.values[i] - 0.5 * y.dot(Ainv * y)) <= 1e-12);
  }
  auto r = duality_residuals(pa, sa);
  CHECK(r.matched > 100);
  CHECK(r.involution <= 1e-12);
  CHECK(r.hessian_inverse <= 1e-12);
  CHECK(r.det_product <= 1e-12);
}

TEST_CASE("greedy ascent agrees with the brute-force maximum") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 16);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd y(2);
    y << u(rng), u(rng);
    std::size_t cold = phi.size();
    std::size_t warm = phi.interior_nodes()[rng() % phi.interior_nodes().size()];
    auto a = conjugate_at(phi, y, cold);
    auto b = conjugate_at(phi, y, warm);
    CHECK(a.has_value() == b.has_value());
    CHECK(cold == warm);
    if (a && b) CHECK(*a == *b);
  }
}

TEST_CASE("disk solution: dual potential is convex with det = 1") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32);
  LegendreReport rep;
  auto psi = legendre_transform(phi, {}, &rep);
  CHECK(rep.masked > 0);
  CHECK(rep.masked < rep.nodes);
  CHECK(is_convex(psi));
  for (auto i : psi.interior_nodes()) {
    if (psi.coords(i).norm() > 0.8) continue;
    CHECK(std::abs(small_determinant(hessian(psi, i)) - 1) <= 1e-2);
  }
}

TEST_CASE("duality residuals shrink under refinement") {
  DualityResiduals prev;
  for (int N : {32, 64}) {
    auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / N);
    auto r = duality_residuals(phi, legendre_transform(phi));
    CHECK(r.margin == doctest::Approx(0.1));
    CHECK(r.involution <= 5e-2);
    CHECK(r.hessian_inverse <= 5e-2);
    CHECK(r.det_product <= 5e-2);
    if (N == 64) {
      CHECK(r.involution < prev.involution);
      CHECK(r.hessian_inverse < prev.hessian_inverse);
      CHECK(r.det_product < prev.det_product);
    }
    prev = r;
  }
}

TEST_CASE("c = 4: the determinant product still pairs to one") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 4.0, 1.0 / 32);
  auto psi = legendre_transform(phi, {1.0 / 16});
  auto r = duality_residuals(phi, psi);
  CHECK(r.matched > 100);
  CHECK(r.det_product <= 1e-2);
  for (auto i : psi.interior_nodes())
    if (psi.coords(i).norm() < 1.5) CHECK(std::abs(small_determinant(hessian(psi, i)) - 0.25) <= 1e-2);
}

TEST_CASE("double transform reproduces phi modulo affine terms") {
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32);
  auto psi = legendre_transform(phi);
  GridPotential back;
  double res = involution_residual(phi, psi, {}, &back);
  CHECK(res <= 1e-6);
  CHECK(back.dims == phi.dims);
}
