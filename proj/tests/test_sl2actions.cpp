#include <doctest.h>

#include "syzlab/errors.hpp"
#include "syzlab/sl2actions.hpp"

using namespace syzlab;

namespace {

ExactForm omega_flat(int n, Frame f = Frame::primal) {
  Layout l = Layout::phase_space(n, f);
  ExactForm w(l);
  for (int j = 0; j < n; ++j)
    w += wedge(ExactForm::generator(l, j), ExactForm::generator(l, n + j));
  return w;
}

ExactForm omega_hessian(const OpMatrix& H, Frame f = Frame::primal) {
  const int n = static_cast<int>(H.rows());
  Layout l = Layout::phase_space(n, f);
  ExactForm w(l);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      w += wedge(ExactForm::generator(l, j), ExactForm::generator(l, n + k)) * ComplexQ(H(j, k));
  return w;
}

OpMatrix block_diag(const OpMatrix& A) {
  const std::size_t n = A.rows();
  OpMatrix g(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = g(n + i, n + j) = A(i, j);
  return g;
}

OpMatrix degree_shift(int n) {
  OpMatrix h(Mask{1} << (2 * n), Mask{1} << (2 * n));
  for (Mask m = 0; m < (Mask{1} << (2 * n)); ++m) h(m, m) = degree_of(m) - n;
  return h;
}

}  // namespace

TEST_CASE("hard Lefschetz on the 2-torus") {
  auto t = lefschetz_triple(omega_flat(1));
  CHECK(t.H(0, 0) == -1);
  CHECK(t.H(1, 1) == 0);
  CHECK(t.H(2, 2) == 0);
  CHECK(t.H(3, 3) == 1);
  CHECK(t.H == degree_shift(1));
}

TEST_CASE("sl2 relations and Lefschetz bijectivity, flat torus n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    auto t = lefschetz_triple(omega_flat(n));
    CHECK(commutator(t.H, t.L) == t.L * Rational(2));
    CHECK(commutator(t.H, t.Lambda) == t.Lambda * Rational(-2));
    CHECK(t.H == degree_shift(n));
    CHECK(hard_lefschetz_bijective(t.L, n));
  }
}

TEST_CASE("degenerate symplectic form is rejected") {
  auto w = wedge(ExactForm::dx(2, 1), ExactForm::dy(2, 1));
  CHECK_THROWS_AS(lefschetz_triple(w), ValidationError);
}

TEST_CASE("mirror sl2 commutes with hard Lefschetz, flat torus n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    auto a = lefschetz_triple(omega_flat(n));
    auto b = mirror_sl2(omega_flat(n, Frame::dual));
    auto rep = so4_check(a, b);
    CHECK(rep.first_relations == 0);
    CHECK(rep.second_relations == 0);
    CHECK(rep.cross == 0);
    CHECK(rep.ok());
    if (n == 1) CHECK_FALSE(a.L == b.L);

    auto W = lefschetz_triple(omega_flat(n, Frame::dual));
    auto F = fourier_matrix(n);
    CHECK(F * b.L == W.L * F);
    CHECK(F * b.Lambda == W.Lambda * F);
  }
}

TEST_CASE("H + H' vanishes exactly on monomials with 2|J| = n") {
  for (int n = 1; n <= 3; ++n) {
    auto a = lefschetz_triple(omega_flat(n));
    auto b = mirror_sl2(omega_flat(n, Frame::dual));
    OpMatrix sum = a.H + b.H;
    const Mask base = (Mask{1} << n) - 1;
    for (Mask m = 0; m < (Mask{1} << (2 * n)); ++m) {
      int J = degree_of(m & base), K = degree_of(m >> n);
      CHECK(b.H(m, m) == J - K);
      CHECK((sum(m, m) == 0) == (2 * J == n));
    }
  }
}

TEST_CASE("non-flat Hessian metric via congruence keeps the relations exact") {
  OpMatrix H(2, 2);
  H(0, 0) = 2; H(0, 1) = 1; H(1, 0) = 1; H(1, 1) = 1;
  OpMatrix Hinv = inverse(H);
  auto a = lefschetz_triple(omega_hessian(H), block_diag(Hinv));
  auto b = mirror_sl2(omega_hessian(Hinv, Frame::dual), block_diag(H));
  auto rep = so4_check(a, b);
  CHECK(rep.first_relations == 0);
  CHECK(rep.second_relations == 0);
  CHECK(a.H == degree_shift(2));
}

TEST_CASE("negative control: mismatched metric breaks the relations") {
  auto w = omega_flat(2) + wedge(ExactForm::dx(2, 1), ExactForm::dy(2, 2));
  auto a = lefschetz_triple(w);
  auto b = mirror_sl2(omega_flat(2, Frame::dual));
  auto rep = so4_check(a, b);
  CHECK_FALSE(rep.ok());
  CHECK(rep.first_relations > 0);

  auto scaled = lefschetz_triple(omega_flat(1) * ComplexQ(2));
  CHECK_FALSE(so4_check(scaled, mirror_sl2(omega_flat(1, Frame::dual))).ok());
}

TEST_CASE("joint weight decomposition") {
  auto a = lefschetz_triple(omega_flat(1));
  auto b = mirror_sl2(omega_flat(1, Frame::dual));
  auto rows = weight_table(a.H, b.H, 1);
  int total = 0;
  for (const auto& r : rows) total += r.multiplicity;
  CHECK(total == 4);
  // The 2-torus carries V_{1/2,0} + V_{0,1/2}.
  CHECK(decompose_so4(rows) == Sl2Table{{{1, 0}, 1}, {{0, 1}, 1}});

  for (int n = 2; n <= 3; ++n) {
    auto a2 = lefschetz_triple(omega_flat(n));
    auto b2 = mirror_sl2(omega_flat(n, Frame::dual));
    auto N = decompose_so4(weight_table(a2.H, b2.H, n));
    BigInt dim = 0;
    for (const auto& [k, m] : N) dim += m * (k.first + 1) * (k.second + 1);
    CHECK(dim == (1 << (2 * n)));
  }
}
