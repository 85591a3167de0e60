#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "syzlab/cycles.hpp"
#include "syzlab/errors.hpp"
#include "syzlab/ma_solver.hpp"

using namespace syzlab;

namespace {

using Q = Rational;
using FormQ = ExactForm;
constexpr double pi = std::numbers::pi;

RealForm standard_omega(int n) {
  RealForm w(Layout::phase_space(n));
  for (int j = 1; j <= n; ++j) w += wedge(RealForm::dx(n, j), RealForm::dy(n, j));
  return w;
}

template <class T>
Form<T> holomorphic_volume(int n) {
  Form<T> out = Form<T>::constant(Layout::phase_space(n), Complex<T>(T(1)));
  for (int j = 1; j <= n; ++j) out = wedge(out, dz<T>(n, j));
  return out;
}

CycleSpec<double> b_spec(const RealForm& omega, int m, const RealForm& F = {}, double theta = 0) {
  CycleSpec<double> c;
  c.kind = CycleKind::B;
  c.m = m;
  c.omega = omega;
  c.F = F;
  c.theta = theta;
  return c;
}

RealForm two_form(int n, const std::vector<std::vector<double>>& a) {
  RealForm w(Layout::phase_space(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (a[j][k] != 0) w += wedge(RealForm::dx(n, j + 1), RealForm::dy(n, k + 1)) * ComplexD(a[j][k]);
  return w;
}

// Leibniz determinant of a complex matrix, exact.
ComplexQ leibniz(const std::vector<std::vector<ComplexQ>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  ComplexQ det(Q(0));
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inv += p[i] > p[j];
    ComplexQ term(Q(inv % 2 ? -1 : 1));
    for (int i = 0; i < n; ++i) term *= a[i][p[i]];
    det += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return det;
}

}  // namespace

TEST_CASE("dHYM residual and phase in one dimension") {
  for (auto [A, B] : {std::pair{1.0, 1.0}, {2.0, -0.5}, {-1.5, 0.25}, {0.3, 4.0}}) {
    auto c = b_spec(two_form(1, {{A}}), 1, two_form(1, {{1.0}}) * ComplexD(0, B));
    c.theta = -std::atan2(B, A);
    CHECK(dhym_residual(c) <= 1e-15);
    CHECK(solve_phase(c) == doctest::Approx(c.theta));
    double r = dhym_residual(b_spec(c.omega, 1, c.F, 0.4));
    CHECK(dhym_residual(b_spec(c.omega, 1, c.F, 0.4 + pi)) == doctest::Approx(r));
  }
  auto unitc = b_spec(standard_omega(1), 1, two_form(1, {{1.0}}) * ComplexD(0, 1));
  CHECK(solve_phase(unitc) == doctest::Approx(-pi / 4));
  CHECK(dhym_residual(b_spec(standard_omega(3), 3)) == 0);
  CHECK(solve_phase(b_spec(standard_omega(2), 2)) == 0);
}

TEST_CASE("phase for the m = 2 mixed curvature example") {
  RealForm F = two_form(2, {{1, 0}, {0, -1}}) * ComplexD(0, 1);
  auto c = b_spec(standard_omega(2), 2, F);
  CHECK(dhym_top(c) == ComplexD(4));
  CHECK(solve_phase(c) == 0);
}

TEST_CASE("phase is principal valued and degenerate cycles are rejected") {
  CHECK(solve_phase(b_spec(standard_omega(1) * ComplexD(-1), 1)) == pi);
  CHECK_THROWS_AS(solve_phase(b_spec(two_form(2, {{1, 0}, {0, 0}}), 2)), ValidationError);
  CycleSpec<double> a = b_spec(standard_omega(1), 1);
  a.kind = CycleKind::A;
  CHECK_THROWS_AS(dhym_residual(a), ValidationError);
}

TEST_CASE("B-cycle of lower dimension sees only its own coordinates") {
  RealForm w = two_form(3, {{2, 0, 1}, {0, 3, 0}, {1, 0, 5}});
  CHECK(dhym_top(b_spec(w, 1)) == ComplexD(2));
  CHECK(dhym_top(b_spec(w, 2)) == ComplexD(2 * 2 * 3));
}

TEST_CASE("solve_phase then dhym_residual on random rank-1 data") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + trial % 3;
    std::vector<std::vector<double>> a(n, std::vector<double>(n)), b = a, f = a;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        a[j][k] = u(rng) + (j == k ? 2 : 0);
        b[j][k] = u(rng);
        f[j][k] = u(rng);
      }
    auto c = b_spec(two_form(n, a), n, two_form(n, f) * ComplexD(0, 1));
    c.beta = two_form(n, b);
    c.theta = solve_phase(c);
    CHECK(c.theta > -pi);
    CHECK(c.theta <= pi);
    CHECK(dhym_residual(c) <= 1e-12);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("Gieseker limit residual") {
  for (int n = 1; n <= 3; ++n) {
    auto fit = gieseker_limit_residual(standard_omega(n) * ComplexD(2), RealForm(Layout::phase_space(n)));
    CHECK(fit.residual == 0);
    CHECK(fit.constant == std::complex<double>(std::pow(2.0, n) * std::tgamma(n + 1.0)));
  }
  auto one = gieseker_limit_residual(two_form(1, {{3}}), two_form(1, {{1}}) * ComplexD(0, 2));
  CHECK(one.residual == 0);
  CHECK(one.constant == std::complex<double>(1));

  SolveReport rep;
  auto phi = solve_real_ma(Domain::unit_ball(2), 1.0, 1.0 / 32, {}, &rep);
  auto fit = gieseker_limit_residual(phi, RealForm(Layout::phase_space(2)));
  CHECK(fit.residual <= 2 * rep.residual);
  CHECK(std::abs(fit.constant - 2.0) <= 2 * rep.residual);

  Eigen::MatrixXd A(2, 2);
  A << 2, 0.5, 0.5, 1;
  auto quad = make_grid(Domain::box({-1, -1}, {1, 1}), 0.125).with_values([&](const Eigen::VectorXd& x) { return 0.5 * x.dot(A * x); });
  RealForm F = two_form(2, {{0.5, 0.25}, {0.25, -1}}) * ComplexD(0, 1);
  auto q = gieseker_limit_residual(quad, F);
  CHECK(q.residual <= 1e-12);
  CHECK(std::abs(q.constant - gieseker_limit_residual(two_form(2, {{2, 0.5}, {0.5, 1}}), F).constant) <= 1e-12);
}

TEST_CASE("A-cycle residuals") {
  CycleSpec<double> c;
  c.kind = CycleKind::A;
  c.m = 1;
  c.omega = standard_omega(1);
  c.subtorus = {{1, 0}};
  auto Omega = holomorphic_volume<double>(1);
  auto r = a_cycle_residuals(c, Omega);
  CHECK(r.lagrangian == 0);
  CHECK(r.special == 0);
  CHECK(r.flat == 0);
  CHECK(r.combined == 0);

  c.theta = pi / 2;
  CHECK(a_cycle_residuals(c, Omega).special == doctest::Approx(1.0));
  c.subtorus = {{2, 0}};
  CHECK(a_cycle_residuals(c, Omega).special == doctest::Approx(2.0));

  // β restricts to e1∧e2 on the (x1, y1) plane; F = i f with f = −β|_C.
  CycleSpec<double> d;
  d.kind = CycleKind::A;
  d.m = 2;
  d.omega = standard_omega(2);
  d.beta = wedge(RealForm::dx(2, 1), RealForm::dy(2, 1));
  d.subtorus = {{1, 0, 0, 0}, {0, 0, 1, 0}};
  d.F = RealForm::monomial(Layout::plain(2), 0b11, ComplexD(0, -1));
  auto s = a_cycle_residuals(d, holomorphic_volume<double>(2));
  CHECK(s.flat == 0);
  CHECK(s.lagrangian == 1);
  CHECK(s.combined == 1);

  d.subtorus = {{1, 0, 0, 0}, {2, 0, 0, 0}};
  CHECK_THROWS_AS(a_cycle_residuals(d, holomorphic_volume<double>(2)), ValidationError);
  d.kind = CycleKind::B;
  CHECK_THROWS_AS(a_cycle_residuals(d, holomorphic_volume<double>(2)), ValidationError);
}

TEST_CASE("every fiber of the imaginary-part fibration is special Lagrangian") {
  for (int n = 1; n <= 3; ++n)
    for (double c : {0.0, 0.25, 0.5, 0.8660254037844386}) {
      auto fiber = imaginary_part_fiber(n, std::vector<double>(n, c));
      auto r = a_cycle_residuals(fiber, holomorphic_volume<double>(n));
      CHECK(r.lagrangian == 0);
      CHECK(r.special == 0);
      CHECK(r.flat == 0);
      CHECK(r.combined == 0);
    }
}

TEST_CASE("deformed harmonic residuals") {
  CycleSpec<Q> c;
  c.kind = CycleKind::B;
  c.m = 2;
  c.omega = FormQ(Layout::phase_space(2));
  for (int j = 1; j <= 2; ++j) c.omega += wedge(FormQ::dx(2, j), FormQ::dy(2, j));
  c.F = FormQ(Layout::phase_space(2));

  TrigForm<Q> constant{2, {{{0, 0, 0, 0}, dzbar<Q>(2, 1) * ComplexQ(Q(3), Q(1))}}};
  auto r0 = deformed_harmonic_residual(constant, c);
  CHECK(r0.dbar == 0);
  CHECK(r0.deformed == 0);

  TrigForm<Q> wave{2, {{{1, 0, 0, 0}, dzbar<Q>(2, 2)}}};
  CHECK(deformed_harmonic_residual(wave, c).dbar == doctest::Approx(0.5));

  TrigForm<Q> top{2, {{{1, 0, 0, 0}, wedge(dzbar<Q>(2, 1), dzbar<Q>(2, 2))}}};
  CHECK(deformed_harmonic_residual(top, c).dbar == 0);

  TrigForm<Q> bad{2, {{{0, 0, 0, 0}, dz<Q>(2, 1)}}};
  CHECK_THROWS_AS(deformed_harmonic_residual(bad, c), ValidationError);

  // On a curve: ∂(e^{±ix} dz̄) = ±e^{±ix} dx∧dy, so 2i sin x dz̄ satisfies Im ∂B = 0 and 2 cos x dz̄ does not.
  CycleSpec<Q> curve;
  curve.kind = CycleKind::B;
  curve.m = 1;
  curve.omega = FormQ(Layout::phase_space(1));
  curve.omega += wedge(FormQ::dx(1, 1), FormQ::dy(1, 1));
  TrigForm<Q> sine{1, {{{1, 0}, dzbar<Q>(1, 1)}, {{-1, 0}, dzbar<Q>(1, 1) * ComplexQ(Q(-1))}}};
  TrigForm<Q> cosine{1, {{{1, 0}, dzbar<Q>(1, 1)}, {{-1, 0}, dzbar<Q>(1, 1)}}};
  auto rs = deformed_harmonic_residual(sine, curve);
  auto rc = deformed_harmonic_residual(cosine, curve);
  CHECK(rs.dbar == 0);
  CHECK(rs.deformed == 0);
  CHECK(rc.deformed == doctest::Approx(1.0));
}

TEST_CASE("A-correlation is the determinant of the coefficient matrix") {
  for (int n = 1; n <= 4; ++n) {
    std::vector<FormQ> basis;
    for (int j = 0; j < n; ++j) basis.push_back(FormQ::generator(Layout::plain(n), j));
    CHECK(a_correlation(basis) == ComplexQ(Q(1)));
    if (n > 1) {
      auto rep = basis;
      rep[1] = rep[0];
      CHECK(a_correlation(rep).zero());
    }
  }
  Layout l2 = Layout::plain(2);
  auto e1 = FormQ::generator(l2, 0), e2 = FormQ::generator(l2, 1);
  ComplexQ i(Q(0), Q(1));
  CHECK(a_correlation(std::vector<FormQ>{e1 + e2 * i, e2 + e1 * i}) == ComplexQ(Q(2)));

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> u(-4, 4);
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      Layout l = Layout::plain(n);
      std::vector<std::vector<ComplexQ>> coeff(n, std::vector<ComplexQ>(n));
      std::vector<FormQ> forms;
      for (int r = 0; r < n; ++r) {
        FormQ f(l);
        for (int s = 0; s < n; ++s) {
          coeff[r][s] = ComplexQ(Q(u(rng), 1 + std::abs(u(rng))), Q(u(rng)));
          f += FormQ::generator(l, s, coeff[r][s]);
        }
        forms.push_back(f);
      }
      CHECK(a_correlation(forms, Q(3, 2)) == leibniz(coeff) * ComplexQ(Q(3, 2)));
    }
  CHECK_THROWS_AS(a_correlation(std::vector<FormQ>{e1}), ValidationError);
}

TEST_CASE("B-correlation") {
  ComplexQ i(Q(0), Q(1));
  auto Omega2 = holomorphic_volume<Q>(2);
  std::vector<TangentDatum<Q>> zero_v = {{std::vector<Q>(4, Q(0)), dzbar<Q>(1, 1)}, {std::vector<Q>(4, Q(0)), dzbar<Q>(1, 1) * i}};
  CHECK(b_correlation(zero_v, Omega2, 1).zero());

  // m = 0: the signed sum is n! times one ordered contraction.
  std::vector<TangentDatum<Q>> vs = {{{Q(1), Q(2), Q(0), Q(1)}, FormQ()}, {{Q(0), Q(1), Q(3), Q(-1)}, FormQ()}};
  ComplexQ direct = contract(vs[0].v, contract(vs[1].v, Omega2)).coefficient(0);
  CHECK(!direct.zero());
  CHECK(b_correlation(vs, Omega2, 0) == direct * ComplexQ(Q(2)));

  Q b(5, 3);
  std::vector<TangentDatum<Q>> one = {{{Q(0), Q(0)}, dzbar<Q>(1, 1) * ComplexQ(b)}};
  CHECK(b_correlation(one, holomorphic_volume<Q>(1), 1) == ComplexQ(Q(0), 2 * b));

  // Alternating in the tangents.
  auto Omega3 = holomorphic_volume<Q>(3);
  std::vector<TangentDatum<Q>> ts = {
      {{Q(0), Q(0), Q(1), Q(0), Q(0), Q(2)}, dzbar<Q>(1, 1)},
      {{Q(0), Q(1), Q(0), Q(0), Q(0), Q(1)}, dzbar<Q>(1, 1) * ComplexQ(Q(2), Q(1))},
      {{Q(0), Q(3), Q(1), Q(0), Q(-1), Q(0)}, dzbar<Q>(1, 1) * i}};
  ComplexQ v = b_correlation(ts, Omega3, 1);
  CHECK(!v.zero());
  std::swap(ts[0], ts[2]);
  CHECK(b_correlation(ts, Omega3, 1) == -v);
  ts.pop_back();
  CHECK_THROWS_AS(b_correlation(ts, Omega3, 1), ValidationError);
}

TEST_CASE("pre-symplectic pairing") {
  for (int m = 1; m <= 3; ++m) {
    CycleSpec<Q> c;
    c.kind = CycleKind::B;
    c.m = m;
    c.omega = FormQ(Layout::phase_space(m));
    for (int j = 1; j <= m; ++j) c.omega += wedge(FormQ::dx(m, j), FormQ::dy(m, j));
    std::vector<Q> v1(2 * m, Q(0)), v2 = v1;
    v1[0] = 1;
    v2[m] = 1;
    Q m_fact = m == 1 ? Q(1) : m == 2 ? Q(2) : Q(6);
    CHECK(presymplectic_pairing<Q>({v1, FormQ()}, {v2, FormQ()}, c, Q(3)) == m_fact * 3);
  }

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(-3, 3);
  const int m = 2;
  CycleSpec<Q> c;
  c.kind = CycleKind::B;
  c.m = m;
  c.omega = FormQ(Layout::phase_space(m));
  for (int j = 1; j <= m; ++j)
    for (int k = 1; k <= m; ++k) c.omega += wedge(FormQ::dx(m, j), FormQ::dy(m, k)) * ComplexQ(Q(j == k ? 3 : 1));
  c.beta = wedge(FormQ::dx(m, 1), FormQ::dy(m, 2)) * ComplexQ(Q(1, 2));
  c.F = wedge(FormQ::dx(m, 2), FormQ::dy(m, 2)) * ComplexQ(Q(0), Q(1, 3));
  c.theta = 0.375;
  auto random_tangent = [&] {
    TangentDatum<Q> t;
    for (int k = 0; k < 2 * m; ++k) t.v.push_back(Q(u(rng)));
    t.B = dzbar<Q>(m, 1) * ComplexQ(Q(u(rng)), Q(u(rng))) + dzbar<Q>(m, 2) * ComplexQ(Q(u(rng)), Q(u(rng)));
    return t;
  };
  auto combine = [](const TangentDatum<Q>& a, const TangentDatum<Q>& b, const Q& s) {
    TangentDatum<Q> t;
    for (std::size_t k = 0; k < a.v.size(); ++k) t.v.push_back(a.v[k] + s * b.v[k]);
    t.B = a.B + b.B * ComplexQ(s);
    return t;
  };
  for (int trial = 0; trial < 25; ++trial) {
    auto a = random_tangent(), b = random_tangent(), d = random_tangent();
    Q s(u(rng), 7);
    CHECK(presymplectic_pairing(a, a, c).is_zero());
    CHECK(presymplectic_pairing(a, b, c) == -presymplectic_pairing(b, a, c));
    CHECK(presymplectic_pairing(combine(a, b, s), d, c) == presymplectic_pairing(a, d, c) + s * presymplectic_pairing(b, d, c));
  }

  // Large multiples of ω at θ = 0: pairing / k^{m−1} → Im top(ω^{m−1}∧[B1 B2]). The B-field and
  // curvature are imaginary in ω^C + F and [B1 B2] is imaginary, so odd powers drop out under
  // Im: exact for m = 2, error c/k² for m = 3.
  for (int mm : {2, 3}) {
    CycleSpec<Q> base;
    base.kind = CycleKind::B;
    base.m = mm;
    base.omega = FormQ(Layout::phase_space(mm));
    for (int j = 1; j <= mm; ++j) base.omega += wedge(FormQ::dx(mm, j), FormQ::dy(mm, j)) * ComplexQ(Q(j + 1));
    base.beta = wedge(FormQ::dx(mm, 1), FormQ::dy(mm, 2)) * ComplexQ(Q(1, 2)) + wedge(FormQ::dx(mm, 2), FormQ::dy(mm, 1)) * ComplexQ(Q(1, 2));
    base.F = wedge(FormQ::dx(mm, mm), FormQ::dy(mm, mm)) * ComplexQ(Q(0), Q(1, 3)) + wedge(FormQ::dx(mm, 1), FormQ::dy(mm, 1)) * ComplexQ(Q(0), Q(-1));
    std::vector<Q> zero(2 * mm, Q(0));
    TangentDatum<Q> t1{zero, dzbar<Q>(mm, 1) * ComplexQ(Q(1), Q(2))};
    TangentDatum<Q> t2{zero, dzbar<Q>(mm, 2) * ComplexQ(Q(-1), Q(1)) + dzbar<Q>(mm, 1) * ComplexQ(Q(0), Q(1))};
    CycleSpec<Q> bare = base;
    bare.beta.reset();
    bare.F = FormQ(Layout::phase_space(mm));
    Q limit = presymplectic_pairing(t1, t2, bare);
    CHECK(!limit.is_zero());
    auto error = [&](int k) {
      CycleSpec<Q> s = base;
      s.omega = base.omega * ComplexQ(Q(k));
      Q scale(1);
      for (int e = 1; e < mm; ++e) scale *= k;
      return presymplectic_pairing(t1, t2, s) / scale - limit;
    };
    if (mm == 2) {
      CHECK(error(64).is_zero());
    } else {
      Q e1 = error(64), e2 = error(128);
      CHECK(!e1.is_zero());
      CHECK(e2 * 4 == e1);
    }
  }
}
