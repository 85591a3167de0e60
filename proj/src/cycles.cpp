#include "syzlab/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "syzlab/errors.hpp"
#include "syzlab/ma_solver.hpp"
#include "syzlab/matrix.hpp"

namespace syzlab {

namespace {

template <class T>
T from_double(double x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return exact(x);
  } else {
    return x;
  }
}

template <class T>
Complex<T> unit(double angle) {
  if (angle == 0) return Complex<T>(T(1), T(0));
  return Complex<T>(from_double<T>(std::cos(angle)), from_double<T>(std::sin(angle)));
}

template <class T>
Complex<T> i_unit() {
  return Complex<T>(T(0), T(1));
}

template <class T>
void require_layout(const Form<T>& f, Layout l, const char* what) {
  if (!(f.layout() == l)) throw ValidationError(std::string(what) + ": form has the wrong layout");
}

template <class T>
Form<T> complexified_on_b_cycle(const CycleSpec<T>& c) {
  if (c.kind != CycleKind::B) throw ValidationError("cycle kind mismatch: expected a B-cycle");
  if (c.m < 1 || c.m > c.omega.n()) throw ValidationError("B-cycle dimension out of range");
  Form<T> w = restrict_to_b_cycle(c.omega, c.m);
  if (c.beta) w += restrict_to_b_cycle(*c.beta, c.m) * i_unit<T>();
  if (c.F.is_zero()) return w;
  require_layout(c.F, Layout::phase_space(c.m), "B-cycle curvature");
  if (!c.F.is_homogeneous(2)) throw ValidationError("curvature must be a 2-form");
  return w + c.F;
}

int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

// Imaginary part taken coefficientwise (the monomial basis is real).
template <class T>
Form<T> imaginary_part(const Form<T>& a) {
  return (a - a.conj()) * Complex<T>(T(0), T(-1) / T(2));
}

}  // namespace

template <class T>
double form_norm(const Form<T>& a) {
  double m = 0;
  for (const auto& [mask, c] : a.terms()) m = std::max(m, magnitude(c));
  return m;
}

template <class T>
Form<T> dz(int m, int j) {
  Layout l = Layout::phase_space(m);
  return Form<T>::generator(l, j - 1) + Form<T>::generator(l, m + j - 1, i_unit<T>());
}

template <class T>
Form<T> dzbar(int m, int j) {
  Layout l = Layout::phase_space(m);
  return Form<T>::generator(l, j - 1) - Form<T>::generator(l, m + j - 1, i_unit<T>());
}

template <class T>
Form<T> restrict_to_b_cycle(const Form<T>& a, int m) {
  const Layout& src = a.layout();
  if (!src.phase) throw ValidationError("restrict_to_b_cycle: ambient form must use a phase layout");
  const int n = src.n;
  if (m < 0 || m > n) throw ValidationError("restrict_to_b_cycle: cycle dimension out of range");
  Layout target = Layout::phase_space(m, src.frame);
  std::vector<Form<T>> images;
  for (int g = 0; g < 2 * n; ++g) {
    int j = g % n;
    if (j < m)
      images.push_back(Form<T>::generator(target, g < n ? j : m + j));
    else
      images.push_back(Form<T>(target));
  }
  return pullback(a, images, target);
}

template <class T>
Complex<T> dhym_top(const CycleSpec<T>& c) {
  return top_coefficient(power(complexified_on_b_cycle(c), c.m));
}

template <class T>
double dhym_residual(const CycleSpec<T>& c) {
  std::complex<double> z = std::polar(1.0, c.theta) * to_std(dhym_top(c));
  return std::abs(z.imag());
}

template <class T>
double solve_phase(const CycleSpec<T>& c) {
  Complex<T> z = dhym_top(c);
  if (z.zero()) throw ValidationError("degenerate cycle: top coefficient of (ω^C + F)^m vanishes");
  double theta = -std::atan2(to_double(z.im), to_double(z.re));
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return theta;
}

template <class T>
GiesekerFit gieseker_limit_residual(const Form<T>& omega, const Form<T>& F) {
  if (!F.is_zero()) require_layout(F, omega.layout(), "gieseker_limit_residual");
  GiesekerFit fit;
  fit.constant = to_std(top_coefficient(power(omega + F * i_unit<T>(), omega.n())));
  return fit;
}

GiesekerFit gieseker_limit_residual(const GridPotential& phi, const RealForm& F) {
  std::vector<std::complex<double>> z;
  for (std::size_t i : phi.interior_nodes())
    z.push_back(gieseker_limit_residual(hessian_two_form(hessian(phi, i)), F).constant);
  GiesekerFit fit;
  if (z.empty()) return fit;
  auto [rlo, rhi] = std::minmax_element(z.begin(), z.end(), [](auto a, auto b) { return a.real() < b.real(); });
  auto [ilo, ihi] = std::minmax_element(z.begin(), z.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
  fit.constant = {(rlo->real() + rhi->real()) / 2, (ilo->imag() + ihi->imag()) / 2};
  for (const auto& v : z) fit.residual = std::max(fit.residual, std::abs(v - fit.constant));
  return fit;
}

template <class T>
ACycleResiduals a_cycle_residuals(const CycleSpec<T>& c, const Form<T>& Omega) {
  if (c.kind != CycleKind::A) throw ValidationError("cycle kind mismatch: expected an A-cycle");
  const int n = c.omega.n();
  if (static_cast<int>(c.subtorus.size()) != c.m) throw ValidationError("A-cycle: subtorus basis must have m vectors");
  Matrix<T> basis(c.m, 2 * n);
  for (int a = 0; a < c.m; ++a) {
    if (static_cast<int>(c.subtorus[a].size()) != 2 * n) throw ValidationError("A-cycle: basis vector has the wrong length");
    for (int b = 0; b < 2 * n; ++b) basis(a, b) = c.subtorus[a][b];
  }
  if (static_cast<int>(rank(basis)) != c.m) throw ValidationError("A-cycle: subtorus basis is rank deficient");
  const Layout plain = Layout::plain(c.m);
  Form<T> f(plain);
  if (!c.F.is_zero()) {
    require_layout(c.F, plain, "A-cycle curvature");
    f = c.F * Complex<T>(T(0), T(-1));
  }
  Form<T> w = restrict_to_frame(c.omega, c.subtorus);
  Form<T> b = c.beta ? restrict_to_frame(*c.beta, c.subtorus) : Form<T>(plain);
  Form<T> om = restrict_to_frame(Omega, c.subtorus) * unit<T>(c.theta);
  ACycleResiduals r;
  r.lagrangian = form_norm(w);
  r.special = form_norm(imaginary_part(om));
  r.flat = form_norm(b + f);
  r.combined = form_norm(w + b * i_unit<T>() + (c.F.is_zero() ? Form<T>(plain) : c.F));
  return r;
}

CycleSpec<double> imaginary_part_fiber(int n, const std::vector<double>& c) {
  if (n < 1 || static_cast<int>(c.size()) != n) throw ValidationError("imaginary_part_fiber: base point must have n coordinates");
  CycleSpec<double> s;
  s.kind = CycleKind::A;
  s.m = n;
  s.omega = RealForm(Layout::phase_space(n));
  for (int j = 1; j <= n; ++j) s.omega += wedge(RealForm::dx(n, j), RealForm::dy(n, j));
  s.F = RealForm(Layout::plain(n));
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(2 * n, 0.0);
    e[j] = 1;
    s.subtorus.push_back(e);
  }
  return s;
}

template <class T>
DeformedHarmonicResiduals deformed_harmonic_residual(const TrigForm<T>& B, const CycleSpec<T>& c) {
  const int m = c.m;
  if (B.m != m) throw ValidationError("deformed_harmonic_residual: B lives on a torus of another dimension");
  Form<T> P1 = complexified_on_b_cycle(c);
  const Layout l = Layout::phase_space(m);
  int q = -1;
  for (const auto& [key, b] : B.modes) {
    if (static_cast<int>(key.size()) != 2 * m) throw ValidationError("deformed_harmonic_residual: mode key must have 2m entries");
    require_layout(b, l, "deformed_harmonic_residual");
    if (b.is_zero()) continue;
    int d = b.max_degree();
    if (!b.is_homogeneous(d) || (q >= 0 && d != q)) throw ValidationError("deformed_harmonic_residual: B must have one degree q");
    q = d;
    for (int j = 0; j < m; ++j) {
      std::vector<Complex<T>> dzj(2 * m, Complex<T>(T(0)));
      dzj[j] = Complex<T>(T(1) / T(2));
      dzj[m + j] = Complex<T>(T(0), T(-1) / T(2));
      if (!contract(std::span<const Complex<T>>(dzj), b).is_zero()) throw ValidationError("deformed_harmonic_residual: B is not of type (0,q)");
    }
  }
  DeformedHarmonicResiduals r;
  if (q < 0) return r;
  Form<T> P = power(P1, m - q);
  const Complex<T> rot = unit<T>(c.theta);
  std::map<std::vector<int>, Form<T>> G;
  for (const auto& [key, b] : B.modes) {
    Form<T> holo(l), anti(l);
    for (int j = 0; j < m; ++j) {
      T k(key[j]), lj(key[m + j]);
      // d e^{i(k·x + l·y)} = i e^{…} Σ ½(k − i l) dz + ½(k + i l) dz̄
      holo += dz<T>(m, j + 1) * (i_unit<T>() * Complex<T>(k / T(2), -lj / T(2)));
      anti += dzbar<T>(m, j + 1) * (i_unit<T>() * Complex<T>(k / T(2), lj / T(2)));
    }
    r.dbar = std::max(r.dbar, form_norm(wedge(anti, b)));
    G[key] = wedge(P, wedge(holo, b)) * rot;
  }
  for (const auto& [key, g] : G) {
    std::vector<int> neg(key.size());
    std::transform(key.begin(), key.end(), neg.begin(), [](int v) { return -v; });
    auto it = G.find(neg);
    Form<T> mirror = it == G.end() ? Form<T>(g.layout()) : it->second.conj();
    r.deformed = std::max(r.deformed, form_norm((g - mirror) * Complex<T>(T(0), T(-1) / T(2))));
  }
  return r;
}

template <class T>
Complex<T> a_correlation(const std::vector<Form<T>>& forms, const T& volume) {
  if (forms.empty()) throw ValidationError("a_correlation: no forms");
  const int n = static_cast<int>(forms.size());
  const Layout l = Layout::plain(n);
  Form<T> acc = Form<T>::constant(l, Complex<T>(T(1)));
  for (const auto& f : forms) {
    if (!(f.layout() == l)) throw ValidationError("a_correlation: count mismatch between forms and torus dimension");
    if (!f.is_zero() && !f.is_homogeneous(1)) throw ValidationError("a_correlation: expected 1-forms");
    acc = wedge(acc, f);
  }
  return top_coefficient(acc) * Complex<T>(volume);
}

template <class T>
Complex<T> b_correlation(const std::vector<TangentDatum<T>>& tangents, const Form<T>& Omega, int m, const T& volume) {
  if (!Omega.layout().phase) throw ValidationError("b_correlation: Ω must use a phase layout");
  const int n = Omega.n();
  if (static_cast<int>(tangents.size()) != n) throw ValidationError("b_correlation: need one tangent per ambient dimension");
  if (m < 0 || m > n) throw ValidationError("b_correlation: cycle dimension out of range");
  const Layout l = Layout::phase_space(m);
  for (const auto& t : tangents) {
    if (static_cast<int>(t.v.size()) != 2 * n) throw ValidationError("b_correlation: normal vector has the wrong length");
    if (!t.B.is_zero() && (!(t.B.layout() == l) || !t.B.is_homogeneous(1)))
      throw ValidationError("b_correlation: B must be a 1-form on the cycle");
  }
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Complex<T> sum(T(0));
  do {
    Form<T> prod = Form<T>::constant(l, Complex<T>(T(1)));
    for (int k = 0; k < m; ++k) prod = tangents[p[k]].B.is_zero() ? Form<T>(l) : wedge(prod, tangents[p[k]].B);
    if (prod.is_zero()) continue;
    Form<T> contracted = Omega;
    for (int k = n - 1; k >= m; --k) contracted = contract(tangents[p[k]].v, contracted);
    Complex<T> v = top_coefficient(wedge(prod, restrict_to_b_cycle(contracted, m)));
    if (permutation_sign(p) < 0) v = -v;
    sum += v;
  } while (std::next_permutation(p.begin(), p.end()));
  return sum * Complex<T>(volume);
}

template <class T>
T presymplectic_pairing(const TangentDatum<T>& t1, const TangentDatum<T>& t2, const CycleSpec<T>& c, const T& volume) {
  Form<T> P = power(complexified_on_b_cycle(c), c.m - 1);
  const int n = c.omega.n();
  const Layout l = Layout::phase_space(c.m);
  for (const auto* t : {&t1, &t2}) {
    if (static_cast<int>(t->v.size()) != 2 * n) throw ValidationError("presymplectic_pairing: normal vector has the wrong length");
    if (!t->B.is_zero() && !(t->B.layout() == l)) throw ValidationError("presymplectic_pairing: B must live on the cycle");
  }
  Form<T> B1 = t1.B.is_zero() ? Form<T>(l) : t1.B, B2 = t2.B.is_zero() ? Form<T>(l) : t2.B;
  Form<T> sym = (wedge(B1, B2.conj()) - wedge(B2, B1.conj())) * i_unit<T>();
  Complex<T> first = unit<T>(c.theta) * top_coefficient(wedge(P, sym));
  T second = evaluate(c.omega, {t1.v, t2.v}).re * top_coefficient(power(restrict_to_b_cycle(c.omega, c.m), c.m)).re;
  return (first.im + second) * volume;
}

#define SYZLAB_INSTANTIATE_CYCLES(T)                                                                       \
  template double form_norm(const Form<T>&);                                                               \
  template Form<T> dz(int, int);                                                                           \
  template Form<T> dzbar(int, int);                                                                        \
  template Form<T> restrict_to_b_cycle(const Form<T>&, int);                                               \
  template Complex<T> dhym_top(const CycleSpec<T>&);                                                       \
  template double dhym_residual(const CycleSpec<T>&);                                                      \
  template double solve_phase(const CycleSpec<T>&);                                                        \
  template GiesekerFit gieseker_limit_residual(const Form<T>&, const Form<T>&);                            \
  template ACycleResiduals a_cycle_residuals(const CycleSpec<T>&, const Form<T>&);                         \
  template DeformedHarmonicResiduals deformed_harmonic_residual(const TrigForm<T>&, const CycleSpec<T>&);  \
  template Complex<T> a_correlation(const std::vector<Form<T>>&, const T&);                                \
  template Complex<T> b_correlation(const std::vector<TangentDatum<T>>&, const Form<T>&, int, const T&);   \
  template T presymplectic_pairing(const TangentDatum<T>&, const TangentDatum<T>&, const CycleSpec<T>&, const T&);

SYZLAB_INSTANTIATE_CYCLES(double)
SYZLAB_INSTANTIATE_CYCLES(Rational)

}  // namespace syzlab
