#include "syzlab/gvbps.hpp"

#include <string>

#include "syzlab/errors.hpp"
#include "syzlab/exterior.hpp"

namespace syzlab {

namespace {

std::string cell(int d, int r) { return "(d=" + std::to_string(d) + ", r=" + std::to_string(r) + ")"; }

Rational integer_power(const Rational& base, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Power series product truncated to J+1 coefficients (in x^2).
std::vector<Rational> series_mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

QTSeries::QTSeries(int D, int R) : D_(D), R_(R) {
  if (D < 1 || R < 0) throw ValidationError("QTSeries: need D >= 1 and R >= 0");
}

void QTSeries::check(int d, int r) const {
  if (d < 1 || d > D_ || r < 0 || r > R_) throw ValidationError("QTSeries: entry " + cell(d, r) + " outside window");
}

Rational QTSeries::get(int d, int r) const {
  check(d, r);
  auto it = entries_.find({d, r});
  return it == entries_.end() ? Rational(0) : it->second;
}

void QTSeries::set(int d, int r, const Rational& v) {
  check(d, r);
  if (v.is_zero())
    entries_.erase({d, r});
  else
    entries_[{d, r}] = v;
}

void QTSeries::add(int d, int r, const Rational& v) { set(d, r, get(d, r) + v); }

BpsTable::BpsTable(int D, int G) : D_(D), G_(G) {
  if (D < 1 || G < 0) throw ValidationError("BpsTable: need D >= 1 and G >= 0");
}

Rational BpsTable::get(int d, int g) const {
  auto it = entries_.find({d, g});
  return it == entries_.end() ? Rational(0) : it->second;
}

void BpsTable::set(int d, int g, const Rational& v) {
  if (d < 1 || g < 0) throw ValidationError("BpsTable: bad index (d=" + std::to_string(d) + ", g=" + std::to_string(g) + ")");
  if (d > D_) D_ = d;
  if (g > G_) G_ = g;
  if (v.is_zero())
    entries_.erase({d, g});
  else
    entries_[{d, g}] = v;
}

std::vector<Rational> bernoulli_numbers(int m) {
  std::vector<Rational> B(m + 1, Rational(0));
  B[0] = 1;
  for (int k = 1; k <= m; ++k) {
    Rational s(0);
    BigInt binom(1);  // C(k+1, i)
    for (int i = 0; i < k; ++i) {
      s += Rational(binom) * B[i];
      binom = binom * (k + 1 - i) / (i + 1);
    }
    B[k] = -s / (k + 1);
  }
  return B;
}

std::vector<Rational> sine_kernel(int g, int J) {
  if (g < 0 || J < 0) throw ValidationError("sine_kernel: negative index");
  if (g == 0) {
    // (x/2)^2 csc^2(x/2) = Σ_j (-1)^{j+1} (2j-1) B_{2j} x^{2j} / (2j)!
    auto B = bernoulli_numbers(2 * J);
    std::vector<Rational> out(J + 1);
    Rational fact(1);
    for (int j = 0; j <= J; ++j) {
      if (j > 0) fact *= Rational((2 * j - 1) * (2 * j));
      Rational c = Rational(2 * j - 1) * B[2 * j] / fact;
      out[j] = (j % 2 == 0) ? Rational(-c) : c;
    }
    return out;
  }
  // S(x) = Σ_i (-1)^i x^{2i} / (4^i (2i+1)!)
  std::vector<Rational> S(J + 1);
  Rational denom(1);
  for (int i = 0; i <= J; ++i) {
    if (i > 0) denom *= Rational(4 * (2 * i) * (2 * i + 1));
    S[i] = (i % 2 ? Rational(-1) : Rational(1)) / denom;
  }
  std::vector<Rational> out(J + 1, Rational(0));
  out[0] = 1;
  for (int p = 0; p < 2 * g - 2; ++p) out = series_mul(out, S);
  return out;
}

QTSeries gw_from_bps(const BpsTable& b, int D, int R) {
  QTSeries N(D, R);
  for (const auto& [key, n] : b.entries()) {
    auto [d0, g] = key;
    if (d0 > D || g > R) throw ValidationError("gw_from_bps: truncation drops BPS entry n^" + std::to_string(g) + "_" + std::to_string(d0) + "; first lost term is " + cell(d0, g));
  }
  std::map<int, std::vector<Rational>> kernels;
  for (const auto& [key, n] : b.entries()) {
    auto [d0, g] = key;
    auto& s = kernels.try_emplace(g, sine_kernel(g, R - g)).first->second;
    for (int k = 1; k * d0 <= D; ++k) {
      Rational k2(k * k);
      // (1/k) k^{2r-2} = k^{2r-3}
      Rational scale = integer_power(k2, g) / Rational(k * k * k);
      for (int r = g; r <= R; ++r) {
        N.add(k * d0, r, n * scale * s[r - g]);
        scale *= k2;
      }
    }
  }
  return N;
}

BpsTable bps_from_gw(const QTSeries& N) {
  const int D = N.D(), R = N.R();
  BpsTable b(D, R);
  std::vector<std::vector<Rational>> kernels;
  for (int g = 0; g <= R; ++g) kernels.push_back(sine_kernel(g, R - g));
  for (int d = 1; d <= D; ++d) {
    std::vector<Rational> rest(R + 1);
    for (int r = 0; r <= R; ++r) rest[r] = N.get(d, r);
    // Remove multiple-cover contributions of lower degrees d0 = d/k.
    for (int k = 2; k <= d; ++k) {
      if (d % k) continue;
      int d0 = d / k;
      Rational k2(k * k);
      for (int g = 0; g <= R; ++g) {
        Rational n = b.get(d0, g);
        if (n.is_zero()) continue;
        Rational scale = integer_power(k2, g) / Rational(k * k * k);
        for (int r = g; r <= R; ++r) {
          rest[r] -= n * scale * kernels[g][r - g];
          scale *= k2;
        }
      }
    }
    // The k = 1 block is unitriangular in (g, r).
    for (int r = 0; r <= R; ++r) {
      Rational n = rest[r];
      for (int g = 0; g < r; ++g) n -= b.get(d, g) * kernels[g][r - g];
      b.set(d, r, n);
    }
  }
  return b;
}

IntegralityReport integrality_check(const BpsTable& b) {
  IntegralityReport rep;
  for (const auto& [key, v] : b.entries())
    if (!is_integer(v)) {
      rep.ok = false;
      rep.violations.push_back({key.first, key.second, v});
    }
  return rep;
}

std::vector<Rational> yukawa_A(const Rational& classical, const std::vector<Rational>& N0, int D) {
  if (D < 0) throw ValidationError("yukawa_A: negative order");
  if (static_cast<std::size_t>(D) > N0.size()) throw ValidationError("yukawa_A: order exceeds the supplied invariants");
  std::vector<Rational> c(D + 1, Rational(0));
  c[0] = classical;
  for (int d = 1; d <= D; ++d) {
    Rational w = N0[d - 1] * Rational(d * d * d);
    for (int m = d; m <= D; m += d) c[m] += w;
  }
  return c;
}

ComplexQ yukawa_B_semiflat(const Matrix<Rational>& H, const std::vector<Deformation>& zeta, const Rational& volume) {
  const int n = static_cast<int>(H.rows());
  if (n < 1 || H.cols() != H.rows()) throw ValidationError("yukawa_B: Hessian must be square");
  if (static_cast<int>(zeta.size()) != n) throw ValidationError("yukawa_B: need exactly n deformation classes");
  for (const auto& z : zeta)
    if (static_cast<int>(z.u.size()) != n || static_cast<int>(z.a.size()) != n)
      throw ValidationError("yukawa_B: deformation class has wrong length");

  const Layout layout = Layout::phase_space(n, Frame::dual);
  std::vector<ExactForm> dz, dzbar;
  for (int j = 0; j < n; ++j) {
    ExactForm f(layout);
    for (int k = 0; k < n; ++k) f.add_term(Mask{1} << k, ComplexQ(H(j, k)));
    f.add_term(Mask{1} << (n + j), ComplexQ(Rational(0), Rational(1)));
    dzbar.push_back(f.conj());
    dz.push_back(std::move(f));
  }
  // ∂/∂z_j are the first n columns of P^{-1}, where P stacks the dz and dz̄ rows.
  Matrix<ComplexQ> P(2 * n, 2 * n);
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < 2 * n; ++c) {
      P(j, c) = dz[j].coefficient(Mask{1} << c);
      P(n + j, c) = dzbar[j].coefficient(Mask{1} << c);
    }
  Matrix<ComplexQ> Pinv = inverse(P);

  ExactForm Omega = ExactForm::constant(layout, ComplexQ(1));
  for (const auto& f : dz) Omega = wedge(Omega, f);

  ExactForm contracted = Omega;
  ExactForm antiholo = ExactForm::constant(layout, ComplexQ(1));
  for (const auto& z : zeta) {
    std::vector<ComplexQ> v(2 * n, ComplexQ(0));
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < 2 * n; ++c) v[c] += z.u[j] * Pinv(c, j);
    contracted = contract(std::span<const ComplexQ>(v), contracted);
    ExactForm a(layout);
    for (int k = 0; k < n; ++k) a += dzbar[k] * z.a[k];
    antiholo = wedge(antiholo, a);
  }
  ComplexQ num = top_coefficient(wedge(Omega, wedge(antiholo, contracted)));
  ComplexQ den = top_coefficient(wedge(Omega, Omega.conj()));
  return num / den * ComplexQ(volume);
}

Sl2Single tensor_power_decompose(int g) {
  if (g < 0) throw ValidationError("tensor_power_decompose: negative power");
  Sl2Single cur{{0, BigInt(1)}};
  for (int step = 0; step < g; ++step) {
    Sl2Single next;
    for (const auto& [w, m] : cur) {
      next[w + 1] += m;
      if (w > 0) next[w - 1] += m;
      next[w] += 2 * m;
    }
    cur = std::move(next);
  }
  return cur;
}

Sl2Single sl2_left_content(const Sl2Table& N) {
  Sl2Single out;
  for (const auto& [key, m] : N) {
    auto [tj, tk] = key;
    if (tj < 0 || tk < 0) throw ValidationError("Sl2Table: negative weight");
    BigInt c = m * (tk + 1);
    if (tk % 2) c = -c;
    out[tj] += c;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

std::map<int, BigInt> bps_from_sl2(const Sl2Table& N) {
  Sl2Single rest = sl2_left_content(N);
  std::map<int, BigInt> n;
  while (!rest.empty()) {
    auto top = std::prev(rest.end());
    int g = top->first;  // [V_{1/2}+2V_0]^{⊗g} has top weight g/2, multiplicity 1
    BigInt c = top->second;
    n[g] = c;
    for (const auto& [w, m] : tensor_power_decompose(g)) {
      rest[w] -= c * m;
      if (rest[w] == 0) rest.erase(w);
    }
  }
  return n;
}

}  // namespace syzlab
