#include "syzlab/sl2actions.hpp"

#include <map>

#include "syzlab/errors.hpp"

namespace syzlab {

namespace {

Matrix<Rational> minor(const OpMatrix& g, Mask rows, Mask cols) {
  std::vector<int> r, c;
  for (int i = 0; i < 32; ++i) {
    if (rows >> i & 1) r.push_back(i);
    if (cols >> i & 1) c.push_back(i);
  }
  Matrix<Rational> m(r.size(), r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) m(i, j) = g(r[i], c[j]);
  return m;
}

OpMatrix real_part_checked(const Matrix<ComplexQ>& m) {
  OpMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_zero(m(i, j).im)) throw ValidationError("operator has complex entries");
      out(i, j) = m(i, j).re;
    }
  return out;
}

}  // namespace

OpMatrix operator_matrix(Layout source, Layout target, const std::function<ExactForm(const ExactForm&)>& op) {
  const std::size_t ns = std::size_t{1} << source.generators(), nt = std::size_t{1} << target.generators();
  Matrix<ComplexQ> m(nt, ns);
  for (Mask c = 0; c < ns; ++c) {
    ExactForm image = op(ExactForm::monomial(source, c));
    if (!(image.layout() == target)) throw ValidationError("operator_matrix: image in unexpected layout");
    for (const auto& [r, v] : image.terms()) m(r, c) = v;
  }
  return real_part_checked(m);
}

OpMatrix exterior_gram(const OpMatrix& g, int n) {
  const std::size_t dim = std::size_t{1} << (2 * n);
  if (g.rows() != static_cast<std::size_t>(2 * n) || g.cols() != g.rows()) throw ValidationError("exterior_gram: covector Gram matrix must be 2n x 2n");
  OpMatrix G(dim, dim);
  for (Mask a = 0; a < dim; ++a)
    for (Mask b = 0; b < dim; ++b) {
      if (degree_of(a) != degree_of(b)) continue;
      G(a, b) = degree_of(a) == 0 ? Rational(1) : determinant(minor(g, a, b));
    }
  return G;
}

Sl2Triple lefschetz_triple(const ExactForm& omega, const OpMatrix& covector_gram) {
  const int n = omega.n();
  if (!omega.layout().phase || !omega.is_homogeneous(2)) throw ValidationError("lefschetz_triple: ω must be a 2-form on phase space");
  if (is_zero(top_coefficient(power(omega, n)))) throw ValidationError("lefschetz_triple: ω is degenerate");
  const Layout l = omega.layout();
  OpMatrix L = operator_matrix(l, l, [&](const ExactForm& f) { return wedge(omega, f); });
  OpMatrix G = exterior_gram(covector_gram, n);
  OpMatrix Lambda = inverse(G) * L.transpose() * G;
  OpMatrix H = commutator(L, Lambda);
  return {std::move(L), std::move(Lambda), std::move(H)};
}

Sl2Triple lefschetz_triple(const ExactForm& omega) {
  return lefschetz_triple(omega, OpMatrix::identity(2 * omega.n()));
}

OpMatrix fourier_matrix(int n) {
  return operator_matrix(Layout::phase_space(n), Layout::phase_space(n, Frame::dual),
                         [](const ExactForm& f) { return fiber_fourier(f); });
}

Sl2Triple mirror_sl2(const ExactForm& omega_W, const OpMatrix& covector_gram) {
  if (omega_W.layout().frame != Frame::dual) throw ValidationError("mirror_sl2: ω_W must be written in the dual fiber coframe");
  Sl2Triple w = lefschetz_triple(omega_W, covector_gram);
  OpMatrix F = fourier_matrix(omega_W.n());
  OpMatrix Finv = F.transpose();  // signed permutation
  return {Finv * w.L * F, Finv * w.Lambda * F, Finv * w.H * F};
}

Sl2Triple mirror_sl2(const ExactForm& omega_W) {
  return mirror_sl2(omega_W, OpMatrix::identity(2 * omega_W.n()));
}

namespace {

double relation_defect(const Sl2Triple& t) {
  double m = (commutator(t.H, t.L) - t.L * Rational(2)).max_abs();
  m = std::max(m, (commutator(t.H, t.Lambda) + t.Lambda * Rational(2)).max_abs());
  m = std::max(m, (commutator(t.L, t.Lambda) - t.H).max_abs());
  return m;
}

}  // namespace

So4Report so4_check(const Sl2Triple& a, const Sl2Triple& b) {
  So4Report r;
  r.first_relations = relation_defect(a);
  r.second_relations = relation_defect(b);
  for (const OpMatrix* x : {&a.L, &a.Lambda, &a.H})
    for (const OpMatrix* y : {&b.L, &b.Lambda, &b.H}) r.cross = std::max(r.cross, commutator(*x, *y).max_abs());
  return r;
}

bool hard_lefschetz_bijective(const OpMatrix& L, int n) {
  const Mask dim = Mask{1} << (2 * n);
  for (int k = 0; k <= n; ++k) {
    OpMatrix P = OpMatrix::identity(dim);
    for (int i = 0; i < k; ++i) P = L * P;
    std::vector<Mask> src, dst;
    for (Mask m = 0; m < dim; ++m) {
      if (degree_of(m) == n - k) src.push_back(m);
      if (degree_of(m) == n + k) dst.push_back(m);
    }
    OpMatrix block(dst.size(), src.size());
    for (std::size_t i = 0; i < dst.size(); ++i)
      for (std::size_t j = 0; j < src.size(); ++j) block(i, j) = P(dst[i], src[j]);
    if (rank(block) != src.size() || src.size() != dst.size()) return false;
  }
  return true;
}

std::vector<WeightRow> weight_table(const OpMatrix& H, const OpMatrix& Hp, int n) {
  const Mask dim = Mask{1} << (2 * n);
  for (const OpMatrix* m : {&H, &Hp})
    for (Mask i = 0; i < dim; ++i)
      for (Mask j = 0; j < dim; ++j)
        if (i != j && !is_zero((*m)(i, j))) throw ValidationError("weight_table: operator is not diagonal in the monomial basis");
  std::map<std::tuple<int, int, int>, int> counts;
  for (Mask m = 0; m < dim; ++m) {
    const Rational &h = H(m, m), &hp = Hp(m, m);
    if (!is_integer(h) || !is_integer(hp)) throw ValidationError("weight_table: non-integral weight");
    ++counts[{degree_of(m), static_cast<int>(numerator(h)), static_cast<int>(numerator(hp))}];
  }
  std::vector<WeightRow> rows;
  for (const auto& [k, c] : counts) rows.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), c});
  return rows;
}

Sl2Table decompose_so4(const std::vector<WeightRow>& weights) {
  std::map<std::pair<int, int>, long> m;
  for (const auto& w : weights) m[{w.h, w.h_prime}] += w.multiplicity;
  auto mult = [&](int a, int b) {
    auto it = m.find({a, b});
    return it == m.end() ? 0L : it->second;
  };
  Sl2Table out;
  for (const auto& [key, unused] : m) {
    auto [a, b] = key;
    if (a < 0 || b < 0) continue;
    long c = mult(a, b) - mult(a + 2, b) - mult(a, b + 2) + mult(a + 2, b + 2);
    if (c < 0) throw ValidationError("decompose_so4: weights are not an so(4) character");
    if (c > 0) out[{a, b}] = c;
  }
  return out;
}

}  // namespace syzlab
