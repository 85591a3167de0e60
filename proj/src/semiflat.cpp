#include "syzlab/semiflat.hpp"

#include <algorithm>
#include <cmath>

#include "syzlab/errors.hpp"

namespace syzlab {

const char* to_string(Side s) { return s == Side::M ? "M" : "W"; }

namespace {

template <class T>
bool symmetric(const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

// Sylvester's criterion; exact for rational entries.
template <class T>
bool leading_minors_positive(const Matrix<T>& m) {
  for (std::size_t k = 1; k <= m.rows(); ++k) {
    Matrix<T> sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(i, j);
    if (!(determinant(sub) > T(0))) return false;
  }
  return true;
}

template <class T>
void check_hessian(const Matrix<T>& H, const char* who) {
  if (H.rows() == 0 || H.rows() != H.cols()) throw ValidationError(std::string(who) + ": Hessian must be square and nonempty");
  if (!symmetric(H)) throw ValidationError(std::string(who) + ": Hessian is not symmetric");
  if (!leading_minors_positive(H)) throw ValidationError(std::string(who) + ": Hessian is not positive definite");
}

template <class T>
Form<T> generator(Layout l, int idx) {
  return Form<T>::generator(l, idx);
}

template <class T>
Form<T> hessian_form(const Matrix<T>& A, Layout l) {
  const int n = l.n;
  Form<T> out(l);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (!is_zero(A(j, k))) out += wedge(generator<T>(l, j), generator<T>(l, n + k)) * Complex<T>(A(j, k));
  return out;
}

template <class T>
Matrix<T> block_diag(const Matrix<T>& a, const Matrix<T>& b) {
  const std::size_t n = a.rows();
  Matrix<T> g(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      g(i, j) = a(i, j);
      g(n + i, n + j) = b(i, j);
    }
  return g;
}

template <class T>
Form<T> holomorphic_volume(Layout l, const std::vector<Form<T>>& fiber, const T& scale) {
  Form<T> out = Form<T>::constant(l, Complex<T>(T(1)));
  for (int j = 0; j < l.n; ++j) out = wedge(out, generator<T>(l, j) + fiber[j] * Complex<T>(T(0), scale));
  return out;
}

// W-side structure from H⁻¹ and the coframe shift S = ηH⁻¹.
template <class T>
SemiflatStructure<T> w_structure(const Matrix<T>& Hinv, const Matrix<T>* S) {
  const int n = static_cast<int>(Hinv.rows());
  const Layout l = Layout::phase_space(n, Frame::dual);
  std::vector<Form<T>> theta;
  Matrix<T> B = Matrix<T>::identity(2 * n);
  for (int k = 0; k < n; ++k) {
    Form<T> t = generator<T>(l, n + k);
    if (S)
      for (int j = 0; j < n; ++j)
        if (!is_zero((*S)(k, j))) {
          t += generator<T>(l, j) * Complex<T>((*S)(k, j));
          B(n + k, j) = (*S)(k, j);
        }
    theta.push_back(std::move(t));
  }
  SemiflatStructure<T> s;
  s.side = Side::W;
  s.n = n;
  s.g = B.transpose() * block_diag(Hinv, Hinv) * B;
  s.omega = Form<T>(l);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (!is_zero(Hinv(j, k))) s.omega += wedge(generator<T>(l, j), theta[k]) * Complex<T>(Hinv(j, k));
  s.Omega = holomorphic_volume(l, theta, T(1));
  if (S) s.beta = Form<T>(l);
  return s;
}

template <class T>
Complex<T> zero_section_coefficient(const Form<T>& f) {
  const int n = f.n();
  std::vector<std::vector<T>> frame(n, std::vector<T>(2 * n, T(0)));
  for (int j = 0; j < n; ++j) frame[j][j] = T(1);
  return top_coefficient(restrict_to_frame(f, frame));
}

double im_rotated(std::complex<double> z, double angle) { return std::abs((std::polar(1.0, angle) * z).imag()); }

Matrix<double> node_hessian(const GridPotential& f, std::size_t node, const char* who) {
  if (node >= f.size() || !f.is_interior(node)) throw ValidationError(std::string(who) + ": node is not interior");
  return to_matrix(hessian(f, node));
}

Rational factorial(int n) {
  Rational f(1);
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

Matrix<double> to_matrix(const Eigen::MatrixXd& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

Matrix<Rational> to_exact(const Matrix<double>& m) {
  Matrix<Rational> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = exact(m(i, j));
  return out;
}

template <class T>
SemiflatStructure<T> structure_M(const Matrix<T>& H, const Matrix<T>* eta) {
  check_hessian(H, "build_M");
  const int n = static_cast<int>(H.rows());
  const Layout l = Layout::phase_space(n);
  SemiflatStructure<T> s;
  s.side = Side::M;
  s.n = n;
  s.g = block_diag(H, H);
  s.omega = hessian_form(H, l);
  std::vector<Form<T>> dy;
  for (int j = 0; j < n; ++j) dy.push_back(generator<T>(l, n + j));
  s.Omega = holomorphic_volume(l, dy, T(1));
  if (eta) {
    if (eta->rows() != H.rows() || eta->cols() != H.cols()) throw ValidationError("build_M: B-field shape mismatch");
    s.beta = hessian_form(*eta, l);
  }
  return s;
}

template <class T>
SemiflatStructure<T> structure_W(const Matrix<T>& H, const Matrix<T>* eta) {
  check_hessian(H, "build_W");
  Matrix<T> Hinv = inverse(H);
  if (!eta) return w_structure<T>(Hinv, nullptr);
  if (eta->rows() != H.rows() || eta->cols() != H.cols()) throw ValidationError("build_W: B-field shape mismatch");
  Matrix<T> S = *eta * Hinv;
  return w_structure<T>(Hinv, &S);
}

SemiflatStructure<double> build_M(const GridPotential& phi, std::size_t node, const GridPotential* eta) {
  Matrix<double> H = node_hessian(phi, node, "build_M");
  std::optional<Matrix<double>> E;
  if (eta) E = to_matrix(hessian(*eta, node));
  auto s = structure_M(H, E ? &*E : nullptr);
  auto x = phi.coords(node);
  s.at_point.assign(x.data(), x.data() + x.size());
  return s;
}

SemiflatStructure<double> build_W(const GridPotential& phi, std::size_t node, const GridPotential* eta) {
  Matrix<double> H = node_hessian(phi, node, "build_W");
  std::optional<Matrix<double>> E;
  if (eta) E = to_matrix(hessian(*eta, node));
  auto s = structure_W(H, E ? &*E : nullptr);
  auto x = phi.coords(node);
  s.at_point.assign(x.data(), x.data() + x.size());
  return s;
}

SemiflatStructure<double> build_W_from_dual(const GridPotential& psi, const Eigen::VectorXd& y) {
  auto Hpsi = interpolate_hessian(psi, y);
  if (!Hpsi) throw ValidationError("build_W_from_dual: point is not surrounded by interior dual nodes");
  Matrix<double> Hinv = to_matrix(*Hpsi);
  check_hessian(Hinv, "build_W_from_dual");
  auto s = w_structure<double>(Hinv, nullptr);
  s.at_point.assign(y.data(), y.data() + y.size());
  return s;
}

template <class T>
Complex<T> cy_normalization_residual(const SemiflatStructure<T>& s) {
  const int n = s.n;
  Complex<T> lhs = top_coefficient(wedge(s.Omega, s.Omega.conj()));
  Complex<T> k = i_power<T>(n) * Complex<T>(T((n * (n + 1) / 2) % 2 ? -(1 << n) : (1 << n)));
  Complex<T> rhs = k * top_coefficient(power(s.omega, n));
  Rational f = factorial(n);
  if constexpr (std::is_same_v<T, Rational>) {
    rhs = rhs / Complex<T>(f);
  } else {
    rhs = rhs / Complex<T>(f.convert_to<double>());
  }
  return lhs - rhs;
}

RoundTripReport mirror_roundtrip(const GridPotential& phi, const DualGridSpec& spec, const DualityOptions& opt,
                                 GridPotential* psi_out) {
  GridPotential psi = legendre_transform(phi, spec);
  DualityResiduals d = duality_residuals(phi, psi, opt);
  RoundTripReport r;
  r.hessian_inverse = d.hessian_inverse;
  r.det_product = d.det_product;
  r.matched = d.matched;
  r.margin = d.margin;
  GridPotential back;
  r.involution = involution_residual(phi, psi, opt, &back);
  for (std::size_t i : matched_nodes(phi, psi, opt)) {
    if (!back.is_interior(i)) continue;
    ++r.compared;
    auto a = build_M(phi, i);
    auto b = build_M(back, i);
    r.structure = std::max(r.structure, to_eigen(a.g - b.g).cwiseAbs().maxCoeff());
  }
  if (psi_out) *psi_out = std::move(psi);
  return r;
}

MetricAgreement w_metric_agreement(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt) {
  MetricAgreement m;
  for (std::size_t i : matched_nodes(phi, psi, opt)) {
    auto a = build_W(phi, i);
    auto b = build_W_from_dual(psi, gradient(phi, i));
    m.max_deviation = std::max(m.max_deviation, to_eigen(a.g - b.g).cwiseAbs().maxCoeff());
    ++m.matched;
  }
  return m;
}

double omega_closedness_defect(const GridPotential& phi) {
  const int n = phi.n;
  double defect = 0;
  for (std::size_t i : phi.interior_nodes()) {
    std::vector<Eigen::MatrixXd> dH;
    bool ok = true;
    for (int l = 0; l < n && ok; ++l) {
      auto idx = phi.multi_index(i);
      auto up = idx, down = idx;
      ++up[l];
      --down[l];
      std::size_t a = phi.node_at(up), b = phi.node_at(down);
      if (!phi.is_interior(a) || !phi.is_interior(b)) {
        ok = false;
        break;
      }
      dH.push_back((hessian(phi, a) - hessian(phi, b)) / (2 * phi.h));
    }
    if (!ok) continue;
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) defect = std::max(defect, std::abs(dH[l](j, k) - dH[j](l, k)));
  }
  return defect;
}

double BFieldMirrorReport::max() const {
  return std::max({m_normalization, m_bfield, m_section, w_normalization, w_section, w_bfield});
}

BFieldMirrorReport bfield_mirror_check(const Eigen::MatrixXd& H, const Eigen::MatrixXd& eta, double theta, double phi_angle) {
  Matrix<double> h = to_matrix(H), e = to_matrix(eta);
  auto M = structure_M(h, &e);
  auto W = structure_W(h, &e);
  const int n = M.n;
  BFieldMirrorReport r;
  r.m_normalization = magnitude(cy_normalization_residual(M));
  r.m_bfield = im_rotated(to_std(top_coefficient(power(M.omega + *M.beta * ComplexD(0, 1), n))), theta);
  r.m_section = im_rotated(to_std(zero_section_coefficient(M.Omega)), phi_angle);
  r.w_normalization = magnitude(cy_normalization_residual(W));
  r.w_section = im_rotated(to_std(zero_section_coefficient(W.Omega)), theta);
  r.w_bfield = im_rotated(to_std(top_coefficient(power(W.omega + *W.beta * ComplexD(0, 1), n))), phi_angle);
  return r;
}

BFieldMirrorReport bfield_mirror_check(const GridPotential& phi, const GridPotential& eta, double theta, double phi_angle) {
  auto nodes = phi.interior_nodes();
  if (nodes.empty()) throw ValidationError("bfield_mirror_check: no interior nodes");
  if (eta.dims != phi.dims) throw ValidationError("bfield_mirror_check: η is on a different grid");
  Eigen::MatrixXd H = hessian(phi, nodes.front()), E = hessian(eta, nodes.front());
  const double tol = 1e-8 * (1 + H.cwiseAbs().maxCoeff() + E.cwiseAbs().maxCoeff());
  for (std::size_t i : nodes)
    if ((hessian(phi, i) - H).cwiseAbs().maxCoeff() > tol || (hessian(eta, i) - E).cwiseAbs().maxCoeff() > tol)
      throw ValidationError("bfield_mirror_check: Hessians are not constant");
  return bfield_mirror_check(H, E, theta, phi_angle);
}

template <class T>
SemiflatStructure<T> t_family(const Matrix<T>& H, const T& t) {
  if (!(t > T(0))) throw ValidationError("t_family: t must be positive");
  auto s = structure_M(H);
  s.g = block_diag(H * (T(1) / t), H * t);
  const Layout l = Layout::phase_space(s.n);
  std::vector<Form<T>> dy;
  for (int j = 0; j < s.n; ++j) dy.push_back(generator<T>(l, s.n + j));
  s.Omega = holomorphic_volume(l, dy, t);
  return s;
}

SemiflatStructure<double> t_family(const GridPotential& phi, std::size_t node, double t) {
  auto s = t_family(node_hessian(phi, node, "t_family"), t);
  auto x = phi.coords(node);
  s.at_point.assign(x.data(), x.data() + x.size());
  return s;
}

double torus_diameter(const Eigen::MatrixXd& G, int m) {
  const int n = static_cast<int>(G.rows());
  if (m <= 0) m = n <= 2 ? 16 : 8;
  std::vector<int> shift(n, -1);
  std::vector<Eigen::VectorXd> lattice;
  for (;;) {
    Eigen::VectorXd k(n);
    for (int j = 0; j < n; ++j) k[j] = shift[j];
    lattice.push_back(k);
    int j = 0;
    while (j < n && ++shift[j] > 2) shift[j++] = -1;
    if (j == n) break;
  }
  std::vector<int> idx(n, 0);
  double diam = 0;
  for (;;) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = static_cast<double>(idx[j]) / m;
    double best = INFINITY;
    for (const auto& k : lattice) {
      Eigen::VectorXd d = x - k;
      best = std::min(best, d.dot(G * d));
    }
    diam = std::max(diam, best);
    int j = 0;
    while (j < n && ++idx[j] == m) idx[j++] = 0;
    if (j == n) break;
  }
  return std::sqrt(diam);
}

TFamilyReport rescaled_limit_report(const Matrix<Rational>& H, const std::vector<Rational>& t_list) {
  check_hessian(H, "rescaled_limit_report");
  const std::size_t n = H.rows();
  Rational h2(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h2 += H(i, j) * H(i, j);
  Eigen::MatrixXd Hd(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Hd(i, j) = H(i, j).convert_to<double>();
  TFamilyReport rep;
  std::vector<Rational> squared_norms;
  for (const Rational& t : t_list) {
    auto s = t_family(H, t);
    TFamilyRow row;
    row.t = t;
    row.det_g = determinant(s.g);
    Matrix<Rational> scaled = s.g * t;
    Rational sq(0), defect(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        sq += scaled(n + i, n + j) * scaled(n + i, n + j);
        Rational d = abs(scaled(i, j) - H(i, j));
        if (d > defect) defect = d;
      }
    squared_norms.push_back(sq);
    row.fiber_norm = std::sqrt(sq.convert_to<double>());
    row.horizontal_defect = defect;
    row.fiber_diameter = torus_diameter(Hd * t.convert_to<double>());
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k + 1 < squared_norms.size(); ++k)
    rep.norm_ratios.push_back(std::sqrt(Rational(squared_norms[k] / squared_norms[k + 1]).convert_to<double>()));
  rep.volume_constant = std::all_of(rep.rows.begin(), rep.rows.end(), [&](const TFamilyRow& r) { return r.det_g == rep.rows.front().det_g; });
  return rep;
}

nlohmann::ordered_json structure_record(const SemiflatStructure<double>& s) {
  nlohmann::ordered_json j;
  j["side"] = to_string(s.side);
  j["point"] = s.at_point;
  const int dim = 2 * s.n;
  nlohmann::ordered_json g = nlohmann::ordered_json::array(), w = nlohmann::ordered_json::array();
  for (int a = 0; a < dim; ++a) {
    std::vector<double> grow, wrow;
    for (int b = 0; b < dim; ++b) {
      grow.push_back(s.g(a, b));
      double c = a == b ? 0.0 : s.omega.coefficient((Mask(1) << a) | (Mask(1) << b)).re;
      wrow.push_back(a < b || c == 0 ? c : -c);
    }
    g.push_back(grow);
    w.push_back(wrow);
  }
  j["g"] = g;
  j["omega"] = w;
  nlohmann::ordered_json re = nlohmann::ordered_json::object(), im = nlohmann::ordered_json::object();
  for (const auto& [mask, c] : s.Omega.terms()) {
    std::string name = monomial_name(s.Omega.layout(), mask);
    re[name] = c.re;
    im[name] = c.im;
  }
  j["Omega_re"] = re;
  j["Omega_im"] = im;
  return j;
}

#define SYZLAB_INSTANTIATE_SEMIFLAT(T)                                                  \
  template SemiflatStructure<T> structure_M(const Matrix<T>&, const Matrix<T>*);        \
  template SemiflatStructure<T> structure_W(const Matrix<T>&, const Matrix<T>*);        \
  template Complex<T> cy_normalization_residual(const SemiflatStructure<T>&);           \
  template SemiflatStructure<T> t_family(const Matrix<T>&, const T&);

SYZLAB_INSTANTIATE_SEMIFLAT(double)
SYZLAB_INSTANTIATE_SEMIFLAT(Rational)

}  // namespace syzlab
