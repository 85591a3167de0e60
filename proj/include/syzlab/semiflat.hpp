#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "syzlab/exterior.hpp"
#include "syzlab/grid.hpp"
#include "syzlab/legendre.hpp"
#include "syzlab/matrix.hpp"

namespace syzlab {

enum class Side { M, W };

const char* to_string(Side s);

/// Metric, Kähler form and holomorphic volume form at one base point.
/// M-side forms use the primal phase layout (dx^j, dy^j); W-side forms use the
/// dual layout, whose generators are dx_j and dy_j.
template <class T>
struct SemiflatStructure {
  Side side = Side::M;
  int n = 0;
  std::vector<double> at_point;
  Matrix<T> g;  // 2n×2n in the generator order of the layout
  Form<T> omega;
  Form<T> Omega;
  std::optional<Form<T>> beta;
};

/// g = H ⊕ H, ω = Σ H_jk dx^j∧dy^k, Ω = Π(dx^j + i dy^j), β = Σ η_jk dx^j∧dy^k.
/// Throws ValidationError unless H is symmetric positive definite.
template <class T>
SemiflatStructure<T> structure_M(const Matrix<T>& H, const Matrix<T>* eta = nullptr);

/// Dual coordinates dx_j = Σ H_jk dx^k with fiber coframe θ_j = dy_j + Σ (ηH⁻¹)_jl dx_l:
/// g = Σ H^{jk}(dx_j dx_k + θ_j θ_k), ω = Σ H^{jk} dx_j∧θ_k, Ω = Π(dx_j + iθ_j).
/// With η the W-side B-field is zero.
template <class T>
SemiflatStructure<T> structure_W(const Matrix<T>& H, const Matrix<T>* eta = nullptr);

/// Structures from the discrete Hessian of φ (and of η) at an interior node.
SemiflatStructure<double> build_M(const GridPotential& phi, std::size_t node, const GridPotential* eta = nullptr);
SemiflatStructure<double> build_W(const GridPotential& phi, std::size_t node, const GridPotential* eta = nullptr);

/// W-side structure whose coefficients are D²ψ(y) interpolated from the dual grid.
SemiflatStructure<double> build_W_from_dual(const GridPotential& psi, const Eigen::VectorXd& y);

/// top(Ω∧Ω̄) − (−1)^{n(n+1)/2} 2^n i^n top(ω^n)/n!.
template <class T>
Complex<T> cy_normalization_residual(const SemiflatStructure<T>& s);

struct RoundTripReport {
  double involution = 0;       // |L(L(φ)) − φ| modulo affine terms
  double structure = 0;        // max entry of g_M(L(L(φ))) − g_M(φ)
  double hessian_inverse = 0;
  double det_product = 0;
  std::size_t matched = 0;
  std::size_t compared = 0;    // matched nodes where the double transform has a full stencil
  double margin = 0;
};

/// Transforms φ to the dual grid and back. `psi_out` receives the dual potential.
RoundTripReport mirror_roundtrip(const GridPotential& phi, const DualGridSpec& spec = {}, const DualityOptions& opt = {},
                                 GridPotential* psi_out = nullptr);

struct MetricAgreement {
  double max_deviation = 0;
  std::size_t matched = 0;
};

/// g_W through the inverse Hessian of φ against g_W through D²ψ at ∇φ(x), over matched nodes.
MetricAgreement w_metric_agreement(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt = {});

/// max |∂_l φ_jk − ∂_j φ_lk| by central differences of the Hessian field, over
/// interior nodes whose neighbours are interior. Zero iff dω_M = 0 discretely.
double omega_closedness_defect(const GridPotential& phi);

struct BFieldMirrorReport {
  double m_normalization = 0;  // ω^n against ΩΩ̄
  double m_bfield = 0;         // |Im e^{iθ} top((ω+iβ)^n)|
  double m_section = 0;        // |Im e^{iφ} Ω| on the zero section
  double w_normalization = 0;
  double w_section = 0;        // |Im e^{iθ} Ω_W| on the zero section
  double w_bfield = 0;         // |Im e^{iφ} top((ω_W+iβ_W)^n)|
  double max() const;
};

/// The three M-side equations for constant H, η and their three W-side images.
BFieldMirrorReport bfield_mirror_check(const Eigen::MatrixXd& H, const Eigen::MatrixXd& eta, double theta, double phi_angle);

/// Grid version; φ and η must have constant discrete Hessians.
BFieldMirrorReport bfield_mirror_check(const GridPotential& phi, const GridPotential& eta, double theta, double phi_angle);

/// g_t = H/t ⊕ tH, ω = Σ H_jk dx^j∧dy^k, Ω = Π(dx^j + i t dy^j). Rejects t ≤ 0.
template <class T>
SemiflatStructure<T> t_family(const Matrix<T>& H, const T& t);
SemiflatStructure<double> t_family(const GridPotential& phi, std::size_t node, double t);

struct TFamilyRow {
  Rational t;
  Rational det_g;            // volume form squared; t-independent
  double fiber_norm = 0;     // Frobenius norm of the fiber block of t·g_t
  Rational horizontal_defect;  // max entry of the base block of t·g_t − H
  double fiber_diameter = 0;   // diameter of the fiber torus R^n/Z^n under g_t
};

struct TFamilyReport {
  std::vector<TFamilyRow> rows;
  std::vector<double> norm_ratios;  // fiber_norm[k] / fiber_norm[k+1]
  bool volume_constant = false;
};

TFamilyReport rescaled_limit_report(const Matrix<Rational>& H, const std::vector<Rational>& t_list);

/// Diameter of R^n/Z^n under the constant metric G, maximized over a sample
/// lattice of the unit cell (m points per axis).
double torus_diameter(const Eigen::MatrixXd& G, int m = 0);

Matrix<double> to_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd to_eigen(const Matrix<double>& m);
Matrix<Rational> to_exact(const Matrix<double>& m);

/// {side, point, g, omega, Omega_re, Omega_im}; omega as the antisymmetric
/// matrix ω(e_a, e_b), Ω as monomial → coefficient.
nlohmann::ordered_json structure_record(const SemiflatStructure<double>& s);

}  // namespace syzlab
