#pragma once

#include <optional>
#include <vector>

#include "syzlab/grid.hpp"

namespace syzlab {

struct GradientSamples {
  std::vector<std::size_t> nodes;       // interior nodes of φ whose stencil holds no cut node
  std::vector<Eigen::VectorXd> points;  // ∇φ by central differences
  bool injective = false;
};

/// Gradient map x ↦ ∇φ(x) on interior nodes away from cut nodes. Injectivity is checked by strict
/// monotonicity (∇φ(p) − ∇φ(q))·(p − q) > 0 across every stencil edge and by the
/// absence of duplicate samples; failure throws ValidationError.
GradientSamples dual_coordinates(const GridPotential& phi);

Eigen::VectorXd gradient(const GridPotential& f, std::size_t node);

struct DualGridSpec {
  double h = 0;                       // spacing; 0 means the spacing of φ
  std::optional<std::vector<double>> lo, hi;  // box; defaults to the bounding box of ∇φ rounded out to h
};

/// sup_x (⟨x, y⟩ − f(x)) over the valid samples of f, found by greedy ascent from
/// `hint`, then refined with the local quadratic model at the maximizing node:
/// ⟨x*, y⟩ − f(x*) + ½ (y − g)ᵀ H⁻¹ (y − g), g and H the discrete gradient and
/// Hessian there. Empty when the maximizer's stencil is not all genuine samples, or when the
/// model's maximizer x* + H⁻¹(y − g) leaves the cell around x* or the domain of f.
/// On return `hint` holds the maximizing node.
std::optional<double> conjugate_at(const GridPotential& f, const Eigen::VectorXd& y, std::size_t& hint);

/// Conjugate of f evaluated on the nodes of `layout`. Nodes where it is undefined
/// are masked; defined nodes with a full defined stencil become interior, the
/// rest boundary.
GridPotential legendre_on_grid(const GridPotential& f, const GridPotential& layout);

struct LegendreReport {
  std::size_t nodes = 0;
  std::size_t masked = 0;
};

/// ψ = L(φ) on the dual grid.
GridPotential legendre_transform(const GridPotential& phi, const DualGridSpec& spec = {}, LegendreReport* report = nullptr);

/// Multilinear interpolation of D²ψ at y from the 2^n surrounding nodes, all of
/// which must be interior.
std::optional<Eigen::MatrixXd> interpolate_hessian(const GridPotential& psi, const Eigen::VectorXd& y);

/// Matched nodes lie at least `margin` from ∂D; a negative value means 0.1 × the
/// inradius of φ's domain. The boundary layer left out carries the O(h²)
/// irregularity of the cut-node treatment, which second differences turn into O(1).
struct DualityOptions {
  double margin = -1;
};

struct DualityResiduals {
  double involution = 0;       // |L(L(φ)) − φ| after removing the least-squares affine fit
  double hessian_inverse = 0;  // max entry of D²ψ(∇φ(x)) D²φ(x) − I
  double det_product = 0;      // |det D²φ(x) · det D²ψ(∇φ(x)) − 1|
  std::size_t matched = 0;
  double margin = 0;
};

/// Interior nodes of φ at least the margin from ∂D whose gradient lands in a cell of interior ψ nodes.
std::vector<std::size_t> matched_nodes(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt = {});

/// Sup norms over the matched nodes.
DualityResiduals duality_residuals(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt = {});

/// L(L(φ)) − φ at the matched nodes, with the least-squares affine part removed.
/// Returns the double transform on φ's grid through `double_transform` when given.
double involution_residual(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt = {},
                           GridPotential* double_transform = nullptr);

double resolved_margin(const Domain& d, const DualityOptions& opt);

}  // namespace syzlab
