#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace syzlab {

/// Axis-aligned box [lo, hi], or the ball |x - center| < radius realized by
/// masking a box grid.
struct Domain {
  enum class Kind { box, ball };
  Kind kind = Kind::box;
  int n = 0;
  std::vector<double> lo, hi;
  std::vector<double> center;
  double radius = 0;

  static Domain box(std::vector<double> lo, std::vector<double> hi);
  static Domain ball(int n, std::vector<double> center, double radius);
  static Domain unit_ball(int n) { return ball(n, std::vector<double>(n, 0.0), 1.0); }
  static Domain unit_square() { return box({0.0, 0.0}, {1.0, 1.0}); }

  bool contains(const double* x) const;
  /// Distance to the boundary from a point inside.
  double distance_to_boundary(const double* x) const;
};

enum class NodeKind : std::uint8_t { interior, boundary, masked };

const char* to_string(NodeKind k);
NodeKind parse_node_kind(const std::string& s);

/// Ball grids: a cut node b takes the value φ_a + (g − φ_a)/θ, the linear
/// extrapolation through an interior anchor a and the boundary crossing at
/// fraction θ of the segment a→b (g = 0).
struct GhostRule {
  std::size_t node;
  std::size_t anchor;
  double weight;  // 1 − 1/θ
};

/// Real scalar field on a uniform grid with spacing h. Also used for the
/// B-field potential η and for Legendre duals.
class GridPotential {
 public:
  int n = 0;
  double h = 0;
  Domain domain;
  std::vector<double> origin;
  std::vector<int> dims;
  std::vector<double> values;
  std::vector<NodeKind> kind;
  std::vector<GhostRule> ghosts;

  std::size_t size() const { return values.size(); }
  std::size_t stride(int axis) const;
  std::vector<int> multi_index(std::size_t node) const;
  std::size_t node_at(const std::vector<int>& idx) const;
  Eigen::VectorXd coords(std::size_t node) const;
  bool is_interior(std::size_t node) const { return kind[node] == NodeKind::interior; }
  std::vector<std::size_t> interior_nodes() const;

  /// Recomputes cut-node values from their anchors.
  void apply_ghosts();

  /// Same grid layout, values replaced by f(x) on non-masked nodes.
  template <class F>
  GridPotential with_values(F f) const {
    GridPotential g = *this;
    for (std::size_t i = 0; i < size(); ++i)
      if (kind[i] != NodeKind::masked) g.values[i] = f(coords(i));
    return g;
  }

  bool same_layout(const GridPotential& o) const;
};

/// Grid over the domain with spacing h. Box extents must be whole multiples of
/// h. Ball grids are centred on a node; nodes closer than h to the boundary
/// and outside nodes adjacent to the interior become cut nodes.
GridPotential make_grid(const Domain& d, double h);

/// Offsets of the 3^n − 1 neighbours, in a fixed order.
std::vector<std::vector<int>> stencil_offsets(int n);

/// Central-difference Hessian; mixed terms use the four diagonal corners.
Eigen::MatrixXd hessian(const GridPotential& phi, std::size_t node);

/// Determinant and its cofactor matrix for n ≤ 3, closed form.
double small_determinant(const Eigen::MatrixXd& m);
Eigen::MatrixXd small_cofactor(const Eigen::MatrixXd& m);
bool positive_definite(const Eigen::MatrixXd& m);

/// CSV with a "# n=..,h=..,domain=.." header, a column line, then one row per
/// node: indices, coordinates, value, kind. Lists inside the header use ';'.
void write_csv(const GridPotential& g, std::ostream& out, const std::string& value_name = "phi");
GridPotential read_csv(std::istream& in);

std::string format_double(double x);

}  // namespace syzlab
