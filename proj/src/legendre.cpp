#include "syzlab/legendre.hpp"

#include <algorithm>
#include <cmath>

#include "syzlab/errors.hpp"
#include "syzlab/ma_solver.hpp"

namespace syzlab {

namespace {

// Nodes carrying genuine data: not masked and not an extrapolated cut node.
std::vector<char> sample_mask(const GridPotential& f) {
  std::vector<char> s(f.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) s[i] = f.kind[i] != NodeKind::masked;
  for (const auto& g : f.ghosts) s[g.node] = 0;
  return s;
}

struct Neighbours {
  std::vector<std::vector<int>> offsets;
  explicit Neighbours(int n) : offsets(stencil_offsets(n)) {}

  template <class F>
  void each(const GridPotential& g, std::size_t node, F f) const {
    auto idx = g.multi_index(node);
    for (const auto& off : offsets) {
      bool inside = true;
      long q = static_cast<long>(node);
      for (int a = 0; a < g.n; ++a) {
        int j = idx[a] + off[a];
        inside = inside && j >= 0 && j < g.dims[a];
        q += off[a] * static_cast<long>(g.stride(a));
      }
      if (inside) f(static_cast<std::size_t>(q));
    }
  }
};

std::optional<double> conjugate_impl(const GridPotential& f, const std::vector<char>& samples, const std::vector<char>& deep,
                                     const Neighbours& nb, const Eigen::VectorXd& y, std::size_t& hint) {
  auto objective = [&](std::size_t i) { return f.coords(i).dot(y) - f.values[i]; };
  if (hint >= f.size() || !samples[hint]) {
    double best = -INFINITY;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (samples[i] && objective(i) > best) {
        best = objective(i);
        hint = i;
      }
    if (best == -INFINITY) return std::nullopt;
  }
  std::size_t cur = hint;
  double cur_val = objective(cur);
  while (true) {
    std::size_t next = cur;
    double next_val = cur_val;
    nb.each(f, cur, [&](std::size_t q) {
      if (!samples[q]) return;
      double v = objective(q);
      if (v > next_val) {
        next_val = v;
        next = q;
      }
    });
    if (next == cur) break;
    cur = next;
    cur_val = next_val;
  }
  hint = cur;
  if (!deep[cur]) return std::nullopt;
  Eigen::MatrixXd H = hessian(f, cur);
  if (!positive_definite(H)) return std::nullopt;
  Eigen::VectorXd r = y - gradient(f, cur);
  Eigen::VectorXd step = H.ldlt().solve(r);
  Eigen::VectorXd xhat = f.coords(cur) + step;
  if (step.cwiseAbs().maxCoeff() > f.h) return std::nullopt;
  if (f.domain.kind == Domain::Kind::ball && !f.domain.contains(xhat.data())) return std::nullopt;
  return cur_val + 0.5 * r.dot(step);
}

void classify(GridPotential& g, const std::vector<char>& defined) {
  Neighbours nb(g.n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!defined[i]) {
      g.kind[i] = NodeKind::masked;
      g.values[i] = 0;
      continue;
    }
    auto idx = g.multi_index(i);
    bool full = true;
    for (int a = 0; a < g.n; ++a) full = full && idx[a] > 0 && idx[a] < g.dims[a] - 1;
    if (full) nb.each(g, i, [&](std::size_t q) { full = full && defined[q]; });
    g.kind[i] = full ? NodeKind::interior : NodeKind::boundary;
  }
}

// Interior nodes whose whole stencil is genuine data.
std::vector<char> deep_mask(const GridPotential& f, const std::vector<char>& samples, const Neighbours& nb) {
  std::vector<char> d(f.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.kind[i] != NodeKind::interior || !samples[i]) continue;
    bool ok = true;
    nb.each(f, i, [&](std::size_t q) { ok = ok && samples[q]; });
    d[i] = ok;
  }
  return d;
}

}  // namespace

Eigen::VectorXd gradient(const GridPotential& f, std::size_t node) {
  if (node >= f.size() || f.kind[node] != NodeKind::interior) throw ValidationError("gradient: node is not interior");
  Eigen::VectorXd g(f.n);
  for (int j = 0; j < f.n; ++j) {
    std::size_t s = f.stride(j);
    g[j] = (f.values[node + s] - f.values[node - s]) / (2 * f.h);
  }
  return g;
}

GradientSamples dual_coordinates(const GridPotential& phi) {
  GradientSamples out;
  Neighbours nb(phi.n);
  const auto deep = deep_mask(phi, sample_mask(phi), nb);
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (deep[i]) out.nodes.push_back(i);
  std::vector<long> pos(phi.size(), -1);
  for (std::size_t k = 0; k < out.nodes.size(); ++k) {
    out.points.push_back(gradient(phi, out.nodes[k]));
    pos[out.nodes[k]] = static_cast<long>(k);
  }
  for (std::size_t k = 0; k < out.nodes.size(); ++k) {
    std::size_t p = out.nodes[k];
    Eigen::VectorXd xp = phi.coords(p);
    bool ok = true;
    nb.each(phi, p, [&](std::size_t q) {
      if (pos[q] < 0) return;
      if (!((out.points[k] - out.points[pos[q]]).dot(xp - phi.coords(q)) > 0)) ok = false;
    });
    if (!ok) throw ValidationError("gradient map is not injective (discrete convexity fails)");
  }
  std::vector<std::vector<double>> sorted;
  for (const auto& p : out.points) sorted.emplace_back(p.data(), p.data() + p.size());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ValidationError("gradient map has duplicate samples");
  out.injective = true;
  return out;
}

std::optional<double> conjugate_at(const GridPotential& f, const Eigen::VectorXd& y, std::size_t& hint) {
  Neighbours nb(f.n);
  auto samples = sample_mask(f);
  return conjugate_impl(f, samples, deep_mask(f, samples, nb), nb, y, hint);
}

GridPotential legendre_on_grid(const GridPotential& f, const GridPotential& layout) {
  if (f.n != layout.n) throw ValidationError("legendre: dimension mismatch");
  GridPotential out = layout;
  out.ghosts.clear();
  const Neighbours nb(f.n);
  const auto samples = sample_mask(f);
  const auto deep = deep_mask(f, samples, nb);
  std::vector<char> defined(out.size(), 0);
  std::size_t hint = f.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (layout.kind[i] == NodeKind::masked) continue;
    auto v = conjugate_impl(f, samples, deep, nb, out.coords(i), hint);
    if (v) {
      out.values[i] = *v;
      defined[i] = 1;
    }
  }
  classify(out, defined);
  return out;
}

GridPotential legendre_transform(const GridPotential& phi, const DualGridSpec& spec, LegendreReport* report) {
  GradientSamples gs = dual_coordinates(phi);
  if (gs.points.empty()) throw ValidationError("legendre: potential has no interior nodes");
  const double h = spec.h > 0 ? spec.h : phi.h;
  std::vector<double> lo(phi.n), hi(phi.n);
  for (int a = 0; a < phi.n; ++a) {
    double mn = INFINITY, mx = -INFINITY;
    for (const auto& p : gs.points) {
      mn = std::min(mn, p[a]);
      mx = std::max(mx, p[a]);
    }
    lo[a] = spec.lo ? (*spec.lo)[a] : std::floor(mn / h) * h;
    hi[a] = spec.hi ? (*spec.hi)[a] : std::ceil(mx / h) * h;
    if (hi[a] - lo[a] < 2 * h) hi[a] = lo[a] + 2 * h;
  }
  GridPotential psi = legendre_on_grid(phi, make_grid(Domain::box(lo, hi), h));
  if (report) {
    report->nodes = psi.size();
    report->masked = static_cast<std::size_t>(std::count(psi.kind.begin(), psi.kind.end(), NodeKind::masked));
  }
  return psi;
}

std::optional<Eigen::MatrixXd> interpolate_hessian(const GridPotential& psi, const Eigen::VectorXd& y) {
  const int n = psi.n;
  std::vector<int> base(n);
  std::vector<double> t(n);
  for (int a = 0; a < n; ++a) {
    double u = (y[a] - psi.origin[a]) / psi.h;
    int i = static_cast<int>(std::floor(u));
    if (i < 0 || i + 1 >= psi.dims[a]) return std::nullopt;
    base[a] = i;
    t[a] = u - i;
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::vector<int> idx = base;
    double w = 1;
    for (int a = 0; a < n; ++a) {
      bool up = corner >> a & 1;
      idx[a] += up;
      w *= up ? t[a] : 1 - t[a];
    }
    std::size_t node = psi.node_at(idx);
    if (psi.kind[node] != NodeKind::interior) return std::nullopt;
    H += w * hessian(psi, node);
  }
  return H;
}

double resolved_margin(const Domain& d, const DualityOptions& opt) {
  if (opt.margin >= 0) return opt.margin;
  double inradius = d.radius;
  if (d.kind == Domain::Kind::box) {
    inradius = INFINITY;
    for (int a = 0; a < d.n; ++a) inradius = std::min(inradius, 0.5 * (d.hi[a] - d.lo[a]));
  }
  return 0.1 * inradius;
}

std::vector<std::size_t> matched_nodes(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt) {
  const double margin = resolved_margin(phi.domain, opt);
  std::vector<std::size_t> out;
  for (std::size_t i : phi.interior_nodes()) {
    Eigen::VectorXd x = phi.coords(i);
    if (phi.domain.distance_to_boundary(x.data()) < margin) continue;
    if (interpolate_hessian(psi, gradient(phi, i))) out.push_back(i);
  }
  return out;
}

double involution_residual(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt, GridPotential* double_transform) {
  GridPotential back = legendre_on_grid(psi, phi);
  std::vector<std::size_t> nodes;
  for (std::size_t i : matched_nodes(phi, psi, opt))
    if (back.kind[i] != NodeKind::masked) nodes.push_back(i);
  double res = 0;
  if (!nodes.empty()) {
    const int n = phi.n;
    Eigen::MatrixXd A(nodes.size(), n + 1);
    Eigen::VectorXd b(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      A.row(k).head(n) = phi.coords(nodes[k]).transpose();
      A(k, n) = 1;
      b[k] = back.values[nodes[k]] - phi.values[nodes[k]];
    }
    Eigen::VectorXd fit = A.colPivHouseholderQr().solve(b);
    res = (b - A * fit).cwiseAbs().maxCoeff();
  }
  if (double_transform) *double_transform = std::move(back);
  return res;
}

DualityResiduals duality_residuals(const GridPotential& phi, const GridPotential& psi, const DualityOptions& opt) {
  DualityResiduals r;
  r.margin = resolved_margin(phi.domain, opt);
  for (std::size_t i : matched_nodes(phi, psi, opt)) {
    Eigen::MatrixXd Hpsi = *interpolate_hessian(psi, gradient(phi, i));
    Eigen::MatrixXd Hphi = hessian(phi, i);
    ++r.matched;
    Eigen::MatrixXd P = Hpsi * Hphi - Eigen::MatrixXd::Identity(phi.n, phi.n);
    r.hessian_inverse = std::max(r.hessian_inverse, P.cwiseAbs().maxCoeff());
    r.det_product = std::max(r.det_product, std::abs(small_determinant(Hphi) * small_determinant(Hpsi) - 1));
  }
  r.involution = involution_residual(phi, psi, opt);
  return r;
}

}  // namespace syzlab
