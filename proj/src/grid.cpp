#include "syzlab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "syzlab/errors.hpp"

namespace syzlab {

namespace {

constexpr double kCutFraction = 1.0;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(std::stod(item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

// Segment parameter t > 0 where a + t(b − a) meets the sphere.
double sphere_crossing(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double R) {
  Eigen::VectorXd d = b - a, p = a - c;
  double A = d.squaredNorm(), B = 2 * p.dot(d), C = p.squaredNorm() - R * R;
  double disc = std::sqrt(B * B - 4 * A * C);
  return (-B + disc) / (2 * A);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Domain Domain::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size() || lo.size() > 3) throw ValidationError("box domain: need 1 to 3 matching bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) throw ValidationError("box domain: empty extent");
  Domain d;
  d.kind = Kind::box;
  d.n = static_cast<int>(lo.size());
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Domain Domain::ball(int n, std::vector<double> center, double radius) {
  if (n < 1 || n > 3 || static_cast<int>(center.size()) != n) throw ValidationError("ball domain: dimension must be 1 to 3");
  if (!(radius > 0)) throw ValidationError("ball domain: radius must be positive");
  Domain d;
  d.kind = Kind::ball;
  d.n = n;
  d.center = std::move(center);
  d.radius = radius;
  for (int i = 0; i < n; ++i) {
    d.lo.push_back(d.center[i] - radius);
    d.hi.push_back(d.center[i] + radius);
  }
  return d;
}

bool Domain::contains(const double* x) const { return distance_to_boundary(x) > 0; }

double Domain::distance_to_boundary(const double* x) const {
  if (kind == Kind::ball) {
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
    return radius - std::sqrt(r2);
  }
  double d = INFINITY;
  for (int i = 0; i < n; ++i) d = std::min({d, x[i] - lo[i], hi[i] - x[i]});
  return d;
}

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::interior: return "interior";
    case NodeKind::boundary: return "boundary";
    case NodeKind::masked: return "masked";
  }
  return "?";
}

NodeKind parse_node_kind(const std::string& s) {
  if (s == "interior") return NodeKind::interior;
  if (s == "boundary") return NodeKind::boundary;
  if (s == "masked") return NodeKind::masked;
  throw ValidationError("unknown node kind '" + s + "'");
}

std::size_t GridPotential::stride(int axis) const {
  std::size_t s = 1;
  for (int i = 0; i < axis; ++i) s *= dims[i];
  return s;
}

std::vector<int> GridPotential::multi_index(std::size_t node) const {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) {
    idx[i] = static_cast<int>(node % dims[i]);
    node /= dims[i];
  }
  return idx;
}

std::size_t GridPotential::node_at(const std::vector<int>& idx) const {
  std::size_t node = 0;
  for (int i = n - 1; i >= 0; --i) node = node * dims[i] + idx[i];
  return node;
}

Eigen::VectorXd GridPotential::coords(std::size_t node) const {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = origin[i] + static_cast<double>(node % dims[i]) * h;
    node /= dims[i];
  }
  return x;
}

std::vector<std::size_t> GridPotential::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (kind[i] == NodeKind::interior) out.push_back(i);
  return out;
}

void GridPotential::apply_ghosts() {
  for (const auto& g : ghosts) values[g.node] = g.weight * values[g.anchor];
}

bool GridPotential::same_layout(const GridPotential& o) const {
  return n == o.n && h == o.h && origin == o.origin && dims == o.dims && kind == o.kind;
}

std::vector<std::vector<int>> stencil_offsets(int n) {
  std::vector<std::vector<int>> out;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> off(n);
    int c = code;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      off[i] = c % 3 - 1;
      c /= 3;
      zero = zero && off[i] == 0;
    }
    if (!zero) out.push_back(off);
  }
  return out;
}

GridPotential make_grid(const Domain& d, double h) {
  if (!(h > 0)) throw ValidationError("grid spacing must be positive");
  GridPotential g;
  g.n = d.n;
  g.h = h;
  g.domain = d;
  if (d.kind == Domain::Kind::box) {
    for (int i = 0; i < d.n; ++i) {
      double steps = (d.hi[i] - d.lo[i]) / h;
      long k = std::lround(steps);
      if (k < 2 || std::abs(steps - static_cast<double>(k)) > 1e-9 * std::max(1.0, steps))
        throw ValidationError("box extent is not a multiple of h (at least two cells)");
      g.origin.push_back(d.lo[i]);
      g.dims.push_back(static_cast<int>(k) + 1);
    }
  } else {
    int K = static_cast<int>(std::ceil(d.radius / h)) + 1;
    for (int i = 0; i < d.n; ++i) {
      g.origin.push_back(d.center[i] - K * h);
      g.dims.push_back(2 * K + 1);
    }
  }
  std::size_t total = 1;
  for (int k : g.dims) total *= static_cast<std::size_t>(k);
  if (total > 50'000'000) throw ValidationError("grid too large");
  g.values.assign(total, 0.0);
  g.kind.assign(total, NodeKind::masked);

  if (d.kind == Domain::Kind::box) {
    for (std::size_t i = 0; i < total; ++i) {
      auto idx = g.multi_index(i);
      bool face = false;
      for (int a = 0; a < d.n; ++a) face = face || idx[a] == 0 || idx[a] == g.dims[a] - 1;
      g.kind[i] = face ? NodeKind::boundary : NodeKind::interior;
    }
    return g;
  }

  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(d.center.data(), d.n);
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd x = g.coords(i);
    if (d.distance_to_boundary(x.data()) >= kCutFraction * h) g.kind[i] = NodeKind::interior;
  }
  const auto offsets = stencil_offsets(d.n);
  for (std::size_t i = 0; i < total; ++i) {
    if (g.kind[i] == NodeKind::interior) continue;
    auto idx = g.multi_index(i);
    Eigen::VectorXd b = g.coords(i);
    double best = -1;
    std::size_t anchor = 0;
    for (const auto& off : offsets) {
      std::vector<int> j = idx;
      bool inside = true;
      for (int a = 0; a < d.n; ++a) {
        j[a] += off[a];
        inside = inside && j[a] >= 0 && j[a] < g.dims[a];
      }
      if (!inside) continue;
      std::size_t nb = g.node_at(j);
      if (g.kind[nb] != NodeKind::interior) continue;
      double theta = sphere_crossing(g.coords(nb), b, c, d.radius);
      if (theta > best) {
        best = theta;
        anchor = nb;
      }
    }
    if (best > 0) {
      g.kind[i] = NodeKind::boundary;
      g.ghosts.push_back({i, anchor, 1.0 - 1.0 / best});
    }
  }
  return g;
}

Eigen::MatrixXd hessian(const GridPotential& phi, std::size_t node) {
  if (node >= phi.size() || phi.kind[node] != NodeKind::interior) throw ValidationError("hessian: node is not interior");
  const int n = phi.n;
  const double h2 = phi.h * phi.h;
  const double* v = phi.values.data();
  Eigen::MatrixXd H(n, n);
  for (int j = 0; j < n; ++j) {
    std::size_t sj = phi.stride(j);
    H(j, j) = (v[node + sj] - 2 * v[node] + v[node - sj]) / h2;
    for (int k = j + 1; k < n; ++k) {
      std::size_t sk = phi.stride(k);
      double m = (v[node + sj + sk] - v[node + sj - sk] - v[node - sj + sk] + v[node - sj - sk]) / (4 * h2);
      H(j, k) = H(k, j) = m;
    }
  }
  return H;
}

double small_determinant(const Eigen::MatrixXd& m) {
  switch (m.rows()) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: return m.determinant();
  }
}

Eigen::MatrixXd small_cofactor(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd c(n, n);
  if (n == 1) {
    c(0, 0) = 1;
  } else if (n == 2) {
    c << m(1, 1), -m(1, 0), -m(0, 1), m(0, 0);
  } else if (n == 3) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
      }
  } else {
    c = m.determinant() * m.inverse().transpose();
  }
  return c;
}

bool positive_definite(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n <= 3) {
    if (!(m(0, 0) > 0)) return false;
    if (n >= 2 && !(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) > 0)) return false;
    if (n == 3 && !(small_determinant(m) > 0)) return false;
    return true;
  }
  return Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
}

void write_csv(const GridPotential& g, std::ostream& out, const std::string& value_name) {
  out << "# n=" << g.n << ",h=" << format_double(g.h);
  if (g.domain.kind == Domain::Kind::ball)
    out << ",domain=ball,center=" << join(g.domain.center) << ",radius=" << format_double(g.domain.radius);
  else
    out << ",domain=box,lo=" << join(g.domain.lo) << ",hi=" << join(g.domain.hi);
  out << ",origin=" << join(g.origin) << ",dims=";
  for (int i = 0; i < g.n; ++i) out << (i ? ";" : "") << g.dims[i];
  out << "\n";
  static const char* axes[] = {"i", "j", "k"};
  for (int i = 0; i < g.n; ++i) out << axes[i] << ",";
  for (int i = 0; i < g.n; ++i) out << "x" << i + 1 << ",";
  out << value_name << ",kind\n";
  for (std::size_t node = 0; node < g.size(); ++node) {
    auto idx = g.multi_index(node);
    auto x = g.coords(node);
    for (int i = 0; i < g.n; ++i) out << idx[i] << ",";
    for (int i = 0; i < g.n; ++i) out << format_double(x[i]) << ",";
    out << (g.kind[node] == NodeKind::masked ? std::string("nan") : format_double(g.values[node])) << "," << to_string(g.kind[node])
        << "\n";
  }
}

GridPotential read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ValidationError("grid csv: missing header");
  std::map<std::string, std::string> kv;
  std::stringstream hs(line.substr(2));
  std::string item;
  while (std::getline(hs, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("grid csv: malformed header entry '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError(std::string("grid csv: header lacks ") + key);
    return it->second;
  };
  int n = std::stoi(need("n"));
  double h = std::stod(need("h"));
  Domain d = need("domain") == "ball" ? Domain::ball(n, parse_list(need("center")), std::stod(need("radius")))
                                      : Domain::box(parse_list(need("lo")), parse_list(need("hi")));
  GridPotential g = make_grid(d, h);
  if (parse_list(need("origin")) != g.origin) throw ValidationError("grid csv: origin does not match the domain");
  std::vector<double> dims = parse_list(need("dims"));
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(dims[i]) != g.dims[i]) throw ValidationError("grid csv: dims do not match the domain");
  std::getline(in, line);  // column names
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    while (std::getline(ls, item, ',')) cols.push_back(item);
    if (static_cast<int>(cols.size()) != 2 * n + 2) throw ValidationError("grid csv: wrong column count");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = std::stoi(cols[i]);
    std::size_t node = g.node_at(idx);
    g.kind[node] = parse_node_kind(cols[2 * n + 1]);
    g.values[node] = g.kind[node] == NodeKind::masked ? 0.0 : std::stod(cols[2 * n]);
    ++rows;
  }
  if (rows != g.size()) throw ValidationError("grid csv: row count does not match dims");
  return g;
}

}  // namespace syzlab
