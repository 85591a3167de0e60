#include "syzlab/ma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "syzlab/errors.hpp"

namespace syzlab {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& f) {
  std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1 || count < 2 * t) {
    f(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + t - 1) / t;
  for (std::size_t b = 0; b < count; b += chunk) pool.emplace_back(f, b, std::min(count, b + chunk));
  for (auto& th : pool) th.join();
}

namespace {

// Per-chunk maxima combined in chunk order; max is order-independent anyway.
template <class F>
double parallel_max(const std::vector<std::size_t>& nodes, int threads, F value) {
  if (nodes.empty()) return 0.0;
  const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  std::vector<double> part(t, -INFINITY);
  std::size_t chunk = (nodes.size() + t - 1) / t;
  parallel_for(t, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t w = b; w < e; ++w) {
      double m = -INFINITY;
      for (std::size_t i = w * chunk; i < std::min(nodes.size(), (w + 1) * chunk); ++i) m = std::max(m, value(nodes[i]));
      part[w] = m;
    }
  });
  return *std::max_element(part.begin(), part.end());
}

template <class F>
double parallel_min(const std::vector<std::size_t>& nodes, int threads, F value) {
  return -parallel_max(nodes, threads, [&](std::size_t i) { return -value(i); });
}

double circumradius(const Domain& d, Eigen::VectorXd& x0) {
  x0.resize(d.n);
  if (d.kind == Domain::Kind::ball) {
    for (int i = 0; i < d.n; ++i) x0[i] = d.center[i];
    return d.radius;
  }
  double r2 = 0;
  for (int i = 0; i < d.n; ++i) {
    x0[i] = 0.5 * (d.lo[i] + d.hi[i]);
    r2 += 0.25 * (d.hi[i] - d.lo[i]) * (d.hi[i] - d.lo[i]);
  }
  return std::sqrt(r2);
}

bool all_convex(const GridPotential& phi, const std::vector<std::size_t>& nodes, int threads) {
  return parallel_min(nodes, threads, [&](std::size_t i) { return positive_definite(hessian(phi, i)) ? 1.0 : 0.0; }) > 0;
}

struct NewtonSystem {
  std::vector<std::size_t> nodes;
  std::vector<long> column;      // interior node -> unknown index, else −1
  std::vector<long> ghost_rule;  // cut node -> index into ghosts, else −1
};

NewtonSystem index_system(const GridPotential& g) {
  NewtonSystem s;
  s.nodes = g.interior_nodes();
  s.column.assign(g.size(), -1);
  s.ghost_rule.assign(g.size(), -1);
  for (std::size_t k = 0; k < s.nodes.size(); ++k) s.column[s.nodes[k]] = static_cast<long>(k);
  for (std::size_t k = 0; k < g.ghosts.size(); ++k) s.ghost_rule[g.ghosts[k].node] = static_cast<long>(k);
  return s;
}

// Newton step δ solving J δ = −(det D²φ − c).
Eigen::VectorXd newton_step(const GridPotential& phi, const NewtonSystem& s, double c, int threads) {
  const std::size_t m = s.nodes.size();
  const int n = phi.n;
  const double h2 = phi.h * phi.h;
  std::vector<std::vector<Eigen::Triplet<double>>> rows(m);
  Eigen::VectorXd rhs(m);
  parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      const std::size_t p = s.nodes[r];
      Eigen::MatrixXd H = hessian(phi, p);
      Eigen::MatrixXd C = small_cofactor(H);
      rhs[r] = -(small_determinant(H) - c);
      auto& out = rows[r];
      auto add = [&](std::size_t q, double w) {
        if (s.column[q] >= 0) {
          out.emplace_back(static_cast<int>(r), static_cast<int>(s.column[q]), w);
        } else if (s.ghost_rule[q] >= 0) {
          const auto& gr = phi.ghosts[s.ghost_rule[q]];
          out.emplace_back(static_cast<int>(r), static_cast<int>(s.column[gr.anchor]), w * gr.weight);
        }
      };
      for (int j = 0; j < n; ++j) {
        std::size_t sj = phi.stride(j);
        double wj = C(j, j) / h2;
        add(p + sj, wj);
        add(p, -2 * wj);
        add(p - sj, wj);
        for (int k = j + 1; k < n; ++k) {
          std::size_t sk = phi.stride(k);
          double w = (C(j, k) + C(k, j)) / (4 * h2);
          add(p + sj + sk, w);
          add(p + sj - sk, -w);
          add(p - sj + sk, -w);
          add(p - sj - sk, w);
        }
      }
    }
  });
  std::vector<Eigen::Triplet<double>> trip;
  for (auto& r : rows) trip.insert(trip.end(), r.begin(), r.end());
  Eigen::SparseMatrix<double> J(static_cast<int>(m), static_cast<int>(m));
  J.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success) throw ConvergenceError("Newton Jacobian is singular", NAN, 0);
  Eigen::VectorXd delta = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw ConvergenceError("Newton linear solve failed", NAN, 0);
  return delta;
}

enum class Outcome { converged, stalled, exhausted };

Outcome newton(GridPotential& phi, double c, const SolveOptions& opt, double max_step, SolveReport& rep) {
  NewtonSystem s = index_system(phi);
  auto residual = [&](const GridPotential& g) {
    return parallel_max(s.nodes, opt.threads, [&](std::size_t i) { return std::abs(small_determinant(hessian(g, i)) - c); });
  };
  double r = residual(phi);
  while (true) {
    rep.history.push_back(r);
    rep.residual = r;
    if (r <= opt.tol) return Outcome::converged;
    if (rep.iterations >= opt.max_iter) return Outcome::exhausted;
    Eigen::VectorXd delta = newton_step(phi, s, c, opt.threads);
    ++rep.iterations;
    bool accepted = false;
    for (double alpha = max_step; alpha >= 1.0 / 4096; alpha *= 0.5) {
      GridPotential trial = phi;
      for (std::size_t k = 0; k < s.nodes.size(); ++k) trial.values[s.nodes[k]] += alpha * delta[k];
      trial.apply_ghosts();
      if (!all_convex(trial, s.nodes, opt.threads)) continue;
      double rt = residual(trial);
      if (!(rt < r)) continue;
      phi = std::move(trial);
      r = rt;
      accepted = true;
      break;
    }
    if (!accepted) return Outcome::stalled;
  }
}

}  // namespace

GridPotential initial_guess(const Domain& d, double c, double h, Seed seed) {
  if (!(c > 0)) throw ValidationError("Monge-Ampère constant must be positive");
  GridPotential g = make_grid(d, h);
  Eigen::VectorXd x0;
  const double R = circumradius(d, x0);
  const double s = 0.5 * std::pow(c, 1.0 / d.n);
  // Boxes: minus the geometric mean of the 2n face distances, which is convex and
  // vanishes on the faces; scaled below so the Hessian determinant at x0 is c.
  auto box_seed = [&](const Eigen::VectorXd& x) {
    double p = 1;
    for (int i = 0; i < d.n; ++i) p *= (x[i] - d.lo[i]) * (d.hi[i] - x[i]);
    return -std::pow(std::max(p, 0.0), 0.5 / d.n);
  };
  double k = 1;
  if (d.kind == Domain::Kind::box) {
    Eigen::MatrixXd H(d.n, d.n);
    const double e = 1e-4 * R;
    for (int i = 0; i < d.n; ++i)
      for (int j = 0; j < d.n; ++j) {
        Eigen::VectorXd a = x0, b = x0, cc = x0, dd = x0;
        a[i] += e; a[j] += e; b[i] += e; b[j] -= e; cc[i] -= e; cc[j] += e; dd[i] -= e; dd[j] -= e;
        H(i, j) = (box_seed(a) - box_seed(b) - box_seed(cc) + box_seed(dd)) / (4 * e * e);
      }
    k = std::pow(c / small_determinant(H), 1.0 / d.n);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.kind[i] != NodeKind::interior) continue;
    Eigen::VectorXd x = g.coords(i);
    double v = d.kind == Domain::Kind::ball ? s * ((x - x0).squaredNorm() - R * R) : k * box_seed(x);
    if (seed == Seed::distance) v -= s * R * d.distance_to_boundary(x.data());
    g.values[i] = v;
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.kind[i] == NodeKind::boundary) g.values[i] = 0.0;
  g.apply_ghosts();
  return g;
}

GridPotential solve_real_ma(const Domain& d, double c, double h, const SolveOptions& opt, SolveReport* report) {
  if (!(opt.tol > 0) || opt.max_iter < 1) throw ValidationError("solver tolerance and iteration budget must be positive");
  SolveReport rep;
  GridPotential phi = initial_guess(d, c, h, opt.seed);
  Outcome out = newton(phi, c, opt, 1.0, rep);
  if (out == Outcome::stalled) {
    ++rep.restarts;
    phi = initial_guess(d, c, h, opt.seed);
    out = newton(phi, c, opt, 0.5, rep);
  }
  if (out != Outcome::converged) {
    throw ConvergenceError(out == Outcome::stalled ? "Newton iteration lost descent or discrete convexity after a damped restart"
                                                   : "Newton iteration did not reach the tolerance within max_iter",
                           rep.residual, rep.iterations);
  }
  rep.convex = is_convex(phi, opt.threads);
  if (!rep.convex) throw ConvergenceError("converged potential is not discretely convex", rep.residual, rep.iterations);
  if (report) *report = rep;
  return phi;
}

double real_ma_residual(const GridPotential& phi, double c, int threads) {
  return parallel_max(phi.interior_nodes(), threads, [&](std::size_t i) { return std::abs(small_determinant(hessian(phi, i)) - c); });
}

double min_hessian_eigenvalue(const GridPotential& phi, int threads) {
  return parallel_min(phi.interior_nodes(), threads, [&](std::size_t i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian(phi, i), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  });
}

bool is_convex(const GridPotential& phi, int threads) { return all_convex(phi, phi.interior_nodes(), threads); }

std::complex<double> complex_determinant(const Eigen::MatrixXcd& m) {
  switch (m.rows()) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: return m.determinant();
  }
}

double complexified_ma_residual(const GridPotential& phi, const GridPotential& eta, std::complex<double> C, int threads) {
  if (!phi.same_layout(eta)) throw ValidationError("φ and η must share a grid");
  return parallel_max(phi.interior_nodes(), threads, [&](std::size_t i) {
    Eigen::MatrixXcd m = hessian(phi, i).cast<std::complex<double>>() + std::complex<double>(0, 1) * hessian(eta, i).cast<std::complex<double>>();
    return std::abs(complex_determinant(m) - C);
  });
}

template <class T>
BFieldFit<T> linearize_bfield(const Form<T>& beta, const Form<T>& omega) {
  if (!(beta.layout() == omega.layout()) || !beta.layout().phase) throw ValidationError("linearize_bfield: β and ω must share a phase-space layout");
  if (!beta.is_homogeneous(2) && !beta.is_zero()) throw ValidationError("linearize_bfield: β must be a 2-form");
  if (!omega.is_homogeneous(2)) throw ValidationError("linearize_bfield: ω must be a 2-form");
  const int n = omega.n();
  Complex<T> vol = top_coefficient(power(omega, n));
  if (is_zero(vol)) throw ValidationError("non-Kähler reference form: ω^n vanishes");
  Complex<T> lhs = top_coefficient(wedge(beta, power(omega, n - 1)));
  BFieldFit<T> fit;
  fit.c_prime = lhs / vol;
  fit.residual = magnitude(lhs - fit.c_prime * vol);
  return fit;
}

template BFieldFit<double> linearize_bfield(const RealForm&, const RealForm&);
template BFieldFit<Rational> linearize_bfield(const ExactForm&, const ExactForm&);

RealForm hessian_two_form(const Eigen::MatrixXd& a, Frame frame) {
  const int n = static_cast<int>(a.rows());
  Layout l = Layout::phase_space(n, frame);
  RealForm w(l);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (a(j, k) != 0) w += wedge(RealForm::generator(l, j), RealForm::generator(l, n + k)) * ComplexD(a(j, k));
  return w;
}

BFieldFit<double> linearize_bfield(const GridPotential& phi, const GridPotential& eta) {
  if (!phi.same_layout(eta)) throw ValidationError("φ and η must share a grid");
  double lo = INFINITY, hi = -INFINITY;
  std::vector<double> ratios;
  for (std::size_t i : phi.interior_nodes()) {
    auto fit = linearize_bfield(hessian_two_form(hessian(eta, i)), hessian_two_form(hessian(phi, i)));
    ratios.push_back(fit.c_prime.re);
    lo = std::min(lo, fit.c_prime.re);
    hi = std::max(hi, fit.c_prime.re);
  }
  BFieldFit<double> out;
  if (ratios.empty()) return out;
  out.c_prime = ComplexD(0.5 * (lo + hi));
  out.residual = 0.5 * (hi - lo);
  return out;
}

}  // namespace syzlab
