#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "syzlab/exterior.hpp"
#include "syzlab/grid.hpp"

namespace syzlab {

enum class Seed { quadratic, distance };

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 50;
  int threads = 1;
  Seed seed = Seed::quadratic;
};

struct SolveReport {
  int iterations = 0;
  int restarts = 0;
  double residual = 0;
  bool convex = false;
  std::vector<double> history;  // residual before each Newton step, then the final one
};

/// Runs f(begin, end) over [0, count) split into contiguous chunks.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& f);

/// Convex admissible starting point with zero boundary values. On a ball the
/// quadratic seed is s(|x − x0|² − R²) with s = c^{1/n}/2; on a box it is minus
/// the geometric mean of the face distances, scaled to det = c at the centre.
/// The distance seed subtracts s·R·dist(x, ∂D) from either.
GridPotential initial_guess(const Domain& d, double c, double h, Seed seed);

/// Damped Newton iteration for det D²φ = c with φ = 0 on ∂D. Steps are halved
/// while any interior Hessian loses positive definiteness or the residual does
/// not decrease; after one failed descent the solve restarts from the seed with
/// half-length steps, and a second failure throws ConvergenceError.
GridPotential solve_real_ma(const Domain& d, double c, double h, const SolveOptions& opt = {}, SolveReport* report = nullptr);

/// max over interior nodes of |det D²φ − c|.
double real_ma_residual(const GridPotential& phi, double c, int threads = 1);

/// Smallest eigenvalue of the discrete Hessian over interior nodes.
double min_hessian_eigenvalue(const GridPotential& phi, int threads = 1);
bool is_convex(const GridPotential& phi, int threads = 1);

/// max over interior nodes of |det(D²φ + i D²η) − C|.
double complexified_ma_residual(const GridPotential& phi, const GridPotential& eta, std::complex<double> C, int threads = 1);

/// Complex determinant for n ≤ 3 by cofactor expansion.
std::complex<double> complex_determinant(const Eigen::MatrixXcd& m);

template <class T>
struct BFieldFit {
  Complex<T> c_prime;
  double residual = 0;
};

/// c′ = top(β∧ω^{n−1}) / top(ω^n) and the residual |top(β∧ω^{n−1}) − c′ top(ω^n)|.
template <class T>
BFieldFit<T> linearize_bfield(const Form<T>& beta, const Form<T>& omega);

/// Grid version: β_jk = η_jk and ω_jk = φ_jk per interior node; c′ is the
/// midrange of the per-node ratios and the residual their largest deviation from it.
BFieldFit<double> linearize_bfield(const GridPotential& phi, const GridPotential& eta);

/// Σ a_jk dx^j∧dy^k for a symmetric coefficient matrix.
RealForm hessian_two_form(const Eigen::MatrixXd& a, Frame frame = Frame::primal);

}  // namespace syzlab
