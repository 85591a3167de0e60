#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "syzlab/exterior.hpp"
#include "syzlab/grid.hpp"

namespace syzlab {

enum class CycleKind { A, B };

/// Constant-coefficient cycle data on a flat torus with the phase layout of
/// dimension n. A B-cycle is the coordinate subtorus z^{m+1} = … = z^n = 0 and
/// its F lives in the phase layout of dimension m. An A-cycle is the real
/// subtorus spanned by `subtorus` and its F lives in the plain layout of
/// dimension m. F is the curvature i·f of a line bundle.
template <class T>
struct CycleSpec {
  CycleKind kind = CycleKind::B;
  int m = 0;
  Form<T> omega;
  std::optional<Form<T>> beta;
  Form<T> F;
  double theta = 0;
  std::vector<std::vector<T>> subtorus;
};

/// Pullback to the coordinate subtorus spanned by dx^j, dy^j, j ≤ m.
template <class T>
Form<T> restrict_to_b_cycle(const Form<T>& a, int m);

/// top((ω + iβ)|_C + F)^m over a B-cycle.
template <class T>
Complex<T> dhym_top(const CycleSpec<T>& c);

/// |Im e^{iθ} top((ω^C + F)^m)|.
template <class T>
double dhym_residual(const CycleSpec<T>& c);

/// θ = −arg top((ω^C + F)^m) in (−π, π]. Throws ValidationError("degenerate cycle") when it vanishes.
template <class T>
double solve_phase(const CycleSpec<T>& c);

struct GiesekerFit {
  std::complex<double> constant;
  double residual = 0;
};

/// top((ω + iF)^n) against one constant. Constant forms fit exactly.
template <class T>
GiesekerFit gieseker_limit_residual(const Form<T>& omega, const Form<T>& F);

/// ω = Σ φ_jk dx^j∧dy^k from the discrete Hessian at each interior node; the
/// constant is the midrange of the samples and the residual their largest deviation.
GiesekerFit gieseker_limit_residual(const GridPotential& phi, const RealForm& F);

struct ACycleResiduals {
  double lagrangian = 0;  // |ω|_C|
  double special = 0;     // |Im e^{iθ} Ω|_C|
  double flat = 0;        // |β|_C + f|, f = −iF
  double combined = 0;    // |(ω + iβ)|_C + F|
};

/// Sup norms of the coefficients after pulling back along the subtorus basis.
template <class T>
ACycleResiduals a_cycle_residuals(const CycleSpec<T>& c, const Form<T>& Omega);

/// Fiber over c ∈ R^n of z ↦ Im z on each factor of a product of n elliptic
/// curves: the translate by i·c of the subtorus spanned by ∂/∂x^1, …, ∂/∂x^n,
/// with ω = Σ dx^j∧dy^j, θ = 0 and trivial β, F. Constant forms do not see the
/// translation, so c only labels the fiber.
CycleSpec<double> imaginary_part_fiber(int n, const std::vector<double>& c);

/// Finite Fourier sum Σ e^{i(k·x + l·y)} B_{k,l} on the complex m-torus; keys
/// are (k_1, …, k_m, l_1, …, l_m).
template <class T>
struct TrigForm {
  int m = 0;
  std::map<std::vector<int>, Form<T>> modes;
};

struct DeformedHarmonicResiduals {
  double dbar = 0;
  double deformed = 0;
};

/// ∂̄B and Im e^{iθ}(ω^C + F)^{m−q}∧∂B on a B-cycle with m = c.m, computed per
/// mode; B must be of type (0, q). The imaginary part pairs mode λ with −λ.
template <class T>
DeformedHarmonicResiduals deformed_harmonic_residual(const TrigForm<T>& B, const CycleSpec<T>& c);

/// dz^j = dx^j + i dy^j and dz̄^j in the phase layout of dimension m.
template <class T>
Form<T> dz(int m, int j);
template <class T>
Form<T> dzbar(int m, int j);

/// top(α_1∧…∧α_n)·volume for n one-forms on an n-torus (plain layout n).
template <class T>
Complex<T> a_correlation(const std::vector<Form<T>>& forms, const T& volume = T(1));

/// Normal vector v ∈ R^{2n} and (0,1)-form B on the cycle.
template <class T>
struct TangentDatum {
  std::vector<T> v;
  Form<T> B;
};

/// Σ_σ sgn(σ) top(B_{σ1}∧…∧B_{σm}∧(ι_{v_{σ(m+1)}}…ι_{v_{σn}} Ω)|_C)·volume over S_n,
/// permutations in lexicographic order.
template <class T>
Complex<T> b_correlation(const std::vector<TangentDatum<T>>& tangents, const Form<T>& Omega, int m, const T& volume = T(1));

/// Im e^{iθ} top((ω^C + F)^{m−1}∧[B1 B2]) + ω(v1, v2)·top(ω|_C^m), times volume,
/// with [B1 B2] = i(B1∧B̄2 − B2∧B̄1).
template <class T>
T presymplectic_pairing(const TangentDatum<T>& t1, const TangentDatum<T>& t2, const CycleSpec<T>& c, const T& volume = T(1));

/// Sup norm of the coefficients.
template <class T>
double form_norm(const Form<T>& a);

}  // namespace syzlab
