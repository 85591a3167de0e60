#pragma once

#include <map>
#include <utility>
#include <vector>

#include "syzlab/complex.hpp"
#include "syzlab/matrix.hpp"
#include "syzlab/rational.hpp"

namespace syzlab {

/// Coefficients N^r_d of q^d t^{2r-2}, for 1 <= d <= D and 0 <= r <= R.
/// Entries outside the window are rejected; zero entries are not stored.
class QTSeries {
 public:
  QTSeries(int D, int R);

  int D() const { return D_; }
  int R() const { return R_; }
  Rational get(int d, int r) const;
  void set(int d, int r, const Rational& v);
  void add(int d, int r, const Rational& v);
  const std::map<std::pair<int, int>, Rational>& entries() const { return entries_; }
  friend bool operator==(const QTSeries&, const QTSeries&) = default;

 private:
  void check(int d, int r) const;
  int D_, R_;
  std::map<std::pair<int, int>, Rational> entries_;
};

/// BPS numbers n^g_d for 1 <= d <= D, 0 <= g <= G. Values are kept rational so
/// that an inversion of corrupted data can be represented and then flagged.
class BpsTable {
 public:
  BpsTable(int D, int G);

  int D() const { return D_; }
  int G() const { return G_; }
  Rational get(int d, int g) const;
  void set(int d, int g, const Rational& v);
  const std::map<std::pair<int, int>, Rational>& entries() const { return entries_; }
  friend bool operator==(const BpsTable&, const BpsTable&) = default;

 private:
  int D_, G_;
  std::map<std::pair<int, int>, Rational> entries_;
};

/// Bernoulli numbers B_0..B_m with B_1 = -1/2.
std::vector<Rational> bernoulli_numbers(int m);

/// Coefficients of x^{2j}, j = 0..J, in (sin(x/2)/(x/2))^{2g-2}.
/// g = 0 uses the Bernoulli closed form of (x/2)^2 csc^2(x/2).
std::vector<Rational> sine_kernel(int g, int J);

/// Expands Σ n^g_d Σ_k (1/k)(2 sin(kt/2))^{2g-2} q^{kd}, keeping d <= D and r <= R.
/// Throws ValidationError naming the first table entry that would be dropped entirely.
QTSeries gw_from_bps(const BpsTable& b, int D, int R);

/// Inverse of gw_from_bps on the window of N (G = R). Exact.
BpsTable bps_from_gw(const QTSeries& N);

struct IntegralityReport {
  struct Entry {
    int d, g;
    Rational value;
  };
  bool ok = true;
  std::vector<Entry> violations;
};

IntegralityReport integrality_check(const BpsTable& b);

/// Coefficients c_0..c_D of classical + Σ_d N0_d d^3 q^d/(1-q^d).
/// N0[i] is the genus-0 invariant of degree i+1; requires D <= N0.size().
std::vector<Rational> yukawa_A(const Rational& classical, const std::vector<Rational>& N0, int D);

/// One constant deformation class ζ = (Σ_j u_j ∂/∂z_j) ⊗ (Σ_k a_k dz̄_k).
struct Deformation {
  std::vector<ComplexQ> u;
  std::vector<ComplexQ> a;
};

/// B-side Yukawa coupling on the semi-flat mirror of a quadratic potential with
/// Hessian H. Complex coordinates are dz_j = Σ_k H_jk dx^k + i dy_j. The value is
/// vol · top(Ω ∧ (ζ_1∧…∧ζ_n)⌟Ω) / top(Ω ∧ Ω̄), where the polyvector part contracts
/// as ι_{u_n}…ι_{u_1}Ω and the form parts wedge in order.
ComplexQ yukawa_B_semiflat(const Matrix<Rational>& H, const std::vector<Deformation>& zeta,
                           const Rational& volume = Rational(1));

/// Half-integer weights are stored doubled: key 2j.
using Sl2Single = std::map<int, BigInt>;

/// N_{j,k} keyed by (2j, 2k).
using Sl2Table = std::map<std::pair<int, int>, BigInt>;

/// Multiplicities of V_j in [V_{1/2} + 2V_0]^{⊗g}.
Sl2Single tensor_power_decompose(int g);

/// Solves Σ_g n^g [V_{1/2}+2V_0]^{⊗g} = Σ N_{j,k} (-1)^{2k} (2k+1) V_j by descending
/// highest weight. Returns g -> n^g with zero entries omitted.
std::map<int, BigInt> bps_from_sl2(const Sl2Table& N);

/// The right side Σ N_{j,k} (-1)^{2k} (2k+1) V_j.
Sl2Single sl2_left_content(const Sl2Table& N);

}  // namespace syzlab
