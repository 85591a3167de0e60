#pragma once

#include <functional>
#include <vector>

#include "syzlab/exterior.hpp"
#include "syzlab/gvbps.hpp"
#include "syzlab/matrix.hpp"

namespace syzlab {

using OpMatrix = Matrix<Rational>;

/// Matrix of a linear operator on Λ*(R^{2n}) in the monomial basis, columns
/// indexed by source mask, rows by target mask.
OpMatrix operator_matrix(Layout source, Layout target, const std::function<ExactForm(const ExactForm&)>& op);

/// Inner product on Λ* induced by a Gram matrix on covectors (minors of g).
OpMatrix exterior_gram(const OpMatrix& covector_gram, int n);

struct Sl2Triple {
  OpMatrix L, Lambda, H;
};

/// L = ω∧·, Λ its adjoint for the inner product from `covector_gram`, H = [L, Λ].
/// The identity Gram matrix is the flat model.
Sl2Triple lefschetz_triple(const ExactForm& omega, const OpMatrix& covector_gram);
Sl2Triple lefschetz_triple(const ExactForm& omega);

/// Fiberwise Fourier transform as a matrix from the primal to the dual frame.
OpMatrix fourier_matrix(int n);

/// Hard Lefschetz triple of the dual-frame form ω_W conjugated back by F.
Sl2Triple mirror_sl2(const ExactForm& omega_W, const OpMatrix& covector_gram);
Sl2Triple mirror_sl2(const ExactForm& omega_W);

struct So4Report {
  double first_relations = 0;   // max entry of [H,L]-2L, [H,Λ]+2Λ, [L,Λ]-H
  double second_relations = 0;  // same for the primed triple
  double cross = 0;             // max entry over the nine [a, b']
  bool ok() const { return first_relations == 0 && second_relations == 0 && cross == 0; }
};

So4Report so4_check(const Sl2Triple& a, const Sl2Triple& b);

/// Whether L^k: Λ^{n-k} → Λ^{n+k} has full rank for every k ≤ n.
bool hard_lefschetz_bijective(const OpMatrix& L, int n);

struct WeightRow {
  int degree, h, h_prime, multiplicity;
};

/// Joint weight multiplicities of the diagonal H and H'. Throws if either is not diagonal.
std::vector<WeightRow> weight_table(const OpMatrix& H, const OpMatrix& Hp, int n);

/// N_{j,k} read off from joint weights by inclusion-exclusion on the highest-weight corner.
Sl2Table decompose_so4(const std::vector<WeightRow>& weights);

}  // namespace syzlab
