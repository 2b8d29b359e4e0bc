#pragma once

#include "cps/curvature.hpp"
#include "cps/report.hpp"

namespace cps {

// A contact patch carrying a distinguished contact form (through its adapted
// frame) and an almost complex structure J on the contact hyperplane.  The
// constructor validates, exactly over the coefficient field:
//   - J maps the hyperplane to itself (no Reeb row or θ-output column),
//   - J_i^p J_p^j = −δ_i^j,
//   - compatibility: [J(X), Y] + [X, J(Y)] stays in the hyperplane for frame
//     fields, equivalently the lowering J_{ij} = J_i^s ω_{sj} is symmetric,
//   - integrability: [J(X), J(Y)] − [X, Y] = J([J(X), Y] + [X, J(Y)]) on
//     frame fields (both the θ-component and the hyperplane component).
// The lowered form and the induced metric g_{ij} = −J_{ij} are precomputed;
// g is automatically symmetric (compatibility) and nondegenerate (J is
// invertible and ω is nondegenerate on the hyperplane).
struct PseudoHermitian {
  AdaptedFrame frame;
  Tensor j;       // J_i^j, variance "du", hyperplane support
  Tensor j_low;   // J_{ij} = J_i^s ω_{sj}, variance "dd"
  Tensor metric;  // g_{ij} = −J_{ij}, variance "dd"
};

PseudoHermitian make_pseudo_hermitian(const AdaptedFrame& frame, const Tensor& j);

// Canonical connection of a pseudo-hermitian structure together with its
// torsion block and the diagnostics of the defining linear system.  The
// connection is the unique one satisfying
//   1. ∇̄θ = 0,
//   2. ∇̄dθ = 0,
//   3. τ̄_{ij}^γ = ω_{ij} δ_0^γ,
//   4. J_i^p A_p^j = −A_i^p J_p^j for the torsion block A_α^β = τ̄_{0α}^β,
// together with ∇̄J = 0.  The four displayed conditions alone underdetermine
// the coefficients; the solver therefore also assembles the sparse linear
// system for Γ̄ twice — once from conditions 1–4 only and once with the
// parallel-J equations appended — and records both ranks next to the number
// of unknowns, so the report exhibits the deficiency instead of hiding it.
struct TanakaData {
  FrameConnection connection;  // Γ̄_{αβ}^γ
  Tensor torsion_block;        // A_α^β = τ̄_{0α}^β, variance "du"
  int system_unknowns = 0;
  int system_rank_stated_conditions = 0;
  int system_rank_with_parallel_j = 0;
};

// Solves for the canonical connection by block reduction (Koszul-type
// formula on the hyperplane, commutant projection for the Reeb row), then
// re-verifies every defining condition exactly and cross-checks the block
// solution against the unique solution of the assembled linear system.
// Throws DomainError when the data fail to close the conditions.
TanakaData tanaka_connection(const PseudoHermitian& ph);

// The contact projective structure induced by the canonical connection:
// ∇ = ∇̄ + Λ with Λ_{αβ}^γ = −δ_α^0 A_β^γ.  Asserts that ∇ satisfies the
// canonical-representative conditions, that it is already in normal form,
// and that the induced structure has vanishing contact torsion.
ContactProjectiveStructure induced_structure(const PseudoHermitian& ph);

// Curvature data of the canonical connection when the torsion block
// vanishes (transverse symmetry; DomainError otherwise).  The scalar is the
// double trace R = R_{pq} J^{pq} with J^{pq} = ω^{pa} J_a^q, and the flag
// reports constant holomorphic sectional curvature: the hyperplane curvature
// equals its model expression
//   4n(n−1) R_{ijkl} = R (ω_{jl}J_{ik} − ω_{il}J_{jk} + ω_{jk}J_{il}
//                          − ω_{ik}J_{jl} − 2ω_{ij}J_{kl})
// with E_α(R) = 0 in every frame direction.
struct WebsterCurvature {
  Tensor riemann_low;  // R̄_{αβγδ}, variance "dddd"
  Tensor ricci;        // R̄_{αβ} = R̄_{ασβ}^σ, variance "dd"
  Scalar scalar;       // R = R̄_{pq} J^{pq}
  bool constant_curvature = false;
};

WebsterCurvature webster_curvature(const PseudoHermitian& ph);

// Equivalence of flatness and constant curvature for integrable structures
// with transverse symmetry.  Records, all exactly: the solvability metadata
// of the canonical connection; the symmetry of the lowered torsion block;
// vanishing contact torsion of the induced structure; the vanishing of the
// Reeb–hyperplane curvature block; the two curvature symmetries produced by
// a parallel J (skewness of R·J in its last pair and symmetry in pairs);
// agreement of the constant-curvature flag with the flatness verdict (the
// note names the nonvanishing obstruction otherwise); under constant
// curvature also the proportionality 2(n−1)R_{ij} = J_{ij}R and the model
// form of the lowered curvature; and on three-dimensional patches the
// reduction of the third-order invariant, C_{ijk} = −(1/n) ∇_{(i}R_{jk)}.
CheckReport beltrami_check(const PseudoHermitian& ph);

// Flat-model frame with the standard pairing complex structure
// J(E_i) = E_{n−1+i}, J(E_{n−1+i}) = −E_i for i = 1..n−1, whose induced
// metric is the identity; the canonical connection is identically zero.
PseudoHermitian heisenberg_fixture(int n);

}  // namespace cps
