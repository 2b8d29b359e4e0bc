#pragma once

#include <string>
#include <vector>

#include "cps/geometry.hpp"
#include "cps/report.hpp"
#include "cps/structure.hpp"

namespace cps {

// Curvature tensor of a frame connection:
//   R(E_α, E_β)E_γ = ∇_α∇_β E_γ − ∇_β∇_α E_γ − ∇_{[E_α,E_β]} E_γ
//                  = R_{αβγ}^σ E_σ,
// returned with variance "dddu".
Tensor curvature(const FrameConnection& conn);

// The curvature invariants of a structure, all computed from its normal-form
// representative.  Latin-index tensors (p, q, w, c) are supported on the
// contact hyperplane and zero-extended; rho is the two-form trace
// ω^{pq} R_{pqαβ}.
struct CurvatureData {
  int n = 0;
  Tensor riemann;      // R_{αβγ}^σ, "dddu"
  Tensor riemann_low;  // R_{αβγδ} = R_{αβγ}^σ ω_{σδ}, "dddd"
  Tensor ricci;        // R_{αβ} = R_{ασβ}^σ, "dd"
  Tensor rho;          // ω^{pq} R_{pqαβ}, "dd"
  Tensor p;            // symmetric-part normalized Ricci-type tensor P_{ij}, "dd"
  Tensor q;            // secondary Ricci-type tensor Q_{ij}, "dd"
  Tensor w;            // trace-adjusted curvature W_{ijk}^l, "dddu"
  Tensor c;            // derived third-order invariant C_{ijk}, "ddd"
};

// Computes CurvatureData and asserts every structural invariant exactly
// (InternalError on violation): R_{αβγ}^0 = 0, R_{αβ0}^σ = 0, symmetry of
// R_{αβkl} in kl, R_{0α} = R_{α0} = 0, ω-tracefreeness of P and Q, the trace
// identities of W and C, and on three-dimensional patches the identical
// vanishing of the W formula (W is then stored as zero by rule and C is
// produced by the torsion-free reduction of its defining formula).
CurvatureData invariant_tensors(const ContactProjectiveStructure& S);

// Reports each structural invariant of CurvatureData as a named check.
CheckReport curvature_invariant_checks(const ContactProjectiveStructure& S);

// Exact verification of the differential identities tying curvature traces,
// torsion, and the derived invariants together: the two general cyclic/
// differential identities of a connection with torsion, their contact-adapted
// trace consequences, and the algebraic relations among Ricci-type traces.
CheckReport bianchi_suite(const ContactProjectiveStructure& S);

// Recomputes all invariants for the rescaled contact form θ̃ = f²θ and checks
// every transformation law against the closed-form prediction from the base
// data (both sides computed independently).  Throws DomainError when f = 0.
CheckReport scale_covariance_check(const ContactProjectiveStructure& S, const Scalar& f);

// For torsion-free structures only (DomainError otherwise): the divergence
// identities relating ∇W to C and to derivatives of P, and on
// three-dimensional patches the complete symmetry of C.
CheckReport cotton_weyl_relation(const ContactProjectiveStructure& S);

// Local flatness verdict: on patches of dimension ≥ 5 the structure is flat
// iff contact torsion and W both vanish; in dimension 3 iff C vanishes.
// Nonvanishing obstructions are named and their maximal degree recorded.
struct FlatnessVerdict {
  bool flat = false;
  std::vector<std::string> obstructions;
  int residual_degree = -1;
};
FlatnessVerdict flatness(const ContactProjectiveStructure& S);

// Residual of the curvature comparison for two connections differing by a
// tensor Λ: R(Γ+Λ) − R(Γ) expanded against ∇Λ, Λ∘Λ, and τ·Λ terms.  Zero for
// every connection and every Λ.
Tensor curvature_difference_residual(const FrameConnection& conn, const Tensor& lambda);

}  // namespace cps
