#pragma once

#include <string>
#include <vector>

#include "cps/curvature.hpp"
#include "cps/geometry.hpp"
#include "cps/report.hpp"
#include "cps/structure.hpp"

namespace cps {

//---------------------------------------------------------------------------
// The symplectified patch
//---------------------------------------------------------------------------
//
// Over a contact patch of dimension 2n−1 the positive multiples f²θ of the
// contact form sweep out a cone of dimension 2n carrying a tautological
// one-form α and the symplectic structure Ω = dα.  Every computation here is
// performed in the dilation-invariant frame consisting of the horizontal
// lifts Ê_α of the base frame fields together with the Euler (radial) field
// 𝕏 generating the fiber dilations.  In that frame a homogeneous tensor has
// components equal to a fixed power of the fiber coordinate times functions
// pulled back from the base, so it is faithfully represented by its base
// components plus that power (its weight).  Differentiating along 𝕏
// multiplies such components by the weight; products add weights.
//
// Ambient indices run 0 … 2n−1: the base frame directions keep their indices
// 0 … 2n−2 and the last index is the radial direction (written ∞ in
// comments).  Ambient indices are raised and lowered with Ω according to
// Ω^{IK} Ω_{KJ} = −δ_I^J, matching the base convention for ω.

// A homogeneous tensor on the symplectified patch: dense components over the
// ambient dimension plus the homogeneity weight.
struct AmbientFrameTensor {
  Tensor components;
  int weight = 0;
};

// The symplectic form of the cone (weight 2, "dd"): hyperplane block ω_{ij},
// radial/Reeb block Ω_{∞0} = 2 = −Ω_{0∞}, all other components zero.  The
// upper companion (weight −2, "uu") satisfies Ω^{IK} Ω_{KJ} = −δ_I^J, so its
// nonzero components are ω^{ij}, Ω^{∞0} = ½, and Ω^{0∞} = −½.
AmbientFrameTensor ambient_omega_lower(const AdaptedFrame& fr);
AmbientFrameTensor ambient_omega_upper(const AdaptedFrame& fr);

// The distinguished dilation-invariant affine connection on the cone
// determined by a contact projective structure.  Its coefficient tensor in
// the invariant frame has weight zero; the radial rows are Γ̂_{I∞}^K =
// δ_I^K = Γ̂_{∞I}^K, and on base directions
//   Γ̂_{αβ}^γ = Γ_{αβ}^γ + O_{αβ}^γ,        Γ̂_{αβ}^∞ = P_{αβ},
// where Γ is the normal-form representative of the structure, P extends the
// second-order invariant to mixed and Reeb components, and O shifts the base
// representative so that the symplectic form becomes parallel.
struct AmbientConnection {
  ContactProjectiveStructure structure;  // base patch and normal-form representative
  Tensor p;      // extended Ricci-type coefficients P_{αβ}, base dim, "dd"
  Tensor o;      // base-representative shift O_{αβ}^γ, base dim, "ddu"
  Tensor gamma;  // ambient coefficients Γ̂_{IJ}^K, ambient dim, "ddu", weight 0

  int dim() const { return gamma.dim(); }
  int n() const { return structure.frame.n(); }
  int radial() const { return dim() - 1; }
};

// Builds the ambient connection of a structure.  The extended P is produced
// in stages: the hyperplane block comes from the curvature invariants, the
// mixed components from divergences of P and Q and a torsion contraction,
//   P_{0i} = (2/(2n−1)) ∇^p P_{ip} + (1/(2n−1)) ∇^p Q_{ip},
//   P_{i0} = (2/(2n−1)) ∇^p P_{ip} − (1/(2(n−1)(2n−1))) ∇^p Q_{ip}
//            − (1/(n−1)) τ_i{}^{pq} P_{qp},
// and finally P_{00} = (1/(n−1)) ∇^p P_{0p} − (1/(n−1)) (2P^{pq}+Q^{pq}) P_{qp}.
// The shift tensor is
//   O_{αβ}^γ = 2(δ_α^0 P_β{}^γ + δ_β^0 P_α{}^γ − δ_α^0 δ_β^0 P_0{}^γ)
//              + δ_α^0 Q_β{}^γ − ½ δ_0^γ ω_{αβ},
// with P_α{}^γ supported on the hyperplane (P_α{}^γ = P_α{}^q δ_q^γ).
AmbientConnection ambient_connection(const ContactProjectiveStructure& S);

// Torsion τ̂_{IJ}^K = Γ̂_{IJ}^K − Γ̂_{JI}^K − ĉ_{IJ}^K of the ambient
// connection, where ĉ embeds the base structure functions (the radial field
// commutes with every lifted frame field).
Tensor ambient_torsion(const AmbientConnection& hat);

// Curvature of a dilation-invariant connection on the cone over the given
// patch, from its weight-zero coefficient tensor ("ddu", dimension
// fr.dim()+1): the frame curvature formula with the radial direction acting
// as zero on weight-zero functions.  Shared by the contact and affine cone
// constructions.
Tensor hatted_curvature(const AdaptedFrame& fr, const Tensor& gamma_hat);

// Curvature R̂_{IJK}^L of the ambient connection ("dddu", ambient dim).
Tensor ambient_curvature(const AmbientConnection& hat);

// Covariant derivative of a homogeneous tensor: prepends a lower ambient
// slot.  In the derivative direction the radial field contributes weight
// times the components; the result keeps the argument's weight.
AmbientFrameTensor ambient_covariant_derivative(const AmbientFrameTensor& t, const AmbientConnection& hat);

// Exact verification of the defining properties of the ambient connection,
// each as a named check:
//   con1  every direction transports the Euler field to itself (∇̂𝕏 = id);
//   con2  the torsion annihilates the Euler field (i(𝕏)τ̂ = 0);
//   con3  the symplectic form is parallel (∇̂Ω = 0);
//   con4  the Ricci trace R̂_{IJ} = R̂_{IPJ}{}^P vanishes;
//   con5  the second trace Ŝ_{IJ} = Ω^{QP} R̂_{QPIJ} vanishes for I, J in
//         the kernel of the tautological form (hyperplane and radial);
//   con6  the induced base connection represents the structure: it admits
//         the contact geodesics, and its difference from the normal-form
//         representative has pure-trace symmetric hyperplane part;
// plus the tautological one-form identities: ∇̂α = ½Ω for α_I = δ_I^0 of
// weight 2, and for the induced base connection ∇̄θ = ½ω on symmetric
// hyperplane components and ∇̄_γ ω_{ij} = 0.
CheckReport verify_ambient_axioms(const AmbientConnection& hat);

// The ambient curvature organized into its base blocks, with every block
// equality and trace identity reported exactly.  Writing ∞ for the radial
// index, the stored blocks are
//   w_{ijk}{}^l = R̂_{ijk}{}^l,   c_{ij}{}^k = R̂_{0ij}{}^k,
//   u_{ijk} = R̂_{ijk}{}^∞,   v_{ij} = ½ R̂_{ij0}{}^∞,
//   a_{ij}  = R̂_{0ij}{}^∞,   b_i   = ½ R̂_{0i0}{}^∞,
// together with the full ambient torsion and the trace Ŝ_{IJ}.  The checks
// verify the hyperplane blocks against the base invariants (R̂_{ijk}{}^l =
// W_{ijk}{}^l and R̂_{0ij}{}^k = C_{ij}{}^k), the torsion block formulas, the
// symmetry R̂_{IJ(KL)} = R̂_{IJKL}, complete tracelessness of τ̂, the trace
// identities tying Ŝ_{i0} and Ŝ_{00} to divergences of P, and the refined
// contracted first Bianchi identity
//   2R̂_{IJ} + Ŝ_{IJ} = −2∇̂^q τ̂_{qIJ} − τ̂^{pq}{}_I τ̂_{pqJ}.
struct AmbientCurvatureBlocks {
  Tensor riemann;  // full ambient curvature, "dddu"
  Tensor w;        // "dddu", hyperplane block R̂_{ijk}{}^l
  Tensor c;        // "ddu",  Reeb block R̂_{0ij}{}^k
  Tensor u;        // "ddd", hyperplane support
  Tensor v;        // "dd"
  Tensor a;        // "dd"
  Tensor b;        // "d"
  Tensor tau;      // ambient torsion, "ddu", ambient dim
  Tensor s;        // trace Ŝ_{IJ}, "dd", ambient dim
  CheckReport checks;
};
AmbientCurvatureBlocks ambient_curvature_blocks(const AmbientConnection& hat);

// For torsion-free structures only (DomainError otherwise): the radial
// curvature blocks expressed through base invariants, every equality checked
// with both sides computed independently:
//   A_{ij}  = (1/(2(1−n))) (∇_p C_{ij}{}^p + 2 W_{pijq} P^{pq}),
//   U_{ijk} = −C_{[ij]k} = (1/(1−2n)) ∇_p W_{ijk}{}^p,
//   B_i     = (1/(2(n−1))) (∇_p ∇_q C^{qp}{}_i − 2 C_{ipq} P^{pq}),
//   V_{ij}  = −A_{[ij]} = (1/(2(n−1))) (∇_p C_{[ij]}{}^p − W_{ijpq} P^{pq}).
CheckReport vanishing_torsion_identities(const ContactProjectiveStructure& S);

// Rescales θ̃ = f²θ, rebuilds the ambient data for the rescaled structure,
// and verifies the closed-form transformation laws of the mixed and radial
// P components against the base data (both sides computed independently):
//   f²P̃_{i0} − P_{i0} = ∇_i γ_0 − 2γ_i γ_0 + γ^p (2∇_i γ_p + 4P_{ip}),
//   f²P̃_{0i} − P_{0i} = ∇_0 γ_i − 2γ_0 γ_i
//                        + γ^p (2∇_i γ_p + 4P_{pi} + Q_{pi} + 2τ_{piq} γ^q),
//   f⁴P̃_{00} − P_{00} = ∇_0 γ_0 − γ_0² + γ^p (4∇_0 γ_p + 4γ^q ∇_p γ_q
//                        + 4P_{0p} + 2P_{p0} + 12γ^q P_{pq} + 2γ^q Q_{pq}),
// where γ = dlog f.  Throws DomainError when f = 0.
CheckReport ambient_scale_check(const ContactProjectiveStructure& S, const Scalar& f);

// The canonical torsion-free affine connection subordinate to the structure:
// ∇′ = ∇ + O_{(αβ)}^γ − ½τ_{αβ}^γ (symmetrized shift minus half the full
// torsion of the normal-form representative).  It admits the contact
// geodesics among its geodesics, parallelizes the frame volume, and its
// projective Weyl tensor B_{αβγ}^σ = R′_{αβγ}^σ + 2δ_{[α}^σ P′_{β]γ}
// − 2P′_{[αβ]} δ_γ^σ, built from the projective Schouten tensor
// P′_{αβ} = (1/(m−1)) (R′_{αβ} − (2/(m+1)) R′_{[αβ]}) on a patch of
// dimension m, satisfies B_{ijk}{}^0 = −¼ τ_{ijk}.  The checks verify these
// facts together with the derivative identities
//   ∇′_α θ_β = ½ω_{αβ},
//   ∇′_α ω_{ij} = 2δ_α^0 P_{[ji]} − ½τ_{ij}{}^p ω_{pα},
//   ∇′_α ω_{i0} = 2P_{αi} + ½Q_{αi}   (P extended as in the ambient build),
// and, when the contact torsion vanishes, B_{αβγ}{}^0 = 0 on all components.
struct SubordinateProjective {
  FrameConnection connection;  // torsion-free representative ∇′
  Tensor ricci;                // R′_{αβ}, "dd"
  Tensor schouten;             // P′_{αβ}, "dd"
  Tensor weyl;                 // B_{αβγ}^σ, "dddu"
  CheckReport checks;
};
SubordinateProjective subordinate_projective(const ContactProjectiveStructure& S);

// Affine cone construction for a torsion-free frame connection on a patch of
// dimension m whose frame volume is parallel (DomainError when the input has
// torsion or Σ_σ Γ_{ασ}^σ ≠ 0).  The cone connection is torsion-free with
// Γ̂_{I∞}^K = δ_I^K = Γ̂_{∞I}^K, base block equal to the input, and
// Γ̂_{αβ}^∞ = P_{αβ} = R_{αβ}/(m−1).  The checks verify: the Euler rows
// (tcon1), parallelism of the weight-(m+1) cone volume, which reduces to
// Σ_K Γ̂_{IK}^K = (m+1) δ_I^∞ (tcon2), Ricci-flatness (tcon3), recovery of
// the input on base directions (tcon4), horizontality of the cone curvature,
// and the block identities: base block equal to the projective Weyl tensor
// B_{αβγ}^σ of the input and radial block R̂_{αβγ}{}^∞ = 2∇_{[α}P_{β]γ}.
struct ThomasAmbient {
  Tensor gamma;     // cone coefficients, dim m+1, "ddu", weight 0
  Tensor riemann;   // cone curvature, "dddu"
  Tensor schouten;  // P_{αβ} = R_{αβ}/(m−1), base dim, "dd"
  Tensor weyl;      // projective Weyl tensor of the input, base dim, "dddu"
  CheckReport checks;
};
ThomasAmbient thomas_ambient(const FrameConnection& conn);

// Lift of a projective structure on the symplectic vector space spanned by
// the hyperplane directions (coordinates x¹ … x^{2n−2} with the standard
// block form) to a contact projective structure on the model patch.  The
// input is a representative's coefficient tensor over the patch dimension
// 2n−1 with hyperplane-only support and no dependence on the x⁰ coordinate
// (DomainError otherwise; torsion is allowed).  The representative is first
// repaired inside its projective class to the unique connection making the
// symplectic form parallel with trace-free torsion — difference tensors
//   Λ_{ijk} = −∇_k ω_{ij} − (3/2) τ_{[ijk]},  then
//   Λ_{ijk} = (2/(m+1)) (ω_{ij} γ_k + ω_{ik} γ_j) with γ_i = ½ τ_{ip}{}^p,
// on the m = 2n−2 dimensional base — and the repaired coefficients, read as
// a connection on the model contact patch, give the normal-form
// representative of the lifted structure: horizontal directions transport
// horizontally, the Reeb field is transported to zero against lifts, and the
// lifted connection is the one the contact form determines canonically.
ContactProjectiveStructure symplectic_lift(const Tensor& gamma0, int n);

}  // namespace cps
