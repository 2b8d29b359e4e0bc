#pragma once

#include <utility>
#include <vector>

#include "cps/geometry.hpp"

namespace cps {

// True iff ∇_{(i}θ_{j)} = 0 exactly on hyperplane indices.
bool admits_contact_geodesics(const FrameConnection& conn);

// The four defining conditions plus two consequences, each checked exactly.
struct TheoremAReport {
  bool parallel_contact_form = false;    // ∇θ = 0
  bool parallel_omega = false;           // ∇dθ = 0
  bool reeb_torsion_vanishes = false;    // i(T)τ = 0
  bool torsion_trace_vanishes = false;   // τ_{ip}^p = 0
  bool parallel_reeb = false;            // ∇T = 0 (consequence)
  bool torsion_theta_component = false;  // τ_{αβ}^0 = ω_{αβ} (consequence)
  bool all() const {
    return parallel_contact_form && parallel_omega && reeb_torsion_vanishes &&
           torsion_trace_vanishes && parallel_reeb && torsion_theta_component;
  }
};
TheoremAReport verify_theorem_A(const FrameConnection& conn);

// Connection coefficients after each of the five successive corrections.
struct CanonicalizationTrace {
  std::vector<Tensor> stages;
};

// Normalizes a connection admitting the contact geodesics of its frame's θ to
// the unique representative with ∇θ = 0, ∇dθ = 0, i(T)τ = 0, τ_{ip}^p = 0.
// Throws DomainError when the input does not admit those contact geodesics.
FrameConnection canonicalize(const FrameConnection& nabla0,
                             CanonicalizationTrace* trace = nullptr);

struct ContactProjectiveStructure {
  AdaptedFrame frame;
  FrameConnection canonical_rep;
};

// Canonicalizes rep and packages the result; rejects connections that do not
// admit contact geodesics.
ContactProjectiveStructure make_structure(const FrameConnection& rep);

// Hyperplane part τ_{ij}^k of the canonical representative's torsion,
// variance "ddu" with all index-0 components zero.
Tensor contact_torsion(const ContactProjectiveStructure& S);

// Re-expresses connection coefficients in another frame over the same patch:
// Γ̃_{αβ}^γ = M_α^δ (E_δ(M_β^ε) + M_β^ζ Γ_{δζ}^ε) (M⁻¹)_ε^γ with Ẽ_α = M_α^δ E_δ.
Tensor change_connection_frame(const FrameConnection& conn, const AdaptedFrame& new_frame);

// The canonical representative for θ̃ = f²θ, computed by adding the explicit
// difference tensor in terms of γ = d log f and then changing to the rescaled
// frame.  Result satisfies the Theorem A conditions for θ̃.
FrameConnection scale_transport(const ContactProjectiveStructure& S, const Scalar& f);

// Deformation tensors enter lowered: Π_{ijk}, variance "ddd", supported on
// hyperplane indices.  The third index raises via Π_{ij}^k = ω^{kq} Π_{ijq}.
using DeformationTensor = Tensor;

Tensor raise_deformation(const Tensor& pi_low, const AdaptedFrame& frame);

// Membership check for differences of structures: hyperplane support,
// symmetry in the last two indices, and all ω-traces zero (which forces the
// complete skew part to vanish).  Throws DomainError otherwise.
void validate_deformation(const Tensor& pi_low, const AdaptedFrame& frame);

// Splits a valid difference into its completely symmetric part A = Π_{(ijk)}
// and the complement B = Π − A (trace-free, symmetric in the last two,
// vanishing complete symmetrization).
std::pair<Tensor, Tensor> decompose_difference(const Tensor& pi_low,
                                               const AdaptedFrame& frame);

// New structure whose canonical representative is canonical_rep + Π with Π
// extended by zeros off the hyperplane block.
ContactProjectiveStructure deform(const ContactProjectiveStructure& S,
                                  const Tensor& pi_low);

// Membership check for contact-torsion prescriptions: hyperplane support,
// skew in the first two indices, completely trace-free, vanishing complete
// skew part.  Throws DomainError otherwise.
void validate_torsion_prescription(const Tensor& tau_low, const AdaptedFrame& frame);

// Π_{ijk} = (2/3) τ_{i(jk)}: the unique deformation with no symmetric part
// whose torsion change realizes τ.
Tensor deformation_from_torsion(const Tensor& tau_low, const AdaptedFrame& frame);

// Deterministic random generators used by the test oracles.
Tensor random_symmetric_deformation(const AdaptedFrame& frame, Rng& rng);
Tensor random_valid_contact_torsion(const AdaptedFrame& frame, Rng& rng);

// Random difference tensor satisfying the same-geodesics conditions
// (Λ_{(ij)}^0 = 0, Λ_{(ij)}^k = δ_i^kσ_j + δ_j^kσ_i); all other components
// unconstrained.  Used to probe normalization uniqueness.
Tensor random_same_geodesics_difference(const AdaptedFrame& frame, Rng& rng);

// σ_i = Λ_{(ip)}^p / (2n−1): the section certifying the second condition.
Tensor geodesic_difference_section(const Tensor& lambda, const AdaptedFrame& frame);

}  // namespace cps
