#pragma once

#include <vector>

#include "cps/scalar.hpp"
#include "cps/tensor.hpp"

namespace cps {

// A one-form θ = θ_μ dx^μ on a coordinate patch of dimension 2n−1.
struct ContactForm {
  ChartSpec chart;
  std::vector<Scalar> comp;  // θ_μ, indexed by coordinate

  int dim() const { return chart.dim(); }
  int n() const { return chart.n; }
};

// Coefficient of θ ∧ (dθ)^{n−1} against dx^0 ∧ … ∧ dx^{2n−2}.
Scalar contact_volume_coefficient(const ContactForm& theta);

// Throws DomainError unless θ ∧ (dθ)^{n−1} is a nonzero scalar on the patch.
void validate_contact(const ContactForm& theta);

// (dθ)_{μν} = ∂_μ θ_ν − ∂_ν θ_μ in coordinates, variance "dd".
Tensor dtheta_coordinates(const ContactForm& theta);

// Unique T with θ(T) = 1 and i(T)dθ = 0; components in the coordinate basis.
std::vector<Scalar> reeb(const ContactForm& theta);

// Frame E_0 = T, E_1..E_{2n−2} spanning ker θ, together with the dual coframe
// (θ^0 = θ), the structure functions c_{αβ}^γ of the frame, and the pairing
// ω_{αβ} = dθ(E_α, E_β) with its contact-hyperplane inverse ω^{kl} fixed by
// ω^{kl}ω_{lj} = −δ_j^k.  All index-0 components of ω^ vanish; ω_{0α} = 0.
struct AdaptedFrame {
  ContactForm theta;
  std::vector<std::vector<Scalar>> frame;    // frame[α][μ]: E_α = frame[α][μ] ∂_μ
  std::vector<std::vector<Scalar>> coframe;  // coframe[α][μ]: θ^α = coframe[α][μ] dx^μ
  Tensor c;         // c_{αβ}^γ, variance "ddu"
  Tensor omega_lo;  // ω_{αβ}, variance "dd"
  Tensor omega_up;  // ω^{kl}, variance "uu", zero on index 0

  int dim() const { return theta.dim(); }
  int n() const { return theta.n(); }

  // Directional derivative E_α(f).
  Scalar apply(int alpha, const Scalar& f) const;

  // Asserts every defining identity exactly; throws DomainError on failure.
  void validate() const;
};

// Connection coefficients in an adapted frame: ∇_{E_α} E_β = Γ_{αβ}^γ E_γ.
struct FrameConnection {
  AdaptedFrame frame;
  Tensor gamma;  // Γ_{αβ}^γ, variance "ddu"
};

// τ_{αβ}^γ = Γ_{αβ}^γ − Γ_{βα}^γ − c_{αβ}^γ.
Tensor torsion(const FrameConnection& conn);

// Covariant derivative in the frame; prepends one lower slot:
// (∇S)_{α…} = E_α(S_…) − Γ_{αβ}^σ S_{σ…} per lower slot + Γ_{ασ}^β S^{σ…} per
// upper slot.
Tensor covariant_derivative(const Tensor& t, const FrameConnection& conn);

// Builds the full adapted package from θ and explicit frame rows (E_0 must be
// the Reeb field, E_i must annihilate θ); validates before returning.
AdaptedFrame assemble_adapted_frame(const ContactForm& theta,
                                    std::vector<std::vector<Scalar>> frame_rows);

// Default adapted frame for a bare contact form: E_0 = Reeb, H spanned by a
// deterministic independent subset of ∂_μ − θ_μ T.
AdaptedFrame make_adapted_frame(const ContactForm& theta);

// [E_α, E_β] = c_{αβ}^γ E_γ, computed from the frame and its coframe.
Tensor structure_functions(const std::vector<std::vector<Scalar>>& frame,
                           const std::vector<std::vector<Scalar>>& coframe,
                           const ChartSpec& chart);

// The standard block form ω_{i,n−1+i} = 1 (antisymmetric), variance "dd",
// indices over the full range 0..2n−2 with vanishing 0-components.
Tensor standard_omega(int n);

// Model patch: Θ = ½(dx⁰ + ω_{pq} x^p dx^q), frame E_i = ∂_i + ω_{ip}x^p ∂_0,
// E_0 = 2∂_0, coframe θ^i = dx^i, and the connection with Γ ≡ 0.
struct FlatModel {
  ContactForm theta;
  AdaptedFrame frame;
  FrameConnection connection;
};
FlatModel flat_model(int n);

// Adapted frame for θ̃ = f²θ: Ẽ_i = E_i, f²T̃ = T + 2γ^p E_p, θ̃^i = θ^i − 2γ^iθ
// with γ_i = E_i(f)/f, γ^p = ω^{pk}γ_k.
AdaptedFrame rescale(const AdaptedFrame& frame, const Scalar& f);

// γ_α = E_α(f)/f for all frame directions (index 0 included).
std::vector<Scalar> dlog(const AdaptedFrame& frame, const Scalar& f);

}  // namespace cps
