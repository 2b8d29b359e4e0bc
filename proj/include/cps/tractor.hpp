#pragma once

#include <vector>

#include "cps/ambient.hpp"
#include "cps/curvature.hpp"
#include "cps/geometry.hpp"
#include "cps/report.hpp"
#include "cps/structure.hpp"

namespace cps {

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

// A weighted scalar: the coefficient of a section of the line bundle of
// homogeneity `weight` over the patch, written in the trivialization fixed by
// the contact form.  In that trivialization the canonical connection acts on
// densities of every weight by the plain frame derivative, so a density is
// just a scalar carrying its weight.
struct Density {
  Scalar value;
  int weight = 0;
};

// ---------------------------------------------------------------------------
// The standard tractor bundle
// ---------------------------------------------------------------------------
//
// Over a patch of dimension 2n-1 the standard tractor bundle has rank 2n.  A
// section is stored as a column z = (z^r, z^p, z^v) whose fiber slots are
// ordered
//   slot 0        : the radial component       (a density of weight -1),
//   slots 1..2n-2 : the hyperplane components  (mirroring the frame labels),
//   slot 2n-1     : the contact-line component (a density of weight -1).
// The canonical connection acts as
//   D_alpha z + M_alpha z,
// where D_alpha differentiates each slot by its natural rule (frame
// derivative on the density slots, the canonical connection on the
// hyperplane slot) and M_alpha is the algebraic part
//   M_alpha = [ 0            P_{alpha q}                    (1/2) P_{alpha 0} ]
//             [ delta_alpha^p  delta_alpha^0 (2P+Q)_q^p     P_alpha^p         ]
//             [ 2 delta_alpha^0  -omega_{alpha q}           0                 ],
// built from the extended second-order coefficients P of the cone connection
// and the trace invariant Q.  The fiber carries the parallel pairing
//   Omega(radial, contact) = 1 = -Omega(contact, radial),
//   Omega(hyperplane pair) = omega,
// and every M_alpha lies in its symplectic algebra (enforced internally).

struct TractorConnectionData {
  ContactProjectiveStructure structure;
  // matrix[alpha] is the rank-2n endomorphism (M_alpha)^A_B stored "ud";
  // alpha runs over the patch frame directions 0..2n-2.
  std::vector<Tensor> matrix;
  // The extended second-order coefficients P_{alpha beta} over the full frame
  // index range, as used to build the matrices (convenient for callers that
  // iterate the connection on jets).
  Tensor p;

  int dim() const { return structure.frame.dim(); }
  int n() const { return structure.frame.n(); }
  int rank() const { return dim() + 1; }
};

// The parallel fiber pairing described above, as a rank-2n "dd" tensor over
// the tractor fiber index.
Tensor tractor_pairing(const AdaptedFrame& fr);

// Builds the canonical tractor connection of a structure.  Throws
// InternalError if any matrix fails to lie in the symplectic algebra of the
// fiber pairing.
TractorConnectionData tractor_connection(const ContactProjectiveStructure& S);

// ---------------------------------------------------------------------------
// Curvature blocks
// ---------------------------------------------------------------------------
//
// The curvature of the tractor connection attaches an endomorphism of the
// fiber to every frame pair.  Relative to the slot order (radial,
// hyperplane, contact) the endomorphism attached to a hyperplane pair has
// the block form
//
//   kappa(E_i,E_j) = [ a_{ij}    c_{ijq}     e_{ij}    ]
//                    [ b_{ij}^p  d_{ijq}^p   c_{ij}^p  ]
//                    [ 0         -b_{ijq}    -a_{ij}   ]
//
// (the redundant corner entries are forced by the pairing and are verified,
// not stored), and the endomorphism attached to a Reeb/hyperplane pair has
// the same shape with blocks a0..e0 carrying one hyperplane label fewer.
// With the convention used here the stored Reeb blocks are the components of
// kappa(T, E_i) itself; the curvature matrix of the pair (T, E_i) computed
// from commutators equals twice that endomorphism.
struct KappaBlocks {
  AdaptedFrame frame;
  // hyperplane-pair blocks, skew in the leading pair ij
  Tensor a;  // "dd"    corner scalar block
  Tensor b;  // "ddu"   torsion-level block b_{ij}^p
  Tensor c;  // "ddd"   one-slot block c_{ijq}
  Tensor d;  // "dddu"  hyperplane endomorphism block d_{ijq}^p
  Tensor e;  // "dd"    top corner block
  // Reeb-pair blocks
  Tensor a0;  // "d"
  Tensor b0;  // "du"
  Tensor c0;  // "dd"
  Tensor d0;  // "ddu"
  Tensor e0;  // "d"
};

// Validates shapes, hyperplane support, skewness of the leading pair, and the
// pairing symmetries d_{ij[qp]} = 0 and d_{i[qp]} = 0 of candidate blocks.
// Throws DomainError on violation; returns the assembled value otherwise.
KappaBlocks make_kappa_blocks(const AdaptedFrame& frame, const Tensor& a, const Tensor& b,
                              const Tensor& c, const Tensor& d, const Tensor& e, const Tensor& a0,
                              const Tensor& b0, const Tensor& c0, const Tensor& d0,
                              const Tensor& e0);

// Curvature of the canonical tractor connection, as blocks.  Internally this
// is computed from commutators of the connection matrices and the base
// curvature, and the block form above is enforced exactly (InternalError on
// violation), including the identities
//   b_{ij}^p  = tau_{ij}^p   (the contact torsion),
//   a_{ij}    = -Q_{[ij]},
//   2 b_i^p   = Q_i^p.
KappaBlocks tractor_curvature(const ContactProjectiveStructure& S);

// ---------------------------------------------------------------------------
// The normal-form differential
// ---------------------------------------------------------------------------
//
// The fiber algebra is graded by the slot levels (+1, 0, -1); the curvature
// pairs the two negative-level directions attached to the frame.  Its
// divergence-type differential is
//   (del* kappa)(x) = sum_alpha [e^alpha, kappa(e_alpha, x)]
//                     - (1/2) sum_alpha kappa(e_alpha, [e^alpha, x]_-),
// the sum running over the Reeb direction and the hyperplane directions,
// with e^alpha the dual algebra elements of the pairing and [.,.]_- the
// negative-level part of the bracket.  value[0] is the matrix attached to
// the Reeb direction and value[j] the matrix attached to hyperplane
// direction j; each is a rank-2n "ud" endomorphism.
struct DelStarKappa {
  std::vector<Tensor> value;

  bool is_zero() const {
    for (const Tensor& t : value)
      if (!t.is_zero()) return false;
    return true;
  }
};

DelStarKappa del_star_kappa(const KappaBlocks& k);

// True exactly when the normal-form differential of the curvature vanishes.
// This is equivalent to the vanishing of the contact torsion, and the
// equivalence is enforced on every call (InternalError on disagreement).
bool is_normal(const ContactProjectiveStructure& S);

// ---------------------------------------------------------------------------
// The admissible curvature space
// ---------------------------------------------------------------------------
//
// Membership of a block collection in the distinguished space of curvature
// values: the corner block is minus twice the skew part of the lowered mixed
// block, the lowered torsion-level block has no completely skew part and all
// three of its traces vanish, and the five trace conditions tying the
// higher blocks to each other hold.  Every report entry is an exact
// residual.
CheckReport k_membership(const KappaBlocks& k);

// ---------------------------------------------------------------------------
// Gauge motions of the curvature
// ---------------------------------------------------------------------------
//
// Applies to the blocks the fiberwise action of the parabolic gauge group:
// first the unipotent motion with hyperplane parameter gamma_q (a "d" tensor
// supported on hyperplane labels), vertical parameter gamma0, acting by
//   kappa(E_i,E_j) -> B^{-1} kappa(E_i,E_j) B,
//   kappa(T,E_i)   -> B^{-1} (kappa(T,E_i) + gamma^s kappa(E_s,E_i)) B,
// where B = 1 + N and N places gamma_q, gamma^p, gamma0 in the three
// positive-level positions; then the reductive motion with scale f and
// symplectic hyperplane block F_i^p ("du"), acting by
//   kappa(E_i,E_j) -> D^{-1} (f^2 F_i^u F_j^v kappa(E_u,E_v)) D,
//   kappa(T,E_i)   -> D^{-1} (f^3 F_i^u kappa(T,E_u)) D,
// where D is the block-diagonal matrix (1/f, F, f).  Throws DomainError when
// f = 0, when F fails to be symplectic for the hyperplane form, or when a
// parameter has support off the hyperplane labels.  When the input blocks
// pass the membership report the output blocks are required to pass as well
// (InternalError otherwise).
KappaBlocks gauge_action(const KappaBlocks& k, const Tensor& gamma, const Scalar& gamma0,
                         const Scalar& f, const Tensor& fblock);

// ---------------------------------------------------------------------------
// Jets of densities
// ---------------------------------------------------------------------------

// The full one-jet of a weight-k density as a tractor covector:
//   D_A h = (k h, del_j h, (1/2) del_0 h)
// over the slot order (radial, hyperplane, contact).
Tensor tractor_d(const AdaptedFrame& fr, const Density& h);

// The tractor connection on covectors, one "d" column of rank 2n per frame
// direction:
//   (del_alpha z)_A = D_alpha z_A - (M_alpha)^B_A z_B,
// with D_alpha acting on the hyperplane slot by the canonical connection and
// on the density slots by the frame derivative.  Throws DomainError when z
// is not a rank-2n covector.
std::vector<Tensor> tractor_covector_derivative(const TractorConnectionData& tc, const Tensor& z);

// The invariant second-order operator on weight-one densities,
//   L_{ij} h = del_i del_j h + (1/2) omega_{ij} del_0 h - P_{ij} h,
// returned as a "dd" tensor supported on hyperplane labels.  Throws
// DomainError unless h has weight one.
Tensor contact_hessian(const ContactProjectiveStructure& S, const Density& h);

// Verifies that the operator above does not depend on the chosen contact
// form: recomputes it through the rescaled structure of theta -> f^2 theta,
// transporting the density derivatives by
//   del~_i h = del_i h + gamma_i h,
//   f^2 del~_0 h = del_0 h + gamma_0 h + 2 gamma^p del_p h
// with gamma = dlog f, and records the exact residual against the original
// operator.  Throws DomainError when f = 0 or h does not have weight one.
CheckReport contact_hessian_invariance(const ContactProjectiveStructure& S, const Density& h,
                                       const Scalar& f);

}  // namespace cps
