#include "cps/structure.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cps/linsolve.hpp"

namespace cps {

namespace {

// θ and the Reeb field have constant components in an adapted frame.
Tensor theta_covector(int dim) {
  Tensor t(dim, "d");
  t.set({0}, Scalar::one());
  return t;
}

Tensor reeb_vector(int dim) {
  Tensor t(dim, "u");
  t.set({0}, Scalar::one());
  return t;
}

bool has_nonzero_zero_index_component(const Tensor& t) {
  std::vector<int> idx(static_cast<std::size_t>(t.rank()), 0);
  do {
    bool touches_zero = false;
    for (int v : idx) touches_zero = touches_zero || (v == 0);
    if (touches_zero && !t.at(idx).is_zero()) return true;
  } while (t.next_index(idx));
  return false;
}

// Random low-degree scalar: a small rational plus a small rational multiple
// of one coordinate.
Scalar random_entry(Rng& rng, int dim) {
  Scalar s = Scalar::constant(rng.small_rational());
  int v = static_cast<int>(rng.next_in(0, dim - 1));
  s += Scalar::constant(rng.small_rational()) * Scalar::variable(v);
  return s;
}

}  // namespace

bool admits_contact_geodesics(const FrameConnection& conn) {
  const int dim = conn.frame.dim();
  Tensor nth = covariant_derivative(theta_covector(dim), conn);
  for (int i = 1; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      if (!(nth.at({i, j}) + nth.at({j, i})).is_zero()) return false;
  return true;
}

TheoremAReport verify_theorem_A(const FrameConnection& conn) {
  const int dim = conn.frame.dim();
  TheoremAReport rep;

  rep.parallel_contact_form = covariant_derivative(theta_covector(dim), conn).is_zero();
  rep.parallel_omega = covariant_derivative(conn.frame.omega_lo, conn).is_zero();
  rep.parallel_reeb = covariant_derivative(reeb_vector(dim), conn).is_zero();

  Tensor tau = torsion(conn);
  rep.reeb_torsion_vanishes = true;
  for (int b = 0; b < dim; ++b)
    for (int g = 0; g < dim; ++g)
      if (!tau.at({0, b, g}).is_zero()) rep.reeb_torsion_vanishes = false;

  rep.torsion_trace_vanishes = true;
  for (int a = 0; a < dim; ++a) {
    Scalar tr;
    for (int s = 0; s < dim; ++s) tr += tau.at({a, s, s});
    if (!tr.is_zero()) rep.torsion_trace_vanishes = false;
  }

  rep.torsion_theta_component = true;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      if (tau.at({a, b, 0}) != conn.frame.omega_lo.at({a, b}))
        rep.torsion_theta_component = false;

  return rep;
}

FrameConnection canonicalize(const FrameConnection& nabla0, CanonicalizationTrace* trace) {
  if (!admits_contact_geodesics(nabla0))
    throw DomainError("canonicalize: connection does not admit the contact geodesics of theta");

  const AdaptedFrame& fr = nabla0.frame;
  const int dim = fr.dim();
  FrameConnection cur = nabla0;
  auto record = [&]() {
    if (trace) trace->stages.push_back(cur.gamma);
  };

  // Correction 1: make θ parallel (kills Γ_{αβ}^0).
  {
    Tensor nth = covariant_derivative(theta_covector(dim), cur);
    Tensor lam(dim, "ddu");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) lam.set({a, b, 0}, nth.at({a, b}));
    cur.gamma = cur.gamma + lam;
    record();
  }

  // Correction 2: make the Reeb field parallel (kills Γ_{α0}^γ).
  {
    Tensor nT = covariant_derivative(reeb_vector(dim), cur);
    Tensor lam(dim, "ddu");
    for (int a = 0; a < dim; ++a)
      for (int g = 0; g < dim; ++g) lam.set({a, 0, g}, -nT.at({a, g}));
    cur.gamma = cur.gamma + lam;
    record();
  }

  // Correction 3: remove torsion in the Reeb direction.
  {
    Tensor tau = torsion(cur);
    Tensor lam(dim, "ddu");
    for (int b = 0; b < dim; ++b)
      for (int g = 0; g < dim; ++g) lam.set({0, b, g}, -tau.at({0, b, g}));
    cur.gamma = cur.gamma + lam;
    record();
  }

  // Correction 4: make dθ parallel.  With the lowered form
  //   Λ_{αβk} = −∇_k ω_{αβ} + ½(X_{αβk} + X_{βkα} + X_{kαβ}),
  //   X_{αβγ} = τ_{αβ}^p ω_{γp},
  // only hyperplane components survive here; the output raises as
  // Λ_{αβ}^p = ω^{pq} Λ_{αβq}.
  {
    Tensor tau = torsion(cur);
    Tensor nom = covariant_derivative(fr.omega_lo, cur);  // slots (k, α, β)
    const Scalar half = Scalar::rational(1, 2);

    Tensor x(dim, "ddd");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int g = 0; g < dim; ++g) {
          Scalar acc;
          for (int p = 0; p < dim; ++p) acc += tau.at({a, b, p}) * fr.omega_lo.at({g, p});
          x.set({a, b, g}, acc);
        }

    Tensor lam3(dim, "ddd");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int k = 1; k < dim; ++k) {
          Scalar v = -nom.at({k, a, b}) +
                     half * (x.at({a, b, k}) + x.at({b, k, a}) + x.at({k, a, b}));
          lam3.set({a, b, k}, v);
        }
    cur.gamma = cur.gamma + raise_slot(lam3, 2, fr.omega_up);
    record();
  }

  // Correction 5: remove the torsion trace via
  //   (2n−1) γ_i = τ_{ip}^p,  Λ_{ij}^p = γ_j δ_i^p + ω_{ij} γ^p.
  {
    Tensor tau = torsion(cur);
    const Scalar inv = Scalar::one() / Scalar::integer(dim);  // dim = 2n−1
    Tensor gam(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar tr;
      for (int p = 0; p < dim; ++p) tr += tau.at({i, p, p});
      gam.set({i}, tr * inv);
    }
    Tensor gup = raise_slot(gam, 0, fr.omega_up);

    Tensor lam(dim, "ddu");
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j)
        for (int p = 1; p < dim; ++p) {
          Scalar v = fr.omega_lo.at({i, j}) * gup.at({p});
          if (i == p) v += gam.at({j});
          lam.set({i, j, p}, v);
        }
    cur.gamma = cur.gamma + lam;
    record();
  }

  if (!verify_theorem_A(cur).all())
    throw InternalError("canonicalize: corrections failed to reach the normal form");
  return cur;
}

ContactProjectiveStructure make_structure(const FrameConnection& rep) {
  return ContactProjectiveStructure{rep.frame, canonicalize(rep)};
}

Tensor contact_torsion(const ContactProjectiveStructure& S) {
  const int dim = S.frame.dim();
  Tensor tau = torsion(S.canonical_rep);
  Tensor out(dim, "ddu");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k) out.set({i, j, k}, tau.at({i, j, k}));
  return out;
}

Tensor change_connection_frame(const FrameConnection& conn, const AdaptedFrame& new_frame) {
  const AdaptedFrame& old_fr = conn.frame;
  const int dim = old_fr.dim();
  if (new_frame.dim() != dim)
    throw DomainError("change_connection_frame: frames live on patches of different dimension");

  // M_α^δ = θ^δ(Ẽ_α) and (M⁻¹)_ε^γ = θ̃^γ(E_ε), both evaluated by pairing
  // coframes of one frame with vector fields of the other.
  std::vector<std::vector<Scalar>> m(dim, std::vector<Scalar>(dim));
  std::vector<std::vector<Scalar>> minv(dim, std::vector<Scalar>(dim));
  for (int a = 0; a < dim; ++a)
    for (int d = 0; d < dim; ++d) {
      Scalar s1, s2;
      for (int mu = 0; mu < dim; ++mu) {
        s1 += old_fr.coframe[d][mu] * new_frame.frame[a][mu];
        s2 += new_frame.coframe[d][mu] * old_fr.frame[a][mu];
      }
      m[a][d] = s1;
      minv[a][d] = s2;
    }
  for (int a = 0; a < dim; ++a)
    for (int g = 0; g < dim; ++g) {
      Scalar acc;
      for (int d = 0; d < dim; ++d) acc += m[a][d] * minv[d][g];
      if (acc != (a == g ? Scalar::one() : Scalar::zero()))
        throw InternalError("change_connection_frame: frame pairings are not inverse");
    }

  // n[δ][β][ε] = E_δ(M_β^ε) + M_β^ζ Γ_{δζ}^ε, then contract with M and M⁻¹.
  std::vector<std::vector<std::vector<Scalar>>> nmid(
      dim, std::vector<std::vector<Scalar>>(dim, std::vector<Scalar>(dim)));
  for (int d = 0; d < dim; ++d)
    for (int b = 0; b < dim; ++b)
      for (int e = 0; e < dim; ++e) {
        Scalar acc = old_fr.apply(d, m[b][e]);
        for (int z = 0; z < dim; ++z) acc += m[b][z] * conn.gamma.at({d, z, e});
        nmid[d][b][e] = acc;
      }

  std::vector<std::vector<std::vector<Scalar>>> q(
      dim, std::vector<std::vector<Scalar>>(dim, std::vector<Scalar>(dim)));
  for (int d = 0; d < dim; ++d)
    for (int b = 0; b < dim; ++b)
      for (int g = 0; g < dim; ++g) {
        Scalar acc;
        for (int e = 0; e < dim; ++e) acc += nmid[d][b][e] * minv[e][g];
        q[d][b][g] = acc;
      }

  Tensor out(dim, "ddu");
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int g = 0; g < dim; ++g) {
        Scalar acc;
        for (int d = 0; d < dim; ++d) acc += m[a][d] * q[d][b][g];
        out.set({a, b, g}, acc);
      }
  return out;
}

FrameConnection scale_transport(const ContactProjectiveStructure& S, const Scalar& f) {
  if (f.is_zero()) throw DomainError("scale_transport: scale function must be nonzero");
  const AdaptedFrame& fr = S.frame;
  const int dim = fr.dim();

  std::vector<Scalar> gam = dlog(fr, f);  // γ_α = E_α(f)/f
  Tensor gup_t(dim, "u");
  for (int p = 1; p < dim; ++p) {
    Scalar acc;
    for (int k = 1; k < dim; ++k) acc += fr.omega_up.at({p, k}) * gam[k];
    gup_t.set({p}, acc);
  }
  Tensor ngup = covariant_derivative(gup_t, S.canonical_rep);  // (α, j) -> ∇_α γ^j
  Tensor tau = torsion(S.canonical_rep);

  const Scalar two = Scalar::integer(2);
  const Scalar four = Scalar::integer(4);

  // Difference tensor to the representative adapted to θ̃ = f²θ, still written
  // in the original frame.
  Tensor lam(dim, "ddu");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int p = 1; p < dim; ++p) {
        Scalar v = fr.omega_lo.at({i, j}) * gup_t.at({p});
        if (j == p) v += gam[i];
        if (i == p) v += gam[j];
        lam.set({i, j, p}, v);
      }
  for (int a = 0; a < dim; ++a) lam.set({a, 0, 0}, two * gam[a]);
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      lam.set({i, 0, j}, four * gam[i] * gup_t.at({j}) - two * ngup.at({i, j}));
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j) {
      Scalar v = -two * ngup.at({i, j});
      for (int qq = 1; qq < dim; ++qq) v -= two * gup_t.at({qq}) * tau.at({qq, i, j});
      lam.set({0, i, j}, v);
    }
  for (int i = 1; i < dim; ++i) {
    Scalar v = -two * ngup.at({0, i}) + four * gam[0] * gup_t.at({i});
    for (int qq = 1; qq < dim; ++qq) v += four * gup_t.at({qq}) * ngup.at({qq, i});
    lam.set({0, 0, i}, v);
  }

  FrameConnection mid{fr, S.canonical_rep.gamma + lam};
  AdaptedFrame tframe = rescale(fr, f);
  FrameConnection out{tframe, change_connection_frame(mid, tframe)};
  if (!verify_theorem_A(out).all())
    throw InternalError("scale_transport: transported representative is not in normal form");
  return out;
}

Tensor raise_deformation(const Tensor& pi_low, const AdaptedFrame& frame) {
  return raise_slot(pi_low, 2, frame.omega_up);
}

void validate_deformation(const Tensor& pi_low, const AdaptedFrame& frame) {
  const int dim = frame.dim();
  if (pi_low.dim() != dim || pi_low.variance() != "ddd")
    throw DomainError("deformation: expected a rank-3 lower tensor on the patch");
  if (has_nonzero_zero_index_component(pi_low))
    throw DomainError("deformation: components off the contact hyperplane must vanish");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k)
        if (pi_low.at({i, j, k}) != pi_low.at({i, k, j}))
          throw DomainError("deformation: must be symmetric in the last two indices");
  for (int pair = 0; pair < 3; ++pair) {
    // Contract ω^ against slots (0,1), (0,2), (1,2); the free slot must trace out.
    for (int free = 1; free < dim; ++free) {
      Scalar tr;
      for (int p = 1; p < dim; ++p)
        for (int qq = 1; qq < dim; ++qq) {
          std::vector<int> idx(3);
          if (pair == 0) idx = {p, qq, free};
          else if (pair == 1) idx = {p, free, qq};
          else idx = {free, p, qq};
          tr += frame.omega_up.at({p, qq}) * pi_low.at(idx);
        }
      if (!tr.is_zero()) throw DomainError("deformation: all pairings with dθ must vanish");
    }
  }
}

std::pair<Tensor, Tensor> decompose_difference(const Tensor& pi_low,
                                               const AdaptedFrame& frame) {
  validate_deformation(pi_low, frame);
  Tensor sym_part = sym_slots(pi_low, {0, 1, 2});
  Tensor rest = pi_low - sym_part;
  if (!sym_slots(rest, {0, 1, 2}).is_zero())
    throw InternalError("decompose_difference: complement retains a symmetric part");
  return {sym_part, rest};
}

ContactProjectiveStructure deform(const ContactProjectiveStructure& S, const Tensor& pi_low) {
  validate_deformation(pi_low, S.frame);
  FrameConnection conn{S.frame, S.canonical_rep.gamma + raise_deformation(pi_low, S.frame)};
  if (!verify_theorem_A(conn).all())
    throw InternalError("deform: deformed representative left the normal form");
  return ContactProjectiveStructure{S.frame, conn};
}

void validate_torsion_prescription(const Tensor& tau_low, const AdaptedFrame& frame) {
  const int dim = frame.dim();
  if (tau_low.dim() != dim || tau_low.variance() != "ddd")
    throw DomainError("torsion prescription: expected a rank-3 lower tensor on the patch");
  if (has_nonzero_zero_index_component(tau_low))
    throw DomainError("torsion prescription: components off the contact hyperplane must vanish");
  for (int i = 1; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      for (int k = 1; k < dim; ++k)
        if (!(tau_low.at({i, j, k}) + tau_low.at({j, i, k})).is_zero())
          throw DomainError("torsion prescription: must be skew in the first two indices");
  for (int pair = 0; pair < 3; ++pair) {
    for (int free = 1; free < dim; ++free) {
      Scalar tr;
      for (int p = 1; p < dim; ++p)
        for (int qq = 1; qq < dim; ++qq) {
          std::vector<int> idx(3);
          if (pair == 0) idx = {p, qq, free};
          else if (pair == 1) idx = {p, free, qq};
          else idx = {free, p, qq};
          tr += frame.omega_up.at({p, qq}) * tau_low.at(idx);
        }
      if (!tr.is_zero())
        throw DomainError("torsion prescription: all pairings with dθ must vanish");
    }
  }
  if (!alt_slots(tau_low, {0, 1, 2}).is_zero())
    throw DomainError("torsion prescription: complete skew part must vanish");
}

Tensor deformation_from_torsion(const Tensor& tau_low, const AdaptedFrame& frame) {
  validate_torsion_prescription(tau_low, frame);
  const int dim = frame.dim();
  const Scalar third = Scalar::rational(1, 3);
  Tensor pi(dim, "ddd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k)
        pi.set({i, j, k}, third * (tau_low.at({i, j, k}) + tau_low.at({i, k, j})));
  validate_deformation(pi, frame);
  return pi;
}

Tensor random_symmetric_deformation(const AdaptedFrame& frame, Rng& rng) {
  const int dim = frame.dim();
  Tensor pi(dim, "ddd");
  for (int i = 1; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      for (int k = j; k < dim; ++k) {
        Scalar v = random_entry(rng, dim);
        pi.set({i, j, k}, v);
        pi.set({i, k, j}, v);
        pi.set({j, i, k}, v);
        pi.set({j, k, i}, v);
        pi.set({k, i, j}, v);
        pi.set({k, j, i}, v);
      }
  validate_deformation(pi, frame);
  return pi;
}

Tensor random_valid_contact_torsion(const AdaptedFrame& frame, Rng& rng) {
  const int dim = frame.dim();
  const int h = dim - 1;  // hyperplane index count
  auto col = [h](int i, int j, int k) { return ((i - 1) * h + (j - 1)) * h + (k - 1); };

  LinearSystem sys;
  sys.ncols = h * h * h;
  // Skew in the first two indices.
  for (int i = 1; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      for (int k = 1; k < dim; ++k) {
        std::map<int, Scalar> row;
        row[col(i, j, k)] += Scalar::one();
        row[col(j, i, k)] += Scalar::one();
        sys.add_row(std::move(row), Scalar::zero());
      }
  // All pairings with dθ vanish.
  for (int pair = 0; pair < 3; ++pair)
    for (int free = 1; free < dim; ++free) {
      std::map<int, Scalar> row;
      for (int p = 1; p < dim; ++p)
        for (int qq = 1; qq < dim; ++qq) {
          const Scalar& w = frame.omega_up.at({p, qq});
          if (w.is_zero()) continue;
          int c = pair == 0 ? col(p, qq, free) : pair == 1 ? col(p, free, qq) : col(free, p, qq);
          row[c] += w;
        }
      sys.add_row(std::move(row), Scalar::zero());
    }
  // Complete skew part vanishes.
  for (int i = 1; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k) {
        std::map<int, Scalar> row;
        row[col(i, j, k)] += Scalar::one();
        row[col(j, k, i)] += Scalar::one();
        row[col(k, i, j)] += Scalar::one();
        row[col(j, i, k)] -= Scalar::one();
        row[col(i, k, j)] -= Scalar::one();
        row[col(k, j, i)] -= Scalar::one();
        sys.add_row(std::move(row), Scalar::zero());
      }

  LinearSolution hom = solve(sys);
  if (!hom.consistent) throw InternalError("contact torsion space: homogeneous system inconsistent");

  // Pin every free component to a random rational, then solve again for the
  // unique member of the space with those values.
  LinearSystem pinned = sys;
  for (int fc : hom.free_cols)
    pinned.add_row({{fc, Scalar::one()}}, Scalar::constant(rng.small_rational()));
  LinearSolution sol = solve(pinned);
  if (!sol.consistent || !sol.free_cols.empty())
    throw InternalError("contact torsion space: pinned system not uniquely solvable");

  // A common scalar factor preserves every (constant-coefficient) condition;
  // use one to leave the constants.
  Scalar factor = Scalar::one() + Scalar::variable(static_cast<int>(rng.next_in(0, dim - 1)));
  Tensor tau(dim, "ddd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k) tau.set({i, j, k}, sol.particular[col(i, j, k)] * factor);
  validate_torsion_prescription(tau, frame);
  return tau;
}

Tensor random_same_geodesics_difference(const AdaptedFrame& frame, Rng& rng) {
  const int dim = frame.dim();
  Tensor lam(dim, "ddu");
  std::vector<int> idx{0, 0, 0};
  do {
    lam.set(idx, random_entry(rng, dim));
  } while (lam.next_index(idx));

  std::vector<Scalar> sigma(static_cast<std::size_t>(dim));
  for (int i = 1; i < dim; ++i) sigma[static_cast<std::size_t>(i)] = random_entry(rng, dim);

  const Scalar half = Scalar::rational(1, 2);
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j) {
      if (j < i) continue;
      // Keep the skew parts, replace the symmetric parts as the class allows.
      Scalar skew0 = half * (lam.at({i, j, 0}) - lam.at({j, i, 0}));
      lam.set({i, j, 0}, skew0);
      lam.set({j, i, 0}, -skew0);
      for (int k = 1; k < dim; ++k) {
        Scalar skew = half * (lam.at({i, j, k}) - lam.at({j, i, k}));
        Scalar sym;
        if (i == k) sym += sigma[static_cast<std::size_t>(j)];
        if (j == k) sym += sigma[static_cast<std::size_t>(i)];
        lam.set({i, j, k}, skew + sym);
        lam.set({j, i, k}, -skew + sym);
      }
    }
  return lam;
}

Tensor geodesic_difference_section(const Tensor& lambda, const AdaptedFrame& frame) {
  const int dim = frame.dim();
  if (lambda.dim() != dim || lambda.variance() != "ddu")
    throw DomainError("geodesic_difference_section: expected connection-difference variance");
  const Scalar inv = Scalar::one() / Scalar::integer(dim);  // dim = 2n−1
  const Scalar half = Scalar::rational(1, 2);
  Tensor sigma(dim, "d");
  for (int i = 1; i < dim; ++i) {
    Scalar tr;
    for (int p = 1; p < dim; ++p) tr += half * (lambda.at({i, p, p}) + lambda.at({p, i, p}));
    sigma.set({i}, tr * inv);
  }
  return sigma;
}

}  // namespace cps
