#include "cps/ambient.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cps {

namespace {

Scalar frac(long num, long den) { return Scalar::rational(num, den); }

void require(bool ok, const std::string& what) {
  if (!ok) throw InternalError("ambient invariant violated: " + what);
}

// The contact form as a frame covector: θ_β = δ_β^0.
Tensor theta_covector(int dim) {
  Tensor t(dim, "d");
  t.set({0}, Scalar::one());
  return t;
}

// Structure functions of the cone frame: the base functions on base pairs,
// zero whenever the radial direction is involved (the Euler field commutes
// with every lifted frame field).
Tensor embedded_structure_functions(const AdaptedFrame& fr) {
  const int dim = fr.dim();
  Tensor chat(dim + 1, "ddu");
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int g = 0; g < dim; ++g) chat.set({a, b, g}, fr.c.at({a, b, g}));
  return chat;
}

// Ŝ_{IJ} = Ω^{QP} R̂_{QPIJ} with the final slot lowered by Ω.
Tensor ambient_s_trace(const Tensor& riemann, const AdaptedFrame& fr) {
  const Tensor om_up = ambient_omega_upper(fr).components;
  const Tensor rlow = lower_slot(riemann, 3, ambient_omega_lower(fr).components);
  const int D = riemann.dim();
  Tensor s(D, "dd");
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      Scalar acc;
      for (int q = 0; q < D; ++q) {
        for (int p = 0; p < D; ++p) {
          const Scalar& w = om_up.at({q, p});
          if (w.is_zero()) continue;
          acc += w * rlow.at({q, p, i, j});
        }
      }
      s.set({i, j}, acc);
    }
  }
  return s;
}

// ∇^p X_{αp} = ω^{pq} ∇_q X_{αp}: raised divergence over the second slot of a
// "dd" tensor.
Tensor raised_div_second(const Tensor& x, const FrameConnection& conn) {
  const AdaptedFrame& fr = conn.frame;
  const int dim = fr.dim();
  Tensor dx = covariant_derivative(x, conn);
  Tensor out(dim, "d");
  for (int a = 0; a < dim; ++a) {
    Scalar acc;
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        const Scalar& w = fr.omega_up.at({p, q});
        if (w.is_zero()) continue;
        acc += w * dx.at({q, a, p});
      }
    }
    out.set({a}, acc);
  }
  return out;
}

// The symmetric hyperplane part of a difference tensor minus its pure-trace
// form σ_j δ_i^k + σ_i δ_j^k (with σ recovered by the trace), together with
// the contact-form component of the symmetric part; zero exactly when the
// difference preserves the contact geodesics.
Tensor pure_trace_residual(const Tensor& lam, const AdaptedFrame& fr) {
  const int dim = fr.dim();
  Tensor sig = geodesic_difference_section(lam, fr);
  Tensor r(dim, "ddu");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      for (int g = 0; g < dim; ++g) {
        Scalar val = frac(1, 2) * (lam.at({i, j, g}) + lam.at({j, i, g}));
        if (g == i) val -= sig.at({j});
        if (g == j) val -= sig.at({i});
        r.set({i, j, g}, val);
      }
    }
  }
  return r;
}

// P_{αβ} = (1/(m−1)) (R_{αβ} − (2/(m+1)) R_{[αβ]}) on a patch of dimension m.
Tensor projective_schouten(const Tensor& ricci, int m) {
  const int dim = ricci.dim();
  Tensor ps(dim, "dd");
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      Scalar skew = frac(1, m + 1) * (ricci.at({a, b}) - ricci.at({b, a}));
      ps.set({a, b}, frac(1, m - 1) * (ricci.at({a, b}) - skew));
    }
  }
  return ps;
}

// B_{αβγ}^σ = R_{αβγ}^σ + 2δ_{[α}^σ P_{β]γ} − 2P_{[αβ]} δ_γ^σ.  For a
// torsion-free connection both traces of B vanish identically.
Tensor projective_weyl(const Tensor& riemann, const Tensor& schouten) {
  const int dim = riemann.dim();
  Tensor b(dim, "dddu");
  for (int al = 0; al < dim; ++al) {
    for (int be = 0; be < dim; ++be) {
      for (int g = 0; g < dim; ++g) {
        for (int s = 0; s < dim; ++s) {
          Scalar val = riemann.at({al, be, g, s});
          if (al == s) val += schouten.at({be, g});
          if (be == s) val -= schouten.at({al, g});
          if (g == s) val -= schouten.at({al, be}) - schouten.at({be, al});
          b.set({al, be, g, s}, val);
        }
      }
    }
  }
  require(contract(b, 2, 3).is_zero(), "projective Weyl tensor must be trace free on its last pair");
  require(contract(b, 1, 3).is_zero(), "projective Weyl tensor must be Ricci trace free");
  return b;
}

}  // namespace

AmbientFrameTensor ambient_omega_lower(const AdaptedFrame& fr) {
  const int dim = fr.dim();
  Tensor om(dim + 1, "dd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j) om.set({i, j}, fr.omega_lo.at({i, j}));
  om.set({dim, 0}, Scalar::integer(2));
  om.set({0, dim}, Scalar::integer(-2));
  return {std::move(om), 2};
}

AmbientFrameTensor ambient_omega_upper(const AdaptedFrame& fr) {
  const int dim = fr.dim();
  Tensor om(dim + 1, "uu");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j) om.set({i, j}, fr.omega_up.at({i, j}));
  om.set({dim, 0}, frac(1, 2));
  om.set({0, dim}, frac(-1, 2));
  return {std::move(om), -2};
}

AmbientConnection ambient_connection(const ContactProjectiveStructure& S) {
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();
  const int inf = dim;
  CurvatureData d = invariant_tensors(S);

  // Extended P.  The mixed components come from divergences of P and Q and a
  // torsion contraction,
  //   P_{0i} = (2/(2n−1)) ∇^p P_{ip} + (1/(2n−1)) ∇^p Q_{ip},
  //   P_{i0} = (2/(2n−1)) ∇^p P_{ip} − (1/(2(n−1)(2n−1))) ∇^p Q_{ip}
  //            − (1/(n−1)) τ_i{}^{pq} P_{qp},
  // and once they are in place the Reeb-Reeb component is
  //   P_{00} = (1/(n−1)) ∇^p P_{0p} − (1/(n−1)) (2P^{pq} + Q^{pq}) P_{qp}.
  Tensor p = d.p;
  {
    const Tensor divp = raised_div_second(d.p, conn);
    const Tensor divq = raised_div_second(d.q, conn);
    const Tensor tl = lower_slot(contact_torsion(S), 2, fr.omega_lo);
    const Tensor tup = raise_slot(raise_slot(tl, 1, fr.omega_up), 2, fr.omega_up);
    for (int i = 1; i < dim; ++i) {
      Scalar tp;
      for (int q = 1; q < dim; ++q)
        for (int r = 1; r < dim; ++r) tp += tup.at({i, q, r}) * d.p.at({r, q});
      p.set({0, i}, frac(2, 2 * n - 1) * divp.at({i}) + frac(1, 2 * n - 1) * divq.at({i}));
      p.set({i, 0}, frac(2, 2 * n - 1) * divp.at({i}) -
                        frac(1, 2 * (n - 1) * (2 * n - 1)) * divq.at({i}) -
                        frac(1, n - 1) * tp);
    }
  }
  {
    const Tensor dp = covariant_derivative(p, conn);
    Scalar div0;
    for (int q = 1; q < dim; ++q) {
      for (int r = 1; r < dim; ++r) {
        const Scalar& w = fr.omega_up.at({q, r});
        if (w.is_zero()) continue;
        div0 += w * dp.at({r, 0, q});
      }
    }
    const Tensor two_p_plus_q = d.p.scaled(Scalar::integer(2)) + d.q;
    const Tensor up = raise_slot(raise_slot(two_p_plus_q, 0, fr.omega_up), 1, fr.omega_up);
    Scalar quad;
    for (int q = 1; q < dim; ++q)
      for (int r = 1; r < dim; ++r) quad += up.at({q, r}) * d.p.at({r, q});
    p.set({0, 0}, frac(1, n - 1) * (div0 - quad));
  }

  // Shift tensor
  //   O_{αβ}^γ = 2(δ_α^0 P_β{}^γ + δ_β^0 P_α{}^γ − δ_α^0 δ_β^0 P_0{}^γ)
  //              + δ_α^0 Q_β{}^γ − ½ δ_0^γ ω_{αβ}.
  const Tensor pup = raise_slot(p, 1, fr.omega_up);
  const Tensor qup = raise_slot(d.q, 1, fr.omega_up);
  Tensor o(dim, "ddu");
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int g = 0; g < dim; ++g) {
        Scalar val;
        if (a == 0) val += Scalar::integer(2) * pup.at({b, g}) + qup.at({b, g});
        if (b == 0) val += Scalar::integer(2) * pup.at({a, g});
        if (a == 0 && b == 0) val -= Scalar::integer(2) * pup.at({0, g});
        if (g == 0) val -= frac(1, 2) * fr.omega_lo.at({a, b});
        o.set({a, b, g}, val);
      }
    }
  }

  // Cone coefficients: radial rows are the identity, base rows carry the
  // shifted representative and the extended P.
  Tensor gh(dim + 1, "ddu");
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int g = 0; g < dim; ++g) gh.set({a, b, g}, conn.gamma.at({a, b, g}) + o.at({a, b, g}));
      gh.set({a, b, inf}, p.at({a, b}));
    }
    gh.set({a, inf, a}, Scalar::one());
    gh.set({inf, a, a}, Scalar::one());
  }
  gh.set({inf, inf, inf}, Scalar::one());
  return AmbientConnection{S, std::move(p), std::move(o), std::move(gh)};
}

Tensor ambient_torsion(const AmbientConnection& hat) {
  return hat.gamma - transpose_slots(hat.gamma, {1, 0, 2}) -
         embedded_structure_functions(hat.structure.frame);
}

Tensor hatted_curvature(const AdaptedFrame& fr, const Tensor& gamma_hat) {
  const int dim = fr.dim();
  const int D = dim + 1;
  if (gamma_hat.dim() != D || gamma_hat.variance() != "ddu")
    throw DomainError("hatted_curvature: coefficients must be a \"ddu\" tensor over the cone dimension");
  const Tensor& g = gamma_hat;
  Tensor r(D, "dddu");
  for (int a = 0; a < D; ++a) {
    for (int b = a + 1; b < D; ++b) {
      for (int c = 0; c < D; ++c) {
        for (int s = 0; s < D; ++s) {
          // Base directions differentiate the weight-zero coefficients; the
          // radial direction acts as zero on them.
          Scalar val;
          if (a < dim) val += fr.apply(a, g.at({b, c, s}));
          if (b < dim) val -= fr.apply(b, g.at({a, c, s}));
          for (int e = 0; e < D; ++e) {
            val += g.at({b, c, e}) * g.at({a, e, s});
            val -= g.at({a, c, e}) * g.at({b, e, s});
          }
          if (a < dim && b < dim) {
            for (int e = 0; e < dim; ++e) {
              const Scalar& cc = fr.c.at({a, b, e});
              if (cc.is_zero()) continue;
              val -= cc * g.at({e, c, s});
            }
          }
          r.set({b, a, c, s}, -val);
          r.set({a, b, c, s}, std::move(val));
        }
      }
    }
  }
  return r;
}

Tensor ambient_curvature(const AmbientConnection& hat) {
  return hatted_curvature(hat.structure.frame, hat.gamma);
}

AmbientFrameTensor ambient_covariant_derivative(const AmbientFrameTensor& t,
                                                const AmbientConnection& hat) {
  const Tensor& gh = hat.gamma;
  const AdaptedFrame& fr = hat.structure.frame;
  const int D = gh.dim();
  const int dim = D - 1;
  if (t.components.dim() != D)
    throw DomainError("ambient_covariant_derivative: tensor dimension must match the cone");
  const std::string& var = t.components.variance();
  const int rk = t.components.rank();
  Tensor out(D, "d" + var);
  std::vector<int> idx(out.rank(), 0);
  do {
    const int a = idx[0];
    std::vector<int> rest(idx.begin() + 1, idx.end());
    // The radial direction multiplies homogeneous components by the weight.
    Scalar val = (a < dim) ? fr.apply(a, t.components.at(rest))
                           : Scalar::integer(t.weight) * t.components.at(rest);
    for (int s = 0; s < rk; ++s) {
      std::vector<int> probe = rest;
      if (var[s] == 'd') {
        for (int e = 0; e < D; ++e) {
          const Scalar& g = gh.at({a, rest[s], e});
          if (g.is_zero()) continue;
          probe[s] = e;
          val -= g * t.components.at(probe);
        }
      } else {
        for (int e = 0; e < D; ++e) {
          const Scalar& g = gh.at({a, e, rest[s]});
          if (g.is_zero()) continue;
          probe[s] = e;
          val += g * t.components.at(probe);
        }
      }
    }
    out.set(idx, val);
  } while (out.next_index(idx));
  return {std::move(out), t.weight};
}

CheckReport verify_ambient_axioms(const AmbientConnection& hat) {
  Rng rng(seed_from_env());
  CheckReport rep;
  const AdaptedFrame& fr = hat.structure.frame;
  const int D = hat.dim();
  const int dim = D - 1;
  const int inf = hat.radial();
  const Tensor& gh = hat.gamma;

  {
    Tensor r(D, "du");
    for (int i = 0; i < D; ++i) {
      for (int k = 0; k < D; ++k) {
        Scalar val = gh.at({i, inf, k});
        if (i == k) val -= Scalar::one();
        r.set({i, k}, val);
      }
    }
    record_residual(rep, "every direction transports the Euler field to itself", "con1", r, rng);
  }
  {
    const Tensor tau_hat = ambient_torsion(hat);
    Tensor r(D, "du");
    for (int j = 0; j < D; ++j)
      for (int k = 0; k < D; ++k) r.set({j, k}, tau_hat.at({inf, j, k}));
    record_residual(rep, "torsion annihilates the Euler field", "con2", r, rng);
  }
  record_residual(rep, "the symplectic form is parallel", "con3",
                  ambient_covariant_derivative(ambient_omega_lower(fr), hat).components, rng);

  const Tensor riemann = ambient_curvature(hat);
  record_residual(rep, "the Ricci trace of the cone curvature vanishes", "con4",
                  contract(riemann, 1, 3), rng);
  {
    const Tensor s = ambient_s_trace(riemann, fr);
    Tensor r(D, "dd");
    for (int i = 1; i < D; ++i)
      for (int j = 1; j < D; ++j) r.set({i, j}, s.at({i, j}));
    record_residual(rep, "the pairing trace of the cone curvature vanishes off the contact form",
                    "con5", r, rng);
  }

  // Induced base connection: the base block of the cone coefficients.
  Tensor base(dim, "ddu");
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int g = 0; g < dim; ++g) base.set({a, b, g}, gh.at({a, b, g}));
  const FrameConnection induced{fr, base};
  record_flag(rep, "the induced base connection admits the contact geodesics", "con6",
              admits_contact_geodesics(induced));
  record_residual(rep, "the induced base connection represents the structure", "con6",
                  pure_trace_residual(base - hat.structure.canonical_rep.gamma, fr), rng);

  {
    AmbientFrameTensor alpha{Tensor(D, "d"), 2};
    alpha.components.set({0}, Scalar::one());
    const Tensor nabla_alpha = ambient_covariant_derivative(alpha, hat).components;
    record_residual(rep, "the tautological form derives to half the symplectic form",
                    "hatnablaalphaOmega",
                    nabla_alpha - ambient_omega_lower(fr).components.scaled(frac(1, 2)), rng);
    record_residual(rep, "the induced connection derives the contact form to half the pairing",
                    "hatnablaalphaOmega",
                    covariant_derivative(theta_covector(dim), induced) -
                        fr.omega_lo.scaled(frac(1, 2)),
                    rng);
    const Tensor cdom = covariant_derivative(fr.omega_lo, induced);
    Tensor r(dim, "ddd");
    for (int g = 0; g < dim; ++g)
      for (int i = 1; i < dim; ++i)
        for (int j = 1; j < dim; ++j) r.set({g, i, j}, cdom.at({g, i, j}));
    record_residual(rep, "the induced connection parallelizes the hyperplane pairing",
                    "hatnablaalphaOmega", r, rng);
  }
  return rep;
}

AmbientCurvatureBlocks ambient_curvature_blocks(const AmbientConnection& hat) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = hat.structure.frame;
  const FrameConnection& conn = hat.structure.canonical_rep;
  const int D = hat.dim();
  const int dim = D - 1;
  const int n = hat.n();
  const int inf = hat.radial();
  const CurvatureData d = invariant_tensors(hat.structure);

  AmbientCurvatureBlocks out;
  out.riemann = ambient_curvature(hat);
  out.tau = ambient_torsion(hat);
  out.s = ambient_s_trace(out.riemann, fr);
  out.w = Tensor(dim, "dddu");
  out.c = Tensor(dim, "ddu");
  out.u = Tensor(dim, "ddd");
  out.v = Tensor(dim, "dd");
  out.a = Tensor(dim, "dd");
  out.b = Tensor(dim, "d");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      for (int k = 1; k < dim; ++k) {
        for (int l = 1; l < dim; ++l) out.w.set({i, j, k, l}, out.riemann.at({i, j, k, l}));
        out.c.set({i, j, k}, out.riemann.at({0, i, j, k}));
        out.u.set({i, j, k}, out.riemann.at({i, j, k, inf}));
      }
      out.v.set({i, j}, frac(1, 2) * out.riemann.at({i, j, 0, inf}));
      out.a.set({i, j}, out.riemann.at({0, i, j, inf}));
    }
    out.b.set({i}, frac(1, 2) * out.riemann.at({0, i, 0, inf}));
  }

  CheckReport& rep = out.checks;
  const Tensor om_lo = ambient_omega_lower(fr).components;
  const Tensor rlow = lower_slot(out.riemann, 3, om_lo);
  record_residual(rep, "lowered cone curvature is symmetric in its last pair", "ambientpairsym",
                  rlow - sym_slots(rlow, {2, 3}), rng);
  record_residual(rep, "the hyperplane block of the cone curvature is W", "wijkl2", out.w - d.w,
                  rng);
  record_residual(rep, "the Reeb block of the cone curvature is C", "cijk2",
                  out.c - raise_slot(d.c, 2, fr.omega_up), rng);

  // Torsion blocks: the contact torsion on hyperplane triples, ±Q on mixed
  // Reeb pairs, and the skew part of the extended P along the radial column.
  {
    const Tensor tauc = contact_torsion(hat.structure);
    const Tensor qup = raise_slot(d.q, 1, fr.omega_up);
    Tensor pred(D, "ddu");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j)
        for (int k = 1; k < dim; ++k) pred.set({i, j, k}, tauc.at({i, j, k}));
      for (int k = 1; k < dim; ++k) {
        pred.set({0, i, k}, qup.at({i, k}));
        pred.set({i, 0, k}, -qup.at({i, k}));
      }
    }
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) pred.set({a, b, inf}, hat.p.at({a, b}) - hat.p.at({b, a}));
    record_residual(rep, "cone torsion blocks match the base invariants", "hattauijk",
                    out.tau - pred, rng);
  }
  const Tensor taul = lower_slot(out.tau, 2, om_lo);
  record_residual(rep, "the lowered cone torsion has no completely skew part", "hattaualt",
                  alt_slots(taul, {0, 1, 2}), rng);
  record_residual(rep, "the natural trace of the cone torsion vanishes", "hattautrace",
                  contract(out.tau, 1, 2), rng);
  {
    const Tensor om_up = ambient_omega_upper(fr).components;
    Tensor tt(D, "d");
    for (int k = 0; k < D; ++k) {
      Scalar acc;
      for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
          const Scalar& w = om_up.at({i, j});
          if (w.is_zero()) continue;
          acc += w * taul.at({i, j, k});
        }
      }
      tt.set({k}, acc);
    }
    record_residual(rep, "the pairing trace of the cone torsion vanishes", "hattautrace", tt, rng);
  }

  // Traces of the radial blocks.
  {
    Tensor r1(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar acc;
      for (int p = 1; p < dim; ++p) {
        for (int k = 1; k < dim; ++k) {
          const Scalar& w = fr.omega_up.at({p, k});
          if (w.is_zero()) continue;
          acc += w * out.u.at({i, p, k});
        }
      }
      r1.set({i}, acc - frac(1, 2) * (hat.p.at({i, 0}) - hat.p.at({0, i})));
    }
    record_residual(rep, "the trace of U recovers the skew mixed P components", "uipp", r1, rng);
    Scalar r2;
    Scalar r3;
    for (int p = 1; p < dim; ++p) {
      for (int k = 1; k < dim; ++k) {
        const Scalar& w = fr.omega_up.at({p, k});
        if (w.is_zero()) continue;
        r2 += w * out.a.at({p, k});
        r3 += w * out.v.at({p, k});
      }
    }
    record_residual(rep, "the trace of A vanishes", "uipp", r2, rng);
    record_residual(rep, "the trace of V is a quarter of the radial pairing trace", "uipp",
                    r3 - frac(1, 4) * out.s.at({0, 0}), rng);
  }

  // Mixed and radial pairing traces against base data.
  {
    Tensor r1(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar acc;
      for (int p = 1; p < dim; ++p) {
        for (int k = 1; k < dim; ++k) {
          const Scalar& w = fr.omega_up.at({p, k});
          if (w.is_zero()) continue;
          acc += w * out.u.at({p, k, i});
        }
      }
      r1.set({i}, out.s.at({i, 0}) - Scalar::integer(2) * acc);
    }
    record_residual(rep, "the mixed pairing trace is twice the traced U block", "hatsi0", r1, rng);
  }
  {
    const Tensor dp = covariant_derivative(hat.p, conn);
    Tensor r2(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar div;  // ∇^p P_{pi}
      for (int p = 1; p < dim; ++p) {
        for (int q = 1; q < dim; ++q) {
          const Scalar& w = fr.omega_up.at({p, q});
          if (w.is_zero()) continue;
          div += w * dp.at({q, p, i});
        }
      }
      r2.set({i}, out.s.at({i, 0}) + Scalar::integer(4) * div -
                      Scalar::integer(2) * hat.p.at({i, 0}) -
                      Scalar::integer(4 * (n - 1)) * hat.p.at({0, i}));
    }
    record_residual(rep, "the mixed pairing trace against divergences of P", "hatsi0", r2, rng);
  }
  {
    const Tensor tl = lower_slot(contact_torsion(hat.structure), 2, fr.omega_lo);
    const Tensor tup =
        raise_slot(raise_slot(raise_slot(tl, 0, fr.omega_up), 1, fr.omega_up), 2, fr.omega_up);
    const Tensor wl = lower_slot(d.w, 3, fr.omega_lo);
    Tensor r3(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar acc;
      for (int p = 1; p < dim; ++p) {
        for (int q = 1; q < dim; ++q) {
          for (int r = 1; r < dim; ++r) {
            const Scalar& t = tup.at({p, q, r});
            if (t.is_zero()) continue;
            acc += t * (wl.at({p, q, r, i}) +
                        Scalar::integer(2) * fr.omega_lo.at({r, i}) * d.p.at({p, q}));
          }
        }
      }
      r3.set({i}, Scalar::integer(1 - n) * out.s.at({i, 0}) - acc);
    }
    record_residual(rep, "the mixed pairing trace against torsion contractions", "hatsi0", r3,
                    rng);
  }
  {
    const Tensor pup2 = raise_slot(raise_slot(d.p, 0, fr.omega_up), 1, fr.omega_up);
    Scalar ppq;  // P_{pq} P^{pq}
    Scalar pqq;  // P^{pq} Q_{pq}
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        ppq += d.p.at({p, q}) * pup2.at({p, q});
        pqq += pup2.at({p, q}) * d.q.at({p, q});
      }
    }
    // ∇_p P^p{}_0 with the first slot raised.
    const Tensor dpu = covariant_derivative(raise_slot(hat.p, 0, fr.omega_up), conn);
    const Scalar divlow = contract(dpu, 0, 1).at({0});
    Scalar r1 = out.s.at({0, 0}) - Scalar::integer(4) * divlow -
                Scalar::integer(4 * (n - 1)) * hat.p.at({0, 0}) - Scalar::integer(8) * ppq;
    record_residual(rep, "the radial pairing trace against divergences of P", "hats00", r1, rng);
    // ∇^p P_{[0p]}
    const Tensor dp = covariant_derivative(hat.p, conn);
    Scalar skewdiv;
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        const Scalar& w = fr.omega_up.at({p, q});
        if (w.is_zero()) continue;
        skewdiv += w * frac(1, 2) * (dp.at({q, 0, p}) - dp.at({q, p, 0}));
      }
    }
    Scalar r2 = out.s.at({0, 0}) - Scalar::integer(8) * skewdiv + Scalar::integer(4) * pqq;
    record_residual(rep, "the radial pairing trace against the skew divergence of P", "hats00",
                    r2, rng);
  }

  // Refined contracted first curvature identity:
  //   2R̂_{IJ} + Ŝ_{IJ} + 2∇̂^q τ̂_{qIJ} + τ̂^{pq}{}_I τ̂_{pqJ} = 0.
  {
    const Tensor ric = contract(out.riemann, 1, 3);
    const Tensor cdt = ambient_covariant_derivative(AmbientFrameTensor{taul, 2}, hat).components;
    Tensor r(D, "dd");
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) {
        Scalar acc = Scalar::integer(2) * ric.at({i, j}) + out.s.at({i, j});
        for (int q = 1; q < dim; ++q) {
          for (int p = 1; p < dim; ++p) {
            const Scalar& w = fr.omega_up.at({q, p});
            if (w.is_zero()) continue;
            acc += Scalar::integer(2) * w * cdt.at({p, q, i, j});
          }
        }
        for (int p = 1; p < dim; ++p) {
          for (int q = 1; q < dim; ++q) {
            for (int a = 1; a < dim; ++a) {
              const Scalar& wa = fr.omega_up.at({p, a});
              if (wa.is_zero()) continue;
              for (int b = 1; b < dim; ++b) {
                const Scalar& wb = fr.omega_up.at({q, b});
                if (wb.is_zero()) continue;
                acc += wa * wb * taul.at({a, b, i}) * taul.at({p, q, j});
              }
            }
          }
        }
        r.set({i, j}, acc);
      }
    }
    record_residual(rep, "refined contracted first curvature identity", "skewtracefirstbianchirefined",
                    r, rng);
  }
  return out;
}

CheckReport vanishing_torsion_identities(const ContactProjectiveStructure& S) {
  if (!contact_torsion(S).is_zero())
    throw DomainError("vanishing_torsion_identities: structure has contact torsion");
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();
  const CurvatureData d = invariant_tensors(S);
  const AmbientCurvatureBlocks blk = ambient_curvature_blocks(ambient_connection(S));

  const Tensor pup2 = raise_slot(raise_slot(d.p, 0, fr.omega_up), 1, fr.omega_up);
  const Tensor wlow = lower_slot(d.w, 3, fr.omega_lo);
  // ∇_p C_{ij}{}^p
  const Tensor divc =
      contract(covariant_derivative(raise_slot(d.c, 2, fr.omega_up), conn), 0, 3);
  CheckReport rep;
  {
    Tensor r(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar wp;
        for (int p = 1; p < dim; ++p)
          for (int q = 1; q < dim; ++q) wp += wlow.at({p, i, j, q}) * pup2.at({p, q});
        r.set({i, j}, blk.a.at({i, j}) -
                          frac(1, 2 * (1 - n)) * (divc.at({i, j}) + Scalar::integer(2) * wp));
      }
    }
    record_residual(rep, "A from the divergence of C", "A4", r, rng);
  }
  {
    Tensor r1(dim, "ddd");
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j)
        for (int k = 1; k < dim; ++k)
          r1.set({i, j, k}, blk.u.at({i, j, k}) +
                                frac(1, 2) * (d.c.at({i, j, k}) - d.c.at({j, i, k})));
    record_residual(rep, "U is the skew part of C", "A5", r1, rng);
    // ∇_p W_{ijk}{}^p
    const Tensor divw = contract(covariant_derivative(d.w, conn), 0, 4);
    Tensor r2(dim, "ddd");
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j)
        for (int k = 1; k < dim; ++k)
          r2.set({i, j, k}, blk.u.at({i, j, k}) - frac(1, 1 - 2 * n) * divw.at({i, j, k}));
    record_residual(rep, "U from the divergence of W", "A5", r2, rng);
  }
  {
    // ∇_p ∇_q C^{qp}{}_i, raising the first two slots of C.
    const Tensor cuu = raise_slot(raise_slot(d.c, 0, fr.omega_up), 1, fr.omega_up);
    const Tensor ddc = covariant_derivative(covariant_derivative(cuu, conn), conn);
    const Tensor div2 = contract(contract(ddc, 1, 2), 0, 1);
    Tensor r(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar cp;
      for (int p = 1; p < dim; ++p)
        for (int q = 1; q < dim; ++q) cp += d.c.at({i, p, q}) * pup2.at({p, q});
      r.set({i}, blk.b.at({i}) -
                     frac(1, 2 * (n - 1)) * (div2.at({i}) - Scalar::integer(2) * cp));
    }
    record_residual(rep, "B from the double divergence of C", "A6", r, rng);
  }
  {
    Tensor r1(dim, "dd");
    Tensor r2(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        r1.set({i, j}, blk.v.at({i, j}) +
                           frac(1, 2) * (blk.a.at({i, j}) - blk.a.at({j, i})));
        Scalar wp;
        for (int p = 1; p < dim; ++p)
          for (int q = 1; q < dim; ++q) wp += wlow.at({i, j, p, q}) * pup2.at({p, q});
        r2.set({i, j}, blk.v.at({i, j}) -
                           frac(1, 2 * (n - 1)) *
                               (frac(1, 2) * (divc.at({i, j}) - divc.at({j, i})) - wp));
      }
    }
    record_residual(rep, "V is the skew part of A", "A7", r1, rng);
    record_residual(rep, "V from the divergence of C", "A7", r2, rng);
  }
  return rep;
}

CheckReport ambient_scale_check(const ContactProjectiveStructure& S, const Scalar& f) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const FrameConnection tconn = scale_transport(S, f);
  const ContactProjectiveStructure tS{tconn.frame, tconn};
  const AmbientConnection hat = ambient_connection(S);
  const AmbientConnection that = ambient_connection(tS);
  const CurvatureData d = invariant_tensors(S);
  const Tensor tl = lower_slot(contact_torsion(S), 2, fr.omega_lo);

  const std::vector<Scalar> ga = dlog(fr, f);
  Tensor gat(dim, "d");
  for (int a = 0; a < dim; ++a) gat.set({a}, ga[a]);
  const Tensor gup = raise_slot(gat, 0, fr.omega_up);
  const Tensor ngam = covariant_derivative(gat, conn);
  const Scalar f2 = f * f;

  CheckReport rep;
  {
    Tensor r(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar rhs = ngam.at({i, 0}) - Scalar::integer(2) * ga[i] * ga[0];
      for (int p = 1; p < dim; ++p) {
        const Scalar& g = gup.at({p});
        if (g.is_zero()) continue;
        rhs += g * (Scalar::integer(2) * ngam.at({i, p}) + Scalar::integer(4) * d.p.at({i, p}));
      }
      r.set({i}, f2 * that.p.at({i, 0}) - hat.p.at({i, 0}) - rhs);
    }
    record_residual(rep, "rescaling law for the mixed component P_{i0}", "pi0transform", r, rng);
  }
  {
    Tensor r(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar rhs = ngam.at({0, i}) - Scalar::integer(2) * ga[0] * ga[i];
      for (int p = 1; p < dim; ++p) {
        const Scalar& g = gup.at({p});
        if (g.is_zero()) continue;
        Scalar inner = Scalar::integer(2) * ngam.at({i, p}) +
                       Scalar::integer(4) * d.p.at({p, i}) + d.q.at({p, i});
        for (int q = 1; q < dim; ++q)
          inner += Scalar::integer(2) * tl.at({p, i, q}) * gup.at({q});
        rhs += g * inner;
      }
      r.set({i}, f2 * that.p.at({0, i}) - hat.p.at({0, i}) - rhs);
    }
    record_residual(rep, "rescaling law for the mixed component P_{0i}", "p0itransform", r, rng);
  }
  {
    Scalar rhs = ngam.at({0, 0}) - ga[0] * ga[0];
    for (int p = 1; p < dim; ++p) {
      const Scalar& g = gup.at({p});
      if (g.is_zero()) continue;
      Scalar inner = Scalar::integer(4) * ngam.at({0, p}) +
                     Scalar::integer(4) * hat.p.at({0, p}) +
                     Scalar::integer(2) * hat.p.at({p, 0});
      for (int q = 1; q < dim; ++q) {
        const Scalar& h = gup.at({q});
        if (h.is_zero()) continue;
        inner += h * (Scalar::integer(4) * ngam.at({p, q}) +
                      Scalar::integer(12) * d.p.at({p, q}) + Scalar::integer(2) * d.q.at({p, q}));
      }
      rhs += g * inner;
    }
    record_residual(rep, "rescaling law for the component P_{00}", "p00transform",
                    f2 * f2 * that.p.at({0, 0}) - hat.p.at({0, 0}) - rhs, rng);
  }
  return rep;
}

SubordinateProjective subordinate_projective(const ContactProjectiveStructure& S) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const AmbientConnection hat = ambient_connection(S);
  const CurvatureData d = invariant_tensors(S);
  const Tensor tauc = contact_torsion(S);

  // ∇′ = ∇ + O_{(αβ)}^γ − ½ τ_{αβ}^γ with the full torsion of the
  // normal-form representative.
  const Tensor lam = sym_slots(hat.o, {0, 1}) - torsion(conn).scaled(frac(1, 2));
  SubordinateProjective out;
  out.connection = FrameConnection{fr, conn.gamma + lam};
  require(torsion(out.connection).is_zero(), "subordinate connection must be torsion free");
  const Tensor rp = curvature(out.connection);
  out.ricci = contract(rp, 1, 3);
  out.schouten = projective_schouten(out.ricci, dim);
  out.weyl = projective_weyl(rp, out.schouten);

  CheckReport& rep = out.checks;
  record_residual(rep, "the subordinate connection parallelizes the frame volume",
                  "contactadapted", contract(out.connection.gamma, 1, 2), rng);
  record_flag(rep, "the subordinate connection admits the contact geodesics", "contactadapted",
              admits_contact_geodesics(out.connection));
  record_residual(rep, "the subordinate connection represents the structure", "contactadapted",
                  pure_trace_residual(lam, fr), rng);

  record_residual(rep, "the subordinate connection derives the contact form to half the pairing",
                  "subinter",
                  covariant_derivative(theta_covector(dim), out.connection) -
                      fr.omega_lo.scaled(frac(1, 2)),
                  rng);
  const Tensor cdom = covariant_derivative(fr.omega_lo, out.connection);
  {
    Tensor r(dim, "ddd");
    for (int a = 0; a < dim; ++a) {
      for (int i = 1; i < dim; ++i) {
        for (int j = 1; j < dim; ++j) {
          Scalar pred;
          if (a == 0) pred += d.p.at({j, i}) - d.p.at({i, j});
          for (int p = 1; p < dim; ++p) {
            const Scalar& t = tauc.at({i, j, p});
            if (t.is_zero()) continue;
            pred -= frac(1, 2) * t * fr.omega_lo.at({p, a});
          }
          r.set({a, i, j}, cdom.at({a, i, j}) - pred);
        }
      }
    }
    record_residual(rep, "the subordinate derivative of the hyperplane pairing", "subinter", r,
                    rng);
  }
  {
    Tensor r(dim, "dd");
    for (int a = 0; a < dim; ++a)
      for (int i = 1; i < dim; ++i)
        r.set({a, i}, cdom.at({a, i, 0}) - Scalar::integer(2) * hat.p.at({a, i}) -
                          frac(1, 2) * d.q.at({a, i}));
    record_residual(rep, "the subordinate derivative against the Reeb direction", "subinter", r,
                    rng);
  }

  // Contravariant blocks along the contact form: B_{ijk}{}^0 = R′_{ijk}{}^0
  // = −¼ τ_{ijk}.
  {
    const Tensor tlc = lower_slot(tauc, 2, fr.omega_lo);
    Tensor r1(dim, "ddd");
    Tensor r2(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          r1.set({i, j, k}, out.weyl.at({i, j, k, 0}) + frac(1, 4) * tlc.at({i, j, k}));
          r2.set({i, j, k}, rp.at({i, j, k, 0}) + frac(1, 4) * tlc.at({i, j, k}));
        }
      }
    }
    record_residual(rep, "the hyperplane Weyl block along the contact form is the torsion",
                    "contactadapted", r1, rng);
    record_residual(rep, "the hyperplane curvature block along the contact form is the torsion",
                    "contactadapted", r2, rng);
  }
  if (tauc.is_zero()) {
    Tensor r(dim, "ddd");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int g = 0; g < dim; ++g) r.set({a, b, g}, out.weyl.at({a, b, g, 0}));
    record_residual(rep, "the Weyl block along the contact form vanishes", "contactadapted2", r,
                    rng);
  } else {
    record_skip(rep, "the Weyl block along the contact form vanishes", "contactadapted2",
                "requires vanishing contact torsion");
  }
  return out;
}

ThomasAmbient thomas_ambient(const FrameConnection& conn) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = conn.frame;
  const int m = fr.dim();
  const int D = m + 1;
  const int inf = m;
  if (!torsion(conn).is_zero()) throw DomainError("thomas_ambient: connection has torsion");
  if (!contract(conn.gamma, 1, 2).is_zero())
    throw DomainError("thomas_ambient: the frame volume is not parallel");

  const Tensor r = curvature(conn);
  const Tensor ric = contract(r, 1, 3);
  require(ric == transpose_slots(ric, {1, 0}),
          "special connections have symmetric Ricci curvature");
  ThomasAmbient out;
  out.schouten = ric.scaled(frac(1, m - 1));
  out.weyl = projective_weyl(r, out.schouten);
  out.gamma = Tensor(D, "ddu");
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int g = 0; g < m; ++g) out.gamma.set({a, b, g}, conn.gamma.at({a, b, g}));
      out.gamma.set({a, b, inf}, out.schouten.at({a, b}));
    }
    out.gamma.set({a, inf, a}, Scalar::one());
    out.gamma.set({inf, a, a}, Scalar::one());
  }
  out.gamma.set({inf, inf, inf}, Scalar::one());
  out.riemann = hatted_curvature(fr, out.gamma);

  CheckReport& rep = out.checks;
  {
    Tensor res(D, "du");
    for (int i = 0; i < D; ++i) {
      for (int k = 0; k < D; ++k) {
        Scalar val = out.gamma.at({i, inf, k});
        if (i == k) val -= Scalar::one();
        res.set({i, k}, val);
      }
    }
    record_residual(rep, "every direction transports the Euler field to itself", "tcon1", res,
                    rng);
  }
  record_residual(rep, "the cone connection is torsion free", "definethomasambient",
                  out.gamma - transpose_slots(out.gamma, {1, 0, 2}) -
                      embedded_structure_functions(fr),
                  rng);
  {
    const Tensor tr = contract(out.gamma, 1, 2);
    Tensor res(D, "d");
    for (int i = 0; i < D; ++i) {
      Scalar val = tr.at({i});
      if (i == inf) val -= Scalar::integer(m + 1);
      res.set({i}, val);
    }
    record_residual(rep, "the cone volume is parallel", "tcon2", res, rng);
  }
  record_residual(rep, "the cone connection is Ricci flat", "tcon3", contract(out.riemann, 1, 3),
                  rng);
  {
    Tensor res(m, "ddu");
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int g = 0; g < m; ++g)
          res.set({a, b, g}, out.gamma.at({a, b, g}) - conn.gamma.at({a, b, g}));
    record_residual(rep, "base directions recover the input connection", "tcon4", res, rng);
  }
  {
    Tensor res(D, "dddu");
    std::vector<int> idx(4, 0);
    do {
      if (idx[0] == inf || idx[1] == inf || idx[2] == inf)
        res.set(idx, out.riemann.at(idx));
    } while (res.next_index(idx));
    record_residual(rep, "the cone curvature is horizontal", "thomashorizontal", res, rng);
  }
  {
    Tensor res(m, "dddu");
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int g = 0; g < m; ++g)
          for (int s = 0; s < m; ++s)
            res.set({a, b, g, s}, out.riemann.at({a, b, g, s}) - out.weyl.at({a, b, g, s}));
    record_residual(rep, "the base curvature block is the projective Weyl tensor", "thomasweyl",
                    res, rng);
  }
  {
    const Tensor dp = covariant_derivative(out.schouten, conn);
    Tensor res(m, "ddd");
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int g = 0; g < m; ++g)
          res.set({a, b, g}, out.riemann.at({a, b, g, inf}) -
                                 (dp.at({a, b, g}) - dp.at({b, a, g})));
    record_residual(rep, "the radial curvature block is the projective Cotton tensor",
                    "thomascotton", res, rng);
  }
  return out;
}

ContactProjectiveStructure symplectic_lift(const Tensor& gamma0, int n) {
  if (n < 2) throw DomainError("symplectic_lift: n must be at least 2");
  const FlatModel fm = flat_model(n);
  const AdaptedFrame& fr = fm.frame;
  const int dim = fr.dim();
  if (gamma0.dim() != dim || gamma0.variance() != "ddu")
    throw DomainError(
        "symplectic_lift: coefficients must be a \"ddu\" tensor over the patch dimension");
  {
    std::vector<int> idx{0, 0, 0};
    do {
      const Scalar& v = gamma0.at(idx);
      if (!v.is_zero()) {
        if (idx[0] == 0 || idx[1] == 0 || idx[2] == 0)
          throw DomainError(
              "symplectic_lift: coefficients must be supported on the hyperplane directions");
        if (!v.derivative(0).is_zero())
          throw DomainError(
              "symplectic_lift: coefficients must not depend on the transverse coordinate");
      }
    } while (gamma0.next_index(idx));
  }

  // First repair: parallelize the hyperplane pairing within the projective
  // class via the difference tensor Λ_{ijk} = −∇_k ω_{ij} − (3/2) τ_{[ijk]}.
  const FrameConnection c0{fr, gamma0};
  const Tensor cdo = covariant_derivative(fr.omega_lo, c0);
  const Tensor ta = alt_slots(lower_slot(torsion(c0), 2, fr.omega_lo), {0, 1, 2});
  Tensor lam1(dim, "ddd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k)
        lam1.set({i, j, k}, -cdo.at({k, i, j}) - frac(3, 2) * ta.at({i, j, k}));
  const FrameConnection c1{fr, gamma0 + raise_slot(lam1, 2, fr.omega_up)};
  require(covariant_derivative(fr.omega_lo, c1).is_zero(),
          "the repaired representative must parallelize the pairing");

  // Second repair: remove the torsion trace with the pure-trace pairing
  // tensor Λ_{ijk} = (2/(m+1)) (ω_{ij} γ_k + ω_{ik} γ_j), γ_i = ½ τ_{ip}{}^p.
  const Tensor t1 = torsion(c1);
  Tensor gvec(dim, "d");
  for (int i = 1; i < dim; ++i) {
    Scalar acc;
    for (int p = 1; p < dim; ++p) acc += t1.at({i, p, p});
    gvec.set({i}, frac(1, 2) * acc);
  }
  Tensor lam2(dim, "ddd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k)
        lam2.set({i, j, k}, frac(2, dim) * (fr.omega_lo.at({i, j}) * gvec.at({k}) +
                                            fr.omega_lo.at({i, k}) * gvec.at({j})));
  const FrameConnection c2{fr, c1.gamma + raise_slot(lam2, 2, fr.omega_up)};
  require(covariant_derivative(fr.omega_lo, c2).is_zero(),
          "the trace repair must keep the pairing parallel");
  {
    const Tensor t2 = torsion(c2);
    Tensor tr(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar acc;
      for (int p = 1; p < dim; ++p) acc += t2.at({i, p, p});
      tr.set({i}, acc);
    }
    require(tr.is_zero(), "the repaired torsion must be trace free");
  }
  require(verify_theorem_A(c2).all(),
          "the lifted representative must satisfy the canonical normalizations");
  return ContactProjectiveStructure{fr, c2};
}

}  // namespace cps
