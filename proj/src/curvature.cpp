#include "cps/curvature.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cps {

namespace {

Scalar frac(long num, long den) { return Scalar::rational(num, den); }

void require(bool ok, const std::string& what) {
  if (!ok) throw InternalError("curvature invariant violated: " + what);
}

// Σ_{p,q} ω^{pq} t_{…p…q…} with p in slot sa and q in slot sb (sa < sb).
// The contracted slots must be lower; the result keeps the remaining slots in
// order.
Tensor omega_pair_trace(const Tensor& t, const AdaptedFrame& fr, int sa, int sb) {
  const int dim = t.dim();
  std::string var_out;
  for (int s = 0; s < t.rank(); ++s) {
    if (s != sa && s != sb) var_out += t.variance()[s];
  }
  Tensor out(dim, var_out);
  std::vector<int> oidx(out.rank(), 0);
  std::vector<int> full(t.rank(), 0);
  if (out.rank() == 0) throw InternalError("omega_pair_trace: scalar result unsupported");
  do {
    Scalar acc = Scalar::zero();
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        const Scalar& w = fr.omega_up.at({p, q});
        if (w.is_zero()) continue;
        int at = 0;
        for (int s = 0; s < t.rank(); ++s) {
          if (s == sa) full[s] = p;
          else if (s == sb) full[s] = q;
          else full[s] = oidx[at++];
        }
        acc = acc + w * t.at(full);
      }
    }
    out.set(oidx, acc);
  } while (out.next_index(oidx));
  return out;
}

// ω^{pq} t_{pq} for a rank-2 lower tensor.
Scalar omega_full_trace(const Tensor& t, const AdaptedFrame& fr) {
  const int dim = t.dim();
  Scalar acc = Scalar::zero();
  for (int p = 1; p < dim; ++p) {
    for (int q = 1; q < dim; ++q) {
      const Scalar& w = fr.omega_up.at({p, q});
      if (!w.is_zero()) acc = acc + w * t.at({p, q});
    }
  }
  return acc;
}

// W_{ijk}^l = R_{ijk}^l + 2δ_{[i}^l P_{j]k} + 2ω_{k[j} P_{i]}^l + 2ω_{ij} P_k^l
//           + ω_{ij} Q_k^l, supported on the contact hyperplane.
Tensor weyl_formula(const Tensor& riemann, const Tensor& p, const Tensor& q,
                    const AdaptedFrame& fr) {
  const int dim = fr.dim();
  Tensor pup = raise_slot(p, 1, fr.omega_up);  // P_i{}^l
  Tensor qup = raise_slot(q, 1, fr.omega_up);  // Q_i{}^l
  Tensor w(dim, "dddu");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      for (int k = 1; k < dim; ++k) {
        for (int l = 1; l < dim; ++l) {
          Scalar val = riemann.at({i, j, k, l});
          if (i == l) val = val + p.at({j, k});
          if (j == l) val = val - p.at({i, k});
          val = val + fr.omega_lo.at({k, j}) * pup.at({i, l});
          val = val - fr.omega_lo.at({k, i}) * pup.at({j, l});
          val = val + fr.omega_lo.at({i, j}) * (frac(2, 1) * pup.at({k, l}) + qup.at({k, l}));
          w.set({i, j, k, l}, val);
        }
      }
    }
  }
  return w;
}

// ∇_p X_j{}^p for a lower rank-2 tensor X: raise the second slot, take the
// covariant derivative, and trace the derivative slot against the raised one.
Tensor omega_divergence(const Tensor& x, const FrameConnection& conn) {
  Tensor xup = raise_slot(x, 1, conn.frame.omega_up);
  Tensor cdx = covariant_derivative(xup, conn);
  return contract(cdx, 0, 2);
}

// C_{ijk} from R_{0ijk}, P, and Q; pass a zero Q for the torsion-free
// reduction.  The trace corrections use ∇_p P_j{}^p (and likewise for Q).
Tensor cotton_formula(const Tensor& riemann_low, const Tensor& p, const Tensor& q,
                      const FrameConnection& conn) {
  const AdaptedFrame& fr = conn.frame;
  const int dim = fr.dim();
  const Scalar inv = frac(1, 2 * fr.n() - 1);
  Tensor cdp = covariant_derivative(p, conn);
  Tensor cdq = covariant_derivative(q, conn);
  Tensor dp = omega_divergence(p, conn);  // ∇_p P_j{}^p
  Tensor dq = omega_divergence(q, conn);
  Tensor c(dim, "ddd");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      for (int k = 1; k < dim; ++k) {
        Scalar val = riemann_low.at({0, i, j, k});
        val = val - frac(2, 1) * cdp.at({i, j, k}) - cdq.at({i, j, k});
        Scalar corr = fr.omega_lo.at({i, k}) * (frac(2, 1) * dp.at({j}) + dq.at({j}));
        corr = corr + fr.omega_lo.at({i, j}) * (frac(2, 1) * dp.at({k}) + dq.at({k}));
        c.set({i, j, k}, val + inv * corr);
      }
    }
  }
  return c;
}

}  // namespace

Tensor curvature(const FrameConnection& conn) {
  const AdaptedFrame& fr = conn.frame;
  const int dim = fr.dim();
  const Tensor& g = conn.gamma;
  Tensor r(dim, "dddu");
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      for (int c = 0; c < dim; ++c) {
        for (int s = 0; s < dim; ++s) {
          Scalar val = fr.apply(a, g.at({b, c, s})) - fr.apply(b, g.at({a, c, s}));
          for (int e = 0; e < dim; ++e) {
            val = val + g.at({b, c, e}) * g.at({a, e, s});
            val = val - g.at({a, c, e}) * g.at({b, e, s});
            val = val - fr.c.at({a, b, e}) * g.at({e, c, s});
          }
          r.set({b, a, c, s}, -val);
          r.set({a, b, c, s}, std::move(val));
        }
      }
    }
  }
  return r;
}

CurvatureData invariant_tensors(const ContactProjectiveStructure& S) {
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();
  CurvatureData d;
  d.n = n;
  d.riemann = curvature(conn);
  d.riemann_low = lower_slot(d.riemann, 3, fr.omega_lo);
  d.ricci = contract(d.riemann, 1, 3);
  d.rho = omega_pair_trace(d.riemann_low, fr, 0, 1);

  // Structural zeroes of the normal-form curvature.
  {
    std::vector<int> idx(4, 0);
    do {
      if (idx[3] == 0) require(d.riemann.at(idx).is_zero(), "curvature has a theta component");
      if (idx[2] == 0) require(d.riemann.at(idx).is_zero(), "curvature has a Reeb-slot component");
    } while (d.riemann.next_index(idx));
  }
  {
    Tensor swapped = transpose_slots(d.riemann_low, {0, 1, 3, 2});
    require(swapped == d.riemann_low, "lowered curvature is not symmetric in its last pair");
  }
  for (int a = 0; a < dim; ++a) {
    require(d.ricci.at({0, a}).is_zero() && d.ricci.at({a, 0}).is_zero(),
            "Ricci tensor has Reeb components");
  }
  require(omega_full_trace(d.ricci, fr).is_zero(), "Ricci tensor has a nonzero pairing trace");

  // Ricci-type invariants P and Q on the contact hyperplane.
  const Scalar cp = frac(1, n * (2 * n - 3));
  const Scalar cq = frac(1, 3 - 2 * n);
  const Scalar skew_coeff = frac(1, 2 * n - 1);
  d.p = Tensor(dim, "dd");
  d.q = Tensor(dim, "dd");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      const Scalar& ric = d.ricci.at({i, j});
      Scalar skew = (ric - d.ricci.at({j, i})) * frac(1, 2);
      Scalar pval = frac(n - 1, 1) * ric - skew_coeff * skew + frac(1, 4) * d.rho.at({i, j});
      d.p.set({i, j}, cp * pval);
      Scalar qval = frac(2, 1) * ric + d.rho.at({i, j}) - frac(4, 1) * skew_coeff * skew;
      d.q.set({i, j}, cq * qval);
    }
  }
  require(omega_full_trace(d.p, fr).is_zero(), "P has a nonzero pairing trace");
  require(omega_full_trace(d.q, fr).is_zero(), "Q has a nonzero pairing trace");

  // W: trace-adjusted curvature.  On three-dimensional patches the defining
  // formula vanishes identically, and the stored tensor is zero by rule.
  Tensor wform = weyl_formula(d.riemann, d.p, d.q, fr);
  if (n == 2) {
    require(wform.is_zero(), "three-dimensional W formula did not vanish");
    require(contact_torsion(S).is_zero(),
            "three-dimensional structure carries contact torsion");
    require(d.q.is_zero(), "three-dimensional Q did not vanish");
    d.w = Tensor(dim, "dddu");
    d.c = cotton_formula(d.riemann_low, d.p, Tensor(dim, "dd"), conn);
  } else {
    d.w = std::move(wform);
    d.c = cotton_formula(d.riemann_low, d.p, d.q, conn);
  }

  // Trace identities of W and C.
  Tensor w_low = lower_slot(d.w, 3, fr.omega_lo);
  require(omega_pair_trace(w_low, fr, 0, 1).is_zero(), "W pairing trace on the first pair");
  require(contract(d.w, 2, 3).is_zero(), "W natural trace on the last pair");
  {
    Tensor mixed = contract(d.w, 1, 3);  // W_{ipj}{}^p
    Tensor expect = d.q.scaled(frac(-1, 2));
    require(mixed == expect, "W mixed trace is not -Q/2");
  }
  require(omega_pair_trace(d.c, fr, 1, 2).is_zero(), "C pairing trace on the last pair");
  require(omega_pair_trace(d.c, fr, 0, 1).is_zero(), "C pairing trace on the first pair");
  {
    Tensor alt = alt_slots(d.c, {1, 2});
    require(alt.is_zero(), "C is not symmetric in its last pair");
  }
  return d;
}

CheckReport curvature_invariant_checks(const ContactProjectiveStructure& S) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  CurvatureData d = invariant_tensors(S);
  CheckReport rep;

  {
    Tensor theta_part(dim, "ddd");
    Tensor reeb_part(dim, "dddu");
    std::vector<int> idx(4, 0);
    do {
      if (idx[3] == 0) theta_part.set({idx[0], idx[1], idx[2]}, d.riemann.at(idx));
      if (idx[2] == 0) reeb_part.set(idx, d.riemann.at(idx));
    } while (d.riemann.next_index(idx));
    record_residual(rep, "curvature has no component along the contact form", "curvaturetheta",
                    theta_part, rng);
    record_residual(rep, "curvature annihilates the Reeb direction", "curvaturereeb", reeb_part,
                    rng);
  }
  record_residual(rep, "lowered curvature is symmetric in its last pair", "curvaturepairsym",
                  d.riemann_low - transpose_slots(d.riemann_low, {0, 1, 3, 2}), rng);
  {
    Tensor reeb_ricci(dim, "dd");
    for (int a = 0; a < dim; ++a) {
      reeb_ricci.set({0, a}, d.ricci.at({0, a}));
      reeb_ricci.set({a, 0}, d.ricci.at({a, 0}));
    }
    record_residual(rep, "Ricci tensor has no Reeb components", "riccireeb", reeb_ricci, rng);
  }
  record_residual(rep, "Ricci tensor is trace-free against the pairing", "riccitrace",
                  omega_full_trace(d.ricci, fr), rng);
  {
    // 2 R_{0[αβ]}{}^σ = ∇_0 τ_{αβ}{}^σ over the full index range.
    Tensor cd_tau = covariant_derivative(torsion(conn), conn);
    Tensor res(dim, "ddu");
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        for (int s = 0; s < dim; ++s) {
          res.set({a, b, s}, d.riemann.at({0, a, b, s}) - d.riemann.at({0, b, a, s}) -
                                 cd_tau.at({0, a, b, s}));
        }
      }
    }
    record_residual(rep, "Reeb curvature equals the Reeb derivative of torsion",
                    "reebtorsionderivative", res, rng);
  }
  record_residual(rep, "P is trace-free against the pairing", "ptrace",
                  omega_full_trace(d.p, fr), rng);
  record_residual(rep, "Q is trace-free against the pairing", "qtrace",
                  omega_full_trace(d.q, fr), rng);

  Tensor w_low = lower_slot(d.w, 3, fr.omega_lo);
  record_residual(rep, "W pairing trace on the first pair vanishes", "wtraces",
                  omega_pair_trace(w_low, fr, 0, 1), rng);
  record_residual(rep, "W natural trace on the last pair vanishes", "wtraces",
                  contract(d.w, 2, 3), rng);
  record_residual(rep, "W mixed trace reproduces -Q/2", "wtraces",
                  contract(d.w, 1, 3) + d.q.scaled(frac(1, 2)), rng);
  record_residual(rep, "C pairing trace on the last pair vanishes", "ctraces",
                  omega_pair_trace(d.c, fr, 1, 2), rng);
  record_residual(rep, "C pairing trace on the first pair vanishes", "ctraces",
                  omega_pair_trace(d.c, fr, 0, 1), rng);
  record_residual(rep, "C is symmetric in its last pair", "ctraces", alt_slots(d.c, {1, 2}),
                  rng);
  if (fr.n() == 2) {
    record_residual(rep, "three-dimensional W formula vanishes identically", "threeweylvanish",
                    weyl_formula(d.riemann, d.p, d.q, fr), rng);
  } else {
    record_skip(rep, "three-dimensional W formula vanishes identically", "threeweylvanish",
                "applies to three-dimensional patches only");
  }
  return rep;
}

CheckReport bianchi_suite(const ContactProjectiveStructure& S) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();
  CurvatureData d = invariant_tensors(S);
  CheckReport rep;

  Tensor tau = torsion(conn);
  Tensor tau_low = lower_slot(tau, 2, fr.omega_lo);
  Tensor cd_tau = covariant_derivative(tau, conn);                // (δ, α, β, ^σ)
  Tensor cd_ric = covariant_derivative(d.ricci, conn);            // (δ, α, β)
  Tensor cd_rho = covariant_derivative(d.rho, conn);              // (δ, α, β)
  Tensor cd_r = covariant_derivative(d.riemann, conn);            // (δ, α, β, γ, ^σ)
  Tensor cd_rl = covariant_derivative(d.riemann_low, conn);       // (δ, α, β, γ, ε)
  Tensor div_r4 = contract(cd_r, 0, 4);                           // ∇_p R_{αβγ}{}^p

  {
    // Cyclic identity: R_{[αβγ]}{}^σ = ∇_{[α}τ_{βγ]}{}^σ + τ_{δ[α}{}^σ τ_{βγ]}{}^δ.
    Tensor quad(dim, "dddu");
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        for (int g = 0; g < dim; ++g) {
          for (int s = 0; s < dim; ++s) {
            Scalar val = Scalar::zero();
            for (int e = 0; e < dim; ++e) {
              val = val + tau.at({e, a, s}) * tau.at({b, g, e});
            }
            quad.set({a, b, g, s}, std::move(val));
          }
        }
      }
    }
    Tensor res = alt_slots(d.riemann, {0, 1, 2}) - alt_slots(cd_tau, {0, 1, 2}) -
                 alt_slots(quad, {0, 1, 2});
    record_residual(rep, "cyclic curvature identity with torsion", "bianchi1", res, rng);
  }
  {
    // Differential identity: ∇_{[α}R_{βγ]δ}{}^σ = τ_{[αβ}{}^η R_{γ]ηδ}{}^σ.
    Tensor mixed(dim, "ddddu");
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        for (int g = 0; g < dim; ++g) {
          for (int dd = 0; dd < dim; ++dd) {
            for (int s = 0; s < dim; ++s) {
              Scalar val = Scalar::zero();
              for (int e = 0; e < dim; ++e) {
                val = val + tau.at({a, b, e}) * d.riemann.at({g, e, dd, s});
              }
              mixed.set({a, b, g, dd, s}, std::move(val));
            }
          }
        }
      }
    }
    Tensor res = alt_slots(cd_rl, {0, 1, 2}) -
                 alt_slots(lower_slot(mixed, 4, fr.omega_lo), {0, 1, 2});
    record_residual(rep, "differential curvature identity with torsion", "bianchi1", res, rng);
  }
  {
    Tensor reeb_ricci(dim, "dd");
    for (int a = 0; a < dim; ++a) {
      reeb_ricci.set({0, a}, d.ricci.at({0, a}));
      reeb_ricci.set({a, 0}, d.ricci.at({a, 0}));
    }
    record_residual(rep, "Ricci tensor annihilates the Reeb direction", "riccireeb", reeb_ricci,
                    rng);
  }
  {
    // ρ_{ij} + 2R_{ij} = 2∇_p τ^p{}_{ij} − τ^{pq}{}_j τ_{pqi}.
    Tensor tau_up0 = raise_slot(tau_low, 0, fr.omega_up);
    Tensor div_tau = contract(covariant_derivative(tau_up0, conn), 0, 1);
    Tensor tau_up01 = raise_slot(tau_up0, 1, fr.omega_up);
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar val = d.rho.at({i, j}) + frac(2, 1) * d.ricci.at({i, j}) -
                     frac(2, 1) * div_tau.at({i, j});
        for (int p = 1; p < dim; ++p) {
          for (int q = 1; q < dim; ++q) {
            val = val + tau_up01.at({p, q, j}) * tau_low.at({p, q, i});
          }
        }
        res.set({i, j}, std::move(val));
      }
    }
    record_residual(rep, "contracted cyclic identity ties the pairing trace to Ricci",
                    "firstbianchicontracted", res, rng);
  }
  {
    // (2−n) R_{0ijk} = ∇_p R^p{}_{ijk} + ½∇_i ρ_{jk} + τ_i{}^{pq} R_{pqjk}.
    Tensor rup0 = raise_slot(d.riemann_low, 0, fr.omega_up);
    Tensor div_r3 = contract(covariant_derivative(rup0, conn), 0, 1);
    Tensor tau_up12 = raise_slot(raise_slot(tau_low, 1, fr.omega_up), 2, fr.omega_up);
    Tensor res(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar val = frac(2 - n, 1) * d.riemann_low.at({0, i, j, k}) -
                       div_r3.at({i, j, k}) - frac(1, 2) * cd_rho.at({i, j, k});
          for (int p = 1; p < dim; ++p) {
            for (int q = 1; q < dim; ++q) {
              val = val - tau_up12.at({i, p, q}) * d.riemann_low.at({p, q, j, k});
            }
          }
          res.set({i, j, k}, std::move(val));
        }
      }
    }
    record_residual(rep, "skew trace of the differential identity determines Reeb curvature",
                    "skewtracesecondbianchi", res, rng);
  }
  {
    // R_{[ij]} = −½ ∇_p τ_{ij}{}^p  and  ω^{pq} R_{pq} = 0.
    Tensor div_tau2 = contract(cd_tau, 0, 3);
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        res.set({i, j}, (d.ricci.at({i, j}) - d.ricci.at({j, i})) * frac(1, 2) +
                            frac(1, 2) * div_tau2.at({i, j}));
      }
    }
    record_residual(rep, "skew Ricci part equals half the torsion divergence",
                    "skewfirstbianchicontracted", res, rng);
    record_residual(rep, "pairing trace of the Ricci tensor vanishes",
                    "skewfirstbianchicontracted", omega_full_trace(d.ricci, fr), rng);
  }
  {
    // 2 R_{0[ij]}{}^p = ∇_0 τ_{ij}{}^p  and  τ^{pqr} τ_{pqr} = 0.
    Tensor res(dim, "ddu");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int p = 1; p < dim; ++p) {
          res.set({i, j, p}, d.riemann.at({0, i, j, p}) - d.riemann.at({0, j, i, p}) -
                                 cd_tau.at({0, i, j, p}));
        }
      }
    }
    record_residual(rep, "Reeb curvature equals the Reeb derivative of contact torsion",
                    "firstbianchicontractedzero", res, rng);
    Tensor tau_up_all = raise_slot(
        raise_slot(raise_slot(tau_low, 0, fr.omega_up), 1, fr.omega_up), 2, fr.omega_up);
    Scalar cubic = Scalar::zero();
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        for (int r = 1; r < dim; ++r) {
          cubic = cubic + tau_up_all.at({p, q, r}) * tau_low.at({p, q, r});
        }
      }
    }
    record_residual(rep, "cubic torsion pairing vanishes", "firstbianchicontractedzero", cubic,
                    rng);
  }
  {
    // ∇_p R_{ijk}{}^p + 2∇_{[i}R_{j]k} = −τ_{ij}{}^p R_{pk} + 2τ_{p[i}{}^q R_{j]qk}{}^p
    //                                    + 2R_{0[ij]k}.
    Tensor res(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar val = div_r4.at({i, j, k}) + cd_ric.at({i, j, k}) - cd_ric.at({j, i, k});
          for (int p = 1; p < dim; ++p) {
            val = val + tau.at({i, j, p}) * d.ricci.at({p, k});
            for (int q = 1; q < dim; ++q) {
              val = val - tau.at({p, i, q}) * d.riemann.at({j, q, k, p});
              val = val + tau.at({p, j, q}) * d.riemann.at({i, q, k, p});
            }
          }
          val = val - d.riemann_low.at({0, i, j, k}) + d.riemann_low.at({0, j, i, k});
          res.set({i, j, k}, std::move(val));
        }
      }
    }
    record_residual(rep, "Ricci trace of the differential identity", "riccitracesecondbianchi",
                    res, rng);
  }
  {
    // ∇_q ρ_i{}^q − 2∇^p R_{pi} = τ^{qp}{}_l R_{qpi}{}^l.
    Tensor div_rho = omega_divergence(d.rho, conn);
    Tensor tau_up01 = raise_slot(raise_slot(tau_low, 0, fr.omega_up), 1, fr.omega_up);
    Tensor res(dim, "d");
    for (int i = 1; i < dim; ++i) {
      Scalar val = div_rho.at({i});
      for (int p = 1; p < dim; ++p) {
        for (int q = 1; q < dim; ++q) {
          val = val - frac(2, 1) * fr.omega_up.at({p, q}) * cd_ric.at({q, p, i});
        }
      }
      for (int q = 1; q < dim; ++q) {
        for (int p = 1; p < dim; ++p) {
          for (int l = 1; l < dim; ++l) {
            val = val - tau_up01.at({q, p, l}) * d.riemann.at({q, p, i, l});
          }
        }
      }
      res.set({i}, std::move(val));
    }
    record_residual(rep, "divergence comparison of the pairing trace and Ricci",
                    "skewtracesecondbianchia", res, rng);
  }
  {
    // ∇_0 R_{ijkl} + 2∇_{[i}R_{j]0kl} = τ_{ij}{}^p R_{0pkl}
    // and ∇_0 ρ_{ij} = 2∇^p R_{p0ij}.
    Tensor res(dim, "dddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          for (int l = 1; l < dim; ++l) {
            Scalar val = cd_rl.at({0, i, j, k, l}) + cd_rl.at({i, j, 0, k, l}) -
                         cd_rl.at({j, i, 0, k, l});
            for (int p = 1; p < dim; ++p) {
              val = val - tau.at({i, j, p}) * d.riemann_low.at({0, p, k, l});
            }
            res.set({i, j, k, l}, std::move(val));
          }
        }
      }
    }
    record_residual(rep, "Reeb derivative of the lowered curvature", "secondbianchizero", res,
                    rng);
    Tensor res2(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar val = cd_rho.at({0, i, j});
        for (int p = 1; p < dim; ++p) {
          for (int q = 1; q < dim; ++q) {
            val = val - frac(2, 1) * fr.omega_up.at({p, q}) * cd_rl.at({q, p, 0, i, j});
          }
        }
        res2.set({i, j}, std::move(val));
      }
    }
    record_residual(rep, "Reeb derivative of the pairing trace", "secondbianchizero", res2, rng);
  }
  {
    // ∇_0 R_{ij} + ∇_p R_{0ij}{}^p = τ_{iq}{}^p R_{0pj}{}^q.
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar val = cd_ric.at({0, i, j}) + div_r4.at({0, i, j});
        for (int q = 1; q < dim; ++q) {
          for (int p = 1; p < dim; ++p) {
            val = val - tau.at({i, q, p}) * d.riemann.at({0, p, j, q});
          }
        }
        res.set({i, j}, std::move(val));
      }
    }
    record_residual(rep, "Ricci trace of the Reeb differential identity",
                    "secondbianchizeroriccitrace", res, rng);
  }
  {
    Tensor res_a = alt_slots(d.q, {0, 1}) + alt_slots(d.p, {0, 1}).scaled(frac(2, 1));
    record_residual(rep, "skew parts of Q and P are proportional", "skewqskewp", res_a, rng);
    Tensor res_b = alt_slots(d.q, {0, 1}) +
                   alt_slots(d.ricci, {0, 1}).scaled(frac(2, 2 * n - 1));
    record_residual(rep, "skew part of Q against skew Ricci", "skewqskewp", res_b, rng);
  }
  {
    Tensor res_a(dim, "dd");
    Tensor res_b(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        res_a.set({i, j}, frac(2 * (1 - n), 1) * d.q.at({i, j}) + d.q.at({j, i}) -
                              frac(2, 1) * d.ricci.at({i, j}) - d.rho.at({i, j}));
        res_b.set({i, j}, d.q.at({i, j}) - frac(2, 1) * d.ricci.at({i, j}) +
                              frac(4 * n, 1) * d.p.at({i, j}));
      }
    }
    record_residual(rep, "Q against Ricci and the pairing trace", "qrelatedtortraces", res_a,
                    rng);
    record_residual(rep, "Q against Ricci and P", "qrelatedtortraces", res_b, rng);
  }
  return rep;
}

CheckReport scale_covariance_check(const ContactProjectiveStructure& S, const Scalar& f) {
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();

  FrameConnection tconn = scale_transport(S, f);  // DomainError when f = 0
  ContactProjectiveStructure tS{tconn.frame, tconn};
  CurvatureData base = invariant_tensors(S);
  CurvatureData tl = invariant_tensors(tS);

  std::vector<Scalar> ga = dlog(fr, f);
  Tensor gat(dim, "d");
  for (int a = 0; a < dim; ++a) gat.set({a}, ga[a]);
  Tensor gup = raise_slot(gat, 0, fr.omega_up);  // γ^p = ω^{pk} γ_k
  Tensor ngam = covariant_derivative(gat, conn);
  Tensor gij(dim, "dd");  // γ_{ij} = ∇_i γ_j − γ_i γ_j + ½ γ_0 ω_{ij}
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      gij.set({i, j}, ngam.at({i, j}) - ga[i] * ga[j] +
                          frac(1, 2) * ga[0] * fr.omega_lo.at({i, j}));
    }
  }
  Tensor gij_up = raise_slot(gij, 1, fr.omega_up);  // γ_i{}^l
  Tensor tau = torsion(conn);
  Tensor tau_low = lower_slot(tau, 2, fr.omega_lo);
  Tensor w_low = lower_slot(base.w, 3, fr.omega_lo);

  CheckReport rep;
  {
    // Full curvature comparison on the contact hyperplane.
    Tensor res(dim, "dddu");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          for (int l = 1; l < dim; ++l) {
            Scalar rhs = Scalar::zero();
            if (j == l) rhs = rhs + gij.at({i, k});
            if (i == l) rhs = rhs - gij.at({j, k});
            rhs = rhs + gij_up.at({i, l}) * fr.omega_lo.at({j, k});
            rhs = rhs - gij_up.at({j, l}) * fr.omega_lo.at({i, k});
            rhs = rhs - frac(2, 1) * fr.omega_lo.at({i, j}) * gij_up.at({k, l});
            Scalar coupled = Scalar::zero();
            for (int q = 1; q < dim; ++q) coupled = coupled + gup.at({q}) * tau.at({q, k, l});
            rhs = rhs - frac(2, 1) * fr.omega_lo.at({i, j}) * coupled;
            rhs = rhs + ga[k] * tau.at({i, j, l}) + gup.at({l}) * tau_low.at({i, j, k});
            res.set({i, j, k, l},
                    tl.riemann.at({i, j, k, l}) - base.riemann.at({i, j, k, l}) - rhs);
          }
        }
      }
    }
    record_residual(rep, "curvature difference under rescaling matches its closed form",
                    "curvaturescaletransform", res, rng);
  }
  {
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar rhs = frac(2 * n, 1) * gij.at({i, j});
        for (int p = 1; p < dim; ++p) rhs = rhs + gup.at({p}) * tau_low.at({p, i, j});
        res.set({i, j}, tl.ricci.at({i, j}) - base.ricci.at({i, j}) - rhs);
      }
    }
    record_residual(rep, "Ricci difference under rescaling", "riccitensortransform", res, rng);
  }
  {
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar rhs = frac(-4 * n, 1) * gij.at({i, j});
        for (int p = 1; p < dim; ++p) {
          rhs = rhs + frac(2, 1) * gup.at({p}) * tau_low.at({i, j, p});
          rhs = rhs + frac(4 * (1 - n), 1) * gup.at({p}) * tau_low.at({p, i, j});
        }
        res.set({i, j}, tl.rho.at({i, j}) - base.rho.at({i, j}) - rhs);
      }
    }
    record_residual(rep, "pairing-trace difference under rescaling", "otherriccitransform", res,
                    rng);
  }
  {
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar lhs = tl.ricci.at({i, j}) - tl.ricci.at({j, i}) - base.ricci.at({i, j}) +
                     base.ricci.at({j, i});
        Scalar rhs = Scalar::zero();
        for (int p = 1; p < dim; ++p) rhs = rhs + gup.at({p}) * tau_low.at({i, j, p});
        res.set({i, j}, lhs - frac(2 * n - 1, 1) * rhs);
      }
    }
    record_residual(rep, "skew Ricci difference under rescaling", "skewriccitransform", res,
                    rng);
  }
  {
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        res.set({i, j}, tl.p.at({i, j}) - base.p.at({i, j}) - gij.at({i, j}));
      }
    }
    record_residual(rep, "P changes by the rescaling Hessian", "ptransform", res, rng);
  }
  {
    Tensor res(dim, "dd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        Scalar rhs = Scalar::zero();
        for (int p = 1; p < dim; ++p) rhs = rhs + gup.at({p}) * tau_low.at({p, i, j});
        res.set({i, j}, tl.q.at({i, j}) - base.q.at({i, j}) - frac(2, 1) * rhs);
      }
    }
    record_residual(rep, "Q changes by the coupled torsion term", "qtransform", res, rng);
  }
  {
    Tensor res(dim, "dddu");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          for (int l = 1; l < dim; ++l) {
            Scalar rhs = ga[k] * tau.at({i, j, l}) + gup.at({l}) * tau_low.at({i, j, k});
            res.set({i, j, k, l},
                    tl.w.at({i, j, k, l}) - base.w.at({i, j, k, l}) - rhs);
          }
        }
      }
    }
    record_residual(rep, "W changes only along contact torsion", "weyltransform", res, rng);
  }
  {
    Tensor res(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar rhs = base.q.at({i, j}) * ga[k] + base.q.at({i, k}) * ga[j];
          for (int p = 1; p < dim; ++p) {
            Scalar inner = w_low.at({p, i, j, k}) + tau_low.at({p, i, j}) * ga[k] +
                           tau_low.at({p, i, k}) * ga[j];
            rhs = rhs + frac(2, 1) * gup.at({p}) * inner;
          }
          res.set({i, j, k}, tl.c.at({i, j, k}) - base.c.at({i, j, k}) - rhs);
        }
      }
    }
    record_residual(rep, "C changes along W, torsion, and Q", "ctransform", res, rng);
  }
  return rep;
}

CheckReport cotton_weyl_relation(const ContactProjectiveStructure& S) {
  if (!contact_torsion(S).is_zero()) {
    throw DomainError("cotton_weyl_relation: structure carries contact torsion");
  }
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int n = fr.n();
  CurvatureData d = invariant_tensors(S);
  CheckReport rep;

  Tensor div_w = contract(covariant_derivative(d.w, conn), 0, 4);  // ∇_p W_{ijk}{}^p
  Tensor w_low = lower_slot(d.w, 3, fr.omega_lo);
  Tensor wup0 = raise_slot(w_low, 0, fr.omega_up);
  Tensor div_wu = contract(covariant_derivative(wup0, conn), 0, 1);  // ∇_p W^p{}_{ijk}
  Tensor cdp = covariant_derivative(d.p, conn);
  // ∇^p P_{jp} = ω^{pq} ∇_q P_{jp}  (derivative index raised).
  Tensor dpu(dim, "d");
  for (int j = 1; j < dim; ++j) {
    Scalar acc = Scalar::zero();
    for (int p = 1; p < dim; ++p) {
      for (int q = 1; q < dim; ++q) {
        const Scalar& w = fr.omega_up.at({p, q});
        if (!w.is_zero()) acc = acc + w * cdp.at({q, j, p});
      }
    }
    dpu.set({j}, std::move(acc));
  }

  {
    // ∇_p W^p{}_{ijk} + (∇_p W_{ijk}{}^p − ∇_p W_{kij}{}^p)/(2n−1) = (2−n) C_{ijk}.
    Tensor res(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar val = div_wu.at({i, j, k}) +
                       frac(1, 2 * n - 1) * (div_w.at({i, j, k}) - div_w.at({k, i, j})) -
                       frac(2 - n, 1) * d.c.at({i, j, k});
          res.set({i, j, k}, std::move(val));
        }
      }
    }
    record_residual(rep, "divergence of W reproduces C", "cottonweyl", res, rng);
  }
  {
    // ∇_p W_{ijk}{}^p = 2(2n−1)∇_{[j}P_{i]k} + 2ω_{k[i}∇^p P_{j]p} − 2ω_{ij}∇^p P_{kp}
    //                 = (2n−1) C_{[ij]k}.
    Tensor res_a(dim, "ddd");
    Tensor res_b(dim, "ddd");
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar rhs = frac(2 * n - 1, 1) * (cdp.at({j, i, k}) - cdp.at({i, j, k}));
          rhs = rhs + fr.omega_lo.at({k, i}) * dpu.at({j}) -
                fr.omega_lo.at({k, j}) * dpu.at({i});
          rhs = rhs - frac(2, 1) * fr.omega_lo.at({i, j}) * dpu.at({k});
          res_a.set({i, j, k}, div_w.at({i, j, k}) - rhs);
          res_b.set({i, j, k},
                    div_w.at({i, j, k}) -
                        frac(2 * n - 1, 2) * (d.c.at({i, j, k}) - d.c.at({j, i, k})));
        }
      }
    }
    record_residual(rep, "trace of the derivative of W against derivatives of P",
                    "tracednablaweyl", res_a, rng);
    record_residual(rep, "trace of the derivative of W against the skew part of C",
                    "tracednablaweyl", res_b, rng);
  }
  if (n == 2) {
    record_residual(rep, "C is completely symmetric on three-dimensional patches",
                    "cottonsymmetry", sym_slots(d.c, {0, 1, 2}) - d.c, rng);
  } else {
    record_skip(rep, "C is completely symmetric on three-dimensional patches", "cottonsymmetry",
                "applies to three-dimensional patches only");
  }
  return rep;
}

FlatnessVerdict flatness(const ContactProjectiveStructure& S) {
  Rng rng(seed_from_env());
  FlatnessVerdict v;
  auto note = [&](const Tensor& t, const char* name) {
    if (t.is_zero()) return;
    std::vector<int> idx(t.rank(), 0);
    do {
      if (!t.at(idx).is_zero()) {
        eval_cross_check_nonzero(t.at(idx), rng);
        break;
      }
    } while (t.next_index(idx));
    v.obstructions.push_back(name);
    if (t.max_degree() > v.residual_degree) v.residual_degree = t.max_degree();
  };
  CurvatureData d = invariant_tensors(S);
  if (S.frame.n() == 2) {
    note(d.c, "contact projective Cotton tensor");
  } else {
    note(contact_torsion(S), "contact torsion");
    note(d.w, "contact projective Weyl tensor");
  }
  v.flat = v.obstructions.empty();
  return v;
}

Tensor curvature_difference_residual(const FrameConnection& conn, const Tensor& lambda) {
  const int dim = conn.frame.dim();
  Tensor r0 = curvature(conn);
  Tensor r1 = curvature(FrameConnection{conn.frame, conn.gamma + lambda});
  Tensor dl = covariant_derivative(lambda, conn);
  Tensor tau = torsion(conn);
  Tensor rhs(dim, "dddu");
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int g = 0; g < dim; ++g) {
        for (int s = 0; s < dim; ++s) {
          Scalar val = dl.at({a, b, g, s}) - dl.at({b, a, g, s});
          for (int e = 0; e < dim; ++e) {
            val = val + lambda.at({b, g, e}) * lambda.at({a, e, s});
            val = val - lambda.at({a, g, e}) * lambda.at({b, e, s});
            val = val + tau.at({a, b, e}) * lambda.at({e, g, s});
          }
          rhs.set({a, b, g, s}, std::move(val));
        }
      }
    }
  }
  return (r1 - r0) - rhs;
}

}  // namespace cps
