#include "cps/pseudohermitian.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cps/linsolve.hpp"

namespace cps {

namespace {

Scalar frac(long num, long den) { return Scalar::rational(num, den); }

void require(bool ok, const std::string& what) {
  if (!ok) throw InternalError("pseudo-hermitian invariant violated: " + what);
}

// ---------------------------------------------------------------------------
// Hyperplane endomorphism helpers.  Endomorphisms of the contact hyperplane
// are "du" tensors M_i^j stored over the full index range with vanishing
// index-0 components; composition follows (MN)_i^j = M_i^p N_p^j.
// ---------------------------------------------------------------------------

Tensor hyper_product(const Tensor& x, const Tensor& y) {
  const int dim = x.dim();
  Tensor out(dim, "du");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      Scalar acc;
      for (int p = 1; p < dim; ++p) {
        const Scalar& a = x.at({i, p});
        if (a.is_zero()) continue;
        const Scalar& b = y.at({p, j});
        if (b.is_zero()) continue;
        acc += a * b;
      }
      out.set({i, j}, std::move(acc));
    }
  }
  return out;
}

// ½(M − J M J): the component of M commuting with J.
Tensor commuting_part(const Tensor& m, const Tensor& j) {
  Tensor jmj = hyper_product(j, hyper_product(m, j));
  return (m - jmj).scaled(frac(1, 2));
}

// Entrywise frame derivative E_α(M_i^j) of a hyperplane endomorphism.
Tensor frame_derivative_endo(const AdaptedFrame& fr, const Tensor& m, int alpha) {
  const int dim = fr.dim();
  Tensor out(dim, "du");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      const Scalar& v = m.at({i, j});
      if (v.is_zero()) continue;
      out.set({i, j}, fr.apply(alpha, v));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation.  All checks are exact identities of rational functions; the
// bracket conditions are tensorial in their hyperplane arguments, so frame
// fields decide the general case.
// ---------------------------------------------------------------------------

void validate_input(const AdaptedFrame& fr, const Tensor& j) {
  const int dim = fr.dim();
  if (j.rank() != 2 || j.variance() != "du")
    throw DomainError("almost complex structure must have variance \"du\"");
  if (j.dim() != dim)
    throw DomainError("almost complex structure dimension does not match the frame");
  for (int a = 0; a < dim; ++a) {
    if (!j.at({0, a}).is_zero() || !j.at({a, 0}).is_zero())
      throw DomainError("almost complex structure must map the contact hyperplane to itself");
  }

  // J_i^p J_p^j = −δ_i^j.
  for (int i = 1; i < dim; ++i) {
    for (int k = 1; k < dim; ++k) {
      Scalar acc = (i == k) ? Scalar::one() : Scalar::zero();
      for (int p = 1; p < dim; ++p) acc += j.at({i, p}) * j.at({p, k});
      if (!acc.is_zero())
        throw DomainError("almost complex structure must square to minus the identity");
    }
  }

  // θ([J(E_i), E_j] + [E_i, J(E_j)]) = Σ_p (J_i^p c_{pj}^0 + J_j^p c_{ip}^0)
  // must vanish: the bracket of hyperplane sections stays tangent to the
  // hyperplane after one argument is rotated by J.
  for (int i = 1; i < dim; ++i) {
    for (int k = 1; k < dim; ++k) {
      Scalar acc;
      for (int p = 1; p < dim; ++p)
        acc += j.at({i, p}) * fr.c.at({p, k, 0}) + j.at({k, p}) * fr.c.at({i, p, 0});
      if (!acc.is_zero())
        throw DomainError("almost complex structure is not compatible with the contact form");
    }
  }

  // Integrability on frame fields:
  //   [J(E_i), J(E_j)] − [E_i, E_j] = J([J(E_i), E_j] + [E_i, J(E_j)]).
  // The θ-component reads Σ_{p,q} J_i^p J_j^q c_{pq}^0 = c_{ij}^0, and the
  // hyperplane component brings in the frame derivatives of J.
  std::vector<Tensor> dj(dim);
  for (int p = 1; p < dim; ++p) dj[p] = frame_derivative_endo(fr, j, p);
  for (int i = 1; i < dim; ++i) {
    for (int k = i + 1; k < dim; ++k) {
      Scalar theta_part = -fr.c.at({i, k, 0});
      for (int p = 1; p < dim; ++p)
        for (int q = 1; q < dim; ++q)
          theta_part += j.at({i, p}) * j.at({k, q}) * fr.c.at({p, q, 0});
      if (!theta_part.is_zero())
        throw DomainError("pseudo-hermitian structure is not integrable");
      for (int s = 1; s < dim; ++s) {
        Scalar acc = -fr.c.at({i, k, s});
        for (int p = 1; p < dim; ++p) {
          acc += j.at({i, p}) * dj[p].at({k, s}) - j.at({k, p}) * dj[p].at({i, s});
          for (int q = 1; q < dim; ++q)
            acc += j.at({i, p}) * j.at({k, q}) * fr.c.at({p, q, s});
        }
        for (int p = 1; p < dim; ++p) {
          // Hyperplane components of [J(E_i), E_k] + [E_i, J(E_k)].
          Scalar bracket = dj[i].at({k, p}) - dj[k].at({i, p});
          for (int q = 1; q < dim; ++q)
            bracket += j.at({i, q}) * fr.c.at({q, k, p}) + j.at({k, q}) * fr.c.at({i, q, p});
          acc -= bracket * j.at({p, s});
        }
        if (!acc.is_zero())
          throw DomainError("pseudo-hermitian structure is not integrable");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Linear system assembly.  Unknowns are the dim³ coefficients Γ_{αβ}^σ,
// flattened as (α·dim + β)·dim + σ.  The stated conditions are the parallel
// contact form, the parallel pairing, the prescribed hyperplane torsion, and
// the anticommutation of the torsion block with J; the parallel-J equations
// are appended separately so both ranks can be reported.
// ---------------------------------------------------------------------------

int unknown_index(int dim, int a, int b, int s) { return (a * dim + b) * dim + s; }

void accumulate(std::map<int, Scalar>& row, int col, const Scalar& v) {
  if (v.is_zero()) return;
  row[col] += v;
}

LinearSystem stated_condition_system(const AdaptedFrame& fr, const Tensor& j) {
  const int dim = fr.dim();
  LinearSystem sys;
  sys.ncols = dim * dim * dim;

  // Γ_{αβ}^0 = 0 (parallel contact form).
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      sys.add_row({{unknown_index(dim, a, b, 0), Scalar::one()}}, Scalar::zero());

  // Σ_s (Γ_{αβ}^s ω_{sγ} + Γ_{αγ}^s ω_{βs}) = E_α(ω_{βγ}) (parallel pairing).
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int g = b + 1; g < dim; ++g) {
        std::map<int, Scalar> row;
        for (int s = 0; s < dim; ++s) {
          accumulate(row, unknown_index(dim, a, b, s), fr.omega_lo.at({s, g}));
          accumulate(row, unknown_index(dim, a, g, s), fr.omega_lo.at({b, s}));
        }
        sys.add_row(std::move(row), fr.apply(a, fr.omega_lo.at({b, g})));
      }
    }
  }

  // Γ_{ij}^γ − Γ_{ji}^γ = c_{ij}^γ + ω_{ij} δ_0^γ (prescribed hyperplane torsion).
  for (int i = 1; i < dim; ++i) {
    for (int k = i + 1; k < dim; ++k) {
      for (int g = 0; g < dim; ++g) {
        std::map<int, Scalar> row;
        accumulate(row, unknown_index(dim, i, k, g), Scalar::one());
        accumulate(row, unknown_index(dim, k, i, g), Scalar::integer(-1));
        Scalar rhs = fr.c.at({i, k, g});
        if (g == 0) rhs += fr.omega_lo.at({i, k});
        sys.add_row(std::move(row), std::move(rhs));
      }
    }
  }

  // Σ_p (J_i^p A_p^j + A_i^p J_p^j) = 0 with A_p^j = Γ_{0p}^j − Γ_{p0}^j − c_{0p}^j
  // (the torsion block anticommutes with J).
  for (int i = 1; i < dim; ++i) {
    for (int k = 1; k < dim; ++k) {
      std::map<int, Scalar> row;
      Scalar rhs;
      for (int p = 1; p < dim; ++p) {
        const Scalar& jip = j.at({i, p});
        if (!jip.is_zero()) {
          accumulate(row, unknown_index(dim, 0, p, k), jip);
          accumulate(row, unknown_index(dim, p, 0, k), -jip);
          rhs += jip * fr.c.at({0, p, k});
        }
        const Scalar& jpk = j.at({p, k});
        if (!jpk.is_zero()) {
          accumulate(row, unknown_index(dim, 0, i, p), jpk);
          accumulate(row, unknown_index(dim, i, 0, p), -jpk);
          rhs += fr.c.at({0, i, p}) * jpk;
        }
      }
      sys.add_row(std::move(row), std::move(rhs));
    }
  }
  return sys;
}

void append_parallel_j_rows(LinearSystem& sys, const AdaptedFrame& fr, const Tensor& j) {
  const int dim = fr.dim();
  // E_α(J_i^j) + Σ_s (Γ_{αs}^j J_i^s − Γ_{αi}^s J_s^j) = 0.
  for (int a = 0; a < dim; ++a) {
    for (int i = 1; i < dim; ++i) {
      for (int k = 1; k < dim; ++k) {
        std::map<int, Scalar> row;
        for (int s = 1; s < dim; ++s) {
          accumulate(row, unknown_index(dim, a, s, k), j.at({i, s}));
          accumulate(row, unknown_index(dim, a, i, s), -j.at({s, k}));
        }
        sys.add_row(std::move(row), -fr.apply(a, j.at({i, k})));
      }
    }
  }
}

// Residual of the constant-curvature model form:
//   4n(n−1) R_{ijkl} − R (ω_{jl}J_{ik} − ω_{il}J_{jk} + ω_{jk}J_{il}
//                          − ω_{ik}J_{jl} − 2ω_{ij}J_{kl}).
Tensor model_curvature_residual(const Tensor& rlow, const Scalar& r, const PseudoHermitian& ph) {
  const int dim = ph.frame.dim();
  const int n = ph.frame.n();
  const Tensor& om = ph.frame.omega_lo;
  const Tensor& jl = ph.j_low;
  const Scalar coef = Scalar::integer(4L * n * (n - 1));
  const Scalar two = Scalar::integer(2);
  Tensor out(dim, "dddd");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      for (int k = 1; k < dim; ++k) {
        for (int l = 1; l < dim; ++l) {
          Scalar model = om.at({j, l}) * jl.at({i, k}) - om.at({i, l}) * jl.at({j, k}) +
                         om.at({j, k}) * jl.at({i, l}) - om.at({i, k}) * jl.at({j, l}) -
                         two * om.at({i, j}) * jl.at({k, l});
          out.set({i, j, k, l}, coef * rlow.at({i, j, k, l}) - r * model);
        }
      }
    }
  }
  return out;
}

}  // namespace

PseudoHermitian make_pseudo_hermitian(const AdaptedFrame& frame, const Tensor& j) {
  validate_input(frame, j);
  PseudoHermitian ph;
  ph.frame = frame;
  ph.j = j;
  ph.j_low = lower_slot(j, 1, frame.omega_lo);
  ph.metric = ph.j_low.scaled(Scalar::integer(-1));
  // Symmetry of the lowering is equivalent to the bracket compatibility
  // validated above; keep it as an internal guard.
  require(transpose_slots(ph.metric, {1, 0}) == ph.metric, "induced metric symmetry");
  return ph;
}

TanakaData tanaka_connection(const PseudoHermitian& ph) {
  const AdaptedFrame& fr = ph.frame;
  const int dim = fr.dim();
  // Revalidate so aggregate-constructed inputs meet the same contract as
  // factory-constructed ones.
  validate_input(fr, ph.j);

  // Inverse hyperplane metric in closed form: g_{is} (−ω^{sa} J_a^k) = δ_i^k.
  Tensor ginv = raise_slot(ph.j, 0, fr.omega_up).scaled(Scalar::integer(-1));
  for (int i = 1; i < dim; ++i) {
    for (int k = 1; k < dim; ++k) {
      Scalar acc = (i == k) ? -Scalar::one() : Scalar::zero();
      for (int s = 1; s < dim; ++s) acc += ph.metric.at({i, s}) * ginv.at({s, k});
      require(acc.is_zero(), "closed-form inverse metric");
    }
  }

  std::vector<Tensor> dg(dim);
  for (int a = 0; a < dim; ++a) {
    dg[a] = Tensor(dim, "dd");
    for (int i = 1; i < dim; ++i)
      for (int k = 1; k < dim; ++k) {
        const Scalar& v = ph.metric.at({i, k});
        if (!v.is_zero()) dg[a].set({i, k}, fr.apply(a, v));
      }
  }

  // Hyperplane block: the unique coefficients that make the metric parallel
  // in hyperplane directions with the prescribed hyperplane torsion,
  //   2 Γ_{ij}^s g_{sk} = E_i(g_{jk}) + E_j(g_{ik}) − E_k(g_{ij})
  //                       + c_{ij}^t g_{tk} − c_{ik}^t g_{tj} − c_{jk}^t g_{ti}.
  Tensor gamma(dim, "ddu");
  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      std::vector<Scalar> rhs(dim);
      for (int k = 1; k < dim; ++k) {
        Scalar v = dg[i].at({j, k}) + dg[j].at({i, k}) - dg[k].at({i, j});
        for (int t = 1; t < dim; ++t) {
          v += fr.c.at({i, j, t}) * ph.metric.at({t, k});
          v -= fr.c.at({i, k, t}) * ph.metric.at({t, j});
          v -= fr.c.at({j, k, t}) * ph.metric.at({t, i});
        }
        rhs[k] = std::move(v);
      }
      for (int s = 1; s < dim; ++s) {
        Scalar acc;
        for (int k = 1; k < dim; ++k) {
          if (rhs[k].is_zero()) continue;
          acc += rhs[k] * ginv.at({k, s});
        }
        gamma.set({i, j, s}, acc * frac(1, 2));
      }
    }
  }

  // Reeb row: Γ_{0i}^j = X_i^j with X = P⁺(c₀) + ½ J E_0(J).  The commutant
  // projection of the Reeb structure functions realizes the anticommuting
  // torsion block, and the second term makes J parallel along the Reeb field.
  Tensor c0(dim, "du");
  for (int i = 1; i < dim; ++i)
    for (int k = 1; k < dim; ++k) c0.set({i, k}, fr.c.at({0, i, k}));
  Tensor d0j = frame_derivative_endo(fr, ph.j, 0);
  Tensor x = commuting_part(c0, ph.j) + hyper_product(ph.j, d0j).scaled(frac(1, 2));
  for (int i = 1; i < dim; ++i)
    for (int k = 1; k < dim; ++k) gamma.set({0, i, k}, x.at({i, k}));

  // The Reeb column Γ_{α0}^σ and the θ-output column Γ_{αβ}^0 stay zero:
  // both are forced by the parallel contact form and parallel pairing.

  FrameConnection conn{fr, gamma};

  // Closure of the conditions the block construction does not force.  These
  // fail exactly when the almost complex data are not integrable, so the
  // error is a rejection of the input, not an engine fault.
  if (!covariant_derivative(fr.omega_lo, conn).is_zero())
    throw DomainError(
        "pseudo-hermitian structure is not integrable: "
        "the pairing is not parallel for the solved connection");

  // Identities the construction does force; a violation is an engine bug.
  require(covariant_derivative(ph.j, conn).is_zero(), "parallel complex structure");
  Tensor theta_cov(dim, "d");
  theta_cov.set({0}, Scalar::one());
  require(covariant_derivative(theta_cov, conn).is_zero(), "parallel contact form");

  Tensor tau = torsion(conn);
  for (int i = 1; i < dim; ++i)
    for (int k = 1; k < dim; ++k) {
      require((tau.at({i, k, 0}) - fr.omega_lo.at({i, k})).is_zero(), "torsion theta block");
      for (int s = 1; s < dim; ++s)
        require(tau.at({i, k, s}).is_zero(), "hyperplane torsion block");
    }

  Tensor a(dim, "du");
  for (int b = 0; b < dim; ++b)
    for (int g = 0; g < dim; ++g) a.set({b, g}, tau.at({0, b, g}));
  for (int b = 0; b < dim; ++b) {
    require(a.at({b, 0}).is_zero(), "torsion block theta component");
    require(a.at({0, b}).is_zero(), "torsion block reeb component");
  }
  require((hyper_product(ph.j, a) + hyper_product(a, ph.j)).is_zero(),
          "anticommuting torsion block");

  Tensor alow = lower_slot(a, 1, fr.omega_lo);
  if (!(alow - transpose_slots(alow, {1, 0})).is_zero())
    throw DomainError(
        "pseudo-hermitian structure is not integrable: "
        "the torsion block is not symmetric after lowering");

  // Rank bookkeeping: the displayed conditions alone, then with parallel J.
  LinearSystem stated = stated_condition_system(fr, ph.j);
  LinearSolution sol_stated = solve(stated);
  require(sol_stated.consistent, "stated-condition system consistency");
  LinearSystem full = stated;
  append_parallel_j_rows(full, fr, ph.j);
  LinearSolution sol_full = solve(full);
  require(sol_full.consistent, "full system consistency");

  TanakaData data;
  data.connection = std::move(conn);
  data.torsion_block = std::move(a);
  data.system_unknowns = dim * dim * dim;
  data.system_rank_stated_conditions = sol_stated.rank;
  data.system_rank_with_parallel_j = sol_full.rank;

  // When the augmented system is determined, its unique solution must be the
  // block solution.
  if (sol_full.rank == data.system_unknowns) {
    for (int al = 0; al < dim; ++al)
      for (int b = 0; b < dim; ++b)
        for (int s = 0; s < dim; ++s) {
          const Scalar& got = sol_full.particular[unknown_index(dim, al, b, s)];
          require((got - gamma.at({al, b, s})).is_zero(), "block solution matches linear solve");
        }
  }
  return data;
}

ContactProjectiveStructure induced_structure(const PseudoHermitian& ph) {
  TanakaData data = tanaka_connection(ph);
  const int dim = ph.frame.dim();
  Tensor gamma = data.connection.gamma;
  // Only the Reeb row changes: ∇ = ∇̄ + Λ with Λ_{αβ}^γ = −δ_α^0 A_β^γ.
  for (int b = 0; b < dim; ++b)
    for (int g = 0; g < dim; ++g)
      gamma.set({0, b, g}, gamma.at({0, b, g}) - data.torsion_block.at({b, g}));
  FrameConnection rep{ph.frame, gamma};
  require(verify_theorem_A(rep).all(), "canonical representative conditions");
  ContactProjectiveStructure S = make_structure(rep);
  require(S.canonical_rep.gamma == gamma, "normal form stability");
  require(contact_torsion(S).is_zero(), "vanishing contact torsion");
  return S;
}

WebsterCurvature webster_curvature(const PseudoHermitian& ph) {
  TanakaData data = tanaka_connection(ph);
  if (!data.torsion_block.is_zero())
    throw DomainError(
        "webster curvature requires transverse symmetry "
        "(nonzero pseudo-hermitian torsion block)");
  const AdaptedFrame& fr = ph.frame;
  const int dim = fr.dim();
  const int n = fr.n();

  Tensor riem = curvature(data.connection);
  WebsterCurvature w;
  w.riemann_low = lower_slot(riem, 3, fr.omega_lo);
  w.ricci = contract(riem, 1, 3);
  Tensor jup = raise_slot(ph.j, 0, fr.omega_up);
  Scalar r;
  for (int p = 1; p < dim; ++p)
    for (int q = 1; q < dim; ++q) r += w.ricci.at({p, q}) * jup.at({p, q});
  w.scalar = r;

  bool constant = true;
  for (int a = 0; a < dim && constant; ++a)
    if (!fr.apply(a, r).is_zero()) constant = false;
  if (constant) constant = model_curvature_residual(w.riemann_low, r, ph).is_zero();
  w.constant_curvature = constant;
  (void)n;
  return w;
}

CheckReport beltrami_check(const PseudoHermitian& ph) {
  CheckReport rep;
  Rng rng(seed_from_env());
  const AdaptedFrame& fr = ph.frame;
  const int dim = fr.dim();
  const int n = fr.n();

  TanakaData data = tanaka_connection(ph);
  {
    CheckResult r;
    r.name = "canonical connection system has a unique solution";
    r.tag = "tanakaconnection";
    bool ok = data.system_rank_with_parallel_j == data.system_unknowns;
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    r.note = "rank " + std::to_string(data.system_rank_with_parallel_j) + " of " +
             std::to_string(data.system_unknowns) +
             " unknowns; stated conditions alone reach rank " +
             std::to_string(data.system_rank_stated_conditions);
    rep.add(r);
  }

  Tensor alow = lower_slot(data.torsion_block, 1, fr.omega_lo);
  record_residual(rep, "pseudo-hermitian torsion block has symmetric lowering", "torsionlemma1",
                  alow - transpose_slots(alow, {1, 0}), rng);

  ContactProjectiveStructure S = induced_structure(ph);
  record_residual(rep, "induced structure has vanishing contact torsion", "pshcp",
                  contact_torsion(S), rng);

  WebsterCurvature wc = webster_curvature(ph);
  FlatnessVerdict verdict = flatness(S);
  Tensor riem = curvature(data.connection);
  const Tensor& jl = ph.j_low;

  Tensor reeb_block(dim, "dddd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j)
      for (int k = 1; k < dim; ++k)
        reeb_block.set({0, i, j, k}, wc.riemann_low.at({0, i, j, k}));
  record_residual(rep, "curvature has no reeb-hyperplane block under transverse symmetry",
                  "phbeltrami", reeb_block, rng);

  Tensor jr(dim, "dddd");
  Tensor pol(dim, "dddd");
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int g = 1; g < dim; ++g) {
        for (int d = 1; d < dim; ++d) {
          Scalar skew;
          Scalar pair;
          for (int p = 1; p < dim; ++p) {
            skew += riem.at({a, b, g, p}) * jl.at({p, d}) + riem.at({a, b, d, p}) * jl.at({p, g});
            pair += riem.at({a, b, g, p}) * jl.at({p, d}) - riem.at({g, d, a, p}) * jl.at({p, b});
          }
          jr.set({a, b, g, d}, std::move(skew));
          pol.set({a, b, g, d}, std::move(pair));
        }
      }
    }
  }
  record_residual(rep, "curvature contracted with the complex structure is skew in its last pair",
                  "jrskew", jr, rng);
  record_residual(rep, "curvature contracted with the complex structure is symmetric in pairs",
                  "polar0", pol, rng);

  {
    CheckResult r;
    r.name = "constant curvature and flatness verdicts agree";
    r.tag = "phbeltrami";
    bool ok = wc.constant_curvature == verdict.flat;
    r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    std::string note = std::string("constant=") + (wc.constant_curvature ? "true" : "false") +
                       ", flat=" + (verdict.flat ? "true" : "false");
    if (!verdict.obstructions.empty()) {
      note += ", obstruction: ";
      for (std::size_t t = 0; t < verdict.obstructions.size(); ++t) {
        if (t > 0) note += ", ";
        note += verdict.obstructions[t];
      }
    }
    r.note = std::move(note);
    rep.add(r);
  }

  if (wc.constant_curvature) {
    Tensor ein(dim, "dd");
    const Scalar coef = Scalar::integer(2L * (n - 1));
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j)
        ein.set({i, j}, coef * wc.ricci.at({i, j}) - jl.at({i, j}) * wc.scalar);
    record_residual(rep, "ricci block is proportional to the lowered complex structure",
                    "einstein", ein, rng);
    record_residual(rep, "lowered curvature takes its constant-curvature model form", "omegajR",
                    model_curvature_residual(wc.riemann_low, wc.scalar, ph), rng);
  } else {
    record_skip(rep, "ricci block is proportional to the lowered complex structure", "einstein",
                "holomorphic sectional curvature is not constant");
    record_skip(rep, "lowered curvature takes its constant-curvature model form", "omegajR",
                "holomorphic sectional curvature is not constant");
  }

  if (n == 2) {
    CurvatureData inv = invariant_tensors(S);
    Tensor dric = covariant_derivative(inv.ricci, S.canonical_rep);
    Tensor res(dim, "ddd");
    const Scalar third = frac(1, 6);
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int k = 1; k < dim; ++k) {
          Scalar sym = dric.at({i, j, k}) + dric.at({i, k, j}) + dric.at({j, i, k}) +
                       dric.at({j, k, i}) + dric.at({k, i, j}) + dric.at({k, j, i});
          res.set({i, j, k}, inv.c.at({i, j, k}) + frac(1, n) * third * sym);
        }
      }
    }
    record_residual(rep, "third-order invariant reduces to the symmetrized ricci derivative",
                    "phbeltrami", res, rng);
  } else {
    record_skip(rep, "third-order invariant reduces to the symmetrized ricci derivative",
                "phbeltrami", "applies to three-dimensional patches only");
  }
  return rep;
}

PseudoHermitian heisenberg_fixture(int n) {
  if (n < 2) throw DomainError("heisenberg fixture requires n >= 2");
  FlatModel m = flat_model(n);
  const int dim = 2 * n - 1;
  Tensor j(dim, "du");
  for (int i = 1; i <= n - 1; ++i) {
    j.set({i, n - 1 + i}, Scalar::one());
    j.set({n - 1 + i, i}, Scalar::integer(-1));
  }
  return make_pseudo_hermitian(m.frame, j);
}

}  // namespace cps
