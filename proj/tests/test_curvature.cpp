#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "cps/curvature.hpp"
#include "cps/geometry.hpp"
#include "cps/report.hpp"
#include "cps/structure.hpp"
#include "cps/tensor.hpp"

using namespace cps;

namespace {

Scalar sc(long v) { return Scalar::integer(v); }

ContactProjectiveStructure flat_structure(int n) {
  return make_structure(flat_model(n).connection);
}

// Five-dimensional torsion-free deformation: one fully symmetric coefficient
// with polynomial dependence, so the curvature is nonzero.
ContactProjectiveStructure deformed5() {
  FlatModel fm = flat_model(3);
  Tensor pi(fm.frame.dim(), "ddd");
  pi.set({1, 1, 1}, Scalar::variable(2));
  return deform(make_structure(fm.connection), pi);
}

// Five-dimensional deformation whose skew part realizes the contact torsion
// with lowered component τ_{121} = x1.
ContactProjectiveStructure torsional5() {
  FlatModel fm = flat_model(3);
  Tensor pi(fm.frame.dim(), "ddd");
  Scalar third = Scalar::variable(1) * Scalar::rational(1, 3);
  pi.set({1, 1, 2}, third);
  pi.set({1, 2, 1}, third);
  pi.set({2, 1, 1}, Scalar::variable(1) * Scalar::rational(-2, 3));
  return deform(make_structure(fm.connection), pi);
}

// Three-dimensional deformed patch.  The coefficient must be quadratic: in
// dimension three the flatness obstruction is third-order in the deformation
// jets, so constant and linear coefficients both yield flat structures.
ContactProjectiveStructure deformed3() {
  FlatModel fm = flat_model(2);
  Tensor pi(fm.frame.dim(), "ddd");
  pi.set({1, 1, 1}, Scalar::variable(2) * Scalar::variable(2));
  return deform(make_structure(fm.connection), pi);
}

Tensor random_tensor(int dim, const std::string& var, Rng& rng) {
  Tensor t(dim, var);
  std::vector<int> idx(t.rank(), 0);
  do {
    Scalar v = Scalar::constant(rng.small_rational()) +
               Scalar::constant(rng.small_rational()) *
                   Scalar::variable(static_cast<int>(rng.next_in(0, dim - 1)));
    t.set(idx, v);
  } while (t.next_index(idx));
  return t;
}

// (2∇_{[α}∇_{β]} + τ_{αβ}{}^δ ∇_δ) S minus the curvature action on each slot
// of S; identically zero for any connection and any S.
Tensor commutator_residual(const FrameConnection& conn, const Tensor& r, const Tensor& s) {
  const int dim = s.dim();
  Tensor first = covariant_derivative(s, conn);
  Tensor second = covariant_derivative(first, conn);
  Tensor tau = torsion(conn);
  Tensor res(dim, std::string("dd") + s.variance());
  std::vector<int> idx(res.rank(), 0);
  do {
    const int al = idx[0];
    const int be = idx[1];
    std::vector<int> rest(idx.begin() + 2, idx.end());
    std::vector<int> iab{al, be};
    iab.insert(iab.end(), rest.begin(), rest.end());
    std::vector<int> iba{be, al};
    iba.insert(iba.end(), rest.begin(), rest.end());
    Scalar val = second.at(iab) - second.at(iba);
    for (int d = 0; d < dim; ++d) {
      std::vector<int> shifted = rest;
      shifted.insert(shifted.begin(), d);
      val += tau.at({al, be, d}) * first.at(shifted);
    }
    for (int slot = 0; slot < s.rank(); ++slot) {
      const int orig = rest[slot];
      for (int d = 0; d < dim; ++d) {
        std::vector<int> mod = rest;
        mod[slot] = d;
        if (s.variance()[slot] == 'u') {
          val -= s.at(mod) * r.at({al, be, d, orig});
        } else {
          val += s.at(mod) * r.at({al, be, orig, d});
        }
      }
    }
    res.set(idx, val);
  } while (res.next_index(idx));
  return res;
}

bool has_tag(const CheckReport& rep, const std::string& tag, CheckStatus status) {
  for (const CheckResult& c : rep.checks) {
    if (c.tag == tag && c.status == status) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("curvature vanishes for the model and for coordinate frames") {
  for (int n = 2; n <= 4; ++n) {
    CHECK(curvature(flat_model(n).connection).is_zero());
  }

  // A plain coordinate frame (identity rows, commuting fields) with zero
  // connection coefficients is flat as well.
  ChartSpec chart = ChartSpec::make(2);
  const int dim = chart.dim();
  AdaptedFrame eu;
  eu.theta = ContactForm{chart, {sc(1), sc(0), sc(0)}};
  eu.frame.assign(dim, std::vector<Scalar>(dim));
  eu.coframe.assign(dim, std::vector<Scalar>(dim));
  for (int a = 0; a < dim; ++a) {
    eu.frame[a][a] = sc(1);
    eu.coframe[a][a] = sc(1);
  }
  eu.c = Tensor(dim, "ddu");
  eu.omega_lo = Tensor(dim, "dd");
  eu.omega_up = Tensor(dim, "uu");
  CHECK(curvature(FrameConnection{eu, Tensor(dim, "ddu")}).is_zero());
}

TEST_CASE("curvature is antisymmetric in its first pair") {
  CurvatureData d = invariant_tensors(deformed5());
  CHECK(!d.riemann.is_zero());
  CHECK((d.riemann + transpose_slots(d.riemann, {1, 0, 2, 3})).is_zero());
}

TEST_CASE("difference formula matches recomputed curvature for arbitrary changes") {
  Rng rng(seed_from_env());
  for (int n = 2; n <= 3; ++n) {
    FlatModel fm = flat_model(n);
    const int dim = fm.frame.dim();
    FrameConnection conn{fm.frame,
                         fm.connection.gamma + random_tensor(dim, "ddu", rng)};
    Tensor lam = random_tensor(dim, "ddu", rng);
    CHECK(curvature_difference_residual(conn, lam).is_zero());
  }
}

TEST_CASE("iterated-derivative commutator matches the curvature action") {
  ContactProjectiveStructure S = torsional5();
  const FrameConnection& conn = S.canonical_rep;
  Tensor r = curvature(conn);
  Rng rng(seed_from_env());
  const int dim = S.frame.dim();
  for (const std::string& var : {"d", "u", "du"}) {
    Tensor s = random_tensor(dim, var, rng);
    CHECK(commutator_residual(conn, r, s).is_zero());
  }
}

TEST_CASE("flat structures have vanishing invariants and a flat verdict") {
  for (int n = 2; n <= 4; ++n) {
    ContactProjectiveStructure S = flat_structure(n);
    CurvatureData d = invariant_tensors(S);
    CHECK(d.riemann.is_zero());
    CHECK(d.ricci.is_zero());
    CHECK(d.rho.is_zero());
    CHECK(d.p.is_zero());
    CHECK(d.q.is_zero());
    CHECK(d.w.is_zero());
    CHECK(d.c.is_zero());
    FlatnessVerdict v = flatness(S);
    CHECK(v.flat);
    CHECK(v.obstructions.empty());
    CHECK(v.residual_degree == -1);
  }
}

TEST_CASE("deformed torsion-free structure in dimension five") {
  ContactProjectiveStructure S = deformed5();
  CHECK(contact_torsion(S).is_zero());

  CurvatureData d = invariant_tensors(S);
  CHECK(!d.riemann.is_zero());
  CHECK(!d.w.is_zero());
  CHECK(d.q.is_zero());
  // Torsion-free reductions: the pairing trace collapses onto Ricci, and P is
  // the normalized Ricci tensor.
  CHECK((d.rho + d.ricci.scaled(sc(2))).is_zero());
  CHECK(d.p == d.ricci.scaled(Scalar::rational(1, 6)));

  FlatnessVerdict v = flatness(S);
  CHECK(!v.flat);
  REQUIRE(v.obstructions.size() == 1);
  CHECK(v.obstructions[0] == "contact projective Weyl tensor");
  CHECK(v.residual_degree >= 0);

  CHECK(bianchi_suite(S).all_passed());
  CheckReport inv = curvature_invariant_checks(S);
  CHECK(inv.all_passed());
  CHECK(has_tag(inv, "threeweylvanish", CheckStatus::Skipped));
  CheckReport cw = cotton_weyl_relation(S);
  CHECK(cw.all_passed());
  CHECK(has_tag(cw, "cottonweyl", CheckStatus::Pass));
  CHECK(has_tag(cw, "tracednablaweyl", CheckStatus::Pass));
  CHECK(has_tag(cw, "cottonsymmetry", CheckStatus::Skipped));
}

TEST_CASE("torsion-carrying structure in dimension five") {
  ContactProjectiveStructure S = torsional5();
  Tensor ct = contact_torsion(S);
  CHECK(!ct.is_zero());
  Tensor ct_low = lower_slot(ct, 2, S.frame.omega_lo);
  CHECK(ct_low.at({1, 2, 1}) == Scalar::variable(1));

  CHECK(bianchi_suite(S).all_passed());
  CHECK(curvature_invariant_checks(S).all_passed());
  CHECK_THROWS_AS(cotton_weyl_relation(S), DomainError);

  FlatnessVerdict v = flatness(S);
  CHECK(!v.flat);
  REQUIRE(!v.obstructions.empty());
  CHECK(v.obstructions[0] == "contact torsion");
}

TEST_CASE("three-dimensional structures and the Cotton obstruction") {
  ContactProjectiveStructure S = deformed3();
  CurvatureData d = invariant_tensors(S);
  CHECK(d.w.is_zero());
  CHECK(d.q.is_zero());
  CHECK(contact_torsion(S).is_zero());

  // Exact components, derived by hand for this patch: the curvature has a
  // single antisymmetric pair of entries, and the obstruction tensor is
  // completely symmetric with all nonzero components equal to -1/3.
  Tensor expected_r(S.frame.dim(), "dddu");
  expected_r.set({1, 2, 1, 2}, sc(2) * Scalar::variable(2));
  expected_r.set({2, 1, 1, 2}, sc(-2) * Scalar::variable(2));
  CHECK(d.riemann == expected_r);
  Tensor expected_c(S.frame.dim(), "ddd");
  expected_c.set({1, 1, 2}, Scalar::rational(-1, 3));
  expected_c.set({1, 2, 1}, Scalar::rational(-1, 3));
  expected_c.set({2, 1, 1}, Scalar::rational(-1, 3));
  CHECK(d.c == expected_c);

  FlatnessVerdict v = flatness(S);
  CHECK(!v.flat);
  REQUIRE(v.obstructions.size() == 1);
  CHECK(v.obstructions[0] == "contact projective Cotton tensor");

  CHECK(bianchi_suite(S).all_passed());
  CheckReport inv = curvature_invariant_checks(S);
  CHECK(inv.all_passed());
  CHECK(has_tag(inv, "threeweylvanish", CheckStatus::Pass));
  CheckReport cw = cotton_weyl_relation(S);
  CHECK(cw.all_passed());
  CHECK(has_tag(cw, "cottonsymmetry", CheckStatus::Pass));

  CHECK(flatness(flat_structure(2)).flat);

  SUBCASE("low-order deformations are flat") {
    // A coefficient the frame fields annihilate (up to the antisymmetrized
    // pair) leaves the connection flat outright.
    FlatModel fm = flat_model(2);
    Tensor lin1(fm.frame.dim(), "ddd");
    lin1.set({1, 1, 1}, Scalar::variable(1));
    ContactProjectiveStructure s1 = deform(make_structure(fm.connection), lin1);
    CurvatureData d1 = invariant_tensors(s1);
    CHECK(d1.riemann.is_zero());
    CHECK(flatness(s1).flat);

    // A linear coefficient curves the representative, but the obstruction
    // tensor still vanishes: the structure is flat even though this
    // representative is not, because the curvature of a single representative
    // is not an invariant of the structure.
    Tensor lin2(fm.frame.dim(), "ddd");
    lin2.set({1, 1, 1}, Scalar::variable(2));
    ContactProjectiveStructure s2 = deform(make_structure(fm.connection), lin2);
    CurvatureData d2 = invariant_tensors(s2);
    CHECK(!d2.riemann.is_zero());
    CHECK(d2.c.is_zero());
    CHECK(flatness(s2).flat);
  }
}

TEST_CASE("scale covariance of the invariants") {
  Scalar f1 = sc(1) + Scalar::variable(1);
  Scalar f2 = sc(1) + Scalar::variable(2);

  SUBCASE("constant rescalings fix every invariant") {
    ContactProjectiveStructure S = deformed5();
    CHECK(scale_covariance_check(S, sc(2)).all_passed());
    FrameConnection st = scale_transport(S, sc(2));
    CurvatureData base = invariant_tensors(S);
    CurvatureData tl = invariant_tensors(ContactProjectiveStructure{st.frame, st});
    CHECK(tl.ricci == base.ricci);
    CHECK(tl.rho == base.rho);
    CHECK(tl.p == base.p);
    CHECK(tl.q == base.q);
    CHECK(tl.w == base.w);
    CHECK(tl.c == base.c);
  }

  SUBCASE("torsion-free rescaling leaves W untouched") {
    ContactProjectiveStructure S = deformed5();
    CHECK(scale_covariance_check(S, f1).all_passed());
    FrameConnection st = scale_transport(S, f1);
    CurvatureData base = invariant_tensors(S);
    CurvatureData tl = invariant_tensors(ContactProjectiveStructure{st.frame, st});
    CHECK(tl.w == base.w);
  }

  SUBCASE("torsional rescaling moves W exactly along the predicted term") {
    ContactProjectiveStructure S = torsional5();
    CHECK(scale_covariance_check(S, f2).all_passed());
    FrameConnection st = scale_transport(S, f2);
    CurvatureData base = invariant_tensors(S);
    CurvatureData tl = invariant_tensors(ContactProjectiveStructure{st.frame, st});
    CHECK(tl.w != base.w);
  }

  SUBCASE("three-dimensional C is scale-invariant") {
    ContactProjectiveStructure S = deformed3();
    CHECK(scale_covariance_check(S, f1).all_passed());
    FrameConnection st = scale_transport(S, f1);
    CurvatureData base = invariant_tensors(S);
    CurvatureData tl = invariant_tensors(ContactProjectiveStructure{st.frame, st});
    CHECK(tl.c == base.c);
  }

  SUBCASE("the zero function is rejected") {
    ContactProjectiveStructure S = deformed3();
    CHECK_THROWS_AS(scale_covariance_check(S, Scalar::zero()), DomainError);
  }
}

TEST_CASE("curvature difference of two representatives of one structure") {
  Scalar f = sc(1) + Scalar::variable(1);
  for (int n = 2; n <= 3; ++n) {
    ContactProjectiveStructure S = (n == 2) ? deformed3() : deformed5();
    FrameConnection st = scale_transport(S, f);
    Tensor pulled = change_connection_frame(st, S.frame);
    Tensor lam = pulled - S.canonical_rep.gamma;
    CHECK(!lam.is_zero());
    CHECK(curvature_difference_residual(S.canonical_rep, lam).is_zero());
  }
}

TEST_CASE("reports render deterministically and carry residual degrees") {
  Rng rng(seed_from_env());
  CheckReport rep;
  record_residual(rep, "zero residual", "foo", Scalar::zero(), rng);
  record_residual(rep, "nonzero residual", "bar", Scalar::variable(1), rng);
  record_skip(rep, "skipped thing", "baz", "not applicable");
  CHECK(!rep.all_passed());
  CHECK(rep.checks[1].residual_degree == 1);
  std::string text = render_report(rep);
  CHECK(text ==
        "PASS foo: zero residual\n"
        "FAIL bar: nonzero residual [residual degree 1]\n"
        "SKIP baz: skipped thing -- not applicable\n");

  ContactProjectiveStructure S = deformed3();
  CHECK(render_report(bianchi_suite(S)) == render_report(bianchi_suite(S)));
}
