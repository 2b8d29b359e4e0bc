#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "cps/ambient.hpp"
#include "cps/curvature.hpp"
#include "cps/geometry.hpp"
#include "cps/report.hpp"
#include "cps/structure.hpp"
#include "cps/tensor.hpp"
#include "cps/tractor.hpp"

using namespace cps;

namespace {

Scalar sc(long v) { return Scalar::integer(v); }

ContactProjectiveStructure flat_structure(int n) {
  return make_structure(flat_model(n).connection);
}

// Five-dimensional torsion-free deformation with polynomial dependence.
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

// Three-dimensional deformed patch with quadratic coefficient.
ContactProjectiveStructure deformed3() {
  FlatModel fm = flat_model(2);
  Tensor pi(fm.frame.dim(), "ddd");
  pi.set({1, 1, 1}, Scalar::variable(2) * Scalar::variable(2));
  return deform(make_structure(fm.connection), pi);
}

int count_status(const CheckReport& rep, const std::string& tag, CheckStatus st) {
  int k = 0;
  for (const auto& c : rep.checks)
    if (c.tag == tag && c.status == st) ++k;
  return k;
}

bool tag_failed(const CheckReport& rep, const std::string& tag) {
  return count_status(rep, tag, CheckStatus::Fail) > 0;
}

const ContactProjectiveStructure& flat3s() {
  static const ContactProjectiveStructure s = flat_structure(2);
  return s;
}

const ContactProjectiveStructure& flat5s() {
  static const ContactProjectiveStructure s = flat_structure(3);
  return s;
}

const ContactProjectiveStructure& def5s() {
  static const ContactProjectiveStructure s = deformed5();
  return s;
}

const ContactProjectiveStructure& tor5s() {
  static const ContactProjectiveStructure s = torsional5();
  return s;
}

const ContactProjectiveStructure& def3s() {
  static const ContactProjectiveStructure s = deformed3();
  return s;
}

const KappaBlocks& def5k() {
  static const KappaBlocks k = tractor_curvature(def5s());
  return k;
}

const KappaBlocks& tor5k() {
  static const KappaBlocks k = tractor_curvature(tor5s());
  return k;
}

const KappaBlocks& def3k() {
  static const KappaBlocks k = tractor_curvature(def3s());
  return k;
}

// Identity on the hyperplane labels, the neutral reductive gauge block.
Tensor latin_identity(int dim) {
  Tensor f(dim, "du");
  for (int i = 1; i < dim; ++i) f.set({i, i}, Scalar::one());
  return f;
}

// Raised gauge parameter gamma^p = omega^{pq} gamma_q.
std::vector<Scalar> raise_param(const AdaptedFrame& fr, const Tensor& gamma) {
  const int dim = fr.dim();
  std::vector<Scalar> gup(static_cast<size_t>(dim));
  for (int p = 1; p < dim; ++p) {
    Scalar acc;
    for (int q = 1; q < dim; ++q) acc += fr.omega_up.at({p, q}) * gamma.at({q});
    gup[static_cast<size_t>(p)] = acc;
  }
  return gup;
}

// Random block collection in the admissible block pattern: skew leading
// pairs, symmetric lowered endomorphism blocks, the corner tied to the skew
// part of the lowered mixed block, and no complete alternation in the
// lowered torsion-level block.  The trace conditions are left generic.
KappaBlocks random_blocks(const AdaptedFrame& fr, Rng& rng) {
  const int dim = fr.dim();
  auto rnd = [&rng]() { return Scalar::constant(rng.small_rational()); };
  Tensor blow(dim, "ddd");
  Tensor dlow(dim, "dddd");
  Tensor c(dim, "ddd");
  Tensor e(dim, "dd");
  for (int i = 1; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Scalar ev = rnd();
      e.set({i, j}, ev);
      e.set({j, i}, -ev);
      for (int q = 1; q < dim; ++q) {
        const Scalar bv = rnd();
        blow.set({i, j, q}, bv);
        blow.set({j, i, q}, -bv);
        const Scalar cv = rnd();
        c.set({i, j, q}, cv);
        c.set({j, i, q}, -cv);
        for (int p = q; p < dim; ++p) {
          const Scalar dv = rnd();
          dlow.set({i, j, q, p}, dv);
          dlow.set({i, j, p, q}, dv);
          dlow.set({j, i, q, p}, -dv);
          dlow.set({j, i, p, q}, -dv);
        }
      }
    }
  }
  blow = blow - alt_slots(blow, {0, 1, 2});
  const Tensor b = raise_slot(blow, 2, fr.omega_up);
  const Tensor d = raise_slot(dlow, 3, fr.omega_up);
  Tensor b0(dim, "du");
  Tensor c0(dim, "dd");
  Tensor d0low(dim, "ddd");
  Tensor a0(dim, "d");
  Tensor e0(dim, "d");
  for (int i = 1; i < dim; ++i) {
    a0.set({i}, rnd());
    e0.set({i}, rnd());
    for (int q = 1; q < dim; ++q) {
      b0.set({i, q}, rnd());
      c0.set({i, q}, rnd());
      for (int p = q; p < dim; ++p) {
        const Scalar v = rnd();
        d0low.set({i, q, p}, v);
        d0low.set({i, p, q}, v);
      }
    }
  }
  const Tensor d0 = raise_slot(d0low, 2, fr.omega_up);
  const Tensor bl0 = lower_slot(b0, 1, fr.omega_lo);
  Tensor a(dim, "dd");
  for (int i = 1; i < dim; ++i)
    for (int j = 1; j < dim; ++j) a.set({i, j}, bl0.at({j, i}) - bl0.at({i, j}));
  return make_kappa_blocks(fr, a, b, c, d, e, a0, b0, c0, d0, e0);
}

// The covariant derivative of the fiber pairing must vanish: the frame
// derivative of each entry, corrected by the canonical connection on the
// hyperplane slots, balances the two connection-matrix contractions.
void check_pairing_parallel(const ContactProjectiveStructure& S) {
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int r = dim + 1;
  const TractorConnectionData tc = tractor_connection(S);
  const Tensor om = tractor_pairing(fr);
  for (int alpha = 0; alpha < dim; ++alpha) {
    const Tensor& m = tc.matrix[static_cast<size_t>(alpha)];
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        Scalar val = fr.apply(alpha, om.at({a, b}));
        if (a >= 1 && a <= dim - 1)
          for (int s = 1; s < dim; ++s) val = val - conn.gamma.at({alpha, a, s}) * om.at({s, b});
        if (b >= 1 && b <= dim - 1)
          for (int s = 1; s < dim; ++s) val = val - conn.gamma.at({alpha, b, s}) * om.at({a, s});
        for (int cc = 0; cc < r; ++cc) {
          val = val - m.at({cc, a}) * om.at({cc, b});
          val = val - m.at({cc, b}) * om.at({a, cc});
        }
        CHECK(val.is_zero());
      }
    }
  }
}

}  // namespace

TEST_CASE("tractor pairing and connection matrices") {
  const ContactProjectiveStructure& S = flat3s();
  const AdaptedFrame& fr = S.frame;
  const TractorConnectionData tc = tractor_connection(S);
  CHECK(tc.rank() == 4);
  CHECK(static_cast<int>(tc.matrix.size()) == 3);

  const Tensor om = tractor_pairing(fr);
  CHECK(om.at({0, 3}) == Scalar::one());
  CHECK(om.at({3, 0}) == sc(-1));
  CHECK(om.at({1, 2}) == Scalar::one());
  CHECK(om.at({2, 1}) == sc(-1));
  CHECK(om.at({0, 0}).is_zero());
  CHECK(om.at({1, 3}).is_zero());
  CHECK(om.at({0, 1}).is_zero());

  // On the flat model P and Q vanish, so the matrices carry only the
  // tautological entries: the hyperplane injection, the lowered contact
  // row, and the Reeb column entry 2.
  CHECK(tc.p.is_zero());
  CHECK(tc.matrix[1].at({1, 0}) == Scalar::one());
  CHECK(tc.matrix[1].at({3, 2}) == sc(-1));
  CHECK(tc.matrix[2].at({2, 0}) == Scalar::one());
  CHECK(tc.matrix[2].at({3, 1}) == Scalar::one());
  CHECK(tc.matrix[0].at({3, 0}) == sc(2));
  int nonzero[3] = {0, 0, 0};
  for (int alpha = 0; alpha < 3; ++alpha)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (!tc.matrix[static_cast<size_t>(alpha)].at({a, b}).is_zero()) ++nonzero[alpha];
  CHECK(nonzero[0] == 1);
  CHECK(nonzero[1] == 2);
  CHECK(nonzero[2] == 2);

  // The fiber pairing is parallel for the full connection, including the
  // curved and torsional fixtures.
  check_pairing_parallel(flat3s());
  check_pairing_parallel(def5s());
  check_pairing_parallel(tor5s());
}

TEST_CASE("tractor derivative of density jets") {
  {
    const AdaptedFrame& fr = flat3s().frame;
    const Tensor z = tractor_d(fr, Density{Scalar::variable(1), 1});
    CHECK(z.at({0}) == Scalar::variable(1));
    CHECK(z.at({1}) == Scalar::one());
    CHECK(z.at({2}).is_zero());
    CHECK(z.at({3}).is_zero());
    CHECK(tractor_d(fr, Density{Scalar::one(), 0}).is_zero());
  }

  // Full display of the covector derivative rows on a curved fixture.
  const ContactProjectiveStructure& S = def5s();
  const AdaptedFrame& fr = S.frame;
  const FrameConnection& conn = S.canonical_rep;
  const int dim = fr.dim();
  const int r = dim + 1;
  const Scalar half = Scalar::rational(1, 2);
  const Scalar h = Scalar::variable(0) + Scalar::variable(1) * Scalar::variable(2);
  const TractorConnectionData tc = tractor_connection(S);
  const Tensor z = tractor_d(fr, Density{h, 1});
  const std::vector<Tensor> cd = tractor_covector_derivative(tc, z);
  CHECK(static_cast<int>(cd.size()) == dim);
  const Tensor L = contact_hessian(S, Density{h, 1});
  const Tensor q = invariant_tensors(S).q;
  Tensor dh(dim, "d");
  for (int a = 0; a < dim; ++a) dh.set({a}, fr.apply(a, h));

  // Hyperplane rows: radial slot vanishes, the hyperplane slot is the
  // invariant second-order operator, and the contact slot carries the
  // second-order Reeb combination.
  for (int i = 1; i < dim; ++i) {
    CHECK(cd[static_cast<size_t>(i)].at({0}).is_zero());
    for (int j = 1; j < dim; ++j) CHECK(cd[static_cast<size_t>(i)].at({j}) == L.at({i, j}));
    Scalar last = half * fr.apply(i, dh.at({0})) - half * tc.p.at({i, 0}) * h;
    for (int p = 1; p < dim; ++p)
      for (int k = 1; k < dim; ++k)
        last = last - tc.p.at({i, p}) * fr.omega_up.at({p, k}) * dh.at({k});
    CHECK(cd[static_cast<size_t>(i)].at({r - 1}) == last);
  }

  // Reeb row.
  CHECK(cd[0].at({0}).is_zero());
  for (int j = 1; j < dim; ++j) {
    Scalar val = fr.apply(0, dh.at({j})) - tc.p.at({0, j}) * h;
    for (int s = 1; s < dim; ++s) val = val - conn.gamma.at({0, j, s}) * dh.at({s});
    for (int p = 1; p < dim; ++p)
      for (int k = 1; k < dim; ++k)
        val = val + (sc(2) * tc.p.at({p, j}) + q.at({p, j})) * fr.omega_up.at({p, k}) * dh.at({k});
    CHECK(cd[0].at({j}) == val);
  }
  Scalar last0 = half * fr.apply(0, dh.at({0})) - half * tc.p.at({0, 0}) * h;
  for (int p = 1; p < dim; ++p)
    for (int k = 1; k < dim; ++k)
      last0 = last0 + tc.p.at({0, p}) * fr.omega_up.at({p, k}) * dh.at({k});
  CHECK(cd[0].at({r - 1}) == last0);

  Tensor bad(dim, "d");
  CHECK_THROWS_AS(tractor_covector_derivative(tc, bad), DomainError);
}

TEST_CASE("tractor curvature of the flat model vanishes") {
  for (const ContactProjectiveStructure* S : {&flat3s(), &flat5s()}) {
    const KappaBlocks k = tractor_curvature(*S);
    CHECK(k.a.is_zero());
    CHECK(k.b.is_zero());
    CHECK(k.c.is_zero());
    CHECK(k.d.is_zero());
    CHECK(k.e.is_zero());
    CHECK(k.a0.is_zero());
    CHECK(k.b0.is_zero());
    CHECK(k.c0.is_zero());
    CHECK(k.d0.is_zero());
    CHECK(k.e0.is_zero());
    CHECK(del_star_kappa(k).is_zero());
    CHECK(k_membership(k).all_passed());
  }
  CHECK(is_normal(flat3s()));
}

TEST_CASE("tractor curvature blocks match the cone curvature") {
  struct Fixture {
    const ContactProjectiveStructure* s;
    const KappaBlocks* k;
  };
  const Fixture fixtures[] = {{&def5s(), &def5k()}, {&tor5s(), &tor5k()}, {&def3s(), &def3k()}};
  for (const Fixture& fx : fixtures) {
    const ContactProjectiveStructure& S = *fx.s;
    const KappaBlocks& k = *fx.k;
    const AdaptedFrame& fr = S.frame;
    const int dim = fr.dim();
    const AmbientConnection hat = ambient_connection(S);
    const AmbientCurvatureBlocks blk = ambient_curvature_blocks(hat);
    CHECK((k.c - blk.u).is_zero());
    CHECK((k.d - blk.w).is_zero());
    CHECK((k.e - blk.v).is_zero());
    CHECK((k.c0.scaled(sc(2)) - blk.a).is_zero());
    CHECK((k.d0.scaled(sc(2)) - blk.c).is_zero());
    CHECK((k.e0.scaled(sc(2)) - blk.b).is_zero());
    // The Reeb corner block is the omega-trace of the radial block.
    for (int i = 1; i < dim; ++i) {
      Scalar acc;
      for (int s = 1; s < dim; ++s)
        for (int t = 1; t < dim; ++t) acc += fr.omega_up.at({s, t}) * blk.u.at({s, i, t});
      CHECK(k.a0.at({i}) == acc);
    }
    // Base-invariant cross-checks.
    const CurvatureData inv = invariant_tensors(S);
    CHECK((k.d - inv.w).is_zero());
    CHECK((k.d0.scaled(sc(2)) - raise_slot(inv.c, 2, fr.omega_up)).is_zero());
    CHECK(k_membership(k).all_passed());
  }

  // Torsion-level blocks: absent on the torsion-free fixtures, equal to the
  // contact torsion on the torsional one.
  CHECK(def5k().a.is_zero());
  CHECK(def5k().b.is_zero());
  CHECK(def5k().b0.is_zero());
  CHECK(def3k().b.is_zero());
  CHECK(!tor5k().b.is_zero());
  CHECK(tor5k().b.at({1, 2, 3}) == -Scalar::variable(1));
  const Tensor blow = lower_slot(tor5k().b, 2, tor5s().frame.omega_lo);
  CHECK(blow.at({1, 2, 1}) == Scalar::variable(1));
  CHECK((tor5k().b - contact_torsion(tor5s())).is_zero());

  // Torsion-free shape: the one-slot block is minus the skew part of the
  // lowered doubled Reeb endomorphism block, and the top corner is minus the
  // skew part of the doubled Reeb one-slot block.
  {
    const KappaBlocks& k = def5k();
    const AdaptedFrame& fr = def5s().frame;
    const int dim = fr.dim();
    const Scalar half = Scalar::rational(1, 2);
    const Tensor cl = lower_slot(k.d0, 2, fr.omega_lo).scaled(sc(2));
    const AmbientCurvatureBlocks blk = ambient_curvature_blocks(ambient_connection(def5s()));
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        CHECK((k.e.at({i, j}) + half * (blk.a.at({i, j}) - blk.a.at({j, i}))).is_zero());
        for (int q = 1; q < dim; ++q)
          CHECK((k.c.at({i, j, q}) + half * (cl.at({i, j, q}) - cl.at({j, i, q}))).is_zero());
      }
    }
  }
}

TEST_CASE("normal-form differential and normality") {
  CHECK(del_star_kappa(def5k()).is_zero());
  CHECK(del_star_kappa(def3k()).is_zero());
  CHECK(is_normal(def3s()));
  CHECK(!is_normal(tor5s()));

  const DelStarKappa ds = del_star_kappa(tor5k());
  CHECK(!ds.is_zero());

  const ContactProjectiveStructure& S = tor5s();
  const AdaptedFrame& fr = S.frame;
  const KappaBlocks& k = tor5k();
  const int dim = fr.dim();
  const int r = dim + 1;
  const Scalar half = Scalar::rational(1, 2);
  const Tensor q = invariant_tensors(S).q;
  const Tensor blow = lower_slot(k.b, 2, fr.omega_lo);

  // Full display of the hyperplane directions: the top row carries the
  // trace invariant and the Reeb corner block, the middle block the
  // symmetrized raised torsion, and the negative levels vanish.
  for (int j = 1; j < dim; ++j) {
    Tensor expect(r, "ud");
    for (int qq = 1; qq < dim; ++qq)
      expect.set({0, qq}, -q.at({j, qq}) + half * q.at({qq, j}));
    expect.set({0, r - 1}, sc(-2) * k.a0.at({j}));
    for (int p = 1; p < dim; ++p) {
      for (int qq = 1; qq < dim; ++qq) {
        Scalar mid;
        for (int t = 1; t < dim; ++t)
          mid += fr.omega_up.at({p, t}) * (blow.at({j, t, qq}) + blow.at({j, qq, t}));
        expect.set({p, qq}, mid);
      }
      Scalar raised;
      for (int t = 1; t < dim; ++t) raised += fr.omega_up.at({p, t}) * expect.at({0, t});
      expect.set({p, r - 1}, raised);
    }
    CHECK((ds.value[static_cast<size_t>(j)] - expect).is_zero());
  }
  // Pinned middle-block entries of the first hyperplane direction.
  CHECK(ds.value[1].at({4, 1}) == -Scalar::variable(1));
  CHECK(ds.value[1].at({3, 2}) == -Scalar::variable(1));

  // The Reeb direction of this torsional fixture keeps its negative levels
  // and corners at zero: its torsion traces vanish by the normalization.
  for (int p = 1; p < dim; ++p) CHECK(ds.value[0].at({p, 0}).is_zero());
  for (int qq = 1; qq < dim; ++qq) CHECK(ds.value[0].at({r - 1, qq}).is_zero());
  CHECK(ds.value[0].at({r - 1, 0}).is_zero());
  CHECK(ds.value[0].at({0, 0}).is_zero());

  // On a generic block collection in the admissible pattern the negative
  // levels and corners of the differential are exactly the trace conditions
  // of the torsion-level blocks.
  Rng rng(seed_from_env() + 7);
  const AdaptedFrame& fr5 = flat5s().frame;
  const KappaBlocks kr = random_blocks(fr5, rng);
  const DelStarKappa dsr = del_star_kappa(kr);
  const Tensor blr = lower_slot(kr.b, 2, fr5.omega_lo);
  for (int j = 1; j < dim; ++j) {
    const Tensor& m = dsr.value[static_cast<size_t>(j)];
    for (int p = 1; p < dim; ++p) CHECK(m.at({p, 0}).is_zero());
    for (int qq = 1; qq < dim; ++qq) CHECK(m.at({r - 1, qq}).is_zero());
    CHECK(m.at({r - 1, 0}).is_zero());
    Scalar btr;
    for (int i = 1; i < dim; ++i) btr += kr.b.at({i, j, i});
    CHECK(m.at({0, 0}) == btr);
    CHECK(m.at({r - 1, r - 1}) == -btr);
  }
  const Tensor& m0 = dsr.value[0];
  for (int p = 1; p < dim; ++p) {
    Scalar ex;
    for (int s = 1; s < dim; ++s)
      for (int qq = 1; qq < dim; ++qq) ex += half * fr5.omega_up.at({s, qq}) * kr.b.at({s, qq, p});
    CHECK(m0.at({p, 0}) == ex);
  }
  for (int qq = 1; qq < dim; ++qq) {
    Scalar ex;
    for (int s = 1; s < dim; ++s)
      for (int t = 1; t < dim; ++t) ex = ex - half * fr5.omega_up.at({s, t}) * blr.at({s, t, qq});
    CHECK(m0.at({r - 1, qq}) == ex);
  }
  CHECK(m0.at({r - 1, 0}).is_zero());
  Scalar b0tr;
  for (int l = 1; l < dim; ++l) b0tr += kr.b0.at({l, l});
  CHECK(m0.at({0, 0}) == sc(-2) * b0tr);
  CHECK(m0.at({r - 1, r - 1}) == sc(2) * b0tr);

  // Complete closed forms of both differential directions on generic
  // blocks, so every coefficient is exercised with generic values.  The
  // contact column is the omega-raised top row and the bottom row is minus
  // the lowered radial column, as for any element of the symplectic
  // algebra of the pairing.
  const Tensor bl0r = lower_slot(kr.b0, 1, fr5.omega_lo);
  for (int j = 1; j < dim; ++j) {
    Tensor expect(r, "ud");
    Scalar btr;
    for (int s = 1; s < dim; ++s) btr += kr.b.at({s, j, s});
    expect.set({0, 0}, btr);
    expect.set({r - 1, r - 1}, -btr);
    for (int qq = 1; qq < dim; ++qq) {
      Scalar top = -kr.a.at({qq, j}) - sc(2) * bl0r.at({j, qq});
      for (int s = 1; s < dim; ++s) top += kr.d.at({s, j, qq, s});
      expect.set({0, qq}, top);
    }
    Scalar corner = sc(-4) * kr.a0.at({j});
    for (int s = 1; s < dim; ++s)
      for (int p = 1; p < dim; ++p)
        corner += sc(2) * fr5.omega_up.at({s, p}) * kr.c.at({s, j, p});
    expect.set({0, r - 1}, corner);
    for (int p = 1; p < dim; ++p) {
      for (int qq = 1; qq < dim; ++qq) {
        Scalar mid = -kr.b.at({qq, j, p});
        for (int s = 1; s < dim; ++s) mid = mid - fr5.omega_up.at({p, s}) * blr.at({s, j, qq});
        expect.set({p, qq}, mid);
      }
      Scalar raised;
      for (int t = 1; t < dim; ++t) raised += fr5.omega_up.at({p, t}) * expect.at({0, t});
      expect.set({p, r - 1}, raised);
    }
    CHECK((dsr.value[static_cast<size_t>(j)] - expect).is_zero());
  }
  {
    Tensor expect(r, "ud");
    expect.set({0, 0}, sc(-2) * b0tr);
    expect.set({r - 1, r - 1}, sc(2) * b0tr);
    for (int qq = 1; qq < dim; ++qq) {
      Scalar top = kr.a0.at({qq});
      for (int s = 1; s < dim; ++s) {
        top = top - kr.d0.at({s, qq, s});
        for (int t = 1; t < dim; ++t)
          top += Scalar::rational(1, 2) * fr5.omega_up.at({s, t}) * kr.c.at({s, t, qq});
      }
      expect.set({0, qq}, top);
    }
    Scalar corner;
    for (int s = 1; s < dim; ++s)
      for (int t = 1; t < dim; ++t)
        corner += Scalar::rational(1, 2) * fr5.omega_up.at({s, t}) * kr.e.at({s, t}) -
                  sc(2) * fr5.omega_up.at({s, t}) * kr.c0.at({s, t});
    expect.set({0, r - 1}, corner);
    for (int p = 1; p < dim; ++p) {
      Scalar rad;
      for (int s = 1; s < dim; ++s)
        for (int qq = 1; qq < dim; ++qq)
          rad += Scalar::rational(1, 2) * fr5.omega_up.at({s, qq}) * kr.b.at({s, qq, p});
      expect.set({p, 0}, rad);
      for (int qq = 1; qq < dim; ++qq) {
        Scalar mid = kr.b0.at({qq, p});
        for (int s = 1; s < dim; ++s) {
          mid += fr5.omega_up.at({p, s}) * bl0r.at({s, qq});
          for (int t = 1; t < dim; ++t)
            mid += Scalar::rational(1, 2) * fr5.omega_up.at({s, t}) * kr.d.at({s, t, qq, p});
        }
        expect.set({p, qq}, mid);
      }
      Scalar raised;
      for (int t = 1; t < dim; ++t) raised += fr5.omega_up.at({p, t}) * expect.at({0, t});
      expect.set({p, r - 1}, raised);
    }
    for (int p = 1; p < dim; ++p) {
      Scalar bottom;
      for (int s = 1; s < dim; ++s) bottom = bottom - expect.at({s, 0}) * fr5.omega_lo.at({s, p});
      expect.set({r - 1, p}, bottom);
    }
    CHECK((dsr.value[0] - expect).is_zero());
  }

  // A validation failure surfaces as a domain error even on the
  // differential itself.
  KappaBlocks broken = def3k();
  broken.a.at({1, 1}) = Scalar::one();
  CHECK_THROWS_AS(del_star_kappa(broken), DomainError);
}

TEST_CASE("membership report for curvature blocks") {
  // Real curvature always lies in the admissible space, with or without
  // torsion.
  CHECK(k_membership(def5k()).all_passed());
  CHECK(k_membership(tor5k()).all_passed());
  CHECK(k_membership(def3k()).all_passed());

  // A single off-trace perturbation of the one-slot block is caught by the
  // trace conditions and by nothing else.
  const KappaBlocks flat = tractor_curvature(flat5s());
  Tensor c = flat.c;
  c.set({1, 2, 3}, Scalar::one());
  c.set({2, 1, 3}, sc(-1));
  const KappaBlocks tweaked = make_kappa_blocks(flat.frame, flat.a, flat.b, c, flat.d, flat.e,
                                                flat.a0, flat.b0, flat.c0, flat.d0, flat.e0);
  const CheckReport rep = k_membership(tweaked);
  CHECK(!rep.all_passed());
  CHECK(tag_failed(rep, "pcurvcond"));
  CHECK(!tag_failed(rep, "kappa2"));
  CHECK(!tag_failed(rep, "bijktraces"));

  // Generic blocks in the pattern fail the trace conditions.
  Rng rng(seed_from_env() + 11);
  const KappaBlocks kr = random_blocks(flat5s().frame, rng);
  CHECK(!k_membership(kr).all_passed());

  // Malformed blocks are rejected outright.
  const KappaBlocks& k3 = def3k();
  Tensor asym = k3.a;
  asym.set({1, 1}, Scalar::one());
  CHECK_THROWS_AS(
      make_kappa_blocks(k3.frame, asym, k3.b, k3.c, k3.d, k3.e, k3.a0, k3.b0, k3.c0, k3.d0, k3.e0),
      DomainError);
  Tensor offh = k3.c0;
  offh.set({0, 1}, Scalar::one());
  CHECK_THROWS_AS(
      make_kappa_blocks(k3.frame, k3.a, k3.b, k3.c, k3.d, k3.e, k3.a0, k3.b0, offh, k3.d0, k3.e0),
      DomainError);
}

TEST_CASE("gauge motions of curvature blocks") {
  const KappaBlocks& k = tor5k();
  const AdaptedFrame& fr = k.frame;
  const int dim = fr.dim();
  const Scalar half = Scalar::rational(1, 2);

  // The neutral parameters act as the identity.
  {
    const KappaBlocks& k3 = def3k();
    const KappaBlocks same =
        gauge_action(k3, Tensor(3, "d"), Scalar::zero(), Scalar::one(), latin_identity(3));
    CHECK((same.a - k3.a).is_zero());
    CHECK((same.b - k3.b).is_zero());
    CHECK((same.c - k3.c).is_zero());
    CHECK((same.d - k3.d).is_zero());
    CHECK((same.e - k3.e).is_zero());
    CHECK((same.a0 - k3.a0).is_zero());
    CHECK((same.b0 - k3.b0).is_zero());
    CHECK((same.c0 - k3.c0).is_zero());
    CHECK((same.d0 - k3.d0).is_zero());
    CHECK((same.e0 - k3.e0).is_zero());
  }

  // Unipotent motion with a polynomial parameter: all ten transformation
  // laws of the blocks, written against the lowered inputs.
  Tensor gamma(dim, "d");
  gamma.set({1}, Scalar::variable(2));
  gamma.set({2}, Scalar::one());
  const Scalar g0 = Scalar::variable(1);
  const KappaBlocks out =
      gauge_action(k, gamma, g0, Scalar::one(), latin_identity(dim));
  const std::vector<Scalar> gup = raise_param(fr, gamma);
  const Tensor blow = lower_slot(k.b, 2, fr.omega_lo);
  const Tensor dlow = lower_slot(k.d, 3, fr.omega_lo);
  const Tensor bl0 = lower_slot(k.b0, 1, fr.omega_lo);
  const Tensor d0low = lower_slot(k.d0, 2, fr.omega_lo);
  const Tensor obl0 = lower_slot(out.b0, 1, fr.omega_lo);

  // The torsion-level block is fixed.
  CHECK((out.b - k.b).is_zero());

  for (int i = 1; i < dim; ++i) {
    for (int j = 1; j < dim; ++j) {
      const Scalar skew_in = half * (bl0.at({i, j}) - bl0.at({j, i}));
      const Scalar skew_out = half * (obl0.at({i, j}) - obl0.at({j, i}));
      {
        // Skew part of the lowered mixed block.
        Scalar rhs;
        for (int p = 1; p < dim; ++p)
          rhs = rhs - half * gup[static_cast<size_t>(p)] * blow.at({i, j, p});
        CHECK(skew_out - skew_in == rhs);
      }
      {
        // Lowered mixed block itself.
        Scalar rhs;
        for (int p = 1; p < dim; ++p) rhs += gup[static_cast<size_t>(p)] * blow.at({p, i, j});
        CHECK(obl0.at({i, j}) - bl0.at({i, j}) == rhs);
      }
      for (int kk = 1; kk < dim; ++kk) {
        {
          // One-slot block.
          Scalar rhs = sc(-2) * gamma.at({kk}) * skew_in + g0 * blow.at({i, j, kk});
          for (int p = 1; p < dim; ++p)
            rhs += gup[static_cast<size_t>(p)] *
                   (gamma.at({kk}) * blow.at({i, j, p}) + dlow.at({i, j, kk, p}));
          CHECK(out.c.at({i, j, kk}) - k.c.at({i, j, kk}) == rhs);
        }
        {
          // Reeb endomorphism block.
          Scalar rhs = k.b0.at({i, kk}) * gamma.at({j}) + gup[static_cast<size_t>(kk)] * bl0.at({i, j});
          for (int p = 1; p < dim; ++p)
            rhs += gup[static_cast<size_t>(p)] *
                   (k.d.at({p, i, j, kk}) + gamma.at({j}) * k.b.at({p, i, kk}) +
                    gup[static_cast<size_t>(kk)] * blow.at({p, i, j}));
          CHECK(out.d0.at({i, j, kk}) - k.d0.at({i, j, kk}) == rhs);
        }
        for (int ll = 1; ll < dim; ++ll) {
          // Endomorphism block.
          const Scalar rhs =
              k.b.at({i, j, ll}) * gamma.at({kk}) + gup[static_cast<size_t>(ll)] * blow.at({i, j, kk});
          CHECK(out.d.at({i, j, kk, ll}) - k.d.at({i, j, kk, ll}) == rhs);
        }
      }
      {
        // Top corner block.
        Scalar rhs = sc(-4) * g0 * skew_in;
        for (int p = 1; p < dim; ++p) {
          rhs += gup[static_cast<size_t>(p)] *
                 (sc(-2) * g0 * blow.at({i, j, p}) + sc(2) * k.c.at({i, j, p}));
          for (int qq = 1; qq < dim; ++qq)
            rhs = rhs -
                  gup[static_cast<size_t>(p)] * gup[static_cast<size_t>(qq)] * dlow.at({i, j, p, qq});
        }
        CHECK(out.e.at({i, j}) - k.e.at({i, j}) == rhs);
      }
      {
        // Reeb one-slot block.
        Scalar rhs = k.a0.at({i}) * gamma.at({j}) + g0 * bl0.at({i, j});
        for (int p = 1; p < dim; ++p) {
          Scalar inner = gamma.at({j}) * bl0.at({i, p}) + d0low.at({i, j, p}) + k.c.at({p, i, j});
          for (int qq = 1; qq < dim; ++qq)
            inner = inner - gamma.at({j}) * gamma.at({qq}) * k.b.at({p, i, qq}) +
                    gup[static_cast<size_t>(qq)] * dlow.at({p, i, j, qq});
          rhs += gup[static_cast<size_t>(p)] * inner;
        }
        CHECK(out.c0.at({i, j}) - k.c0.at({i, j}) == rhs);
      }
    }
    {
      // Reeb corner block.
      Scalar rhs;
      for (int p = 1; p < dim; ++p) {
        rhs += gup[static_cast<size_t>(p)] * (sc(2) * bl0.at({i, p}) - bl0.at({p, i}));
        for (int qq = 1; qq < dim; ++qq)
          rhs += gup[static_cast<size_t>(qq)] * gup[static_cast<size_t>(p)] * blow.at({qq, i, p});
      }
      CHECK(out.a0.at({i}) - k.a0.at({i}) == rhs);
    }
    {
      // Reeb top corner block.
      Scalar rhs = sc(2) * g0 * k.a0.at({i});
      for (int p = 1; p < dim; ++p) {
        rhs += gup[static_cast<size_t>(p)] *
               (sc(2) * k.c0.at({i, p}) - sc(2) * g0 * bl0.at({i, p}) + k.e.at({p, i}));
        for (int qq = 1; qq < dim; ++qq) {
          Scalar inner = d0low.at({i, p, qq}) + sc(2) * g0 * blow.at({p, i, qq}) -
                         sc(2) * k.c.at({p, i, qq});
          for (int rr = 1; rr < dim; ++rr)
            inner += gup[static_cast<size_t>(rr)] * dlow.at({p, i, qq, rr});
          rhs = rhs - gup[static_cast<size_t>(p)] * gup[static_cast<size_t>(qq)] * inner;
        }
      }
      CHECK(out.e0.at({i}) - k.e0.at({i}) == rhs);
    }
  }

  // Reductive motion by a constant scale: every block picks up its
  // homogeneity power.
  {
    const KappaBlocks s2 =
        gauge_action(k, Tensor(dim, "d"), Scalar::zero(), sc(2), latin_identity(dim));
    CHECK((s2.a - k.a.scaled(sc(4))).is_zero());
    CHECK((s2.b - k.b.scaled(sc(2))).is_zero());
    CHECK((s2.c - k.c.scaled(sc(8))).is_zero());
    CHECK((s2.d - k.d.scaled(sc(4))).is_zero());
    CHECK((s2.e - k.e.scaled(sc(16))).is_zero());
    CHECK((s2.a0 - k.a0.scaled(sc(8))).is_zero());
    CHECK((s2.b0 - k.b0.scaled(sc(4))).is_zero());
    CHECK((s2.c0 - k.c0.scaled(sc(16))).is_zero());
    CHECK((s2.d0 - k.d0.scaled(sc(8))).is_zero());
    CHECK((s2.e0 - k.e0.scaled(sc(32))).is_zero());
  }

  // Reductive motion by a nontrivial symplectic hyperplane block: fully
  // lowered blocks transform by one factor per slot, and membership is
  // preserved.
  {
    Tensor F = latin_identity(dim);
    F.set({1, 3}, Scalar::one());
    F.set({2, 4}, sc(2));
    const KappaBlocks tf = gauge_action(k, Tensor(dim, "d"), Scalar::zero(), Scalar::one(), F);
    CHECK(k_membership(tf).all_passed());
    const Tensor tblow = lower_slot(tf.b, 2, fr.omega_lo);
    for (int i = 1; i < dim; ++i) {
      for (int j = 1; j < dim; ++j) {
        for (int qq = 1; qq < dim; ++qq) {
          Scalar exb;
          Scalar exc;
          for (int u = 1; u < dim; ++u) {
            if (F.at({i, u}).is_zero()) continue;
            for (int v = 1; v < dim; ++v) {
              if (F.at({j, v}).is_zero()) continue;
              for (int w = 1; w < dim; ++w) {
                const Scalar co = F.at({i, u}) * F.at({j, v}) * F.at({qq, w});
                exb += co * blow.at({u, v, w});
                exc += co * k.c.at({u, v, w});
              }
            }
          }
          CHECK(tblow.at({i, j, qq}) == exb);
          CHECK(tf.c.at({i, j, qq}) == exc);
        }
      }
    }
  }

  // Parameter validation.
  Tensor badgamma(dim, "d");
  badgamma.set({0}, Scalar::one());
  CHECK_THROWS_AS(gauge_action(k, badgamma, Scalar::zero(), Scalar::one(), latin_identity(dim)),
                  DomainError);
  CHECK_THROWS_AS(
      gauge_action(k, Tensor(dim, "d"), Scalar::zero(), Scalar::zero(), latin_identity(dim)),
      DomainError);
  CHECK_THROWS_AS(gauge_action(k, Tensor(dim, "d"), Scalar::zero(), Scalar::one(),
                               latin_identity(dim).scaled(sc(2))),
                  DomainError);
  CHECK_THROWS_AS(gauge_action(k, Tensor(dim, "d"), Scalar::zero(), Scalar::one(), kronecker(dim)),
                  DomainError);
}

TEST_CASE("invariant second-order operator on densities") {
  const ContactProjectiveStructure& S3 = flat3s();
  {
    const Tensor L =
        contact_hessian(S3, Density{Scalar::variable(1) * Scalar::variable(2), 1});
    CHECK(L.at({1, 1}).is_zero());
    CHECK(L.at({1, 2}) == Scalar::one());
    CHECK(L.at({2, 1}) == Scalar::one());
    CHECK(L.at({2, 2}).is_zero());
    CHECK(contact_hessian(S3, Density{Scalar::one(), 1}).is_zero());
    CHECK_THROWS_AS(contact_hessian(S3, Density{Scalar::one(), 2}), DomainError);
  }

  const Scalar h = Scalar::variable(0) + Scalar::variable(1) * Scalar::variable(2);
  for (const ContactProjectiveStructure* Sp : {&def5s(), &tor5s()}) {
    const ContactProjectiveStructure& S = *Sp;
    const AdaptedFrame& fr = S.frame;
    const int dim = fr.dim();
    // The operator is trace-free against the hyperplane form.
    const Tensor L = contact_hessian(S, Density{h, 1});
    Scalar tr;
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j) tr += fr.omega_up.at({i, j}) * L.at({i, j});
    CHECK(tr.is_zero());
    // The omega-trace of the second covariant derivative collapses to the
    // Reeb derivative with coefficient 1-n.
    Tensor dh(dim, "d");
    for (int a = 0; a < dim; ++a) dh.set({a}, fr.apply(a, h));
    const Tensor cd = covariant_derivative(dh, S.canonical_rep);
    Scalar lhs;
    for (int p = 1; p < dim; ++p)
      for (int q = 1; q < dim; ++q) lhs += fr.omega_up.at({p, q}) * cd.at({p, q});
    CHECK(lhs == sc(1 - fr.n()) * dh.at({0}));
  }

  // Scale invariance across contact-form rescalings.
  {
    const CheckReport rep =
        contact_hessian_invariance(def5s(), Density{h, 1}, Scalar::one() + Scalar::variable(1));
    CHECK(rep.all_passed());
    CHECK(count_status(rep, "invop1", CheckStatus::Pass) == 1);
  }
  CHECK(contact_hessian_invariance(tor5s(), Density{h, 1}, sc(2)).all_passed());
  CHECK(contact_hessian_invariance(
            def3s(), Density{h, 1},
            Scalar::one() + Scalar::variable(1) * Scalar::variable(2))
            .all_passed());
  CHECK_THROWS_AS(contact_hessian_invariance(def3s(), Density{h, 1}, Scalar::zero()), DomainError);
}
