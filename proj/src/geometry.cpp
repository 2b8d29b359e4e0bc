#include "cps/geometry.hpp"

#include <algorithm>
#include <map>

#include "cps/linsolve.hpp"

namespace cps {

//---------------------------------------------------------------------------
// Exterior algebra on coordinate differentials (internal)
//---------------------------------------------------------------------------

namespace {

// Keys are strictly increasing coordinate-index tuples.
using FormComponents = std::map<std::vector<int>, Scalar>;

void form_add(FormComponents& acc, std::vector<int> key, const Scalar& v) {
  if (v.is_zero()) return;
  auto [it, fresh] = acc.emplace(std::move(key), v);
  if (!fresh) {
    it->second = it->second + v;
    if (it->second.is_zero()) acc.erase(it);
  }
}

FormComponents wedge(const FormComponents& a, const FormComponents& b) {
  FormComponents r;
  for (const auto& [ka, va] : a) {
    for (const auto& [kb, vb] : b) {
      std::vector<int> key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      // Sign of the sort; repeated index kills the term.
      int sign = 1;
      bool dup = false;
      for (std::size_t i = 0; i < key.size() && !dup; ++i)
        for (std::size_t j = i + 1; j < key.size(); ++j) {
          if (key[i] == key[j]) {
            dup = true;
            break;
          }
          if (key[i] > key[j]) sign = -sign;
        }
      if (dup) continue;
      std::sort(key.begin(), key.end());
      form_add(r, std::move(key), sign > 0 ? va * vb : -(va * vb));
    }
  }
  return r;
}

FormComponents one_form(const std::vector<Scalar>& comp) {
  FormComponents r;
  for (std::size_t mu = 0; mu < comp.size(); ++mu)
    form_add(r, {static_cast<int>(mu)}, comp[mu]);
  return r;
}

FormComponents two_form_from_matrix(const Tensor& d) {
  FormComponents r;
  for (int mu = 0; mu < d.dim(); ++mu)
    for (int nu = mu + 1; nu < d.dim(); ++nu) form_add(r, {mu, nu}, d.at({mu, nu}));
  return r;
}

int matrix_rank(std::vector<std::vector<Scalar>> rows) {
  int rank = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  std::size_t rtop = 0;
  for (std::size_t col = 0; col < ncols && rtop < rows.size(); ++col) {
    std::size_t piv = rows.size();
    for (std::size_t r = rtop; r < rows.size(); ++r)
      if (!rows[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rtop]);
    for (std::size_t r = rtop + 1; r < rows.size(); ++r) {
      if (rows[r][col].is_zero()) continue;
      Scalar f = rows[r][col] / rows[rtop][col];
      for (std::size_t c = col; c < ncols; ++c)
        rows[r][c] = rows[r][c] - f * rows[rtop][c];
    }
    ++rtop;
    ++rank;
  }
  return rank;
}

}  // namespace

//---------------------------------------------------------------------------
// Contact forms
//---------------------------------------------------------------------------

Tensor dtheta_coordinates(const ContactForm& theta) {
  const int dim = theta.dim();
  Tensor d(dim, "dd");
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = 0; nu < dim; ++nu)
      d.set({mu, nu}, theta.comp[nu].derivative(mu) - theta.comp[mu].derivative(nu));
  return d;
}

Scalar contact_volume_coefficient(const ContactForm& theta) {
  theta.chart.validate();
  if (static_cast<int>(theta.comp.size()) != theta.dim())
    throw DomainError("contact form must have one component per coordinate");
  FormComponents acc = one_form(theta.comp);
  FormComponents dth = two_form_from_matrix(dtheta_coordinates(theta));
  for (int k = 1; k < theta.n(); ++k) acc = wedge(acc, dth);
  std::vector<int> top;
  for (int mu = 0; mu < theta.dim(); ++mu) top.push_back(mu);
  auto it = acc.find(top);
  return it == acc.end() ? Scalar::zero() : it->second;
}

void validate_contact(const ContactForm& theta) {
  if (contact_volume_coefficient(theta).is_zero())
    throw DomainError("one-form is not a contact form: theta ^ (dtheta)^(n-1) = 0");
}

std::vector<Scalar> reeb(const ContactForm& theta) {
  validate_contact(theta);
  const int dim = theta.dim();
  Tensor d = dtheta_coordinates(theta);
  LinearSystem sys;
  sys.ncols = dim;
  {
    std::map<int, Scalar> row;
    for (int mu = 0; mu < dim; ++mu) row[mu] = theta.comp[mu];
    sys.add_row(std::move(row), Scalar::one());
  }
  for (int nu = 0; nu < dim; ++nu) {
    std::map<int, Scalar> row;
    for (int mu = 0; mu < dim; ++mu) row[mu] = d.at({mu, nu});
    sys.add_row(std::move(row), Scalar::zero());
  }
  LinearSolution sol = solve(sys);
  if (!sol.consistent || !sol.free_cols.empty())
    throw DomainError("Reeb field is not uniquely determined; form is degenerate");
  return sol.particular;
}

//---------------------------------------------------------------------------
// Adapted frames
//---------------------------------------------------------------------------

Scalar AdaptedFrame::apply(int alpha, const Scalar& f) const {
  Scalar acc = Scalar::zero();
  for (int mu = 0; mu < dim(); ++mu) {
    if (frame[alpha][mu].is_zero()) continue;
    acc = acc + frame[alpha][mu] * f.derivative(mu);
  }
  return acc;
}

Tensor structure_functions(const std::vector<std::vector<Scalar>>& frame,
                           const std::vector<std::vector<Scalar>>& coframe,
                           const ChartSpec& chart) {
  const int dim = chart.dim();
  Tensor c(dim, "ddu");
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      // [E_a, E_b]^mu in coordinates.
      std::vector<Scalar> comm(dim, Scalar::zero());
      for (int mu = 0; mu < dim; ++mu) {
        Scalar acc = Scalar::zero();
        for (int nu = 0; nu < dim; ++nu) {
          acc = acc + frame[a][nu] * frame[b][mu].derivative(nu) -
                frame[b][nu] * frame[a][mu].derivative(nu);
        }
        comm[mu] = acc;
      }
      for (int g = 0; g < dim; ++g) {
        Scalar acc = Scalar::zero();
        for (int mu = 0; mu < dim; ++mu) acc = acc + coframe[g][mu] * comm[mu];
        c.set({a, b, g}, acc);
        c.set({b, a, g}, -acc);
      }
    }
  }
  return c;
}

void AdaptedFrame::validate() const {
  const int d = dim();
  validate_contact(theta);
  if (static_cast<int>(frame.size()) != d || static_cast<int>(coframe.size()) != d)
    throw DomainError("adapted frame must have 2n-1 frame and coframe rows");
  for (int a = 0; a < d; ++a)
    if (static_cast<int>(frame[a].size()) != d || static_cast<int>(coframe[a].size()) != d)
      throw DomainError("adapted frame rows must have 2n-1 components");

  // theta^0 is theta itself.
  for (int mu = 0; mu < d; ++mu)
    if (coframe[0][mu] != theta.comp[mu])
      throw DomainError("adapted coframe must start with theta");

  // Exact duality theta^a(E_b) = delta.
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Scalar acc = Scalar::zero();
      for (int mu = 0; mu < d; ++mu) acc = acc + coframe[a][mu] * frame[b][mu];
      if (acc != (a == b ? Scalar::one() : Scalar::zero()))
        throw DomainError("frame/coframe duality fails");
    }

  // Reeb properties of E_0.
  Tensor dth = dtheta_coordinates(theta);
  for (int nu = 0; nu < d; ++nu) {
    Scalar acc = Scalar::zero();
    for (int mu = 0; mu < d; ++mu) acc = acc + frame[0][mu] * dth.at({mu, nu});
    if (!acc.is_zero()) throw DomainError("E_0 does not annihilate dtheta");
  }

  // omega_lo = dtheta on the frame, with vanishing Reeb row/column.
  if (omega_lo.dim() != d || omega_lo.variance() != "dd")
    throw DomainError("omega has wrong shape");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Scalar acc = Scalar::zero();
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
          acc = acc + dth.at({mu, nu}) * frame[a][mu] * frame[b][nu];
      if (omega_lo.at({a, b}) != acc) throw DomainError("omega does not match dtheta");
      if ((a == 0 || b == 0) && !acc.is_zero())
        throw DomainError("omega must vanish on the Reeb direction");
    }

  // omega_up inverts the hyperplane block with the sign convention
  // omega^{kl} omega_{lj} = -delta_j^k, and vanishes on index 0.
  if (omega_up.dim() != d || omega_up.variance() != "uu")
    throw DomainError("omega inverse has wrong shape");
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) {
      if (k == 0 || j == 0) {
        if (!omega_up.at({k, j}).is_zero())
          throw DomainError("omega inverse must vanish on the Reeb direction");
        continue;
      }
      Scalar acc = Scalar::zero();
      for (int l = 1; l < d; ++l) acc = acc + omega_up.at({k, l}) * omega_lo.at({l, j});
      if (acc != (k == j ? -Scalar::one() : Scalar::zero()))
        throw DomainError("omega inverse convention fails");
    }

  // Structure functions reproduce the commutators exactly.
  if (c.dim() != d || c.variance() != "ddu") throw DomainError("c has wrong shape");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int mu = 0; mu < d; ++mu) {
        Scalar comm = Scalar::zero();
        for (int nu = 0; nu < d; ++nu)
          comm = comm + frame[a][nu] * frame[b][mu].derivative(nu) -
                 frame[b][nu] * frame[a][mu].derivative(nu);
        Scalar expand = Scalar::zero();
        for (int g = 0; g < d; ++g) expand = expand + c.at({a, b, g}) * frame[g][mu];
        if (comm != expand) throw DomainError("structure functions fail to expand commutators");
      }
}

AdaptedFrame assemble_adapted_frame(const ContactForm& theta,
                                    std::vector<std::vector<Scalar>> frame_rows) {
  const int d = theta.dim();
  AdaptedFrame out;
  out.theta = theta;
  out.frame = std::move(frame_rows);
  if (static_cast<int>(out.frame.size()) != d)
    throw DomainError("adapted frame needs 2n-1 fields");

  // Coframe rows solve  coframe . frame^T = identity.
  std::vector<std::vector<Scalar>> mt(d, std::vector<Scalar>(d, Scalar::zero()));
  for (int a = 0; a < d; ++a)
    for (int mu = 0; mu < d; ++mu) mt[mu][a] = out.frame[a][mu];
  std::vector<std::vector<Scalar>> inv;
  try {
    inv = invert_matrix(mt);
  } catch (const DomainError&) {
    throw DomainError("frame fields are linearly dependent");
  }
  out.coframe = inv;

  Tensor dth = dtheta_coordinates(theta);
  out.omega_lo = Tensor(d, "dd");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Scalar acc = Scalar::zero();
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
          acc = acc + dth.at({mu, nu}) * out.frame[a][mu] * out.frame[b][nu];
      out.omega_lo.set({a, b}, acc);
    }

  // Invert the hyperplane block with omega^{kl} omega_{lj} = -delta_j^k.
  std::vector<std::vector<Scalar>> block(d - 1, std::vector<Scalar>(d - 1, Scalar::zero()));
  for (int k = 1; k < d; ++k)
    for (int l = 1; l < d; ++l) block[k - 1][l - 1] = out.omega_lo.at({k, l});
  std::vector<std::vector<Scalar>> binv;
  try {
    binv = invert_matrix(block);
  } catch (const DomainError&) {
    throw DomainError("dtheta is degenerate on the contact hyperplane");
  }
  out.omega_up = Tensor(d, "uu");
  for (int k = 1; k < d; ++k)
    for (int l = 1; l < d; ++l) out.omega_up.set({k, l}, -binv[k - 1][l - 1]);

  out.c = structure_functions(out.frame, out.coframe, theta.chart);
  out.validate();
  return out;
}

AdaptedFrame make_adapted_frame(const ContactForm& theta) {
  const int d = theta.dim();
  std::vector<Scalar> T = reeb(theta);

  std::vector<std::vector<Scalar>> rows;
  rows.push_back(T);
  for (int mu = 0; mu < d && static_cast<int>(rows.size()) < d; ++mu) {
    // w_mu = d/dx^mu - theta_mu T annihilates theta.
    std::vector<Scalar> w(d, Scalar::zero());
    w[mu] = Scalar::one();
    for (int nu = 0; nu < d; ++nu) w[nu] = w[nu] - theta.comp[mu] * T[nu];
    std::vector<std::vector<Scalar>> trial = rows;
    trial.push_back(w);
    if (matrix_rank(trial) == static_cast<int>(trial.size())) rows.push_back(w);
  }
  if (static_cast<int>(rows.size()) != d)
    throw DomainError("failed to complete the contact hyperplane frame");
  return assemble_adapted_frame(theta, std::move(rows));
}

//---------------------------------------------------------------------------
// Standard flat patch
//---------------------------------------------------------------------------

Tensor standard_omega(int n) {
  if (n < 2) throw DomainError("flat model requires n >= 2");
  const int d = 2 * n - 1;
  Tensor w(d, "dd");
  for (int i = 1; i <= n - 1; ++i) {
    w.set({i, n - 1 + i}, Scalar::one());
    w.set({n - 1 + i, i}, -Scalar::one());
  }
  return w;
}

FlatModel flat_model(int n) {
  if (n < 2) throw DomainError("flat model requires n >= 2");
  ChartSpec chart = ChartSpec::make(n);
  const int d = chart.dim();
  Tensor w = standard_omega(n);

  ContactForm theta;
  theta.chart = chart;
  theta.comp.assign(d, Scalar::zero());
  theta.comp[0] = Scalar::rational(1, 2);
  for (int nu = 1; nu < d; ++nu) {
    Scalar acc = Scalar::zero();
    for (int p = 1; p < d; ++p) acc = acc + w.at({p, nu}) * Scalar::variable(p);
    theta.comp[nu] = Scalar::rational(1, 2) * acc;
  }

  std::vector<std::vector<Scalar>> rows(d, std::vector<Scalar>(d, Scalar::zero()));
  rows[0][0] = Scalar::integer(2);
  for (int i = 1; i < d; ++i) {
    rows[i][i] = Scalar::one();
    Scalar acc = Scalar::zero();
    for (int p = 1; p < d; ++p) acc = acc + w.at({i, p}) * Scalar::variable(p);
    rows[i][0] = acc;
  }

  FlatModel fm;
  fm.theta = theta;
  fm.frame = assemble_adapted_frame(theta, std::move(rows));
  fm.connection = FrameConnection{fm.frame, Tensor(d, "ddu")};
  return fm;
}

//---------------------------------------------------------------------------
// Rescaling
//---------------------------------------------------------------------------

std::vector<Scalar> dlog(const AdaptedFrame& frame, const Scalar& f) {
  if (f.is_zero()) throw DomainError("rescaling function must be nonzero");
  std::vector<Scalar> g;
  for (int a = 0; a < frame.dim(); ++a) g.push_back(frame.apply(a, f) / f);
  return g;
}

AdaptedFrame rescale(const AdaptedFrame& frame, const Scalar& f) {
  if (f.is_zero()) throw DomainError("rescaling function must be nonzero");
  const int d = frame.dim();
  std::vector<Scalar> g = dlog(frame, f);
  // gamma^p = omega^{pk} gamma_k.
  std::vector<Scalar> gup(d, Scalar::zero());
  for (int p = 1; p < d; ++p) {
    Scalar acc = Scalar::zero();
    for (int k = 1; k < d; ++k) acc = acc + frame.omega_up.at({p, k}) * g[k];
    gup[p] = acc;
  }

  ContactForm nt;
  nt.chart = frame.theta.chart;
  Scalar f2 = f * f;
  for (const Scalar& cmp : frame.theta.comp) nt.comp.push_back(f2 * cmp);

  std::vector<std::vector<Scalar>> rows(d, std::vector<Scalar>(d, Scalar::zero()));
  // f^2 T~ = T + 2 gamma^p E_p.
  for (int mu = 0; mu < d; ++mu) {
    Scalar acc = frame.frame[0][mu];
    for (int p = 1; p < d; ++p) acc = acc + Scalar::integer(2) * gup[p] * frame.frame[p][mu];
    rows[0][mu] = acc / f2;
  }
  for (int i = 1; i < d; ++i) rows[i] = frame.frame[i];
  return assemble_adapted_frame(nt, std::move(rows));
}

//---------------------------------------------------------------------------
// Connections
//---------------------------------------------------------------------------

Tensor torsion(const FrameConnection& conn) {
  const int d = conn.frame.dim();
  Tensor t(d, "ddu");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int g = 0; g < d; ++g)
        t.set({a, b, g}, conn.gamma.at({a, b, g}) - conn.gamma.at({b, a, g}) -
                             conn.frame.c.at({a, b, g}));
  return t;
}

Tensor covariant_derivative(const Tensor& t, const FrameConnection& conn) {
  const int d = conn.frame.dim();
  if (t.dim() != d) throw DomainError("covariant derivative: dimension mismatch");
  Tensor r(d, "d" + t.variance());
  std::vector<int> ir(r.rank(), 0);
  do {
    const int alpha = ir[0];
    std::vector<int> it(ir.begin() + 1, ir.end());
    Scalar acc = conn.frame.apply(alpha, t.at(it));
    for (int s = 0; s < t.rank(); ++s) {
      const int beta = it[s];
      std::vector<int> is = it;
      if (t.variance()[s] == 'd') {
        for (int sg = 0; sg < d; ++sg) {
          const Scalar& G = conn.gamma.at({alpha, beta, sg});
          if (G.is_zero()) continue;
          is[s] = sg;
          acc = acc - G * t.at(is);
        }
      } else {
        for (int sg = 0; sg < d; ++sg) {
          const Scalar& G = conn.gamma.at({alpha, sg, beta});
          if (G.is_zero()) continue;
          is[s] = sg;
          acc = acc + G * t.at(is);
        }
      }
    }
    r.set(ir, acc);
  } while (r.next_index(ir));
  return r;
}

}  // namespace cps
