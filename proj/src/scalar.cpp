#include "cps/scalar.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <unordered_map>

namespace cps {

//---------------------------------------------------------------------------
// Monomials
//---------------------------------------------------------------------------

Mono mono_from_exps(const int* exps, int nvars) {
  if (nvars > kMaxVars) throw DomainError("monomial: too many variables");
  Mono m = 0;
  int tot = 0;
  for (int v = 0; v < nvars; ++v) {
    int e = exps[v];
    if (e < 0 || e > 255) throw InternalError("monomial exponent out of range");
    tot += e;
    m |= static_cast<Mono>(e) << (8 * (6 - v));
  }
  if (tot > 255) throw InternalError("monomial total degree out of range");
  m |= static_cast<Mono>(tot) << 56;
  return m;
}

Mono mono_var(int v, int power) {
  if (v < 0 || v >= kMaxVars) throw DomainError("variable index out of range");
  if (power < 0 || power > 255) throw InternalError("monomial exponent out of range");
  return (static_cast<Mono>(power) << (8 * (6 - v))) |
         (static_cast<Mono>(power) << 56);
}

Mono mono_mul(Mono a, Mono b) {
  int ea[kMaxVars], tot = 0;
  for (int v = 0; v < kMaxVars; ++v) {
    ea[v] = mono_exp(a, v) + mono_exp(b, v);
    if (ea[v] > 255) throw InternalError("monomial exponent overflow in product");
    tot += ea[v];
  }
  if (tot > 255) throw InternalError("monomial total degree overflow in product");
  return mono_from_exps(ea, kMaxVars);
}

bool mono_divides(Mono a, Mono b) {
  for (int v = 0; v < kMaxVars; ++v)
    if (mono_exp(a, v) > mono_exp(b, v)) return false;
  return true;
}

Mono mono_div(Mono b, Mono a) {
  int e[kMaxVars];
  for (int v = 0; v < kMaxVars; ++v) {
    e[v] = mono_exp(b, v) - mono_exp(a, v);
    if (e[v] < 0) throw InternalError("monomial division with remainder");
  }
  return mono_from_exps(e, kMaxVars);
}

Mono mono_gcd(Mono a, Mono b) {
  int e[kMaxVars];
  for (int v = 0; v < kMaxVars; ++v) e[v] = std::min(mono_exp(a, v), mono_exp(b, v));
  return mono_from_exps(e, kMaxVars);
}

//---------------------------------------------------------------------------
// Polynomials: construction and basic queries
//---------------------------------------------------------------------------

Poly Poly::constant(const mpq_class& q) {
  Poly p;
  if (q != 0) p.t.push_back(Term{mono_one(), q});
  return p;
}

Poly Poly::from_int(long v) { return constant(mpq_class(v)); }

Poly Poly::variable(int v) {
  Poly p;
  p.t.push_back(Term{mono_var(v), mpq_class(1)});
  return p;
}

mpq_class Poly::constant_value() const {
  if (t.empty()) return mpq_class(0);
  if (t.size() != 1 || t[0].m != 0) throw InternalError("constant_value of non-constant");
  return t[0].c;
}

int Poly::degree_in(int v) const {
  int d = 0;
  for (const Term& x : t) d = std::max(d, mono_exp(x.m, v));
  return d;
}

Mono Poly::leading_mono() const {
  if (t.empty()) throw InternalError("leading_mono of zero polynomial");
  return t[0].m;
}

mpq_class Poly::leading_coeff() const {
  if (t.empty()) throw InternalError("leading_coeff of zero polynomial");
  return t[0].c;
}

//---------------------------------------------------------------------------
// Polynomial arithmetic
//---------------------------------------------------------------------------

Poly Poly::operator-() const {
  Poly r = *this;
  for (Term& x : r.t) x.c = -x.c;
  return r;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.t.reserve(a.t.size() + b.t.size());
  std::size_t i = 0, j = 0;
  while (i < a.t.size() && j < b.t.size()) {
    if (a.t[i].m > b.t[j].m) {
      r.t.push_back(a.t[i++]);
    } else if (a.t[i].m < b.t[j].m) {
      r.t.push_back(b.t[j++]);
    } else {
      mpq_class c = a.t[i].c + b.t[j].c;
      if (c != 0) r.t.push_back(Term{a.t[i].m, c});
      ++i;
      ++j;
    }
  }
  while (i < a.t.size()) r.t.push_back(a.t[i++]);
  while (j < b.t.size()) r.t.push_back(b.t[j++]);
  return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  // Single-term fast path keeps the common scale-by-monomial case cheap.
  if (a.t.size() == 1 || b.t.size() == 1) {
    const Poly& big = a.t.size() == 1 ? b : a;
    const Term& s = a.t.size() == 1 ? a.t[0] : b.t[0];
    Poly r;
    r.t.reserve(big.t.size());
    for (const Term& x : big.t) r.t.push_back(Term{mono_mul(x.m, s.m), x.c * s.c});
    if (s.m != 0) {
      std::sort(r.t.begin(), r.t.end(),
                [](const Term& l, const Term& rgt) { return l.m > rgt.m; });
    }
    return r;
  }
  std::unordered_map<Mono, mpq_class> acc;
  acc.reserve(a.t.size() * b.t.size());
  for (const Term& x : a.t)
    for (const Term& y : b.t) acc[mono_mul(x.m, y.m)] += x.c * y.c;
  Poly r;
  r.t.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.t.push_back(Term{m, c});
  std::sort(r.t.begin(), r.t.end(),
            [](const Term& l, const Term& rgt) { return l.m > rgt.m; });
  return r;
}

Poly Poly::scaled(const mpq_class& q) const {
  if (q == 0) return Poly();
  Poly r = *this;
  for (Term& x : r.t) x.c *= q;
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly r = Poly::from_int(1);
  Poly base = *this;
  while (k) {
    if (k & 1u) r = r * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (t.size() != o.t.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i].m != o.t[i].m || t[i].c != o.t[i].c) return false;
  return true;
}

Poly Poly::derivative(int v) const {
  if (v < 0 || v >= kMaxVars) throw DomainError("derivative: variable index out of range");
  Poly r;
  for (const Term& x : t) {
    int e = mono_exp(x.m, v);
    if (e == 0) continue;
    r.t.push_back(Term{mono_div(x.m, mono_var(v)), x.c * e});
  }
  // Dividing every monomial by the same variable preserves graded-lex order.
  return r;
}

mpq_class Poly::eval(const std::vector<mpq_class>& point) const {
  mpq_class acc(0);
  for (const Term& x : t) {
    mpq_class term = x.c;
    for (int v = 0; v < kMaxVars; ++v) {
      int e = mono_exp(x.m, v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) >= point.size())
        throw DomainError("eval: point has too few coordinates");
      mpq_class p = point[v];
      for (int k = 0; k < e; ++k) term *= p;
    }
    acc += term;
  }
  return acc;
}

Poly Poly::divexact(const Poly& d) const {
  if (d.is_zero()) throw MalformedScalarError("divexact: division by zero polynomial");
  if (is_zero()) return Poly();
  Poly r = *this;
  Poly q;
  const Mono dm = d.leading_mono();
  const mpq_class dc = d.leading_coeff();
  while (!r.is_zero()) {
    const Mono rm = r.leading_mono();
    if (!mono_divides(dm, rm))
      throw InternalError("divexact: divisor does not divide exactly");
    Term step{mono_div(rm, dm), r.leading_coeff() / dc};
    q.t.push_back(step);  // leading monomials strictly decrease, so q stays sorted
    Poly sub;
    sub.t.reserve(d.t.size());
    for (const Term& x : d.t) sub.t.push_back(Term{mono_mul(x.m, step.m), x.c * step.c});
    if (step.m != 0)
      std::sort(sub.t.begin(), sub.t.end(),
                [](const Term& l, const Term& rgt) { return l.m > rgt.m; });
    r = r - sub;
  }
  return q;
}

//---------------------------------------------------------------------------
// GCD: primitive pseudo-remainder sequence
//---------------------------------------------------------------------------

namespace {

// Integer content and primitive part: p = content * primitive, where primitive
// has integer coefficients with gcd 1 and positive graded-lex leading
// coefficient.  content may be any nonzero rational.
mpq_class rational_content(const Poly& p) {
  if (p.is_zero()) return mpq_class(0);
  mpz_class num_gcd(0), den_lcm(1);
  for (const Term& x : p.t) {
    mpz_class n = x.c.get_num();
    mpz_class d = x.c.get_den();
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
  }
  mpq_class c(num_gcd, den_lcm);
  c.canonicalize();
  if (p.leading_coeff() < 0) c = -c;
  return c;
}

Poly make_primitive(const Poly& p) {
  if (p.is_zero()) return p;
  mpq_class c = rational_content(p);
  Poly r = p;
  for (Term& x : r.t) x.c /= c;
  return r;
}

std::optional<Poly> try_divexact(const Poly& a, const Poly& b) {
  try {
    return a.divexact(b);
  } catch (const InternalError&) {
    return std::nullopt;
  }
}

// Coefficients of p viewed as a univariate polynomial in x_v over Poly.
// Returned densely, index = power of x_v, size = deg_v(p)+1.
std::vector<Poly> coeffs_in(const Poly& p, int v) {
  int d = p.degree_in(v);
  std::vector<Poly> cs(static_cast<std::size_t>(d) + 1);
  for (const Term& x : p.t) {
    int e = mono_exp(x.m, v);
    cs[e].t.push_back(Term{mono_div(x.m, mono_var(v, e)), x.c});
  }
  for (Poly& c : cs)
    std::sort(c.t.begin(), c.t.end(),
              [](const Term& l, const Term& r) { return l.m > r.m; });
  return cs;
}

Poly from_coeffs_in(const std::vector<Poly>& cs, int v) {
  Poly r;
  for (std::size_t e = 0; e < cs.size(); ++e) {
    Poly shifted = cs[e];
    if (e > 0) {
      Mono xv = mono_var(v, static_cast<int>(e));
      for (Term& x : shifted.t) x.m = mono_mul(x.m, xv);
    }
    r = r + shifted;
  }
  return r;
}

Poly leading_coeff_in(const Poly& p, int v) {
  int d = p.degree_in(v);
  Poly lc;
  for (const Term& x : p.t)
    if (mono_exp(x.m, v) == d)
      lc.t.push_back(Term{mono_div(x.m, mono_var(v, d)), x.c});
  std::sort(lc.t.begin(), lc.t.end(),
            [](const Term& l, const Term& r) { return l.m > r.m; });
  return lc;
}

// Pseudo-remainder of a by b with respect to x_v (deg_v a >= deg_v b >= 1).
Poly pseudo_rem(const Poly& a, const Poly& b, int v) {
  const int db = b.degree_in(v);
  const Poly lcb = leading_coeff_in(b, v);
  Poly r = a;
  while (!r.is_zero() && r.degree_in(v) >= db) {
    const int dr = r.degree_in(v);
    Poly lcr = leading_coeff_in(r, v);
    Mono shift = mono_var(v, dr - db);
    Poly shifted_b = b;
    for (Term& x : shifted_b.t) x.m = mono_mul(x.m, shift);
    std::sort(shifted_b.t.begin(), shifted_b.t.end(),
              [](const Term& l, const Term& rg) { return l.m > rg.m; });
    r = lcb * r - lcr * shifted_b;
  }
  return r;
}

Poly gcd_impl(Poly a, Poly b);

// Content of p with respect to x_v: gcd of the Poly coefficients.
Poly content_in(const Poly& p, int v) {
  std::vector<Poly> cs = coeffs_in(p, v);
  Poly g;
  for (const Poly& c : cs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? make_primitive(c) : gcd_impl(g, c);
    if (g.is_constant()) break;
  }
  return g.is_zero() ? Poly::from_int(1) : g;
}

Poly gcd_impl(Poly a, Poly b) {
  if (a.is_zero()) return make_primitive(b);
  if (b.is_zero()) return make_primitive(a);

  // Shared monomial factor (cheap, and common for denominators).
  Mono ma = a.t[0].m, mb = b.t[0].m;
  for (const Term& x : a.t) ma = mono_gcd(ma, x.m);
  for (const Term& x : b.t) mb = mono_gcd(mb, x.m);
  const Mono mg = mono_gcd(ma, mb);
  if (ma != 0)
    for (Term& x : a.t) x.m = mono_div(x.m, ma);
  if (mb != 0)
    for (Term& x : b.t) x.m = mono_div(x.m, mb);

  Poly pa = make_primitive(a);
  Poly pb = make_primitive(b);

  Poly core;
  if (pa.is_constant() || pb.is_constant()) {
    core = Poly::from_int(1);
  } else if (pa == pb) {
    core = pa;
  } else if (auto q = try_divexact(pa, pb); q.has_value()) {
    core = pb;
  } else if (auto q2 = try_divexact(pb, pa); q2.has_value()) {
    core = pa;
  } else {
    // Choose a main variable both depend on, minimizing the larger degree.
    int v = -1, best = 256 * 2;
    for (int cand = 0; cand < kMaxVars; ++cand) {
      int da = pa.degree_in(cand), db = pb.degree_in(cand);
      if (da > 0 && db > 0) {
        int score = std::max(da, db);
        if (score < best) {
          best = score;
          v = cand;
        }
      }
    }
    if (v < 0) {
      // No common variable: both primitive with disjoint supports, gcd is 1.
      core = Poly::from_int(1);
    } else {
      Poly ca = content_in(pa, v);
      Poly cb = content_in(pb, v);
      Poly cg = gcd_impl(ca, cb);
      Poly A = pa.divexact(ca);
      Poly B = pb.divexact(cb);
      if (A.degree_in(v) < B.degree_in(v)) std::swap(A, B);
      while (true) {
        Poly R = pseudo_rem(A, B, v);
        if (R.is_zero()) break;
        if (R.degree_in(v) == 0) {
          B = Poly::from_int(1);
          break;
        }
        A = B;
        B = R.divexact(content_in(R, v));
        B = make_primitive(B);
      }
      core = make_primitive(cg * B);
    }
  }

  if (mg != 0) {
    for (Term& x : core.t) x.m = mono_mul(x.m, mg);
    std::sort(core.t.begin(), core.t.end(),
              [](const Term& l, const Term& r) { return l.m > r.m; });
  }
  return core;
}

}  // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b); }

//---------------------------------------------------------------------------
// Rendering
//---------------------------------------------------------------------------

namespace {

std::string var_name(int v, const std::vector<std::string>* names) {
  if (names && static_cast<std::size_t>(v) < names->size()) return (*names)[v];
  return "x" + std::to_string(v);
}

std::string coeff_str(const mpq_class& q) {
  std::string s = q.get_num().get_str();
  if (q.get_den() != 1) s += "/" + q.get_den().get_str();
  return s;
}

}  // namespace

std::string Poly::str(const std::vector<std::string>* names) const {
  if (t.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& x : t) {
    mpq_class c = x.c;
    if (first) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    std::string mono;
    for (int v = 0; v < kMaxVars; ++v) {
      int e = mono_exp(x.m, v);
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += var_name(v, names);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += coeff_str(c);
    } else if (c == 1) {
      out += mono;
    } else {
      out += coeff_str(c) + "*" + mono;
    }
    first = false;
  }
  return out;
}

//---------------------------------------------------------------------------
// Scalars
//---------------------------------------------------------------------------

Scalar::Scalar(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw MalformedScalarError("scalar with zero denominator");
  reduce_();
}

Scalar Scalar::integer(long v) {
  Scalar s;
  s.num_ = Poly::from_int(v);
  return s;
}

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw MalformedScalarError("scalar with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::variable(int v) {
  Scalar s;
  s.num_ = Poly::variable(v);
  return s;
}

void Scalar::reduce_() {
  if (num_.is_zero()) {
    den_ = Poly::from_int(1);
    return;
  }
  if (!den_.is_constant()) {
    Poly g = Poly::gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = num_.divexact(g);
      den_ = den_.divexact(g);
    }
  }
  mpq_class lc = den_.leading_coeff();
  if (lc != 1) {
    mpq_class inv = 1 / lc;
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

bool Scalar::is_one() const {
  return num_.is_constant() && den_.is_constant() && !num_.is_zero() &&
         num_.constant_value() == den_.constant_value();
}

mpq_class Scalar::constant_value() const {
  if (!is_constant()) throw InternalError("constant_value of non-constant scalar");
  if (num_.is_zero()) return mpq_class(0);
  return num_.constant_value() / den_.constant_value();
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  r.num_ = -r.num_;
  return r;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return Scalar(a.num_ + b.num_, a.den_);
  Poly g = Poly::gcd(a.den_, b.den_);
  if (g.is_constant()) {
    return Scalar(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  Poly da = a.den_.divexact(g);
  Poly db = b.den_.divexact(g);
  return Scalar(a.num_ * db + b.num_ * da, a.den_ * db);
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return Scalar::zero();
  // Cross-cancel before multiplying to keep gcds small.
  Poly n1 = a.num_, d1 = a.den_, n2 = b.num_, d2 = b.den_;
  if (!d2.is_constant()) {
    Poly g = Poly::gcd(n1, d2);
    if (!g.is_constant()) {
      n1 = n1.divexact(g);
      d2 = d2.divexact(g);
    }
  }
  if (!d1.is_constant()) {
    Poly g = Poly::gcd(n2, d1);
    if (!g.is_constant()) {
      n2 = n2.divexact(g);
      d1 = d1.divexact(g);
    }
  }
  return Scalar(n1 * n2, d1 * d2);
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw MalformedScalarError("division by zero scalar");
  Scalar binv;
  binv.num_ = b.den_;
  binv.den_ = b.num_;
  binv.reduce_();
  return a * binv;
}

Scalar Scalar::pow(int k) const {
  if (k == 0) return Scalar::one();
  if (is_zero()) {
    if (k < 0) throw MalformedScalarError("zero scalar raised to negative power");
    return Scalar::zero();
  }
  unsigned mag = static_cast<unsigned>(k < 0 ? -static_cast<long>(k) : k);
  Scalar r;
  r.num_ = num_.pow(mag);
  r.den_ = den_.pow(mag);
  if (k < 0) std::swap(r.num_, r.den_);
  r.reduce_();
  return r;
}

Scalar Scalar::derivative(int v) const {
  if (v < 0 || v >= kMaxVars) throw DomainError("derivative: variable index out of range");
  if (is_zero()) return Scalar::zero();
  // (n/d)' = (n'd - nd')/d^2
  Poly np = num_.derivative(v);
  Poly dp = den_.derivative(v);
  if (dp.is_zero()) return Scalar(np, den_);
  return Scalar(np * den_ - num_ * dp, den_ * den_);
}

std::optional<mpq_class> Scalar::eval(const std::vector<mpq_class>& point) const {
  mpq_class d = den_.eval(point);
  if (d == 0) return std::nullopt;
  return num_.eval(point) / d;
}

int Scalar::max_degree() const {
  if (is_zero()) return -1;
  return std::max(num_.total_degree(), den_.total_degree());
}

std::string Scalar::str(const std::vector<std::string>* names) const {
  if (is_zero()) return "0";
  if (den_.is_constant() && den_.constant_value() == 1) return num_.str(names);
  std::string n = num_.str(names);
  std::string d = den_.str(names);
  bool nsimple = num_.t.size() == 1;
  bool dsimple = den_.t.size() == 1;
  return (nsimple ? n : "(" + n + ")") + "/" + (dsimple ? d : "(" + d + ")");
}

Scalar differentiate(const Scalar& s, int var_index) { return s.derivative(var_index); }

//---------------------------------------------------------------------------
// Charts
//---------------------------------------------------------------------------

ChartSpec ChartSpec::make(int n) {
  ChartSpec c;
  c.n = n;
  if (n >= 2)
    for (int v = 0; v < 2 * n - 1; ++v) c.vars.push_back("x" + std::to_string(v));
  c.validate();
  return c;
}

void ChartSpec::validate() const {
  if (n < 2) throw DomainError("chart requires n >= 2 (manifold dimension >= 3)");
  if (dim() > kMaxVars)
    throw DomainError("chart dimension " + std::to_string(dim()) +
                      " exceeds the supported maximum of " + std::to_string(kMaxVars) +
                      " coordinates (n <= 4)");
  if (static_cast<int>(vars.size()) != dim())
    throw DomainError("chart must name exactly 2n-1 variables");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].empty()) throw DomainError("chart variable name must be nonempty");
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw DomainError("chart variable names must be distinct");
  }
}

int ChartSpec::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

//---------------------------------------------------------------------------
// Parser
//---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { kInt, kIdent, kOp, kEnd } kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) {
      t.kind = Token::kEnd;
      return t;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::kInt;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        t.text += take();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::kIdent;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        t.text += take();
      return t;
    }
    if (std::string("+-*/^()").find(c) != std::string::npos) {
      t.kind = Token::kOp;
      t.text = std::string(1, take());
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

 private:
  char take() {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) take();
  }
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const ChartSpec& chart) : lex_(text), chart_(chart) {
    advance();
  }

  Scalar parse() {
    Scalar r = expr();
    if (cur_.kind != Token::kEnd)
      throw ParseError("unexpected trailing input '" + cur_.text + "'", cur_.line, cur_.col);
    return r;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool is_op(const char* o) const { return cur_.kind == Token::kOp && cur_.text == o; }

  Scalar expr() {
    Scalar r = term();
    while (is_op("+") || is_op("-")) {
      bool plus = cur_.text == "+";
      advance();
      Scalar rhs = term();
      r = plus ? r + rhs : r - rhs;
    }
    return r;
  }

  Scalar term() {
    Scalar r = unary();
    while (is_op("*") || is_op("/")) {
      bool mul = cur_.text == "*";
      Token at = cur_;
      advance();
      Scalar rhs = unary();
      if (!mul && rhs.is_zero())
        throw ParseError("division by zero in scalar literal", at.line, at.col);
      r = mul ? r * rhs : r / rhs;
    }
    return r;
  }

  Scalar unary() {
    if (is_op("-")) {
      advance();
      return -unary();
    }
    return power();
  }

  Scalar power() {
    Scalar base = atom();
    if (is_op("^")) {
      Token at = cur_;
      advance();
      bool neg = false;
      if (is_op("-")) {
        neg = true;
        advance();
      }
      if (cur_.kind != Token::kInt)
        throw ParseError("expected integer exponent after '^'", cur_.line, cur_.col);
      long e = std::strtol(cur_.text.c_str(), nullptr, 10);
      if (e > 255) throw ParseError("exponent too large", cur_.line, cur_.col);
      advance();
      if (neg && base.is_zero())
        throw ParseError("zero raised to negative power", at.line, at.col);
      return base.pow(static_cast<int>(neg ? -e : e));
    }
    return base;
  }

  Scalar atom() {
    if (cur_.kind == Token::kInt) {
      mpz_class z(cur_.text);
      advance();
      return Scalar(mpq_class(z));
    }
    if (cur_.kind == Token::kIdent) {
      int v = chart_.var_index(cur_.text);
      if (v < 0)
        throw ParseError("unknown variable '" + cur_.text + "'", cur_.line, cur_.col);
      advance();
      return Scalar::variable(v);
    }
    if (is_op("(")) {
      advance();
      Scalar r = expr();
      if (!is_op(")"))
        throw ParseError("expected ')'", cur_.line, cur_.col);
      advance();
      return r;
    }
    throw ParseError("expected a number, variable, or '('", cur_.line, cur_.col);
  }

  Lexer lex_;
  const ChartSpec& chart_;
  Token cur_;
};

}  // namespace

Scalar parse_scalar(const std::string& text, const ChartSpec& chart) {
  return Parser(text, chart).parse();
}

//---------------------------------------------------------------------------
// Deterministic randomness
//---------------------------------------------------------------------------

std::uint64_t Rng::next() {
  // splitmix64: deterministic, platform-independent.
  s_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

long Rng::next_in(long lo, long hi) {
  return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

mpq_class Rng::small_rational() {
  mpq_class q(next_in(-20, 20), next_in(1, 5));
  q.canonicalize();
  return q;
}

std::uint64_t seed_from_env() {
  if (const char* e = std::getenv("CPS_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(e, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return 20240816ull;
}

bool eval_cross_check_nonzero(const Scalar& s, Rng& rng, int attempts) {
  if (s.is_zero()) throw InternalError("eval_cross_check_nonzero on canonical zero");
  int valid = 0;
  for (int draw = 0; draw < attempts * 5 && valid < attempts; ++draw) {
    std::vector<mpq_class> pt;
    pt.reserve(kMaxVars);
    for (int v = 0; v < kMaxVars; ++v) pt.push_back(rng.small_rational());
    auto val = s.eval(pt);
    if (!val.has_value()) continue;  // denominator zero at this point
    ++valid;
    if (*val != 0) return true;
  }
  if (valid == 0) return true;  // could not sample the patch; canonical form stands
  throw InternalError(
      "canonically nonzero scalar evaluated to zero at every sampled point");
}

}  // namespace cps
