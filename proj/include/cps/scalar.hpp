#pragma once
// Exact multivariate rational-function arithmetic over the rationals.
//
// This is the coefficient field for every tensor in the engine.  A Scalar is a
// quotient num/den of sparse multivariate polynomials with exact rational
// coefficients, kept in a canonical form (reduced fraction, denominator monic
// under the graded-lexicographic leading term), so that equality of canonical
// forms decides equality of rational functions and `is_zero` is an exact test.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cps {

//---------------------------------------------------------------------------
// Errors
//---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction of a fraction with zero denominator, division by zero, etc.
struct MalformedScalarError : Error {
  using Error::Error;
};

// Out-of-range variable index, invalid chart parameters, bad fixture data.
struct DomainError : Error {
  using Error::Error;
};

// A guaranteed-impossible situation (exact division with remainder, failed
// cross-check): indicates a bug in the engine itself, never in user input.
struct InternalError : Error {
  using Error::Error;
};

// Scalar-literal syntax error with 1-based position information.
struct ParseError : Error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", column " +
              std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

//---------------------------------------------------------------------------
// Monomials
//---------------------------------------------------------------------------
//
// A monomial in at most 7 variables is packed into one 64-bit word:
//   bits 56..63 : total degree
//   bits 48..55 : exponent of x0
//   bits 40..47 : exponent of x1
//   ...
//   bits  0..7  : exponent of x6
// Unsigned comparison of the packed words is exactly the graded-lexicographic
// order with x0 > x1 > ... > x6.  Per-variable exponents are capped at 255 and
// overflow is a loud internal error (fixtures stay far below this).

using Mono = std::uint64_t;

inline constexpr int kMaxVars = 7;

inline Mono mono_one() { return 0; }

inline int mono_exp(Mono m, int v) {
  return static_cast<int>((m >> (8 * (6 - v))) & 0xffu);
}

inline int mono_totdeg(Mono m) { return static_cast<int>(m >> 56); }

Mono mono_from_exps(const int* exps, int nvars);
Mono mono_var(int v, int power = 1);
Mono mono_mul(Mono a, Mono b);           // throws InternalError on exponent overflow
bool mono_divides(Mono a, Mono b);       // true iff a | b componentwise
Mono mono_div(Mono b, Mono a);           // b / a; caller guarantees divisibility
Mono mono_gcd(Mono a, Mono b);           // componentwise min

//---------------------------------------------------------------------------
// Polynomials
//---------------------------------------------------------------------------

struct Term {
  Mono m;
  mpq_class c;
};

class Poly {
 public:
  // Terms sorted strictly descending by monomial; no zero coefficients.
  // Treated as immutable by all users; mutation happens only inside scalar.cpp.
  std::vector<Term> t;

  Poly() = default;

  static Poly constant(const mpq_class& q);
  static Poly from_int(long v);
  static Poly variable(int v);

  bool is_zero() const { return t.empty(); }
  bool is_constant() const { return t.empty() || (t.size() == 1 && t[0].m == 0); }
  mpq_class constant_value() const;  // pre: is_constant()

  int total_degree() const {  // -1 for the zero polynomial
    return t.empty() ? -1 : mono_totdeg(t[0].m);
  }
  int degree_in(int v) const;
  bool depends_on(int v) const { return degree_in(v) > 0; }

  Mono leading_mono() const;        // pre: !is_zero()
  mpq_class leading_coeff() const;  // pre: !is_zero()

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const mpq_class& q) const;
  Poly pow(unsigned k) const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly derivative(int v) const;
  mpq_class eval(const std::vector<mpq_class>& point) const;

  // Exact division; throws InternalError if the divisor does not divide exactly.
  Poly divexact(const Poly& d) const;

  // Greatest common divisor via a primitive pseudo-remainder sequence.
  // Result has integer coefficients, content 1, positive leading coefficient
  // (graded-lex); gcd(0,0) = 0.
  static Poly gcd(const Poly& a, const Poly& b);

  std::string str(const std::vector<std::string>* names = nullptr) const;
};

//---------------------------------------------------------------------------
// Scalars: canonical rational functions
//---------------------------------------------------------------------------

class Scalar {
 public:
  Scalar() : num_(), den_(Poly::from_int(1)) {}
  Scalar(Poly num, Poly den);  // normalizes; throws MalformedScalarError if den == 0
  explicit Scalar(const mpq_class& q) : num_(Poly::constant(q)), den_(Poly::from_int(1)) {
    if (q == 0) num_ = Poly();
  }

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return integer(1); }
  static Scalar integer(long v);
  static Scalar rational(long num, long den);
  static Scalar constant(const mpq_class& q) { return Scalar(q); }
  static Scalar variable(int v);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  mpq_class constant_value() const;  // pre: is_constant()

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);  // b == 0 -> MalformedScalarError
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  Scalar pow(int k) const;  // negative k inverts; 0^negative -> MalformedScalarError

  bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  Scalar derivative(int v) const;  // exact quotient rule; v out of range -> DomainError

  // Evaluate at a rational point; nullopt when the denominator vanishes there.
  std::optional<mpq_class> eval(const std::vector<mpq_class>& point) const;

  // Largest total degree among numerator and denominator (-1 for the zero
  // scalar); used for residual summaries in reports.
  int max_degree() const;

  std::string str(const std::vector<std::string>* names = nullptr) const;

 private:
  Poly num_, den_;
  void reduce_();
};

// Spec-level free functions (the member operations are the implementation).
inline Scalar normalize(const Scalar& s) { return s; }  // Scalars are always canonical
Scalar differentiate(const Scalar& s, int var_index);
inline bool is_zero(const Scalar& s) { return s.is_zero(); }

//---------------------------------------------------------------------------
// Charts
//---------------------------------------------------------------------------

// A Darboux coordinate patch of dimension 2n-1 with named variables x^0..x^{2n-2}.
struct ChartSpec {
  int n = 0;
  std::vector<std::string> vars;

  int dim() const { return 2 * n - 1; }

  static ChartSpec make(int n);  // default variable names x0..x{2n-2}
  void validate() const;         // n >= 2, dim <= kMaxVars, names distinct
  int var_index(const std::string& name) const;  // -1 when absent
};

// Parse a Scalar literal over the chart's variables.  Accepted syntax: integer
// literals, variables, + - * / ^ with usual precedence, unary minus,
// parentheses, integer exponents (negative allowed).  Throws ParseError with
// 1-based line/column on malformed input.
Scalar parse_scalar(const std::string& text, const ChartSpec& chart);

//---------------------------------------------------------------------------
// Deterministic randomness (evaluation cross-checks, randomized fixtures)
//---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  long next_in(long lo, long hi);  // inclusive
  mpq_class small_rational();      // numerator in [-20,20], denominator in [1,5]
 private:
  std::uint64_t s_;
};

// Seed from the CPS_SEED environment variable, defaulting deterministically.
std::uint64_t seed_from_env();

// Confirm a canonically nonzero Scalar by evaluation at random rational points
// (skipping denominator zeros).  Returns true when some evaluation is nonzero;
// throws InternalError when every sampled evaluation vanishes — a canonical
// nonzero that evaluates to zero everywhere sampled indicates an engine bug.
// pre: !s.is_zero()
bool eval_cross_check_nonzero(const Scalar& s, Rng& rng, int attempts = 8);

}  // namespace cps
