#include "muntz/realpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace muntz::realpoly {

GeneratorSet GeneratorSet::unit() {
  GeneratorSet g;
  g.names = {"1"};
  g.values = {1.0};
  return g;
}

int GeneratorSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

int GeneratorSet::add(const std::string& name, double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("generator value must be positive and finite");
  int idx = index_of(name);
  if (idx >= 0) {
    if (values[idx] != value)
      throw std::invalid_argument("generator '" + name + "' redefined");
    return idx;
  }
  names.push_back(name);
  values.push_back(value);
  return static_cast<int>(names.size()) - 1;
}

double ExponentVector::numeric(const GeneratorSet& gens) const {
  double s = 0.0;
  for (std::size_t j = 0; j < coords.size() && j < gens.size(); ++j)
    s += to_double(coords[j]) * gens.values[j];
  return s;
}

ExponentVector ExponentVector::rational(const Rational& r) {
  ExponentVector e;
  e.coords = {r};
  return e;
}

ExponentVector ExponentVector::unitgen(std::size_t idx, std::size_t ngens) {
  ExponentVector e;
  e.coords.assign(ngens, Rational(0));
  e.coords[idx] = 1;
  return e;
}

bool same_exponent(const ExponentVector& a, const ExponentVector& b) {
  std::size_t n = std::max(a.coords.size(), b.coords.size());
  for (std::size_t j = 0; j < n; ++j) {
    Rational x = j < a.coords.size() ? a.coords[j] : Rational(0);
    Rational y = j < b.coords.size() ? b.coords[j] : Rational(0);
    if (x != y) return false;
  }
  return true;
}

namespace {

ExponentVector padded(const ExponentVector& e, std::size_t n) {
  ExponentVector r = e;
  r.coords.resize(n, Rational(0));
  return r;
}

ExponentVector exp_add(const ExponentVector& a, const ExponentVector& b,
                       std::size_t n) {
  ExponentVector r = padded(a, n);
  for (std::size_t j = 0; j < n; ++j)
    r.coords[j] += j < b.coords.size() ? b.coords[j] : Rational(0);
  return r;
}

// merge generator sets; returns index remap for `b`
GeneratorSet merge_gens(const GeneratorSet& a, const GeneratorSet& b,
                        std::vector<std::size_t>& bmap) {
  GeneratorSet g = a;
  bmap.resize(b.size());
  for (std::size_t j = 0; j < b.size(); ++j)
    bmap[j] = static_cast<std::size_t>(g.add(b.names[j], b.values[j]));
  return g;
}

ExponentVector remap(const ExponentVector& e, const std::vector<std::size_t>& map,
                     std::size_t n) {
  ExponentVector r;
  r.coords.assign(n, Rational(0));
  for (std::size_t j = 0; j < e.coords.size(); ++j)
    r.coords[map[j]] += e.coords[j];
  return r;
}

}  // namespace

RealExpPolynomial::RealExpPolynomial(GeneratorSet gens, std::vector<Term> terms)
    : gens_(std::move(gens)), terms_(std::move(terms)) {
  if (gens_.size() == 0)
    throw std::invalid_argument("generator set must be nonempty");
  canonicalize();
}

void RealExpPolynomial::canonicalize() {
  const std::size_t n = gens_.size();
  std::map<std::vector<Rational>, Rational> acc;
  for (auto& t : terms_) {
    if (t.coeff == 0) continue;
    acc[padded(t.exp, n).coords] += t.coeff;
  }
  terms_.clear();
  numeric_.clear();
  struct Row {
    double num;
    std::vector<Rational> coords;
    Rational coeff;
  };
  std::vector<Row> rows;
  for (auto& [coords, coeff] : acc) {
    if (coeff == 0) continue;
    ExponentVector e;
    e.coords = coords;
    double num = e.numeric(gens_);
    if (num < -1e-12)
      throw std::invalid_argument("negative exponent " + std::to_string(num) +
                                  " not allowed");
    rows.push_back({num, coords, coeff});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.num != b.num) return a.num < b.num;
    return a.coords < b.coords;
  });
  for (auto& r : rows) {
    Term t;
    t.coeff = std::move(r.coeff);
    t.exp.coords = std::move(r.coords);
    terms_.push_back(std::move(t));
    numeric_.push_back(r.num);
  }
}

double RealExpPolynomial::eval(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    double e = numeric_[i];
    double p = e == 0.0 ? 1.0 : std::pow(x, e);
    s += to_double(terms_[i].coeff) * p;
  }
  return s;
}

std::vector<double> RealExpPolynomial::exponent_values() const { return numeric_; }

bool RealExpPolynomial::integer_exponents() const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& c = terms_[i].exp.coords;
    for (std::size_t j = 1; j < c.size(); ++j)
      if (c[j] != 0) return false;
    if (!c.empty() && denominator(c[0]) != 1) return false;
  }
  return true;
}

std::string RealExpPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (i) os << (t.coeff < 0 ? " - " : " + ");
    else if (t.coeff < 0) os << "-";
    Rational c = t.coeff < 0 ? Rational(-t.coeff) : t.coeff;
    bool zero_exp = true;
    for (const auto& q : t.exp.coords) zero_exp = zero_exp && q == 0;
    if (zero_exp) {
      os << to_string(c);
      continue;
    }
    if (c != 1) os << to_string(c) << "*";
    os << "x^(";
    bool first = true;
    for (std::size_t j = 0; j < t.exp.coords.size(); ++j) {
      const Rational& q = t.exp.coords[j];
      if (q == 0) continue;
      if (!first) os << "+";
      first = false;
      if (gens_.names[j] == "1") {
        os << to_string(q);
      } else {
        if (q != 1) os << to_string(q) << "*";
        os << "s:" << gens_.names[j];
      }
    }
    os << ")";
  }
  return os.str();
}

RealExpPolynomial add(const RealExpPolynomial& a, const RealExpPolynomial& b) {
  std::vector<std::size_t> bmap;
  GeneratorSet g = merge_gens(a.gens(), b.gens(), bmap);
  std::vector<Term> terms;
  for (const Term& t : a.terms()) terms.push_back({t.coeff, padded(t.exp, g.size())});
  for (const Term& t : b.terms())
    terms.push_back({t.coeff, remap(t.exp, bmap, g.size())});
  return RealExpPolynomial(std::move(g), std::move(terms));
}

RealExpPolynomial sub(const RealExpPolynomial& a, const RealExpPolynomial& b) {
  std::vector<std::size_t> bmap;
  GeneratorSet g = merge_gens(a.gens(), b.gens(), bmap);
  std::vector<Term> terms;
  for (const Term& t : a.terms()) terms.push_back({t.coeff, padded(t.exp, g.size())});
  for (const Term& t : b.terms())
    terms.push_back({Rational(-t.coeff), remap(t.exp, bmap, g.size())});
  return RealExpPolynomial(std::move(g), std::move(terms));
}

RealExpPolynomial multiply(const RealExpPolynomial& a, const RealExpPolynomial& b) {
  std::vector<std::size_t> bmap;
  GeneratorSet g = merge_gens(a.gens(), b.gens(), bmap);
  const std::size_t n = g.size();
  std::vector<Term> terms;
  terms.reserve(a.term_count() * b.term_count());
  for (const Term& s : a.terms()) {
    ExponentVector se = padded(s.exp, n);
    for (const Term& t : b.terms()) {
      Term u;
      u.coeff = s.coeff * t.coeff;
      u.exp = exp_add(se, remap(t.exp, bmap, n), n);
      terms.push_back(std::move(u));
    }
  }
  return RealExpPolynomial(std::move(g), std::move(terms));
}

RealExpPolynomial power(const RealExpPolynomial& p, unsigned k) {
  RealExpPolynomial result(p.gens(),
                           {Term{Rational(1), ExponentVector::rational(0)}});
  RealExpPolynomial base = p;
  while (k) {
    if (k & 1u) result = multiply(result, base);
    k >>= 1u;
    if (k) base = multiply(base, base);
  }
  return result;
}

SchinzelReport schinzel_check(const RealExpPolynomial& p, unsigned lam) {
  if (p.term_count() < 2)
    throw std::invalid_argument("term-count bound needs a polynomial with >= 2 terms");
  if (lam < 1) throw std::invalid_argument("exponent must be >= 1");
  SchinzelReport r;
  r.terms = power(p, lam).term_count();
  r.bound = lam + 1;
  r.holds = r.terms >= r.bound;
  return r;
}

BasisReduction rational_basis_reduction(const GeneratorSet& gens,
                                        const std::vector<ExponentVector>& exps) {
  if (exps.empty()) throw std::invalid_argument("no exponents to reduce");
  const std::size_t n = gens.size();
  BasisReduction r;
  r.scales.assign(n, Integer(1));
  for (const auto& e : exps)
    for (std::size_t j = 0; j < n && j < e.coords.size(); ++j)
      r.scales[j] = lcm(r.scales[j], denominator(e.coords[j]));

  r.scaled_gens = gens;
  for (std::size_t j = 0; j < n; ++j)
    r.scaled_gens.values[j] = gens.values[j] / r.scales[j].convert_to<double>();

  std::vector<Integer> maxabs(n, Integer(0));
  for (const auto& e : exps) {
    std::vector<Integer> row(n, Integer(0));
    for (std::size_t j = 0; j < n && j < e.coords.size(); ++j) {
      Rational scaled = e.coords[j] * r.scales[j];
      // exact by construction of the lcm
      row[j] = numerator(scaled);
      Integer a = abs(row[j]);
      if (a > maxabs[j]) maxabs[j] = a;
    }
    r.coords.push_back(std::move(row));
  }
  r.shift.resize(n);
  r.shift_numeric = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    r.shift[j] = maxabs[j] + 1;
    r.shift_numeric += r.shift[j].convert_to<double>() * r.scaled_gens.values[j];
  }
  return r;
}

MembershipReport membership_check(const RealExpPolynomial& p,
                                  const exponents::ExponentSequence& seq,
                                  double tol) {
  MembershipReport r;
  for (double e : p.exponent_values()) {
    bool found = false;
    for (double lam : seq.values)
      if (std::fabs(e - lam) <= tol * std::max(1.0, std::fabs(e))) {
        found = true;
        break;
      }
    if (!found) r.missing.push_back(e);
  }
  r.contained = r.missing.empty();
  return r;
}

InvarianceReport invariance_test(const RealExpPolynomial& phi,
                                 const exponents::ExponentSequence& seq,
                                 const std::vector<double>& lambdas, double tol) {
  if (phi.is_zero()) throw std::invalid_argument("phi must be nonzero");
  bool nonconstant = false;
  for (double e : phi.exponent_values()) nonconstant = nonconstant || e > tol;
  if (!nonconstant) throw std::invalid_argument("phi must be nonconstant");

  InvarianceReport rep;
  for (double lam : lambdas) {
    InvarianceEntry ent;
    ent.lambda = lam;
    double rounded = std::round(lam);
    bool integral = std::fabs(lam - rounded) <= 1e-9 && rounded >= 1.0;
    bool in_seq = false;
    for (double v : seq.values)
      if (std::fabs(lam - v) <= tol * std::max(1.0, std::fabs(lam))) in_seq = true;
    ent.tested = integral && in_seq;
    if (ent.tested) {
      auto q = power(phi, static_cast<unsigned>(rounded));
      auto mem = membership_check(q, seq, tol);
      ent.holds = mem.contained;
      if (!mem.contained) {
        ent.first_violation = mem.missing.front();
        rep.invariant_on_prefix = false;
      }
    }
    rep.entries.push_back(ent);
  }
  return rep;
}

double BinomialSeries::eval(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    s += coeffs[k] * std::pow(x, exponents[k]);
  return prefactor * s;
}

BinomialSeries binomial_expand(double alpha, double zeta1, double beta,
                               double zeta2, double lam, int K) {
  if (alpha == 0.0 || beta == 0.0)
    throw std::invalid_argument("both coefficients must be nonzero");
  if (!(zeta2 > zeta1) || zeta1 < 0.0)
    throw std::invalid_argument("need 0 <= zeta1 < zeta2");
  if (K < 0) throw std::invalid_argument("truncation order must be >= 0");
  if (lam >= 0.0 && std::floor(lam) == lam)
    throw std::invalid_argument("integer exponent: expand exactly with power()");
  if (lam * zeta1 < 0.0)
    throw std::invalid_argument("leading exponent must be nonnegative");

  BinomialSeries s;
  s.prefactor = std::pow(alpha, lam);
  if (!std::isfinite(s.prefactor))
    throw std::invalid_argument("alpha^lam is not finite");
  s.radius = std::pow(std::fabs(alpha / beta), 1.0 / (zeta2 - zeta1));
  double ratio = beta / alpha;
  double a = 1.0;
  for (int k = 0; k <= K; ++k) {
    s.coeffs.push_back(a);
    s.exponents.push_back(lam * zeta1 + k * (zeta2 - zeta1));
    a *= ratio * (lam - k) / (k + 1);
  }
  return s;
}

ConvergenceReport convergence_exponent(const std::vector<double>& coeffs,
                                       const std::vector<double>& exps) {
  if (coeffs.size() != exps.size() || coeffs.size() < 2)
    throw std::invalid_argument("need matching coefficient/exponent lists, >= 2");
  for (std::size_t k = 1; k < exps.size(); ++k)
    if (!(exps[k] > exps[k - 1]) || !(exps[k] > 0.0))
      throw std::invalid_argument("exponents must be positive and increasing");
  ConvergenceReport r;
  for (std::size_t k = coeffs.size() / 2; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    r.L = std::max(r.L, std::pow(std::fabs(coeffs[k]), 1.0 / exps[k]));
  }
  r.radius = r.L > 0.0 ? 1.0 / r.L : std::numeric_limits<double>::infinity();
  return r;
}

std::vector<std::size_t> clarkson_erdos_check(
    const std::vector<double>& coeffs, const exponents::ExponentSequence& seq,
    double f_norm, double eps, double p) {
  if (!(f_norm >= 0.0)) throw std::invalid_argument("norm must be nonnegative");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  std::vector<std::size_t> bad;
  std::size_t n = std::min(coeffs.size(), seq.size());
  for (std::size_t k = 0; k < n; ++k) {
    double lam = seq[k];
    double lhs = std::fabs(coeffs[k]) * std::pow(p * lam + 1.0, -1.0 / p);
    double rhs = std::pow(1.0 + eps, lam) * f_norm;
    if (lhs > rhs * (1.0 + 1e-12)) bad.push_back(k);
  }
  return bad;
}

// ---------------------------------------------------------------------------
// polynomial literal parser

namespace {

const std::pair<const char*, double> kBuiltinGens[] = {
    {"sqrt2", 1.4142135623730951},
    {"sqrt3", 1.7320508075688772},
    {"sqrt5", 2.23606797749979},
    {"pi", 3.141592653589793},
};

struct PolyParser {
  const std::string& s;
  std::size_t i = 0;
  GeneratorSet gens;

  explicit PolyParser(const std::string& text, GeneratorSet g)
      : s(text), gens(std::move(g)) {
    if (gens.index_of("1") != 0) {
      GeneratorSet u = GeneratorSet::unit();
      for (std::size_t j = 0; j < gens.size(); ++j)
        u.add(gens.names[j], gens.values[j]);
      gens = std::move(u);
    }
  }

  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool peek(char c) {
    ws();
    return i < s.size() && s[i] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw std::invalid_argument("polynomial literal: expected '" +
                                  std::string(1, c) + "' at offset " +
                                  std::to_string(i));
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("polynomial literal: " + msg + " at offset " +
                                std::to_string(i));
  }

  bool number_ahead() {
    ws();
    return i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                            (s[i] == '.' && i + 1 < s.size() &&
                             std::isdigit(static_cast<unsigned char>(s[i + 1]))));
  }

  Rational number() {
    ws();
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) ||
                            s[j] == '.'))
      ++j;
    if (j == i) fail("expected number");
    Rational a = rational_from_string(s.substr(i, j - i));
    i = j;
    ws();
    if (i < s.size() && s[i] == '/' ) {
      // lookahead: denominators are plain numbers
      std::size_t save = i;
      ++i;
      ws();
      std::size_t k = i;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k > i) {
        Rational b = rational_from_string(s.substr(i, k - i));
        if (b == 0) fail("division by zero");
        i = k;
        return a / b;
      }
      i = save;
    }
    return a;
  }

  int genref() {
    ws();
    if (i + 1 >= s.size() || s[i] != 's' || s[i + 1] != ':') fail("expected s:name");
    i += 2;
    std::size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                            s[j] == '_'))
      ++j;
    if (j == i) fail("expected generator name");
    std::string name = s.substr(i, j - i);
    i = j;
    int idx = gens.index_of(name);
    if (idx >= 0) return idx;
    for (const auto& [bname, bval] : kBuiltinGens)
      if (name == bname) return gens.add(name, bval);
    fail("unknown generator '" + name + "'");
  }

  bool genref_ahead() {
    ws();
    return i + 1 < s.size() && s[i] == 's' && s[i + 1] == ':';
  }

  // rational [* s:name] | rational/s:name-free | s:name
  void exp_term(ExponentVector& acc, int sign) {
    if (genref_ahead()) {
      int g = genref();
      if (acc.coords.size() <= static_cast<std::size_t>(g))
        acc.coords.resize(g + 1, Rational(0));
      acc.coords[g] += sign;
      return;
    }
    Rational q = number();
    if (accept('*')) {
      int g = genref();
      if (acc.coords.size() <= static_cast<std::size_t>(g))
        acc.coords.resize(g + 1, Rational(0));
      acc.coords[g] += sign * q;
      return;
    }
    if (acc.coords.empty()) acc.coords.resize(1, Rational(0));
    acc.coords[0] += sign * q;
  }

  ExponentVector exponent() {
    ExponentVector e;
    if (accept('(')) {
      int sign = accept('-') ? -1 : 1;
      exp_term(e, sign);
      while (true) {
        if (accept('+')) exp_term(e, 1);
        else if (accept('-')) exp_term(e, -1);
        else break;
      }
      expect(')');
      return e;
    }
    if (genref_ahead()) {
      exp_term(e, 1);
      return e;
    }
    Rational q = number();
    e.coords = {q};
    return e;
  }

  RealExpPolynomial factor() {
    ws();
    if (accept('(')) {
      RealExpPolynomial p = poly();
      expect(')');
      if (accept('^')) {
        bool paren = accept('(');
        Rational k = number();
        if (paren) expect(')');
        if (denominator(k) != 1 || k < 0)
          fail("parenthesized polynomials take nonnegative integer powers");
        return power(p, numerator(k).convert_to<unsigned>());
      }
      return p;
    }
    if (i < s.size() && s[i] == 'x') {
      ++i;
      ExponentVector e = ExponentVector::rational(1);
      if (accept('^')) e = exponent();
      std::vector<Term> ts{Term{Rational(1), e}};
      return RealExpPolynomial(gens, std::move(ts));
    }
    if (number_ahead()) {
      Rational c = number();
      return RealExpPolynomial(gens,
                               {Term{c, ExponentVector::rational(0)}});
    }
    fail("expected coefficient, x, or parenthesized polynomial");
  }

  RealExpPolynomial term() {
    RealExpPolynomial p = factor();
    while (true) {
      ws();
      if (accept('*')) {
        RealExpPolynomial q = factor();
        p = multiply(p, q);
        sync_gens(p);
      } else if (i < s.size() && s[i] == '/') {
        ++i;
        Rational d = number();
        if (d == 0) fail("division by zero");
        std::vector<Term> ts;
        for (const Term& t : p.terms()) ts.push_back({t.coeff / d, t.exp});
        p = RealExpPolynomial(p.gens(), std::move(ts));
      } else if (i < s.size() && s[i] == 'x') {
        // implicit product like "2x" is rejected: demand explicit '*'
        fail("expected '*' before x");
      } else {
        return p;
      }
    }
  }

  void sync_gens(const RealExpPolynomial& p) {
    for (std::size_t j = 0; j < p.gens().size(); ++j)
      gens.add(p.gens().names[j], p.gens().values[j]);
  }

  RealExpPolynomial poly() {
    int sign = 1;
    ws();
    if (accept('-')) sign = -1;
    RealExpPolynomial p = term();
    if (sign < 0) {
      std::vector<Term> ts;
      for (const Term& t : p.terms()) ts.push_back({Rational(-t.coeff), t.exp});
      p = RealExpPolynomial(p.gens(), std::move(ts));
    }
    while (true) {
      ws();
      if (accept('+')) {
        p = add(p, term());
        sync_gens(p);
      } else if (accept('-')) {
        p = sub(p, term());
        sync_gens(p);
      } else {
        return p;
      }
    }
  }

  RealExpPolynomial run() {
    RealExpPolynomial p = poly();
    ws();
    if (i != s.size()) fail("trailing input");
    // re-canonicalize over the final generator set so every term has
    // full-width coordinates
    std::vector<Term> ts(p.terms().begin(), p.terms().end());
    return RealExpPolynomial(gens, std::move(ts));
  }
};

}  // namespace

RealExpPolynomial RealExpPolynomial::parse(const std::string& text) {
  return parse_with(text, GeneratorSet::unit());
}

RealExpPolynomial RealExpPolynomial::parse_with(const std::string& text,
                                                GeneratorSet gens) {
  PolyParser p(text, std::move(gens));
  return p.run();
}

namespace {

RealExpPolynomial lift(const exprdsl::Node& n) {
  using exprdsl::NodeKind;
  switch (n.kind) {
    case NodeKind::Literal: {
      if (!n.lit.has_exact)
        throw std::invalid_argument("literal '" + n.lit.text +
                                    "' is not an exact rational");
      Rational c(n.lit.num, n.lit.den);
      return RealExpPolynomial(GeneratorSet::unit(),
                               {Term{c, ExponentVector::rational(0)}});
    }
    case NodeKind::Variable:
      return RealExpPolynomial(GeneratorSet::unit(),
                               {Term{Rational(1), ExponentVector::rational(1)}});
    case NodeKind::Neg: {
      RealExpPolynomial p = lift(*n.lhs);
      std::vector<Term> ts;
      for (const Term& t : p.terms()) ts.push_back({Rational(-t.coeff), t.exp});
      return RealExpPolynomial(p.gens(), std::move(ts));
    }
    case NodeKind::Add: return add(lift(*n.lhs), lift(*n.rhs));
    case NodeKind::Sub: return sub(lift(*n.lhs), lift(*n.rhs));
    case NodeKind::Mul: return multiply(lift(*n.lhs), lift(*n.rhs));
    case NodeKind::Div: {
      RealExpPolynomial d = lift(*n.rhs);
      if (d.term_count() != 1 || d.exponent_values()[0] != 0.0)
        throw std::invalid_argument("only division by constants is polynomial");
      Rational c = d.terms()[0].coeff;
      if (c == 0) throw std::invalid_argument("division by zero");
      RealExpPolynomial p = lift(*n.lhs);
      std::vector<Term> ts;
      for (const Term& t : p.terms()) ts.push_back({t.coeff / c, t.exp});
      return RealExpPolynomial(p.gens(), std::move(ts));
    }
    case NodeKind::Pow: {
      if (!n.lit.has_exact)
        throw std::invalid_argument("exponent '" + n.lit.text +
                                    "' is not an exact rational");
      Rational e(n.lit.num, n.lit.den);
      RealExpPolynomial base = lift(*n.lhs);
      if (denominator(e) == 1 && e >= 0)
        return power(base, numerator(e).convert_to<unsigned>());
      if (base.term_count() == 1 && base.terms()[0].coeff == 1) {
        ExponentVector v = base.terms()[0].exp;
        for (auto& q : v.coords) q *= e;
        return RealExpPolynomial(base.gens(), {Term{Rational(1), v}});
      }
      throw std::invalid_argument(
          "fractional powers are polynomial only on bare monomials");
    }
    default:
      throw std::invalid_argument("expression is not a polynomial");
  }
}

}  // namespace

RealExpPolynomial RealExpPolynomial::from_expr(const exprdsl::Expr& e) {
  if (e.empty()) throw std::invalid_argument("empty expression");
  return lift(*e.root());
}

}  // namespace muntz::realpoly
