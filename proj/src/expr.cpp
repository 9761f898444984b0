#include "muntz/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace muntz::exprdsl {

namespace {

enum class Tok {
  Num, Ident, Plus, Minus, Star, Slash, Caret,
  LParen, RParen, Comma, Less, LessEq, LBracket, RBracket, End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos = 0;
  double num = 0.0;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          ++k;
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      std::string text = s.substr(i, j - i);
      double v = 0.0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size())
        throw ParseError("bad numeric literal '" + text + "'", i);
      out.push_back({Tok::Num, text, i, v});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    switch (c) {
      case '+': out.push_back({Tok::Plus, "+", i}); ++i; break;
      case '-': out.push_back({Tok::Minus, "-", i}); ++i; break;
      case '*': out.push_back({Tok::Star, "*", i}); ++i; break;
      case '/': out.push_back({Tok::Slash, "/", i}); ++i; break;
      case '^': out.push_back({Tok::Caret, "^", i}); ++i; break;
      case '(': out.push_back({Tok::LParen, "(", i}); ++i; break;
      case ')': out.push_back({Tok::RParen, ")", i}); ++i; break;
      case ',': out.push_back({Tok::Comma, ",", i}); ++i; break;
      case '[': out.push_back({Tok::LBracket, "[", i}); ++i; break;
      case ']': out.push_back({Tok::RBracket, "]", i}); ++i; break;
      case '<':
        if (i + 1 < s.size() && s[i + 1] == '=') {
          out.push_back({Tok::LessEq, "<=", i});
          i += 2;
        } else {
          out.push_back({Tok::Less, "<", i});
          ++i;
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// exact rational from a decimal/scientific literal; gives up on overflow
void decimal_to_rational(const std::string& text, Literal& lit) {
  lit.has_exact = false;
  long long mant = 0;
  int frac_digits = 0;
  long long expo = 0;
  std::size_t i = 0;
  int digits = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    if (mant > (std::numeric_limits<long long>::max() - 9) / 10) return;
    mant = mant * 10 + (text[i] - '0');
    ++digits;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (mant > (std::numeric_limits<long long>::max() - 9) / 10) return;
      mant = mant * 10 + (text[i] - '0');
      ++frac_digits;
      ++digits;
    }
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    long long e = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      e = e * 10 + (text[i] - '0');
      if (e > 30) return;
    }
    expo = neg ? -e : e;
  }
  if (digits == 0 || digits > 18) return;
  long long num = mant;
  long long den = 1;
  long long net = expo - frac_digits;
  while (net > 0) {
    if (num > std::numeric_limits<long long>::max() / 10) return;
    num *= 10;
    --net;
  }
  while (net < 0) {
    if (den > std::numeric_limits<long long>::max() / 10) return;
    den *= 10;
    ++net;
  }
  long long a = num, b = den;
  while (b) { long long t = a % b; a = b; b = t; }
  if (a > 1) { num /= a; den /= a; }
  lit.has_exact = true;
  lit.num = num;
  lit.den = den;
}

long long ipow_checked(long long base, long long e, bool& ok) {
  long long r = 1;
  for (long long k = 0; k < e; ++k) {
    if (base != 0 && (r > std::numeric_limits<long long>::max() / std::abs(base) ||
                      r < std::numeric_limits<long long>::min() / std::abs(base))) {
      ok = false;
      return 0;
    }
    r *= base;
  }
  ok = true;
  return r;
}

struct Parser {
  const std::string& src;
  std::vector<Token> toks;
  std::size_t at = 0;

  explicit Parser(const std::string& s) : src(s), toks(lex(s)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = at + ahead;
    return k < toks.size() ? toks[k] : toks.back();
  }
  const Token& take() { return toks[at < toks.size() - 1 ? at++ : at]; }
  bool accept(Tok k) {
    if (peek().kind == k) { ++at; return true; }
    return false;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k))
      throw ParseError(std::string("expected ") + what + ", got '" +
                           (peek().kind == Tok::End ? "<end>" : peek().text) + "'",
                       peek().pos);
  }

  static NodePtr make(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }

  NodePtr mk_lit(Literal lit) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Literal;
    n->lit = std::move(lit);
    return n;
  }

  NodePtr binary(NodeKind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  Literal number_literal() {
    const Token& t = peek();
    if (t.kind != Tok::Num)
      throw ParseError("expected number, got '" + t.text + "'", t.pos);
    take();
    Literal lit;
    lit.value = t.num;
    lit.text = t.text;
    decimal_to_rational(t.text, lit);
    return lit;
  }

  // ['-'] number ['/' number]; used where the grammar wants a constant
  Literal signed_rational() {
    bool neg = false;
    std::size_t pos = peek().pos;
    if (accept(Tok::Minus)) neg = true;
    Literal a = number_literal();
    if (peek().kind == Tok::Slash && peek(1).kind == Tok::Num) {
      take();
      Literal b = number_literal();
      if (b.value == 0.0)
        throw ParseError("division by zero in literal", pos);
      Literal r;
      r.value = a.value / b.value;
      r.text = a.text + "/" + b.text;
      if (a.has_exact && b.has_exact && b.num != 0) {
        long long num = a.num * b.den;  // small literals in practice
        long long den = a.den * b.num;
        if (den < 0) { den = -den; num = -num; }
        long long g = std::abs(num), h = den;
        while (h) { long long t2 = g % h; g = h; h = t2; }
        if (g > 1) { num /= g; den /= g; }
        r.has_exact = true;
        r.num = num;
        r.den = den;
      }
      a = r;
    }
    if (neg) {
      a.value = -a.value;
      a.text = "-" + a.text;
      a.num = -a.num;
    }
    return a;
  }

  // literal or parenthesized literal, possibly chained with ^ (right-assoc)
  Literal exponent_literal() {
    Literal base;
    if (accept(Tok::LParen)) {
      base = exponent_literal();
      expect(Tok::RParen, "')'");
    } else {
      base = signed_rational();
    }
    if (peek().kind == Tok::Caret) {
      take();
      Literal e = exponent_literal();  // right-assoc
      Literal r;
      if (base.value < 0.0 && std::floor(e.value) != e.value)
        throw ParseError("fractional power of negative literal", peek().pos);
      r.value = std::pow(base.value, e.value);
      r.text = base.text + "^" + e.text;
      r.has_exact = false;
      if (base.has_exact && e.has_exact && e.den == 1) {
        long long k = e.num;
        bool ok1 = false, ok2 = false;
        if (k >= 0) {
          long long num = ipow_checked(base.num, k, ok1);
          long long den = ipow_checked(base.den, k, ok2);
          if (ok1 && ok2 && den != 0) {
            r.has_exact = true;
            r.num = num;
            r.den = den;
          }
        } else if (base.num != 0) {
          long long num = ipow_checked(base.den, -k, ok1);
          long long den = ipow_checked(base.num, -k, ok2);
          if (ok1 && ok2 && den != 0) {
            if (den < 0) { den = -den; num = -num; }
            r.has_exact = true;
            r.num = num;
            r.den = den;
          }
        }
      }
      return r;
    }
    return base;
  }

  Condition condition() {
    // caller guarantees: Ident "x" then '<' | '<=' | Ident "in"
    take();  // x
    Condition c;
    const Token& op = take();
    if (op.kind == Tok::Less || op.kind == Tok::LessEq) {
      c.kind = op.kind == Tok::Less ? Condition::Kind::Less : Condition::Kind::LessEq;
      Literal b = signed_rational();
      c.a = b.value;
    } else {  // in
      c.kind = Condition::Kind::InRange;
      expect(Tok::LBracket, "'['");
      Literal lo = signed_rational();
      expect(Tok::Comma, "','");
      Literal hi = signed_rational();
      expect(Tok::RBracket, "']'");
      c.a = lo.value;
      c.b = hi.value;
    }
    return c;
  }

  bool branch_ahead() const {
    return peek().kind == Tok::LParen && peek(1).kind == Tok::Ident &&
           peek(1).text == "x" &&
           (peek(2).kind == Tok::Less || peek(2).kind == Tok::LessEq ||
            (peek(2).kind == Tok::Ident && peek(2).text == "in"));
  }

  NodePtr piecewise() {
    expect(Tok::LParen, "'('");
    auto n = make(NodeKind::Piecewise);
    auto mut = std::const_pointer_cast<Node>(n);
    bool got_else = false;
    while (true) {
      if (branch_ahead()) {
        take();  // (
        Condition c = condition();
        expect(Tok::Comma, "','");
        NodePtr e = additive();
        expect(Tok::RParen, "')'");
        mut->branches.emplace_back(c, std::move(e));
      } else {
        mut->otherwise = additive();
        got_else = true;
      }
      if (accept(Tok::Comma)) {
        if (got_else)
          throw ParseError("piecewise default branch must come last", peek().pos);
        continue;
      }
      break;
    }
    expect(Tok::RParen, "')'");
    if (!got_else)
      throw ParseError("piecewise needs a default branch", peek().pos);
    if (mut->branches.empty())
      throw ParseError("piecewise needs at least one condition branch", peek().pos);
    return n;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Num:
        return mk_lit(number_literal());
      case Tok::LParen: {
        take();
        NodePtr e = additive();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "x") {
          take();
          return make(NodeKind::Variable);
        }
        if (t.text == "abs" || t.text == "sqrt") {
          NodeKind k = t.text == "abs" ? NodeKind::Abs : NodeKind::Sqrt;
          take();
          expect(Tok::LParen, "'('");
          NodePtr a = additive();
          expect(Tok::RParen, "')'");
          auto n = std::make_shared<Node>();
          n->kind = k;
          n->lhs = std::move(a);
          return n;
        }
        if (t.text == "min" || t.text == "max") {
          NodeKind k = t.text == "min" ? NodeKind::Min : NodeKind::Max;
          take();
          expect(Tok::LParen, "'('");
          NodePtr a = additive();
          expect(Tok::Comma, "','");
          NodePtr b = additive();
          expect(Tok::RParen, "')'");
          return binary(k, std::move(a), std::move(b));
        }
        if (t.text == "piecewise") {
          take();
          return piecewise();
        }
        throw ParseError("unknown identifier '" + t.text + "'", t.pos);
      }
      default:
        throw ParseError("expected expression, got '" +
                             (t.kind == Tok::End ? "<end>" : t.text) + "'",
                         t.pos);
    }
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::Caret) {
      take();
      Literal e = exponent_literal();
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Pow;
      n->lhs = std::move(base);
      n->lit = std::move(e);
      return n;
    }
    return base;
  }

  NodePtr unary() {
    if (accept(Tok::Minus)) {
      NodePtr a = unary();
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Neg;
      n->lhs = std::move(a);
      return n;
    }
    return power();
  }

  NodePtr multiplicative() {
    NodePtr l = unary();
    while (true) {
      if (accept(Tok::Star)) {
        l = binary(NodeKind::Mul, std::move(l), unary());
      } else if (accept(Tok::Slash)) {
        l = binary(NodeKind::Div, std::move(l), unary());
      } else {
        return l;
      }
    }
  }

  NodePtr additive() {
    NodePtr l = multiplicative();
    while (true) {
      if (accept(Tok::Plus)) {
        l = binary(NodeKind::Add, std::move(l), multiplicative());
      } else if (accept(Tok::Minus)) {
        l = binary(NodeKind::Sub, std::move(l), multiplicative());
      } else {
        return l;
      }
    }
  }

  NodePtr run() {
    NodePtr e = additive();
    if (peek().kind != Tok::End)
      throw ParseError("trailing input '" + peek().text + "'", peek().pos);
    return e;
  }
};

bool cond_holds(const Condition& c, double x) {
  switch (c.kind) {
    case Condition::Kind::Less: return x < c.a;
    case Condition::Kind::LessEq: return x <= c.a;
    case Condition::Kind::InRange: return c.a <= x && x <= c.b;
  }
  return false;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_cond(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::Less: return "x < " + fmt_double(c.a);
    case Condition::Kind::LessEq: return "x <= " + fmt_double(c.a);
    case Condition::Kind::InRange:
      return "x in [" + fmt_double(c.a) + ", " + fmt_double(c.b) + "]";
  }
  return "";
}

}  // namespace

double eval_node(const Node& n, double x) {
  switch (n.kind) {
    case NodeKind::Literal: return n.lit.value;
    case NodeKind::Variable: return x;
    case NodeKind::Neg: return -eval_node(*n.lhs, x);
    case NodeKind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case NodeKind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case NodeKind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case NodeKind::Div: {
      double d = eval_node(*n.rhs, x);
      if (d == 0.0) throw EvalError("division by zero", print_node(n));
      return eval_node(*n.lhs, x) / d;
    }
    case NodeKind::Pow: {
      double b = eval_node(*n.lhs, x);
      double e = n.lit.value;
      if (b < 0.0 && std::floor(e) != e)
        throw EvalError("fractional power of negative base", print_node(n));
      if (b == 0.0 && e < 0.0)
        throw EvalError("zero raised to negative power", print_node(n));
      if (b == 0.0 && e == 0.0) return 1.0;
      return std::pow(b, e);
    }
    case NodeKind::Abs: return std::fabs(eval_node(*n.lhs, x));
    case NodeKind::Sqrt: {
      double a = eval_node(*n.lhs, x);
      if (a < 0.0) throw EvalError("square root of negative value", print_node(n));
      return std::sqrt(a);
    }
    case NodeKind::Min: return std::min(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case NodeKind::Max: return std::max(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case NodeKind::Piecewise: {
      for (const auto& [c, e] : n.branches)
        if (cond_holds(c, x)) return eval_node(*e, x);
      return eval_node(*n.otherwise, x);
    }
  }
  throw EvalError("corrupt expression node", "");
}

std::string print_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::Literal: return n.lit.text;
    case NodeKind::Variable: return "x";
    case NodeKind::Neg: return "(-" + print_node(*n.lhs) + ")";
    case NodeKind::Add:
      return "(" + print_node(*n.lhs) + " + " + print_node(*n.rhs) + ")";
    case NodeKind::Sub:
      return "(" + print_node(*n.lhs) + " - " + print_node(*n.rhs) + ")";
    case NodeKind::Mul:
      return "(" + print_node(*n.lhs) + " * " + print_node(*n.rhs) + ")";
    case NodeKind::Div:
      return "(" + print_node(*n.lhs) + " / " + print_node(*n.rhs) + ")";
    case NodeKind::Pow: {
      const std::string& t = n.lit.text;
      bool wrap = t.find('/') != std::string::npos ||
                  t.find('^') != std::string::npos || (!t.empty() && t[0] == '-');
      return "(" + print_node(*n.lhs) + " ^ " + (wrap ? "(" + t + ")" : t) + ")";
    }
    case NodeKind::Abs: return "abs(" + print_node(*n.lhs) + ")";
    case NodeKind::Sqrt: return "sqrt(" + print_node(*n.lhs) + ")";
    case NodeKind::Min:
      return "min(" + print_node(*n.lhs) + ", " + print_node(*n.rhs) + ")";
    case NodeKind::Max:
      return "max(" + print_node(*n.lhs) + ", " + print_node(*n.rhs) + ")";
    case NodeKind::Piecewise: {
      std::string s = "piecewise(";
      for (const auto& [c, e] : n.branches)
        s += "(" + print_cond(c) + ", " + print_node(*e) + "), ";
      s += print_node(*n.otherwise) + ")";
      return s;
    }
  }
  return "";
}

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  return Expr(p.run(), text);
}

double Expr::eval(double x) const {
  if (!root_) throw EvalError("empty expression", "");
  return eval_node(*root_, x);
}

std::string Expr::print() const { return root_ ? print_node(*root_) : ""; }

}  // namespace muntz::exprdsl
