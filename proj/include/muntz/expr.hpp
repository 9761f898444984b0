// Small expression language for functions of one variable on [0,1]:
// literals, x, + - * / ^, abs, sqrt, min, max, piecewise. Immutable AST,
// pure evaluation, canonical printer.
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace muntz::exprdsl {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off)
      : std::runtime_error(what), offset(off) {}
};

struct EvalError : std::runtime_error {
  std::string subexpr;  // canonical print of the offending node
  EvalError(const std::string& what, std::string sub)
      : std::runtime_error(what), subexpr(std::move(sub)) {}
};

// A numeric literal keeps its source text so printing round-trips exactly
// and so exponents can later be lifted into exact rational lattices.
struct Literal {
  double value = 0.0;
  std::string text;
  // exact p/q when the literal (or literal power chain) is exactly rational
  bool has_exact = false;
  long long num = 0;
  long long den = 1;
};

enum class NodeKind {
  Literal,
  Variable,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Abs,
  Sqrt,
  Min,
  Max,
  Piecewise,
};

struct Condition {
  enum class Kind { Less, LessEq, InRange } kind = Kind::Less;
  double a = 0.0;  // Less/LessEq: bound; InRange: lower
  double b = 0.0;  // InRange: upper
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  Literal lit;                 // Literal
  NodePtr lhs, rhs;            // unary: lhs only; binary: both; Pow: lhs ^ lit
  std::vector<std::pair<Condition, NodePtr>> branches;  // Piecewise
  NodePtr otherwise;                                    // Piecewise default
};

class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);

  double eval(double x) const;
  std::string print() const;
  const NodePtr& root() const { return root_; }
  bool empty() const { return !root_; }

  // original source (handy for reports)
  const std::string& source() const { return source_; }

  explicit Expr(NodePtr root, std::string source = "")
      : root_(std::move(root)), source_(std::move(source)) {}

 private:
  NodePtr root_;
  std::string source_;
};

double eval_node(const Node& n, double x);
std::string print_node(const Node& n);

}  // namespace muntz::exprdsl
