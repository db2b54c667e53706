#pragma once

// A small arithmetic language for f(t) and K(x, t).
//
//   expr  := cmp
//   cmp   := add (("<" | "<=" | ">" | ">=" | "==" | "!=") add)?
//   add   := mul (("+" | "-") mul)*
//   mul   := unary (("*" | "/") unary)*
//   unary := "-" unary | pow
//   pow   := atom ("^" unary)?
//   atom  := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
//
// Variables are t and x. Functions: sin cos exp log abs sgn sqrt floor (one
// argument), min max (two or more), if(cond, then, else). Comparisons yield
// 1 or 0 and may only appear inside the condition of an if.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tscale::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string excerpt);

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }
  const std::string& excerpt() const { return excerpt_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string excerpt_;
};

// Unbound variable, domain violation of log/sqrt/pow, or division by zero.
class EvalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Op : std::uint8_t {
  Number,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Call,
  If,
};

enum class Fn : std::uint8_t { Sin, Cos, Exp, Log, Abs, Sgn, Sqrt, Floor, Min, Max };

enum class Var : std::uint8_t { T = 0, X = 1 };

struct Node {
  Op op = Op::Number;
  double value = 0.0;
  Var var = Var::T;
  Fn fn = Fn::Sin;
  std::size_t offset = 0;
  std::vector<Node> args;
};

bool same_tree(const Node& a, const Node& b);

using Bindings = std::map<std::string, double, std::less<>>;

class Expr {
 public:
  static Expr parse(std::string_view src);

  double eval(const Bindings& bindings) const;

  // Fast path for the two variables; an unbound variable that the tree uses
  // raises EvalError.
  double eval_tx(double t, double x) const;
  double eval_t(double t) const;

  std::set<std::string> free_vars() const;
  bool uses(Var v) const { return (vars_ & (1u << static_cast<unsigned>(v))) != 0; }

  // Canonical minimal-parenthesis rendering; parse(render()) reproduces the tree.
  std::string render() const;

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

 private:
  Expr(std::shared_ptr<const Node> root, unsigned vars, std::string source)
      : root_(std::move(root)), vars_(vars), source_(std::move(source)) {}

  std::shared_ptr<const Node> root_;
  unsigned vars_ = 0;
  std::string source_;
};

inline Expr parse(std::string_view src) { return Expr::parse(src); }
inline double eval(const Expr& e, const Bindings& b) { return e.eval(b); }
inline std::set<std::string> free_vars(const Expr& e) { return e.free_vars(); }
inline std::string render(const Expr& e) { return e.render(); }

}  // namespace tscale::expr
