#include "tscale/expr.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace tscale::expr {
namespace {

std::string excerpt_at(std::string_view src, std::size_t offset) {
  const std::size_t from = offset > 10 ? offset - 10 : 0;
  std::string out(src.substr(from, 20));
  out += "\n";
  out += std::string(offset - from, ' ');
  out += "^";
  return out;
}

struct FnInfo {
  std::string_view name;
  Fn fn;
  int min_args;
  int max_args;
};

constexpr FnInfo kFunctions[] = {
    {"sin", Fn::Sin, 1, 1},   {"cos", Fn::Cos, 1, 1},   {"exp", Fn::Exp, 1, 1},
    {"log", Fn::Log, 1, 1},   {"abs", Fn::Abs, 1, 1},   {"sgn", Fn::Sgn, 1, 1},
    {"sqrt", Fn::Sqrt, 1, 1}, {"floor", Fn::Floor, 1, 1}, {"min", Fn::Min, 2, 64},
    {"max", Fn::Max, 2, 64},
};

std::string_view fn_name(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Node parse_all() {
    Node n = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return n;
  }

  unsigned vars() const { return vars_; }

 private:
  [[noreturn]] void fail(std::string expected, std::size_t at) const {
    throw ParseError(at, std::move(expected), excerpt_at(src_, at));
  }
  [[noreturn]] void fail(std::string expected) const { fail(std::move(expected), pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return src_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("'" + std::string(tok) + "'");
  }

  Node parse_expr() { return parse_cmp(); }

  Node parse_cmp() {
    Node lhs = parse_add();
    skip_ws();
    const std::size_t at = pos_;
    Op op;
    if (accept("<=")) {
      op = Op::Le;
    } else if (accept(">=")) {
      op = Op::Ge;
    } else if (accept("==")) {
      op = Op::Eq;
    } else if (accept("!=")) {
      op = Op::Ne;
    } else if (accept("<")) {
      op = Op::Lt;
    } else if (accept(">")) {
      op = Op::Gt;
    } else {
      return lhs;
    }
    if (condition_depth_ == 0) fail("comparison only inside an if() condition", at);
    Node rhs = parse_add();
    Node n{.op = op, .offset = at, .args = {}};
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return n;
  }

  Node parse_add() {
    Node lhs = parse_mul();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      Op op;
      if (accept("+")) {
        op = Op::Add;
      } else if (accept("-")) {
        op = Op::Sub;
      } else {
        return lhs;
      }
      Node n{.op = op, .offset = at, .args = {}};
      n.args.push_back(std::move(lhs));
      n.args.push_back(parse_mul());
      lhs = std::move(n);
    }
  }

  Node parse_mul() {
    Node lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      Op op;
      if (accept("*")) {
        op = Op::Mul;
      } else if (accept("/")) {
        op = Op::Div;
      } else {
        return lhs;
      }
      Node n{.op = op, .offset = at, .args = {}};
      n.args.push_back(std::move(lhs));
      n.args.push_back(parse_unary());
      lhs = std::move(n);
    }
  }

  Node parse_unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept("-")) {
      Node n{.op = Op::Neg, .offset = at, .args = {}};
      n.args.push_back(parse_unary());
      return n;
    }
    return parse_pow();
  }

  Node parse_pow() {
    Node base = parse_atom();
    skip_ws();
    const std::size_t at = pos_;
    if (!accept("^")) return base;
    Node n{.op = Op::Pow, .offset = at, .args = {}};
    n.args.push_back(std::move(base));
    n.args.push_back(parse_unary());
    return n;
  }

  Node parse_atom() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) fail("expression");
    const char c = src_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (accept("(")) {
      Node n = parse_expr();
      expect(")");
      return n;
    }
    fail("expression", at);
  }

  Node parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t from = end;
      while (end < src_.size() && src_[end] >= '0' && src_[end] <= '9') ++end;
      return end > from;
    };
    bool any = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      any = digits() || any;
    }
    if (!any) fail("number", at);
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
      if (!digits()) end = save;
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + at, src_.data() + end, v);
    if (res.ec != std::errc{} || res.ptr != src_.data() + end || !std::isfinite(v)) {
      fail("finite number", at);
    }
    pos_ = end;
    return Node{.op = Op::Number, .value = v, .offset = at, .args = {}};
  }

  Node parse_ident() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
      ++end;
    }
    const std::string_view name = src_.substr(at, end - at);
    pos_ = end;
    if (!peek("(")) {
      if (name == "t") {
        vars_ |= 1u;
        return Node{.op = Op::Var, .var = Var::T, .offset = at, .args = {}};
      }
      if (name == "x") {
        vars_ |= 2u;
        return Node{.op = Op::Var, .var = Var::X, .offset = at, .args = {}};
      }
      fail("variable t or x", at);
    }
    expect("(");
    if (name == "if") {
      Node n{.op = Op::If, .offset = at, .args = {}};
      ++condition_depth_;
      n.args.push_back(parse_expr());
      --condition_depth_;
      expect(",");
      n.args.push_back(parse_expr());
      expect(",");
      n.args.push_back(parse_expr());
      expect(")");
      return n;
    }
    const FnInfo* info = nullptr;
    for (const auto& f : kFunctions) {
      if (f.name == name) info = &f;
    }
    if (!info) fail("known function name", at);
    Node n{.op = Op::Call, .fn = info->fn, .offset = at, .args = {}};
    n.args.push_back(parse_expr());
    while (accept(",")) n.args.push_back(parse_expr());
    expect(")");
    const int argc = static_cast<int>(n.args.size());
    if (argc < info->min_args || argc > info->max_args) {
      fail(std::string(name) + " with " + std::to_string(info->min_args) +
               (info->max_args > info->min_args ? " or more" : "") + " argument(s)",
           at);
    }
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int condition_depth_ = 0;
  unsigned vars_ = 0;
};

struct Env {
  double vals[2];
  unsigned bound;
};

double eval_node(const Node& n, const Env& env) {
  switch (n.op) {
    case Op::Number:
      return n.value;
    case Op::Var: {
      const auto i = static_cast<unsigned>(n.var);
      if (!(env.bound & (1u << i))) {
        throw EvalError(std::string("unbound variable ") + (n.var == Var::T ? "t" : "x"));
      }
      return env.vals[i];
    }
    case Op::Neg:
      return -eval_node(n.args[0], env);
    case Op::Add:
      return eval_node(n.args[0], env) + eval_node(n.args[1], env);
    case Op::Sub:
      return eval_node(n.args[0], env) - eval_node(n.args[1], env);
    case Op::Mul:
      return eval_node(n.args[0], env) * eval_node(n.args[1], env);
    case Op::Div: {
      const double num = eval_node(n.args[0], env);
      const double den = eval_node(n.args[1], env);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Op::Pow: {
      const double r = std::pow(eval_node(n.args[0], env), eval_node(n.args[1], env));
      if (std::isnan(r)) throw EvalError("pow domain error");
      return r;
    }
    case Op::Lt:
      return eval_node(n.args[0], env) < eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::Le:
      return eval_node(n.args[0], env) <= eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::Gt:
      return eval_node(n.args[0], env) > eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::Ge:
      return eval_node(n.args[0], env) >= eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::Eq:
      return eval_node(n.args[0], env) == eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::Ne:
      return eval_node(n.args[0], env) != eval_node(n.args[1], env) ? 1.0 : 0.0;
    case Op::If:
      return eval_node(n.args[0], env) != 0.0 ? eval_node(n.args[1], env) : eval_node(n.args[2], env);
    case Op::Call:
      break;
  }
  if (n.fn == Fn::Min || n.fn == Fn::Max) {
    double r = eval_node(n.args[0], env);
    for (std::size_t i = 1; i < n.args.size(); ++i) {
      const double v = eval_node(n.args[i], env);
      r = n.fn == Fn::Min ? std::min(r, v) : std::max(r, v);
    }
    return r;
  }
  const double a = eval_node(n.args[0], env);
  switch (n.fn) {
    case Fn::Sin:
      return std::sin(a);
    case Fn::Cos:
      return std::cos(a);
    case Fn::Exp:
      return std::exp(a);
    case Fn::Log:
      if (!(a > 0.0)) throw EvalError("log domain error");
      return std::log(a);
    case Fn::Abs:
      return std::fabs(a);
    case Fn::Sgn:
      return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    case Fn::Sqrt:
      if (a < 0.0) throw EvalError("sqrt domain error");
      return std::sqrt(a);
    case Fn::Floor:
      return std::floor(a);
    default:
      return a;
  }
}

// Binding strength used by the printer: cmp 1, add 2, mul 3, unary 4, pow 5, atom 6.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      return 1;
    case Op::Add:
    case Op::Sub:
      return 2;
    case Op::Mul:
    case Op::Div:
      return 3;
    case Op::Neg:
      return 4;
    case Op::Pow:
      return 5;
    default:
      return 6;
  }
}

void render_node(const Node& n, int need, std::string& out);

void render_child(const Node& n, int need, std::string& out) {
  if (precedence(n) < need) {
    out += '(';
    render_node(n, 0, out);
    out += ')';
  } else {
    render_node(n, need, out);
  }
}

std::string_view op_text(Op op) {
  switch (op) {
    case Op::Add:
      return " + ";
    case Op::Sub:
      return " - ";
    case Op::Mul:
      return "*";
    case Op::Div:
      return "/";
    case Op::Lt:
      return " < ";
    case Op::Le:
      return " <= ";
    case Op::Gt:
      return " > ";
    case Op::Ge:
      return " >= ";
    case Op::Eq:
      return " == ";
    case Op::Ne:
      return " != ";
    default:
      return "?";
  }
}

void render_node(const Node& n, int /*need*/, std::string& out) {
  switch (n.op) {
    case Op::Number: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, res.ptr);
      return;
    }
    case Op::Var:
      out += n.var == Var::T ? "t" : "x";
      return;
    case Op::Neg:
      out += '-';
      render_child(n.args[0], 4, out);
      return;
    case Op::Add:
    case Op::Sub:
      render_child(n.args[0], 2, out);
      out += op_text(n.op);
      render_child(n.args[1], 3, out);
      return;
    case Op::Mul:
    case Op::Div:
      render_child(n.args[0], 3, out);
      out += op_text(n.op);
      render_child(n.args[1], 4, out);
      return;
    case Op::Pow:
      render_child(n.args[0], 6, out);
      out += '^';
      render_child(n.args[1], 4, out);
      return;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      render_child(n.args[0], 2, out);
      out += op_text(n.op);
      render_child(n.args[1], 2, out);
      return;
    case Op::If:
    case Op::Call: {
      out += n.op == Op::If ? std::string_view("if") : fn_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        render_node(n.args[i], 0, out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::string expected, std::string excerpt)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": expected " + expected +
                         "\n" + excerpt),
      offset_(offset),
      expected_(std::move(expected)),
      excerpt_(std::move(excerpt)) {}

bool same_tree(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  if (a.op == Op::Number && a.value != b.value) return false;
  if (a.op == Op::Var && a.var != b.var) return false;
  if (a.op == Op::Call && a.fn != b.fn) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(a.args[i], b.args[i])) return false;
  }
  return true;
}

Expr Expr::parse(std::string_view src) {
  Parser p(src);
  Node root = p.parse_all();
  return Expr(std::make_shared<const Node>(std::move(root)), p.vars(), std::string(src));
}

double Expr::eval(const Bindings& bindings) const {
  Env env{{0.0, 0.0}, 0u};
  if (auto it = bindings.find("t"); it != bindings.end()) {
    env.vals[0] = it->second;
    env.bound |= 1u;
  }
  if (auto it = bindings.find("x"); it != bindings.end()) {
    env.vals[1] = it->second;
    env.bound |= 2u;
  }
  return eval_node(*root_, env);
}

double Expr::eval_tx(double t, double x) const { return eval_node(*root_, Env{{t, x}, 3u}); }

double Expr::eval_t(double t) const { return eval_node(*root_, Env{{t, 0.0}, 1u}); }

std::set<std::string> Expr::free_vars() const {
  std::set<std::string> out;
  if (uses(Var::T)) out.insert("t");
  if (uses(Var::X)) out.insert("x");
  return out;
}

std::string Expr::render() const {
  std::string out;
  render_node(*root_, 0, out);
  return out;
}

}  // namespace tscale::expr
