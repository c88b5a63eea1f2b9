// Recursive-descent parser for the function expression language.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | variable | call | '(' expr ')'
//   call   := name '(' expr (',' expr)* ')'

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>

#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"

namespace covlab {

namespace {

enum class Op { constant, variable, add, sub, mul, div, pow, neg, call };

struct Node {
  Op op = Op::constant;
  double value = 0.0;
  std::size_t var = 0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};
using NodePtr = std::shared_ptr<const Node>;

double eval(const Node& n, Point x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x[n.var];
    case Op::add: return eval(*n.args[0], x) + eval(*n.args[1], x);
    case Op::sub: return eval(*n.args[0], x) - eval(*n.args[1], x);
    case Op::mul: return eval(*n.args[0], x) * eval(*n.args[1], x);
    case Op::div: return eval(*n.args[0], x) / eval(*n.args[1], x);
    case Op::pow: return std::pow(eval(*n.args[0], x), eval(*n.args[1], x));
    case Op::neg: return -eval(*n.args[0], x);
    case Op::call: {
      const double a = eval(*n.args[0], x);
      const std::string& f = n.name;
      if (f == "exp") return std::exp(a);
      if (f == "ln" || f == "log") return std::log(a);
      if (f == "abs") return std::abs(a);
      if (f == "sqrt") return std::sqrt(a);
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "sinh") return std::sinh(a);
      if (f == "cosh") return std::cosh(a);
      if (f == "tanh") return std::tanh(a);
      double r = a;
      for (std::size_t k = 1; k < n.args.size(); ++k) {
        const double b = eval(*n.args[k], x);
        r = f == "min" ? std::min(r, b) : std::max(r, b);
      }
      return r;
    }
  }
  return NAN;
}

class Parser {
 public:
  Parser(const std::string& text, std::size_t dim) : s_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return n;
  }
  std::size_t max_var() const { return max_var_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expr", msg + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (accept('+')) l = make(Op::add, {l, term()});
      else if (accept('-')) l = make(Op::sub, {l, term()});
      else return l;
    }
  }
  NodePtr term() {
    NodePtr l = unary();
    for (;;) {
      if (accept('*')) l = make(Op::mul, {l, unary()});
      else if (accept('/')) l = make(Op::div, {l, unary()});
      else return l;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Op::pow, {base, unary()});
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        fail("malformed number");
      }
      pos_ += used;
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x" || (id.size() > 1 && id[0] == 'x' && std::all_of(id.begin() + 1, id.end(), ::isdigit))) {
        const std::size_t k = id == "x" ? 1 : std::stoul(id.substr(1));
        if (k == 0) fail("variables are numbered from x1");
        max_var_ = std::max(max_var_, k);
        if (dim_ != 0 && k > dim_) fail("variable " + id + " exceeds dimension " + std::to_string(dim_));
        auto n = std::make_shared<Node>();
        n->op = Op::variable;
        n->var = k - 1;
        return n;
      }
      if (id == "pi" || id == "e") {
        auto n = std::make_shared<Node>();
        n->value = id == "pi" ? M_PI : M_E;
        return n;
      }
      static const std::vector<std::string> unary_fns = {"exp", "ln", "log", "abs", "sqrt", "sin",
                                                         "cos", "sinh", "cosh", "tanh"};
      const bool is_unary = std::find(unary_fns.begin(), unary_fns.end(), id) != unary_fns.end();
      const bool is_nary = id == "min" || id == "max";
      if (!is_unary && !is_nary) fail("unknown identifier '" + id + "'");
      if (!accept('(')) fail("expected '(' after " + id);
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')'");
      if (is_unary && args.size() != 1) fail(id + " takes one argument");
      if (is_nary && args.size() < 2) fail(id + " takes at least two arguments");
      auto n = std::make_shared<Node>();
      n->op = Op::call;
      n->name = id;
      n->args = std::move(args);
      return n;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::size_t dim_;
  std::size_t pos_ = 0;
  std::size_t max_var_ = 0;
};

}  // namespace

FunctionSpec parse_expression(const std::string& text, std::size_t dim) {
  Parser p(text, dim);
  NodePtr root = p.parse();
  return FunctionSpec(
      dim, [root](Point x) { return eval(*root, x); }, {}, {}, text, json{{"expr", text}});
}

std::size_t expression_dimension(const std::string& text) {
  Parser p(text, 0);
  p.parse();
  return std::max<std::size_t>(1, p.max_var());
}

}  // namespace covlab
