#include "linf/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace linf {

struct Expression::Node {
  enum class Kind { Number, Variable, Norm, Unary, Binary, Call1, Call2 };
  Kind kind = Kind::Number;
  double number = 0.0;
  int variable = 0;
  char op = 0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(const Vec& x) const {
    switch (kind) {
      case Kind::Number: return number;
      case Kind::Variable: return x(variable);
      case Kind::Norm: return x.norm();
      case Kind::Unary: return -lhs->eval(x);
      case Kind::Call1: return fn1(lhs->eval(x));
      case Kind::Call2: return fn2(lhs->eval(x), rhs->eval(x));
      case Kind::Binary: {
        double a = lhs->eval(x);
        double b = rhs->eval(x);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          default: return std::pow(a, b);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

double sign_of(double v) { return static_cast<double>((v > 0) - (v < 0)); }
double min_of(double a, double b) { return std::min(a, b); }
double max_of(double a, double b) { return std::max(a, b); }
double fabs_of(double v) { return std::fabs(v); }
double sqrt_of(double v) { return std::sqrt(v); }
double exp_of(double v) { return std::exp(v); }
double log_of(double v) { return std::log(v); }
double sin_of(double v) { return std::sin(v); }
double cos_of(double v) { return std::cos(v); }
double tan_of(double v) { return std::tan(v); }
double atan_of(double v) { return std::atan(v); }
double floor_of(double v) { return std::floor(v); }
double ceil_of(double v) { return std::ceil(v); }
double atan2_of(double a, double b) { return std::atan2(a, b); }
double pow_of(double a, double b) { return std::pow(a, b); }

class Parser {
 public:
  Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + text_ + "': " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = binary('+', n, term());
      else if (accept('-')) n = binary('-', n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary('*', n, unary());
      else if (accept('/')) n = binary('/', n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Unary;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left operand.
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->number = v;
    return n;
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);

    auto n = std::make_shared<Node>();
    if (name == "pi") {
      n->number = std::numbers::pi;
      return n;
    }
    if (name == "e") {
      n->number = std::numbers::e;
      return n;
    }
    if (name == "r") {
      n->kind = Node::Kind::Norm;
      return n;
    }
    int var = -1;
    if (name == "x") var = 0;
    else if (name == "y") var = 1;
    else if (name == "z") var = 2;
    else if (name == "w") var = 3;
    else if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '4')
      var = name[1] - '1';
    if (var >= 0) {
      if (var >= dim_) fail("variable '" + name + "' exceeds dimension " + std::to_string(dim_));
      n->kind = Node::Kind::Variable;
      n->variable = var;
      return n;
    }

    static const std::vector<std::pair<std::string, double (*)(double)>> unary_fns = {
        {"abs", fabs_of},   {"sqrt", sqrt_of}, {"exp", exp_of},   {"log", log_of},
        {"sin", sin_of},    {"cos", cos_of},   {"tan", tan_of},   {"atan", atan_of},
        {"floor", floor_of}, {"ceil", ceil_of}, {"sign", sign_of}};
    static const std::vector<std::pair<std::string, double (*)(double, double)>> binary_fns = {
        {"min", min_of}, {"max", max_of}, {"atan2", atan2_of}, {"pow", pow_of}};

    for (const auto& [fname, fn] : unary_fns) {
      if (fname != name) continue;
      if (!accept('(')) fail("expected '(' after " + name);
      n->kind = Node::Kind::Call1;
      n->fn1 = fn;
      n->lhs = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    for (const auto& [fname, fn] : binary_fns) {
      if (fname != name) continue;
      if (!accept('(')) fail("expected '(' after " + name);
      n->kind = Node::Kind::Call2;
      n->fn2 = fn;
      n->lhs = expr();
      if (!accept(',')) fail("expected ','");
      n->rhs = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text, dim).parse();
  return e;
}

double Expression::operator()(const Vec& x) const { return root_->eval(x); }

}  // namespace linf
