#pragma once

// A small arithmetic expression language for user-supplied diffusivities and
// reaction terms.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | identifier | 'exp' '(' expr ')' | '(' expr ')'
//
// Identifiers u, u1 and u2 are state variables; any other identifier is a
// named parameter bound at evaluation (or compile) time.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavebound/error.hpp"

namespace wavebound {

using ParamMap = std::map<std::string, double>;

/// State-variable slot. `u` and `u1` share slot 0.
enum class Var : int { u1 = 0, u2 = 1 };

class Expr {
 public:
  enum class Kind { constant, variable, parameter, negate, add, sub, mul, div, pow, exp };

  struct Node {
    Kind kind;
    double value = 0.0;  // constant
    std::string name;    // variable / parameter spelling
    std::shared_ptr<const Node> lhs, rhs;
  };

  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static Expr constant(double v) { return Expr(make({Kind::constant, v, {}, {}, {}})); }
  static Expr identifier(std::string name) {
    const Kind k = is_state_variable(name) ? Kind::variable : Kind::parameter;
    return Expr(make({k, 0.0, std::move(name), {}, {}}));
  }
  static Expr unary(Kind k, Expr a) { return Expr(make({k, 0.0, {}, a.root_, {}})); }
  static Expr binary(Kind k, Expr a, Expr b) { return Expr(make({k, 0.0, {}, a.root_, b.root_})); }

  static bool is_state_variable(std::string_view name) {
    return name == "u" || name == "u1" || name == "u2";
  }

  bool empty() const noexcept { return root_ == nullptr; }
  const Node* root() const noexcept { return root_.get(); }

  /// Checked evaluation. Throws DomainError on division by zero or
  /// 0^negative, ValidationError on an unbound parameter.
  double evaluate(double u1, double u2, const ParamMap& params) const {
    if (!root_) throw DomainError("evaluate: empty expression");
    return eval(*root_, u1, u2, params);
  }
  double evaluate(double u, const ParamMap& params) const { return evaluate(u, 0.0, params); }

  /// Parameter names referenced by the expression.
  std::set<std::string> parameters() const {
    std::set<std::string> out;
    if (root_) collect(*root_, Kind::parameter, out);
    return out;
  }
  /// State-variable spellings referenced by the expression.
  std::set<std::string> variables() const {
    std::set<std::string> out;
    if (root_) collect(*root_, Kind::variable, out);
    return out;
  }

  /// Text form that parses back to an evaluation-equivalent tree.
  std::string render() const {
    if (!root_) return {};
    std::ostringstream os;
    os.precision(17);
    print(os, *root_);
    return os.str();
  }

 private:
  static std::shared_ptr<const Node> make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  static double eval(const Node& n, double u1, double u2, const ParamMap& params) {
    switch (n.kind) {
      case Kind::constant:
        return n.value;
      case Kind::variable:
        return n.name == "u2" ? u2 : u1;
      case Kind::parameter: {
        auto it = params.find(n.name);
        if (it == params.end()) throw ValidationError("unbound parameter '" + n.name + "'");
        return it->second;
      }
      case Kind::negate:
        return -eval(*n.lhs, u1, u2, params);
      case Kind::exp:
        return std::exp(eval(*n.lhs, u1, u2, params));
      default:
        break;
    }
    const double a = eval(*n.lhs, u1, u2, params);
    const double b = eval(*n.rhs, u1, u2, params);
    switch (n.kind) {
      case Kind::add: return a + b;
      case Kind::sub: return a - b;
      case Kind::mul: return a * b;
      case Kind::div:
        if (b == 0.0) throw DomainError("division by zero");
        return a / b;
      case Kind::pow:
        if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
        return std::pow(a, b);
      default:
        throw DomainError("corrupt expression node");
    }
  }

  static void collect(const Node& n, Kind k, std::set<std::string>& out) {
    if (n.kind == k) out.insert(n.name);
    if (n.lhs) collect(*n.lhs, k, out);
    if (n.rhs) collect(*n.rhs, k, out);
  }

  static void print(std::ostream& os, const Node& n) {
    switch (n.kind) {
      case Kind::constant:
        if (n.value < 0.0) {
          os << '(' << n.value << ')';
        } else {
          os << n.value;
        }
        return;
      case Kind::variable:
      case Kind::parameter:
        os << n.name;
        return;
      case Kind::negate:
        os << "(-";
        print(os, *n.lhs);
        os << ')';
        return;
      case Kind::exp:
        os << "exp(";
        print(os, *n.lhs);
        os << ')';
        return;
      default:
        break;
    }
    static constexpr char ops[] = {'+', '-', '*', '/', '^'};
    const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::add)];
    os << '(';
    print(os, *n.lhs);
    os << op;
    print(os, *n.rhs);
    os << ')';
  }

  std::shared_ptr<const Node> root_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("empty expression", pos_);
    Expr e = expression();
    skip_ws();
    if (pos_ < src_.size()) {
      if (src_[pos_] == ')') throw SyntaxError("unbalanced ')'", pos_);
      throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Expr::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Expr::Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Expr::Kind::negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Expr::Kind::pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(src_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        if (name != "exp") throw SyntaxError("unknown function '" + name + "'", start);
        ++pos_;
        Expr arg = expression();
        if (!accept(')')) throw SyntaxError("expected ')'", pos_);
        return Expr::unary(Expr::Kind::exp, arg);
      }
      return Expr::identifier(std::move(name));
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::string rest(src_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) throw SyntaxError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return Expr::constant(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `source` into an expression tree. Throws SyntaxError with the
/// offending position.
inline Expr parse_expr(std::string_view source) { return detail::Parser(source).parse(); }

/// Flat postfix program compiled from an Expr with all parameters bound.
/// Unchecked IEEE evaluation; used on hot paths (quadrature, time stepping).
class Program {
 public:
  Program() = default;

  Program(const Expr& e, const ParamMap& params) {
    if (e.empty()) throw DomainError("compile: empty expression");
    int depth = 0;
    emit(*e.root(), params, depth);
    if (max_depth_ > kMaxStack) throw DomainError("compile: expression nests too deeply");
  }

  double operator()(double u1, double u2 = 0.0) const {
    double stack[kMaxStack];
    stack[0] = 0.0;
    int top = -1;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::push: stack[++top] = in.value; break;
        case Op::load_u1: stack[++top] = u1; break;
        case Op::load_u2: stack[++top] = u2; break;
        case Op::neg: stack[top] = -stack[top]; break;
        case Op::exp: stack[top] = std::exp(stack[top]); break;
        case Op::powi: stack[top] = ipow(stack[top], static_cast<int>(in.value)); break;
        case Op::add: --top; stack[top] += stack[top + 1]; break;
        case Op::sub: --top; stack[top] -= stack[top + 1]; break;
        case Op::mul: --top; stack[top] *= stack[top + 1]; break;
        case Op::div: --top; stack[top] /= stack[top + 1]; break;
        case Op::pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
      }
    }
    return stack[0];
  }

  bool is_constant() const noexcept { return code_.size() == 1 && code_[0].op == Op::push; }
  bool empty() const noexcept { return code_.empty(); }

 private:
  static constexpr int kMaxStack = 64;
  enum class Op { push, load_u1, load_u2, neg, exp, powi, add, sub, mul, div, pow };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  static double ipow(double x, int n) {
    const bool inv = n < 0;
    unsigned k = static_cast<unsigned>(inv ? -n : n);
    double r = 1.0;
    while (k) {
      if (k & 1u) r *= x;
      x *= x;
      k >>= 1u;
    }
    return inv ? 1.0 / r : r;
  }

  // Returns the folded value when the subtree is constant.
  std::optional<double> emit(const Expr::Node& n, const ParamMap& params, int& depth) {
    using K = Expr::Kind;
    const std::size_t mark = code_.size();
    const int depth_mark = depth;
    auto push_const = [&](double v) {
      code_.resize(mark);
      depth = depth_mark;
      code_.push_back({Op::push, v});
      bump(depth);
      return std::optional<double>(v);
    };
    switch (n.kind) {
      case K::constant:
        return push_const(n.value);
      case K::parameter: {
        auto it = params.find(n.name);
        if (it == params.end()) throw ValidationError("unbound parameter '" + n.name + "'");
        return push_const(it->second);
      }
      case K::variable:
        code_.push_back({n.name == "u2" ? Op::load_u2 : Op::load_u1});
        bump(depth);
        return std::nullopt;
      case K::negate:
      case K::exp: {
        auto a = emit(*n.lhs, params, depth);
        if (a) return push_const(n.kind == K::negate ? -*a : std::exp(*a));
        code_.push_back({n.kind == K::negate ? Op::neg : Op::exp});
        return std::nullopt;
      }
      default:
        break;
    }
    auto a = emit(*n.lhs, params, depth);
    const std::size_t rhs_mark = code_.size();
    const int rhs_depth = depth;
    auto b = emit(*n.rhs, params, depth);
    if (a && b) {
      switch (n.kind) {
        case K::add: return push_const(*a + *b);
        case K::sub: return push_const(*a - *b);
        case K::mul: return push_const(*a * *b);
        case K::div: return push_const(*a / *b);
        case K::pow: return push_const(std::pow(*a, *b));
        default: break;
      }
    }
    if (n.kind == K::pow && b && std::nearbyint(*b) == *b && std::abs(*b) <= 64.0) {
      code_.resize(rhs_mark);
      depth = rhs_depth;
      code_.push_back({Op::powi, *b});
      return std::nullopt;
    }
    static constexpr Op ops[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
    code_.push_back({ops[static_cast<int>(n.kind) - static_cast<int>(K::add)]});
    --depth;
    return std::nullopt;
  }

  void bump(int& depth) {
    ++depth;
    if (depth > max_depth_) max_depth_ = depth;
  }

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace wavebound
