#include "cph/waveform.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <system_error>

#include "cph/error.hpp"

namespace cph {

struct Waveform::Node {
  enum class Op { Const, Time, Add, Sub, Mul, Neg, Sin, Cos };
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Op = Waveform::Node::Op;
using NodePtr = std::shared_ptr<const Waveform::Node>;

NodePtr make_const(double v) { return std::make_shared<Waveform::Node>(Waveform::Node{Op::Const, v, nullptr, nullptr}); }
NodePtr make_time() { return std::make_shared<Waveform::Node>(Waveform::Node{Op::Time, 0.0, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr make_unary(Op op, NodePtr a) {
  if (op == Op::Neg) {
    if (a->op == Op::Const) return make_const(-a->value);
    if (a->op == Op::Neg) return a->lhs;
  }
  if (a->op == Op::Const && op == Op::Sin) return make_const(std::sin(a->value));
  if (a->op == Op::Const && op == Op::Cos) return make_const(std::cos(a->value));
  return std::make_shared<Waveform::Node>(Waveform::Node{op, 0.0, std::move(a), nullptr});
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary(Op::Neg, b);
      if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return make_unary(Op::Neg, b);
      if (is_const(b, -1.0)) return make_unary(Op::Neg, a);
      if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
      break;
    default:
      break;
  }
  return std::make_shared<Waveform::Node>(Waveform::Node{op, 0.0, std::move(a), std::move(b)});
}

double eval(const Waveform::Node& n, double t) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Time: return t;
    case Op::Add: return eval(*n.lhs, t) + eval(*n.rhs, t);
    case Op::Sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
    case Op::Mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
    case Op::Neg: return -eval(*n.lhs, t);
    case Op::Sin: return std::sin(eval(*n.lhs, t));
    case Op::Cos: return std::cos(eval(*n.lhs, t));
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Time: return make_const(1.0);
    case Op::Add: return make_binary(Op::Add, diff(n->lhs), diff(n->rhs));
    case Op::Sub: return make_binary(Op::Sub, diff(n->lhs), diff(n->rhs));
    case Op::Mul:
      return make_binary(Op::Add, make_binary(Op::Mul, diff(n->lhs), n->rhs),
                         make_binary(Op::Mul, n->lhs, diff(n->rhs)));
    case Op::Neg: return make_unary(Op::Neg, diff(n->lhs));
    case Op::Sin: return make_binary(Op::Mul, make_unary(Op::Cos, n->lhs), diff(n->lhs));
    case Op::Cos: return make_unary(Op::Neg, make_binary(Op::Mul, make_unary(Op::Sin, n->lhs), diff(n->lhs)));
  }
  return make_const(0.0);
}

// Binding strength used for parenthesisation: sums 1, products 2, unary minus 3, atoms 4.
int precedence(const Waveform::Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul: return 2;
    case Op::Neg: return 3;
    default: return 4;
  }
}

void print(const Waveform::Node& n, std::string& out);

void print_child(const Waveform::Node& child, int min_prec, std::string& out) {
  // Negative literals print with a sign, so they bind like unary minus.
  int prec = precedence(child);
  if (child.op == Op::Const && std::signbit(child.value)) prec = 3;
  if (prec < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Waveform::Node& n, std::string& out) {
  switch (n.op) {
    case Op::Const: out += format_real(n.value); break;
    case Op::Time: out += 't'; break;
    case Op::Add:
      print_child(*n.lhs, 1, out);
      out += '+';
      print_child(*n.rhs, 2, out);
      break;
    case Op::Sub:
      print_child(*n.lhs, 1, out);
      out += '-';
      print_child(*n.rhs, 2, out);
      break;
    case Op::Mul:
      print_child(*n.lhs, 2, out);
      out += '*';
      print_child(*n.rhs, 4, out);
      break;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, 4, out);
      break;
    case Op::Sin:
    case Op::Cos:
      out += n.op == Op::Sin ? "sin(" : "cos(";
      print(*n.lhs, out);
      out += ')';
      break;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("waveform: " + what, 0, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_binary(Op::Add, lhs, term());
      else if (accept('-')) lhs = make_binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (accept('*')) lhs = make_binary(Op::Mul, lhs, unary());
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::Neg, unary());
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "t") return make_time();
      if (word == "sin" || word == "cos") {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make_unary(word == "sin" ? Op::Sin : Op::Cos, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_const(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Waveform::Waveform() : root_(make_const(0.0)) {}

Waveform Waveform::parse(std::string_view text) { return Waveform(Parser(text).parse()); }

Waveform Waveform::constant(double value) { return Waveform(make_const(value)); }

double Waveform::operator()(double t) const { return eval(*root_, t); }

Waveform Waveform::derivative() const { return Waveform(diff(root_)); }

std::string Waveform::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool Waveform::is_constant() const { return root_->op == Op::Const; }

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace cph
