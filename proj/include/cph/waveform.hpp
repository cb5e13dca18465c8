#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace cph {

// Closed-form source signal in t, built from constants, t, +, -, *, sin and cos.
// Immutable; copies share the expression tree.
class Waveform {
 public:
  struct Node;

  // Constant zero.
  Waveform();

  // Parses an expression such as "2*sin(3*t)". Throws ParseError with the
  // column (one-based, relative to `text`) of the offending character.
  static Waveform parse(std::string_view text);
  static Waveform constant(double value);

  double operator()(double t) const;

  // Symbolic d/dt with constant folding.
  Waveform derivative() const;

  // Canonical text with minimal parentheses; parse(to_string()) evaluates identically.
  std::string to_string() const;

  bool is_constant() const;

  friend bool operator==(const Waveform& a, const Waveform& b) { return a.to_string() == b.to_string(); }

 private:
  explicit Waveform(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

// Shortest decimal text that reads back to exactly `value`.
std::string format_real(double value);

}  // namespace cph
