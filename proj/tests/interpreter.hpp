#pragma once

// Minimal evaluator for the statements of a generated residual function:
// constants, source lambdas, v[]/i[] port assignments and f[] residuals.

#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oracle {

using Eigen::VectorXd;

// Evaluates the statements of a generated residual function for given t, x, x'.
class Interpreter {
 public:
  Interpreter(const std::string& text, double t, const VectorXd& x, const VectorXd& xd) : t_(t), x_(x), xd_(xd) {
    const std::regex constant(R"(const double (\w+) = ([^;]+);)");
    const std::regex lambda(R"(const auto (\w+) = \[\]\(T t\) -> T \{return (.*)\;\};)");
    const std::regex assign(R"(([vif])\[(\d+)\] = ([^;]+);)");
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      std::smatch m;
      if (std::regex_search(line, m, constant)) {
        values_[m[1]] = eval(m[2]);
      } else if (std::regex_search(line, m, lambda)) {
        lambdas_[m[1]] = m[2];
      } else {
        for (std::sregex_iterator it(line.begin(), line.end(), assign), end; it != end; ++it) {
          const auto& am = *it;
          arrays_[am[1].str()][std::stoi(am[2])] = eval(am[3]);
        }
      }
    }
  }

  double at(const std::string& array, int k) const { return arrays_.at(array).at(k); }

 private:
  double eval(const std::string& expr) {
    src_ = expr;
    pos_ = 0;
    const double v = sum();
    skip();
    if (pos_ != src_.size()) throw std::runtime_error("trailing text in " + expr);
    return v;
  }
  void skip() {
    while (pos_ < src_.size() && src_[pos_] == ' ') ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw std::runtime_error(std::string("expected ") + c + " in " + src_);
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    return primary();
  }
  int index() {
    expect('[');
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const int k = std::stoi(src_.substr(start, pos_ - start));
    expect(']');
    return k;
  }
  double primary() {
    skip();
    if (eat('(')) {
      const double v = sum();
      expect(')');
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.') {
      std::size_t used = 0;
      const double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      return v;
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string name = src_.substr(start, pos_ - start);
    if (name.empty()) throw std::runtime_error("unexpected text in " + src_);
    if (name == "t") return t_;
    if (name == "x") return x_(index());
    if (name == "v" || name == "i") return arrays_.at(name).at(index());
    if (name == "Diff") {
      expect('(');
      skip();
      if (src_.compare(pos_, 1, "x") != 0) throw std::runtime_error("Diff of non-state");
      ++pos_;
      const int k = index();
      expect(',');
      skip();
      expect('1');
      expect(')');
      return xd_(k);
    }
    if (name == "sin" || name == "cos") {
      expect('(');
      const double a = sum();
      expect(')');
      return name == "sin" ? std::sin(a) : std::cos(a);
    }
    if (lambdas_.count(name)) {
      expect('(');
      skip();
      if (src_.compare(pos_, 1, "t") != 0) throw std::runtime_error("lambda argument");
      ++pos_;
      expect(')');
      const std::string saved = src_;
      const std::size_t saved_pos = pos_;
      const double v = eval(lambdas_.at(name));
      src_ = saved;
      pos_ = saved_pos;
      return v;
    }
    return values_.at(name);
  }

  double t_;
  VectorXd x_, xd_;
  std::string src_;
  std::size_t pos_ = 0;
  std::map<std::string, double> values_;
  std::map<std::string, std::string> lambdas_;
  std::map<std::string, std::map<int, double>> arrays_;
};

}  // namespace oracle
