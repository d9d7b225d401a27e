#pragma once

#include <span>
#include <string>
#include <string_view>

namespace levyld {

/// Smooth function phi(u) with analytic derivatives up to third order.
///
/// The default family is alpha*tanh(beta*u), alpha*sin(beta*u + gamma) and
/// the linear function lambda*u. The linear member is unbounded, so
/// `bounded()` is false for it; every integral in this library is a finite
/// sum, so it is still admissible.
class TestFunction {
 public:
  enum class Kind { constant, linear, tanh, sine };

  static TestFunction constant(double value);
  static TestFunction linear(double slope);
  static TestFunction tanh(double alpha = 1.0, double beta = 1.0);
  static TestFunction sine(double alpha = 1.0, double beta = 1.0, double phase = 0.0);

  // "constant", "linear", "tanh" or "sin" with unit parameters.
  static TestFunction from_name(std::string_view name);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::string name() const;
  [[nodiscard]] bool bounded() const { return kind_ != Kind::linear; }

  [[nodiscard]] double value(double u) const;
  [[nodiscard]] double d1(double u) const;
  [[nodiscard]] double d2(double u) const;
  [[nodiscard]] double d3(double u) const;

  // phi(u + h) - phi(u) without the cancellation of a plain difference.
  [[nodiscard]] double increment(double u, double h) const;

 private:
  TestFunction(Kind kind, double alpha, double beta, double phase)
      : kind_(kind), alpha_(alpha), beta_(beta), phase_(phase) {}

  Kind kind_;
  double alpha_;
  double beta_;
  double phase_;
};

// Largest relative mismatch between each analytic derivative and a central
// difference of the next-lower one over the probe points.
double derivative_defect(const TestFunction& phi, std::span<const double> probes);

}  // namespace levyld
