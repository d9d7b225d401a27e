#include "levyld/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "levyld/errors.hpp"

namespace levyld {

TestFunction TestFunction::constant(double value) { return {Kind::constant, value, 0.0, 0.0}; }
TestFunction TestFunction::linear(double slope) { return {Kind::linear, slope, 0.0, 0.0}; }
TestFunction TestFunction::tanh(double alpha, double beta) { return {Kind::tanh, alpha, beta, 0.0}; }
TestFunction TestFunction::sine(double alpha, double beta, double phase) {
  return {Kind::sine, alpha, beta, phase};
}

TestFunction TestFunction::from_name(std::string_view name) {
  if (name == "constant") return constant(1.0);
  if (name == "linear") return linear(1.0);
  if (name == "tanh") return tanh();
  if (name == "sin" || name == "sine") return sine();
  throw InvalidModel("unknown test function '" + std::string(name) + "' (expected tanh, sin, linear, constant)");
}

std::string TestFunction::name() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::constant:
      out << "constant(" << alpha_ << ")";
      break;
    case Kind::linear:
      out << "linear(" << alpha_ << ")";
      break;
    case Kind::tanh:
      out << alpha_ << "*tanh(" << beta_ << "u)";
      break;
    case Kind::sine:
      out << alpha_ << "*sin(" << beta_ << "u+" << phase_ << ")";
      break;
  }
  return out.str();
}

double TestFunction::value(double u) const {
  switch (kind_) {
    case Kind::constant:
      return alpha_;
    case Kind::linear:
      return alpha_ * u;
    case Kind::tanh:
      return alpha_ * std::tanh(beta_ * u);
    case Kind::sine:
      return alpha_ * std::sin(beta_ * u + phase_);
  }
  return 0.0;
}

double TestFunction::d1(double u) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return alpha_;
    case Kind::tanh: {
      const double t = std::tanh(beta_ * u);
      return alpha_ * beta_ * (1.0 - t * t);
    }
    case Kind::sine:
      return alpha_ * beta_ * std::cos(beta_ * u + phase_);
  }
  return 0.0;
}

double TestFunction::d2(double u) const {
  switch (kind_) {
    case Kind::constant:
    case Kind::linear:
      return 0.0;
    case Kind::tanh: {
      const double t = std::tanh(beta_ * u);
      return -2.0 * alpha_ * beta_ * beta_ * t * (1.0 - t * t);
    }
    case Kind::sine:
      return -alpha_ * beta_ * beta_ * std::sin(beta_ * u + phase_);
  }
  return 0.0;
}

double TestFunction::d3(double u) const {
  switch (kind_) {
    case Kind::constant:
    case Kind::linear:
      return 0.0;
    case Kind::tanh: {
      const double t = std::tanh(beta_ * u);
      const double s = 1.0 - t * t;
      return alpha_ * beta_ * beta_ * beta_ * s * (6.0 * t * t - 2.0);
    }
    case Kind::sine:
      return -alpha_ * beta_ * beta_ * beta_ * std::cos(beta_ * u + phase_);
  }
  return 0.0;
}

double TestFunction::increment(double u, double h) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return alpha_ * h;
    case Kind::tanh:
      // tanh(a) - tanh(b) = sinh(a - b) / (cosh(a) cosh(b))
      return alpha_ * std::sinh(beta_ * h) / (std::cosh(beta_ * (u + h)) * std::cosh(beta_ * u));
    case Kind::sine:
      return 2.0 * alpha_ * std::cos(beta_ * u + phase_ + 0.5 * beta_ * h) * std::sin(0.5 * beta_ * h);
  }
  return 0.0;
}

double derivative_defect(const TestFunction& phi, std::span<const double> probes) {
  constexpr double h = 1e-5;
  using Fn = std::function<double(double)>;
  const Fn f0 = [&](double u) { return phi.value(u); };
  const Fn f1 = [&](double u) { return phi.d1(u); };
  const Fn f2 = [&](double u) { return phi.d2(u); };
  const Fn f3 = [&](double u) { return phi.d3(u); };
  const std::pair<const Fn*, const Fn*> pairs[] = {{&f0, &f1}, {&f1, &f2}, {&f2, &f3}};

  double worst = 0.0;
  for (double u : probes) {
    for (const auto& [lower, upper] : pairs) {
      const double fd = ((*lower)(u + h) - (*lower)(u - h)) / (2.0 * h);
      const double exact = (*upper)(u);
      worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  return worst;
}

}  // namespace levyld
