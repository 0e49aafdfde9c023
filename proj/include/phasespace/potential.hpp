#pragma once

#include <vector>

namespace phasespace {

// V(q) = sum_k c_k q^k with degree <= 6.
class PolynomialPotential {
 public:
  static constexpr int kMaxDegree = 6;

  PolynomialPotential() = default;
  explicit PolynomialPotential(std::vector<double> coeffs);

  static PolynomialPotential harmonic(double mass = 1.0, double omega = 1.0);
  static PolynomialPotential quartic(double g = 0.25);

  int degree() const;
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double q) const { return derivative(q, 0); }
  // r-th derivative at q
  double derivative(double q, int r) const;

 private:
  std::vector<double> c_;
};

}  // namespace phasespace
