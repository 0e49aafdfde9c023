#include "phasespace/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace phasespace {

PolynomialPotential::PolynomialPotential(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  for (double x : c_)
    if (!std::isfinite(x)) throw std::invalid_argument("potential: non-finite coefficient");
  if (degree() > kMaxDegree) throw std::invalid_argument("potential: degree must be <= 6");
}

PolynomialPotential PolynomialPotential::harmonic(double mass, double omega) {
  return PolynomialPotential({0.0, 0.0, 0.5 * mass * omega * omega});
}

PolynomialPotential PolynomialPotential::quartic(double g) {
  return PolynomialPotential({0.0, 0.0, 0.0, 0.0, g});
}

int PolynomialPotential::degree() const { return static_cast<int>(c_.size()) - 1; }

double PolynomialPotential::derivative(double q, int r) const {
  double acc = 0.0;
  // Horner over the r-times differentiated coefficients
  for (int k = degree(); k >= r; --k) {
    double f = 1.0;
    for (int j = 0; j < r; ++j) f *= static_cast<double>(k - j);
    acc = acc * q + f * c_[static_cast<std::size_t>(k)];
  }
  return acc;
}

}  // namespace phasespace
