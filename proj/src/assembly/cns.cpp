#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nlfem/constants.hpp"

namespace nlfem {

namespace {

void check(int n, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order s must lie in (0, 1), got " + std::to_string(s));
  if (n != 1 && n != 2) throw std::invalid_argument("dimension must be 1 or 2");
}

}  // namespace

double cns(int n, double s) {
  check(n, s);
  return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 0.5 * n) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

double ball_solution_constant(int n, double s) {
  check(n, s);
  return std::pow(2.0, -2.0 * s) * std::tgamma(0.5 * n) / (std::tgamma(0.5 * (n + 2.0 * s)) * std::tgamma(1.0 + s));
}

}  // namespace nlfem
