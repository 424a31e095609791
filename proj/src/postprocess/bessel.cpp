#include <cmath>
#include <stdexcept>

#include "nlfem/postprocess.hpp"

namespace nlfem {

double bessel_j(int m, double x) {
  // J_m(x) = (1/pi) int_0^pi cos(m t - x sin t) dt; the integrand extends to a
  // smooth periodic function, so the trapezoidal rule converges geometrically.
  const int n = 64 + 2 * static_cast<int>(std::abs(x) + m);
  double sum = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    const double t = M_PI * k / n;
    sum += std::cos(m * t - x * std::sin(t));
  }
  return sum / (2.0 * n);
}

double bessel_zero(int m, int k) {
  if (m < 0 || m > 10 || k < 1 || k > 10) throw std::invalid_argument("Bessel zero index out of range");
  const double step = 0.05;
  double a = m == 0 ? step : m + 0.5 * step;  // j_{m,1} > m
  double fa = bessel_j(m, a);
  int found = 0;
  for (int it = 0; it < 100000; ++it) {
    const double b = a + step, fb = bessel_j(m, b);
    if (fa == 0.0 || fa * fb < 0.0) {
      if (++found == k) {
        if (fa == 0.0) return a;
        double lo = a, hi = b, flo = fa;
        for (int bis = 0; bis < 200 && hi - lo > 1e-15 * hi; ++bis) {
          const double mid = 0.5 * (lo + hi), fm = bessel_j(m, mid);
          if (fm == 0.0) return mid;
          if (flo * fm < 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
    fa = fb;
  }
  throw std::runtime_error("Bessel zero bracketing failed");
}

double bessel_eigenvalue(int m, int k) {
  const double j = bessel_zero(m, k);
  return j * j / 4.0;
}

}  // namespace nlfem
