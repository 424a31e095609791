#include <cmath>

#include "nlfem/postprocess.hpp"

namespace nlfem {

PowerFit fit_power(const std::vector<SliceSample>& samples) {
  PowerFit fit;
  for (const SliceSample& s : samples)
    if (s.t > 0.0 && s.value > 0.0 && std::isfinite(s.value)) fit.samples.push_back(s);
  const int n = static_cast<int>(fit.samples.size());
  if (n < 3) throw std::invalid_argument("power fit needs at least 3 positive samples, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (const SliceSample& s : fit.samples) {
    mx += std::log(s.t);
    my += std::log(s.value);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const SliceSample& s : fit.samples) {
    const double dx = std::log(s.t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(s.value) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("power fit needs at least two distinct sample positions");
  fit.gamma = sxy / sxx;
  const double intercept = my - fit.gamma * mx;
  fit.C = std::exp(intercept);
  double r2 = 0.0;
  for (const SliceSample& s : fit.samples) {
    const double r = std::log(s.value) - intercept - fit.gamma * std::log(s.t);
    r2 += r * r;
  }
  fit.residual = std::sqrt(r2 / n);
  return fit;
}

}  // namespace nlfem
