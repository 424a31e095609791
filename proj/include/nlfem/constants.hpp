#pragma once

namespace nlfem {

/// C(n,s) = 2^{2s} s Gamma(s + n/2) / (pi^{n/2} Gamma(1 - s)), n in {1, 2}, s in (0, 1).
double cns(int n, double s);

/// Amplitude c(n,s) of the solution c (1 - |x|^2)_+^s of the fractional
/// Laplacian with unit right-hand side on the unit ball.
double ball_solution_constant(int n, double s);

}  // namespace nlfem
