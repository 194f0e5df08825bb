#pragma once

// Modified Bessel function of the first kind (exponentially scaled) and the
// Bessel-process transition density built on it.

namespace dunkl {

// exp(-z) I_nu(z) for z >= 0, nu >= 0. Power series below z = 20, the
// large-argument asymptotic expansion above; the crossover is a tested
// implementation constant targeting 1e-10 relative accuracy.
double bessel_i_scaled(double nu, double z);

// Transition density of a Bessel process of dimension N (index N/2 - 1)
// started at r0 >= 0, evaluated at r >= 0 after time t > 0.
double bessel_transition_density(double N, double r0, double r, double t);

}  // namespace dunkl
