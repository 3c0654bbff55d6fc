#pragma once

namespace cribsim {

/// Modified Bessel functions of the first kind, orders 0 and 1, implemented
/// in-repo: power series up to x = 15, asymptotic expansion beyond. The
/// scaled variants return exp(-x)*I_nu(x) and stay finite for arbitrarily
/// large arguments.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);
double bessel_i0(double x);
double bessel_i1(double x);

}  // namespace cribsim
