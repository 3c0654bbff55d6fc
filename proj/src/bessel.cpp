#include "cribsim/bessel.hpp"

#include <cmath>
#include <numbers>

namespace cribsim {

namespace {

constexpr double kSeriesLimit = 15.0;

// sum_m (x^2/4)^m / (m! (m+nu)!), times (x/2)^nu
double series_i(int nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    for (int j = 1; j <= nu; ++j) term *= 0.5 * x / j;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * (m + nu));
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

// exp(-x) I_nu(x) ~ (2 pi x)^{-1/2} sum_m t_m with
// t_m = -t_{m-1} (4 nu^2 - (2m-1)^2) / (8 x m)
double asymptotic_ie(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::abs(term);
    for (int m = 1; m < 40; ++m) {
        const double odd = 2.0 * m - 1.0;
        term *= -(mu - odd * odd) / (8.0 * x * m);
        if (std::abs(term) >= prev) break;  // asymptotic tail started to grow
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
    x = std::abs(x);
    if (x <= kSeriesLimit) return series_i(0, x) * std::exp(-x);
    return asymptotic_ie(0, x);
}

double bessel_i1_scaled(double x) {
    const double ax = std::abs(x);
    double v = ax <= kSeriesLimit ? series_i(1, ax) * std::exp(-ax) : asymptotic_ie(1, ax);
    return x < 0.0 ? -v : v;
}

double bessel_i0(double x) {
    x = std::abs(x);
    if (x <= kSeriesLimit) return series_i(0, x);
    return asymptotic_ie(0, x) * std::exp(x);
}

double bessel_i1(double x) {
    const double ax = std::abs(x);
    double v = ax <= kSeriesLimit ? series_i(1, ax) : asymptotic_ie(1, ax) * std::exp(ax);
    return x < 0.0 ? -v : v;
}

}  // namespace cribsim
