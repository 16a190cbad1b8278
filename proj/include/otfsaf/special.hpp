// special.hpp - sinc, Dirichlet ratios, exponentially scaled modified
// Bessel functions I0/I1 and the Laguerre function L_{1/2}.

#pragma once

#include "otfsaf/common.hpp"

#include <cmath>
#include <limits>

namespace otfsaf {

/// sin(z)/z with sinc(0) = 1.
inline double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
    }
    return std::sin(z) / z;
}

/// |sum_{k=0}^{n-1} exp(j 2 pi k x)| / n = |sin(pi n x) / (n sin(pi x))|.
///
/// x is first reduced to [-1/2, 1/2]; the magnitude is 1-periodic, and the
/// reduction keeps the ratio accurate next to integers.
inline double dirichlet_ratio(double x, long n) {
    const double r = x - std::nearbyint(x);
    if (n == 1 || std::abs(r) < 1e-9) return 1.0;
    return std::abs(std::sin(kPi * static_cast<double>(n) * r) /
                    (static_cast<double>(n) * std::sin(kPi * r)));
}

namespace detail {

inline constexpr double kBesselSeriesLimit = 15.0;

// e^{-z} I_nu(z) for nu in {0, 1}, z >= 0, by the ascending series.
inline double bessel_scaled_series(int nu, double z) {
    const double q = 0.25 * z * z;
    double term = (nu == 0) ? 1.0 : 0.5 * z;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-z);
}

// e^{-z} I_nu(z) for nu in {0, 1} by the large-argument expansion
//   sqrt(2 pi z) e^{-z} I_nu(z) ~ sum_k (-1)^k a_k(nu) / z^k.
inline double bessel_scaled_asymptotic(int nu, double z) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev_abs = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * z);
        const double a = std::abs(term);
        if (a >= prev_abs) break;  // series starts to diverge
        sum += term;
        prev_abs = a;
        if (a < std::abs(sum) * 1e-17) break;
    }
    return sum / std::sqrt(2.0 * kPi * z);
}

}  // namespace detail

/// e^{-|z|} I0(z)
inline double bessel_i0e(double z) {
    z = std::abs(z);
    return z < detail::kBesselSeriesLimit ? detail::bessel_scaled_series(0, z)
                                          : detail::bessel_scaled_asymptotic(0, z);
}

/// e^{-|z|} I1(z)
inline double bessel_i1e(double z) {
    const double a = std::abs(z);
    const double v = a < detail::kBesselSeriesLimit ? detail::bessel_scaled_series(1, a)
                                                    : detail::bessel_scaled_asymptotic(1, a);
    return z < 0 ? -v : v;
}

/// Laguerre function L_{1/2}(x) for x <= 0:
///   L_{1/2}(x) = e^{x/2} [(1 - x) I0(-x/2) - x I1(-x/2)].
/// Evaluated with scaled Bessel functions, so large |x| does not overflow.
inline double laguerre_half(double x) {
    if (!(x <= 0.0)) {
        throw DomainError("laguerre_half requires x <= 0");
    }
    const double z = -0.5 * x;
    return (1.0 - x) * bessel_i0e(z) - x * bessel_i1e(z);
}

}  // namespace otfsaf
