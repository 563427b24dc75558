#pragma once

// Complex error function through the Faddeeva function
// w(z) = exp(-z^2) erfc(-iz).
//
// w is evaluated in the closed upper half plane with Weideman's rational
// expansion (N = 64 terms, L = sqrt(N/sqrt2)); the lower half plane follows
// from w(z) = 2 exp(-z^2) - w(-z). erf uses its Taylor series for |z| < 1 and
// erf(z) = 1 - exp(-z^2) w(iz) elsewhere (Re z >= 0; odd symmetry otherwise).
//
// complex_erf is defined for |z| <= 26; beyond, erf overflows a double along
// the imaginary directions and OverflowError is thrown once Re(-z^2) > 705.

#include <lmra/common.hpp>

#include <array>
#include <cmath>

namespace lmra {

namespace detail {

inline constexpr int weideman_terms = 64;

struct WeidemanTable {
    double L = 0.0;
    std::array<double, weideman_terms> coef{}; // p(Z) = sum_n coef[n] Z^n

    WeidemanTable() {
        constexpr int N = weideman_terms;
        constexpr int M = 2 * N;
        L = std::sqrt(N / std::numbers::sqrt2);
        auto sample = [&](int k) {
            if (k == -M) return 0.0;
            const double t = L * std::tan(0.5 * k * pi / M);
            return std::exp(-t * t) * (L * L + t * t);
        };
        for (int n = 1; n <= N; ++n) {
            double acc = 0.0;
            for (int k = -M + 1; k <= M - 1; ++k) acc += sample(k) * std::cos(pi * n * k / M);
            coef[n - 1] = acc / (2.0 * M);
        }
    }
};

inline const WeidemanTable& weideman_table() {
    static const WeidemanTable table;
    return table;
}

inline cplx faddeeva_upper(cplx z) {
    const auto& t = weideman_table();
    const cplx denom = t.L - I * z;
    const cplx Z = (t.L + I * z) / denom;
    cplx p{};
    for (int n = weideman_terms - 1; n >= 0; --n) p = p * Z + t.coef[n];
    return 2.0 * p / (denom * denom) + (1.0 / sqrt_pi) / denom;
}

inline cplx erf_taylor(cplx z) {
    const cplx z2 = z * z;
    cplx term = z;
    cplx sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z2 / static_cast<double>(n);
        const cplx add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return (2.0 / sqrt_pi) * sum;
}

} // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
inline cplx faddeeva_w(cplx z) {
    if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
    const double growth = (-z * z).real();
    if (growth > 705.0) throw OverflowError("faddeeva_w: exp(-z^2) overflows");
    return 2.0 * std::exp(-z * z) - detail::faddeeva_upper(-z);
}

/// Error function of a complex argument.
inline cplx complex_erf(cplx z) {
    if (std::abs(z) < 1.0) return detail::erf_taylor(z);
    if (z.real() < 0.0) return -complex_erf(-z);
    const cplx mz2 = -z * z;
    if (mz2.real() > 705.0) throw OverflowError("complex_erf: result overflows");
    return 1.0 - std::exp(mz2) * detail::faddeeva_upper(I * z);
}

/// Function-object form of complex_erf, for callers that take a callable.
struct ComplexErf {
    cplx operator()(cplx z) const { return complex_erf(z); }
};

/// exp(z^2) erf(z) = sign * exp(z^2) + remainder, with a bounded remainder.
/// Lets closed forms cancel the exp(z^2) pieces analytically.
struct ScaledErf {
    int sign = 1;
    cplx remainder;
};

inline ScaledErf scaled_erf(cplx z) {
    // Re z >= 0: erf = 1 - erfc(z), exp(z^2) erfc(z) = w(iz).
    // Re z <  0: erf = erfc(-z) - 1, exp(z^2) erfc(-z) = w(-iz).
    if (z.real() >= 0.0) return {1, -detail::faddeeva_upper(I * z)};
    return {-1, detail::faddeeva_upper(-I * z)};
}

} // namespace lmra
