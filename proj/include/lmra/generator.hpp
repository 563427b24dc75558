#pragma once

// Generator functions h(s) on the line: the compactly supported T_d built from
// a filter, the s-space orthonormality check, and the inverse construction
// that recovers filter coefficients from a generator.

#include <lmra/common.hpp>
#include <lmra/filters.hpp>
#include <lmra/lattice.hpp>
#include <lmra/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace lmra {

inline constexpr double default_quad_tol = 1e-10;

/// T_d(s) = (1/sqrt a) sum_l h_l exp(i l s 2pi/a) on [0, a), zero elsewhere.
inline cplx t_d_eval(const FilterBank& f, const LatticeSpec& lat, double s) {
    if (s < 0.0 || s >= lat.a) return {};
    const double k = 2.0 * pi / lat.a;
    cplx acc{};
    for (const auto& [l, h] : f.coeffs) acc += h * std::polar(1.0, l * k * s);
    return acc / std::sqrt(lat.a);
}

/// A square-integrable function of one real variable.
///
/// The support is [lo, hi); unbounded supports need a truncation window,
/// which every integration over the function uses instead of the support.
/// `bandwidth` is the number of oscillations per length a that the function
/// carries; it sizes quadrature panels.
struct GeneratorFunction {
    std::function<cplx(double)> eval;
    double lo = 0.0;
    double hi = 0.0;
    double a = 0.0;
    int bandwidth = 0;
    std::optional<double> window_lo;
    std::optional<double> window_hi;
    std::optional<FilterBank> filter; // set when built from filter coefficients

    cplx operator()(double s) const {
        if (s < lo || s >= hi) return {};
        return eval(s);
    }
    bool compact() const { return std::isfinite(lo) && std::isfinite(hi); }

    /// Interval actually integrated over.
    std::pair<double, double> integration_range() const {
        if (compact()) return {lo, hi};
        if (!window_lo || !window_hi)
            throw Error("generator has unbounded support and no truncation window");
        return {std::max(lo, *window_lo), std::min(hi, *window_hi)};
    }

    /// Half-width of the truncation window, if one is in use.
    std::optional<double> truncation_radius() const {
        if (compact()) return std::nullopt;
        auto [l, h] = integration_range();
        return 0.5 * (h - l);
    }
};

inline GeneratorFunction make_t_d(const FilterBank& f, const LatticeSpec& lat) {
    GeneratorFunction g;
    g.eval = [f, lat](double s) { return t_d_eval(f, lat, s); };
    g.lo = 0.0;
    g.hi = lat.a;
    g.a = lat.a;
    g.bandwidth = std::max(std::abs(f.min_index()), std::abs(f.max_index()));
    g.filter = f;
    return g;
}

/// Wrap an arbitrary function. Pass +-infinity bounds together with a window
/// for functions that are not compactly supported.
inline GeneratorFunction make_generator(std::function<cplx(double)> fn, double lo, double hi,
                                        double a, int bandwidth = 4,
                                        std::optional<std::pair<double, double>> window = {}) {
    GeneratorFunction g;
    g.eval = std::move(fn);
    g.lo = lo;
    g.hi = hi;
    g.a = a;
    g.bandwidth = bandwidth;
    if (window) {
        g.window_lo = window->first;
        g.window_hi = window->second;
    }
    return g;
}

/// int_0^a exp(i nu s) ds, stable for small nu.
inline cplx segment_fourier(double nu, double a) {
    const double x = 0.5 * nu * a;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return a * sinc * std::polar(1.0, x);
}

/// int exp(i omega s) h(s) ds. Exact for filter generators, quadrature otherwise.
inline cplx fourier_integral(const GeneratorFunction& h, double omega,
                             double abs_tol = default_quad_tol) {
    if (h.filter && h.lo == 0.0 && h.hi == h.a) {
        const double k = 2.0 * pi / h.a;
        cplx acc{};
        for (const auto& [l, c] : h.filter->coeffs) acc += c * segment_fourier(omega + l * k, h.a);
        return acc / std::sqrt(h.a);
    }
    auto [lo, hi] = h.integration_range();
    const double osc = (std::abs(omega) * (hi - lo)) / (2.0 * pi) +
                       h.bandwidth * (hi - lo) / h.a;
    const int panels = static_cast<int>(std::ceil(10.0 * (osc + 1.0) / 16.0)) + 1;
    return quad::integrate_smooth([&](double s) { return std::polar(1.0, omega * s) * h(s); },
                                  lo, hi, panels, abs_tol)
        .value;
}

namespace detail {

inline int panels_for(double length, double a, double oscillations_per_a) {
    const double osc = (oscillations_per_a + 1.0) * length / a;
    return static_cast<int>(std::ceil(10.0 * (osc + 1.0) / 16.0)) + 1;
}

} // namespace detail

/// S = int ds exp(i s k 2pi/a) conj(h(s)) h(s - n a), with k the full-lattice
/// T_2 exponent. Disjoint supports give exactly zero without integrating.
inline cplx overlap_integral(const GeneratorFunction& h, int n, int k,
                             double abs_tol = default_quad_tol) {
    auto [lo, hi] = h.integration_range();
    const double shift = n * h.a;
    const double olo = std::max(lo, lo + shift);
    const double ohi = std::min(hi, hi + shift);
    if (!(ohi > olo)) return {};
    const double freq = k * 2.0 * pi / h.a;
    auto integrand = [&](double s) {
        return std::polar(1.0, freq * s) * std::conj(h(s)) * h(s - shift);
    };
    const int panels = detail::panels_for(ohi - olo, h.a, std::abs(k) + 2.0 * h.bandwidth);
    return quad::integrate_smooth(integrand, olo, ohi, panels, abs_tol).value;
}

/// S_{n,dm}: the sublattice orthonormality entry.
inline cplx onc_entry(const GeneratorFunction& h, int d, int n, int m,
                      double abs_tol = default_quad_tol) {
    return overlap_integral(h, n, d * m, abs_tol);
}

struct OncMatrix {
    int d = 1;
    int n_max = 0;
    int m_max = 0;
    std::vector<cplx> entries; // row-major, n outer, m inner

    cplx at(int n, int m) const {
        return entries[static_cast<std::size_t>((n + n_max) * (2 * m_max + 1) + (m + m_max))];
    }
    double max_deviation_from_identity() const {
        double dev = 0.0;
        for (int n = -n_max; n <= n_max; ++n)
            for (int m = -m_max; m <= m_max; ++m)
                dev = std::max(dev, std::abs(at(n, m) - (n == 0 && m == 0 ? 1.0 : 0.0)));
        return dev;
    }
    /// max |S_{-n,-m} - conj S_{n,m}|
    double hermiticity_defect() const {
        double dev = 0.0;
        for (int n = -n_max; n <= n_max; ++n)
            for (int m = -m_max; m <= m_max; ++m)
                dev = std::max(dev, std::abs(at(-n, -m) - std::conj(at(n, m))));
        return dev;
    }
};

inline OncMatrix onc_matrix(const GeneratorFunction& h, int d, int n_max, int m_max,
                            double abs_tol = default_quad_tol) {
    OncMatrix out{d, n_max, m_max, {}};
    out.entries.reserve(static_cast<std::size_t>((2 * n_max + 1) * (2 * m_max + 1)));
    for (int n = -n_max; n <= n_max; ++n)
        for (int m = -m_max; m <= m_max; ++m) out.entries.push_back(onc_entry(h, d, n, m, abs_tol));
    return out;
}

/// Coefficients H_n = (1/sqrt a) int K(s) exp(-i n s 2pi/a) ds.
struct CoefficientSet {
    std::map<int, cplx> coeffs;
    std::optional<double> truncation_radius;

    FilterBank as_filter(int d) const { return FilterBank{d, coeffs}; }
};

inline CoefficientSet coefficients_from_function(const GeneratorFunction& K, int n_lo, int n_hi,
                                                 double abs_tol = default_quad_tol) {
    CoefficientSet out;
    out.truncation_radius = K.truncation_radius();
    auto [lo, hi] = K.integration_range();
    const double k = 2.0 * pi / K.a;
    for (int n = n_lo; n <= n_hi; ++n) {
        auto integrand = [&](double s) { return K(s) * std::polar(1.0, -n * k * s); };
        const int panels = detail::panels_for(hi - lo, K.a, std::abs(n) + K.bandwidth);
        out.coeffs[n] = quad::integrate_smooth(integrand, lo, hi, panels, abs_tol).value /
                        std::sqrt(K.a);
    }
    return out;
}

/// ||h||_2^2 over the integration range.
inline double squared_norm(const GeneratorFunction& h, double abs_tol = default_quad_tol) {
    return overlap_integral(h, 0, 0, abs_tol).real();
}

} // namespace lmra
