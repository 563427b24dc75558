#pragma once

// Zak (kq) transform on the cell D = [0,a) x [0, 2pi/a), its inverse, and the
// flatness criterion J_d = d/2pi.
//
// Convention (unitary):
//   (Zh)(k,q) = sqrt(a/2pi) sum_n exp(i q n a) h(k + n a)
//   h(k + n a) = sqrt(a/2pi) int_0^{2pi/a} dq exp(-i q n a) (Zh)(k,q)
// so that Z(T_d)(k,q) = t_d(k), independent of q.

#include <lmra/common.hpp>
#include <lmra/filters.hpp>
#include <lmra/generator.hpp>
#include <lmra/quadrature.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace lmra {

struct ZakFunction {
    std::function<cplx(double, double)> eval;
    double a = 0.0;
    int truncation = 0;    // largest |n| used by the defining sum
    int q_bandwidth = 0;   // Fourier modes in q, for sizing quadrature

    cplx operator()(double k, double q) const { return eval(k, q); }
    double q_period() const { return 2.0 * pi / a; }
};

inline constexpr double zak_tail_tol = 1e-14;
inline constexpr int zak_max_terms = 100000;

/// Value of the truncated Zak sum at one point. Compact supports give an exact
/// finite sum; otherwise terms are added outward until three consecutive
/// terms on each side fall below `zak_tail_tol`.
inline cplx zak_transform(const GeneratorFunction& h, double k, double q) {
    const double a = h.a;
    const double c = std::sqrt(a / (2.0 * pi));
    auto term = [&](int n) { return std::polar(1.0, q * n * a) * h(k + n * a); };
    if (h.compact()) {
        const int n_lo = static_cast<int>(std::floor((h.lo - k) / a)) - 1;
        const int n_hi = static_cast<int>(std::ceil((h.hi - k) / a)) + 1;
        cplx acc{};
        for (int n = n_lo; n <= n_hi; ++n) acc += term(n);
        return c * acc;
    }
    cplx acc = term(0);
    for (int dir : {1, -1}) {
        int quiet = 0;
        for (int j = 1;; ++j) {
            if (j > zak_max_terms)
                throw ConvergenceError("Zak sum tail does not decay", c * acc);
            const cplx t = term(dir * j);
            acc += t;
            quiet = std::abs(t) < zak_tail_tol ? quiet + 1 : 0;
            if (quiet >= 3) break;
        }
    }
    return c * acc;
}

inline ZakFunction make_zak(const GeneratorFunction& h) {
    ZakFunction z;
    z.a = h.a;
    auto [lo, hi] = h.integration_range();
    z.truncation = static_cast<int>(std::ceil((hi - lo) / h.a)) + 1;
    z.q_bandwidth = z.truncation;
    z.eval = [h](double k, double q) { return zak_transform(h, k, q); };
    return z;
}

/// t_d(k,q) = (1/sqrt(2pi)) sum_n h_n exp(i k n 2pi/a); no q dependence.
inline cplx t_d_zak(const FilterBank& f, double a, double k, double /*q*/ = 0.0) {
    cplx acc{};
    for (const auto& [n, h] : f.coeffs) acc += h * std::polar(1.0, k * n * 2.0 * pi / a);
    return acc / std::sqrt(2.0 * pi);
}

inline ZakFunction make_t_d_zak(const FilterBank& f, double a) {
    ZakFunction z;
    z.a = a;
    z.eval = [f, a](double k, double q) { return t_d_zak(f, a, k, q); };
    return z;
}

/// h(s) recovered from its Zak transform: s = k + n a with k in [0, a).
inline cplx inverse_zak(const ZakFunction& z, double s, double abs_tol = 1e-12) {
    const double a = z.a;
    const int n = static_cast<int>(std::floor(s / a));
    const double k = s - n * a;
    auto integrand = [&](double q) { return std::polar(1.0, -q * n * a) * z(k, q); };
    const double osc = std::abs(n) + z.q_bandwidth;
    const int panels = static_cast<int>(std::ceil(10.0 * (osc + 1.0) / 16.0)) + 1;
    const cplx integral =
        quad::integrate_smooth(integrand, 0.0, z.q_period(), panels, abs_tol).value;
    return std::sqrt(a / (2.0 * pi)) * integral;
}

/// J_d(k,q) = sum_{l<d} |z((k + l a)/d, q)|^2.
inline double j_d(const ZakFunction& z, int d, double k, double q) {
    double acc = 0.0;
    for (int l = 0; l < d; ++l) acc += std::norm(z((k + l * z.a) / d, q));
    return acc;
}

struct FlatnessReport {
    int d = 0;
    int grid_n = 0;
    double target = 0.0;        // d/2pi
    double max_deviation = 0.0;
    std::vector<double> values; // row-major, k outer, q inner

    double k_at(double a, int i) const { return i * a / grid_n; }
    double q_at(double a, int j) const { return j * (2.0 * pi / a) / grid_n; }
};

/// Scan J_d over a grid_n x grid_n grid of D (left endpoints).
inline FlatnessReport j_d_flatness(const ZakFunction& z, int d, int grid_n = 64) {
    if (grid_n < 1) throw Error("grid size must be positive");
    FlatnessReport rep;
    rep.d = d;
    rep.grid_n = grid_n;
    rep.target = d / (2.0 * pi);
    rep.values.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            const double v = j_d(z, d, rep.k_at(z.a, i), rep.q_at(z.a, j));
            rep.values.push_back(v);
            rep.max_deviation = std::max(rep.max_deviation, std::abs(v - rep.target));
        }
    return rep;
}

/// ||z||^2 over D by tensor Gauss-Legendre.
inline double squared_norm(const ZakFunction& z, int k_panels = 8, int q_panels = 8) {
    const int kp = std::max(k_panels, z.truncation + 2);
    const int qp = std::max(q_panels, z.q_bandwidth + 2);
    return quad::integrate_panels(
        [&](double k) {
            return quad::integrate_panels([&](double q) { return std::norm(z(k, q)); }, 0.0,
                                          z.q_period(), qp);
        },
        0.0, z.a, kp);
}

} // namespace lmra
