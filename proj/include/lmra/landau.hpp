#pragma once

// Landau-level wavefunctions from generator functions.
//
// Every kernel here has the form
//   K_l(r, s) = exp(i y u / 2) exp(i y s) I_l(u + s),
//   I_l(w)    = (1/2pi) int dP f_l(P) exp(i (P w - c P^2)),
// with u = x - kappa*y, kappa = 1/sqrt3 and c = 1/(2 sqrt3) on the triangular
// lattice, kappa = c = 0 on the square one, and f_l the l-th oscillator
// eigenfunction. For l = 0 the integral is a Gaussian:
//   I_0(w) = C exp(-beta w^2),
//   triangular: beta = (3/8)(1 - i/sqrt3), C = 1/(pi^{3/4} sqrt(2(1 + i/sqrt3)))
//   square:     beta = 1/2,                C = 1/(sqrt2 pi^{3/4})
//
// In the coordinates (u, y) the magnetic translation T_1^n T_2^m shifts u by
// -n a and y by -m 2pi/a on both lattices, which the aligned quadrature grid
// at the bottom of this file exploits.

#include <lmra/common.hpp>
#include <lmra/faddeeva.hpp>
#include <lmra/filters.hpp>
#include <lmra/generator.hpp>
#include <lmra/lattice.hpp>
#include <lmra/parallel.hpp>
#include <lmra/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace lmra {

using Wavefunction = std::function<cplx(Vec2)>;

inline constexpr int max_kernel_level = 10;

struct KernelSpec {
    Shape shape = Shape::triangular;
    int level = 0;

    double shear() const { return shape == Shape::triangular ? 1.0 / sqrt3 : 0.0; }
    double chirp() const { return shape == Shape::triangular ? 0.5 / sqrt3 : 0.0; }
    cplx beta() const {
        return shape == Shape::triangular ? cplx{3.0 / 8.0, -3.0 / (8.0 * sqrt3)} : cplx{0.5, 0.0};
    }
    cplx prefactor() const {
        if (shape == Shape::square) return 1.0 / (std::sqrt(2.0) * std::pow(pi, 0.75));
        return 1.0 / (std::pow(pi, 0.75) * std::sqrt(2.0 * cplx{1.0, 1.0 / sqrt3}));
    }
};

// ---------------------------------------------------------------------------
// Oscillator eigenfunctions and the level-l kernel

/// Normalized Hermite function without its Gaussian: f_l(P) exp(P^2/2).
inline double hermite_poly_normalized(int l, double P) {
    double prev = 0.0;
    double cur = 1.0 / std::pow(pi, 0.25);
    for (int j = 0; j < l; ++j) {
        const double next = std::sqrt(2.0 / (j + 1)) * P * cur - std::sqrt(double(j) / (j + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Oscillator eigenstate f_l(P), unit L2 norm.
inline double hermite_function(int l, double P) {
    return hermite_poly_normalized(l, P) * std::exp(-0.5 * P * P);
}

/// Gauss-Hermite order for I_l(w); grows with w^2 because exp(i P w) must be
/// resolved across the Gaussian weight.
inline int gh_nodes_for(int l, double w) {
    const double aw = std::abs(w);
    const int n = 40 + 4 * l + static_cast<int>(std::ceil(4.0 * aw + 0.3 * aw * aw));
    return std::min(n, 480);
}

namespace detail {

/// Nodes P_j and weights c_j(w) with I_l(w) = sum_j c_j exp(i P_j w).
struct LevelRule {
    std::vector<double> P;
    std::vector<cplx> base; // (1/2pi) sqrt2 w_j f~_l(P_j) exp(-i c P_j^2)
};

inline LevelRule level_rule(const KernelSpec& ks, int n) {
    const quad::Rule& gh = quad::gauss_hermite(n);
    LevelRule r;
    r.P.resize(gh.size());
    r.base.resize(gh.size());
    const double c = ks.chirp();
    for (std::size_t j = 0; j < gh.size(); ++j) {
        const double P = std::sqrt(2.0) * gh.nodes[j];
        r.P[j] = P;
        r.base[j] = std::sqrt(2.0) * gh.weights[j] * hermite_poly_normalized(ks.level, P) *
                    std::polar(1.0, -c * P * P) / (2.0 * pi);
    }
    return r;
}

inline void check_level(int l) {
    if (l < 0 || l > max_kernel_level)
        throw Error("kernel level must be in [0, " + std::to_string(max_kernel_level) + "]");
}

} // namespace detail

/// I_l(w) by Gauss-Hermite quadrature over P.
inline cplx level_integral(const KernelSpec& ks, double w) {
    detail::check_level(ks.level);
    const auto rule = detail::level_rule(ks, gh_nodes_for(ks.level, w));
    cplx acc{};
    for (std::size_t j = 0; j < rule.P.size(); ++j) acc += rule.base[j] * std::polar(1.0, rule.P[j] * w);
    return acc;
}

/// Level-l kernel by quadrature over P (any l in [0, 10]).
inline cplx kernel_level(const KernelSpec& ks, Vec2 r, double s) {
    const double u = r.x - ks.shear() * r.y;
    return std::polar(1.0, 0.5 * r.y * u + r.y * s) * level_integral(ks, u + s);
}

/// Closed-form kernel at level 0; higher levels go through kernel_level.
inline cplx kernel_eval(const KernelSpec& ks, Vec2 r, double s) {
    if (ks.level != 0) return kernel_level(ks, r, s);
    const double u = r.x - ks.shear() * r.y;
    const double w = u + s;
    return ks.prefactor() * std::polar(1.0, 0.5 * r.y * u + r.y * s) * std::exp(-ks.beta() * w * w);
}

// ---------------------------------------------------------------------------
// Synthesis psi(r) = int K(r, s) h(s) ds

namespace detail {

/// Level >= 1: swap the order, psi = e^{iyu/2} sum_j c_j e^{i P_j u} h^(y + P_j)
/// with h^ the Fourier integral of the generator.
inline cplx synthesize_swapped(const KernelSpec& ks, const GeneratorFunction& h, Vec2 r,
                               double abs_tol) {
    auto [lo, hi] = h.integration_range();
    const double u = r.x - ks.shear() * r.y;
    const double reach = std::abs(u) + std::max(std::abs(lo), std::abs(hi));
    const auto rule = level_rule(ks, gh_nodes_for(ks.level, reach));
    cplx acc{};
    for (std::size_t j = 0; j < rule.P.size(); ++j) {
        if (rule.base[j] == cplx{}) continue;
        acc += rule.base[j] * std::polar(1.0, rule.P[j] * u) *
               fourier_integral(h, r.y + rule.P[j], abs_tol);
    }
    return std::polar(1.0, 0.5 * r.y * u) * acc;
}

} // namespace detail

/// psi(r) for the generator h. Level 0 integrates the closed-form kernel over
/// s with Gauss-Legendre panels; higher levels use the P-quadrature.
inline cplx synthesize(const KernelSpec& ks, const GeneratorFunction& h, Vec2 r,
                       double abs_tol = 1e-9) {
    detail::check_level(ks.level);
    if (ks.level != 0) return detail::synthesize_swapped(ks, h, r, abs_tol);
    auto [lo, hi] = h.integration_range();
    auto integrand = [&](double s) { return kernel_eval(ks, r, s) * h(s); };
    const double oscillations = std::abs(r.y) * h.a / (2.0 * pi) + h.bandwidth;
    const int panels = detail::panels_for(hi - lo, h.a, oscillations);
    return quad::integrate_smooth(integrand, lo, hi, panels, abs_tol).value;
}

inline Wavefunction make_wavefunction(KernelSpec ks, GeneratorFunction h, double abs_tol = 1e-9) {
    return [ks, h = std::move(h), abs_tol](Vec2 r) { return synthesize(ks, h, r, abs_tol); };
}

// ---------------------------------------------------------------------------
// Magnetic translations

/// (-1)^{nm} exp((i/2)(Y x - X y)) for the site s.
inline cplx translation_phase(const LatticeSpec& lat, SiteIndex s, Vec2 r) {
    const Vec2 c = site_position(lat, s);
    const double sign = ((s.n * s.m) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::polar(1.0, 0.5 * (c.y * r.x - c.x * r.y));
}

/// T_1^n T_2^m f: (-1)^{nm} exp((i/2)(Y x - X y)) f(x - X, y - Y).
inline Wavefunction magnetic_translate(Wavefunction f, const LatticeSpec& lat, SiteIndex s) {
    if (s.n == 0 && s.m == 0) return f;
    const Vec2 c = site_position(lat, s);
    return [f = std::move(f), lat, s, c](Vec2 r) {
        return translation_phase(lat, s, r) * f(r - c);
    };
}

// ---------------------------------------------------------------------------
// Closed forms for trigonometric-polynomial generators

namespace detail {

/// int_0^a exp(i alpha s - beta (u + s)^2) ds times 2 sqrt(beta)/sqrt(pi),
/// written so that every exponential stays bounded.
inline cplx gauss_segment(cplx beta, cplx sqrt_beta, double u, double alpha, double a) {
    const cplx z1 = (2.0 * beta * (u + a) - I * alpha) / (2.0 * sqrt_beta);
    const cplx z2 = (2.0 * beta * u - I * alpha) / (2.0 * sqrt_beta);
    const ScaledErf e1 = scaled_erf(z1);
    const ScaledErf e2 = scaled_erf(z2);
    cplx g = e1.remainder * std::exp(-beta * (u + a) * (u + a) + I * (alpha * a)) -
             e2.remainder * std::exp(-beta * u * u);
    if (e1.sign != e2.sign)
        g += double(e1.sign - e2.sign) * std::exp(-alpha * alpha / (4.0 * beta) - I * (alpha * u));
    return g;
}

} // namespace detail

/// Lowest-Landau-level image of T_d built from the filter f, in closed form
/// through the complex error function.
inline cplx lll_closed_form(const LatticeSpec& lat, const FilterBank& f, Vec2 r) {
    const KernelSpec ks{lat.shape, 0};
    const cplx beta = ks.beta();
    const cplx sb = std::sqrt(beta);
    const double a = lat.a;
    const double u = r.x - ks.shear() * r.y;
    cplx acc{};
    for (const auto& [l, h] : f.coeffs)
        acc += h * detail::gauss_segment(beta, sb, u, r.y + l * 2.0 * pi / a, a);
    return std::polar(1.0, 0.5 * r.y * u) * ks.prefactor() * sqrt_pi / (2.0 * sb * std::sqrt(a)) * acc;
}

/// Leading large-argument form of lll_closed_form: exp(-z^2) erf terms
/// replaced by their first asymptotic term, the pure-Gaussian pieces dropped.
inline cplx lll_asymptotic(const LatticeSpec& lat, const FilterBank& f, Vec2 r) {
    const KernelSpec ks{lat.shape, 0};
    const cplx beta = ks.beta();
    const double a = lat.a;
    const double u = r.x - ks.shear() * r.y;
    const cplx near = std::exp(-beta * u * u);
    const cplx far = std::exp(-beta * (u + a) * (u + a) + I * (r.y * a));
    cplx acc{};
    for (const auto& [l, h] : f.coeffs) {
        const double alpha = r.y + l * 2.0 * pi / a;
        acc += h * (near / (2.0 * beta * u - I * alpha) - far / (2.0 * beta * (u + a) - I * alpha));
    }
    return std::polar(1.0, 0.5 * r.y * u) * ks.prefactor() / std::sqrt(a) * acc;
}

/// psi_3: the triangular-lattice image of T_3 from the Haar d = 3 filter.
inline cplx haar3_closed_form(Vec2 r) {
    static const LatticeSpec lat = make_lattice(Shape::triangular, 3);
    static const FilterBank f = haar(3);
    return lll_closed_form(lat, f, r);
}

/// The large-|r| expansion of psi_3, term by term:
///   sqrt(beta) e^{iyu/2} e^{-beta u^2} / (sqrt(3a) pi^{3/4}) *
///   { sum_k 1/(2 beta u - i(y + 2 pi k/a))
///     - e^{-beta a^2 - a(2 beta u - i y)} sum_k 1/(2 beta u - i(y + 2 pi k/a) + 2 a beta) }
/// with u = x - y/sqrt3, k = 0, 1, 2. Accurate to about 1% once |r| >= 5a and
/// |u| >= 1; along u = 0 it keeps the 1/|y| decay.
inline cplx haar3_asymptotic(Vec2 r) {
    const double a = std::sqrt(4.0 * pi / sqrt3);
    const cplx beta{3.0 / 8.0, -3.0 / (8.0 * sqrt3)};
    const double u = r.x - r.y / sqrt3;
    const cplx b = 2.0 * beta * u;
    cplx first{}, second{};
    for (int k = 0; k < 3; ++k) {
        const double alpha = r.y + k * 2.0 * pi / a;
        first += 1.0 / (b - I * alpha);
        second += 1.0 / (b - I * alpha + 2.0 * a * beta);
    }
    const cplx correction = std::exp(-beta * a * a - a * (b - I * r.y));
    return std::sqrt(beta) * std::polar(1.0, 0.5 * r.y * u) * std::exp(-beta * u * u) /
           (std::sqrt(3.0 * a) * std::pow(pi, 0.75)) * (first - correction * second);
}

/// Generator behind the square-lattice nu = 1/2 Haar wavefunction:
/// (1 + e^{-i s a}) / sqrt(2a) on [0, a), i.e. h_0 = h_{-1} = 1/sqrt2.
inline FilterBank haar2_square_filter() {
    FilterBank f;
    f.d = 2;
    f.coeffs[-1] = f.coeffs[0] = 1.0 / std::sqrt(2.0);
    return f;
}

inline cplx haar2_square_closed_form(Vec2 r) {
    static const LatticeSpec lat = make_lattice(Shape::square, 2);
    static const FilterBank f = haar2_square_filter();
    return lll_closed_form(lat, f, r);
}

/// sqrt(2a) e^{ixy/2 - x^2/2} / (4 pi^{5/4}) *
///   (1/(x - iy) + 1/(x - i(y - a)) - e^{-pi - a(x - iy)} (1/(x + a - iy) + 1/(x + a - i(y - a))))
inline cplx haar2_square_asymptotic(Vec2 r) {
    const double a = std::sqrt(2.0 * pi);
    const double x = r.x, y = r.y;
    const cplx lead = 1.0 / cplx(x, -y) + 1.0 / cplx(x, -(y - a));
    const cplx tail = std::exp(-pi - a * cplx(x, -y)) * (1.0 / cplx(x + a, -y) + 1.0 / cplx(x + a, -(y - a)));
    return std::sqrt(2.0 * a) * std::polar(1.0, 0.5 * x * y) * std::exp(-0.5 * x * x) /
           (4.0 * std::pow(pi, 1.25)) * (lead - tail);
}

// ---------------------------------------------------------------------------
// Sampled fields

struct WaveField {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
    int nx = 0, ny = 0;
    std::vector<cplx> values; // y outer, x inner
    std::string source;
    double norm_estimate = 0.0; // trapezoidal sum of |psi|^2 over the grid

    double x_at(int i) const { return nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1); }
    double y_at(int j) const { return ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1); }
    cplx at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

inline WaveField sample_field(const Wavefunction& psi, double x0, double x1, int nx, double y0,
                              double y1, int ny, std::string source = {}, int threads = 1) {
    if (nx < 1 || ny < 1) throw Error("grid needs at least one node per axis");
    WaveField f{x0, x1, y0, y1, nx, ny, {}, std::move(source), 0.0};
    f.values.resize(static_cast<std::size_t>(nx) * ny);
    parallel_for(f.values.size(), threads, [&](std::size_t k) {
        const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
        f.values[k] = psi({f.x_at(i), f.y_at(j)});
    });
    const double dx = nx > 1 ? (x1 - x0) / (nx - 1) : 1.0;
    const double dy = ny > 1 ? (y1 - y0) / (ny - 1) : 1.0;
    double acc = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double wx = (nx > 1 && (i == 0 || i == nx - 1)) ? 0.5 : 1.0;
            const double wy = (ny > 1 && (j == 0 || j == ny - 1)) ? 0.5 : 1.0;
            acc += wx * wy * std::norm(f.at(i, j));
        }
    f.norm_estimate = acc * dx * dy;
    return f;
}

// ---------------------------------------------------------------------------
// Lattice-aligned 2-D quadrature
//
// Tensor Gauss-Legendre in (u, y) on panels of width a (u) and 2pi/a (y)
// anchored at 0. A translate by lattice site (n, m) is then a shift by n
// panels in u and m panels in y, so psi is sampled once and every overlap
// <f, T_1^n T_2^m g> reuses the same samples. Jacobian of (x,y) -> (u,y) is 1.

/// Panel index ranges [lo, hi) of the integration window.
struct PanelWindow {
    int u_lo = 0, u_hi = 0;
    int y_lo = 0, y_hi = 0;
};

/// Window suited to psi built from a generator supported in [0, a): Gaussian
/// in u around [-a, 0] with `u_margin` extra panels each side, y in
/// [-y_half, y_half] rounded out to whole panels.
inline PanelWindow default_window(const LatticeSpec& lat, double y_half, int u_margin = 4) {
    const int ny = static_cast<int>(std::ceil(y_half / lat.row_spacing()));
    return {-1 - u_margin, u_margin, -ny, ny};
}

struct AlignedGrid {
    LatticeSpec lat;
    int order = 16;
    PanelWindow window;    // region integrated over
    PanelWindow sampled;   // window grown by the largest translation
    std::vector<double> u, wu, y, wy;
    std::vector<cplx> values; // u outer, y inner

    std::size_t nu() const { return u.size(); }
    std::size_t ny() const { return y.size(); }
    cplx at(std::size_t i, std::size_t j) const { return values[i * ny() + j]; }
    double x_at(std::size_t i, std::size_t j) const { return u[i] + lat.shear() * y[j]; }
};

namespace detail {

inline void panel_nodes(int lo, int hi, double width, int order, std::vector<double>& x,
                        std::vector<double>& w) {
    const quad::Rule& r = quad::gauss_legendre(order);
    x.clear();
    w.clear();
    for (int p = lo; p < hi; ++p)
        for (std::size_t k = 0; k < r.size(); ++k) {
            x.push_back((p + 0.5 + 0.5 * r.nodes[k]) * width);
            w.push_back(0.5 * width * r.weights[k]);
        }
}

} // namespace detail

/// Geometry only; `max_shift` is the largest |n| and |m| of translations that
/// will be requested from overlap().
inline AlignedGrid make_aligned_grid(const LatticeSpec& lat, PanelWindow window, int max_shift_n,
                                     int max_shift_m, int order = 16) {
    AlignedGrid g;
    g.lat = lat;
    g.order = order;
    g.window = window;
    g.sampled = {window.u_lo - max_shift_n, window.u_hi + max_shift_n, window.y_lo - max_shift_m,
                 window.y_hi + max_shift_m};
    detail::panel_nodes(g.sampled.u_lo, g.sampled.u_hi, lat.a, order, g.u, g.wu);
    detail::panel_nodes(g.sampled.y_lo, g.sampled.y_hi, lat.row_spacing(), order, g.y, g.wy);
    g.values.assign(g.nu() * g.ny(), cplx{});
    return g;
}

/// Fill the grid with psi evaluated at (x, y) = (u + kappa y, y).
inline void fill(AlignedGrid& g, const Wavefunction& psi, int threads = 1) {
    const std::size_t ny = g.ny();
    parallel_for(g.values.size(), threads, [&](std::size_t k) {
        const std::size_t i = k / ny, j = k % ny;
        g.values[k] = psi({g.x_at(i, j), g.y[j]});
    });
}

/// Fill with the level-l image of h using one P-rule for the whole grid:
/// h^ is tabulated per (y, P_j) and the phases per (u, P_j).
inline void fill_level(AlignedGrid& g, const KernelSpec& ks, const GeneratorFunction& h,
                       int threads = 1, double abs_tol = 1e-12) {
    detail::check_level(ks.level);
    if (ks.shape != g.lat.shape) throw Error("kernel and lattice shapes differ");
    auto [lo, hi] = h.integration_range();
    double umax = 0.0;
    for (double u : g.u) umax = std::max(umax, std::abs(u));
    const auto rule = detail::level_rule(ks, gh_nodes_for(ks.level, umax + std::max(std::abs(lo), std::abs(hi))));
    const std::size_t nP = rule.P.size(), nu = g.nu(), ny = g.ny();
    std::vector<cplx> spec(ny * nP), phase(nu * nP);
    parallel_for(ny, threads, [&](std::size_t j) {
        for (std::size_t p = 0; p < nP; ++p)
            spec[j * nP + p] = rule.base[p] == cplx{} ? cplx{} : fourier_integral(h, g.y[j] + rule.P[p], abs_tol);
    });
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t p = 0; p < nP; ++p) phase[i * nP + p] = rule.base[p] * std::polar(1.0, rule.P[p] * g.u[i]);
    parallel_for(nu, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            cplx acc{};
            const cplx* ph = &phase[i * nP];
            const cplx* sp = &spec[j * nP];
            for (std::size_t p = 0; p < nP; ++p) acc += ph[p] * sp[p];
            g.values[i * ny + j] = std::polar(1.0, 0.5 * g.y[j] * g.u[i]) * acc;
        }
    });
}

/// <f, T_1^n T_2^m g> over the window. f and g must share geometry.
inline cplx overlap(const AlignedGrid& f, const AlignedGrid& g, SiteIndex s) {
    if (f.values.size() != g.values.size() || f.order != g.order)
        throw Error("overlap of grids with different geometry");
    const PanelWindow& w = f.window;
    const PanelWindow& sp = f.sampled;
    if (w.u_lo + s.n < sp.u_lo || w.u_hi + s.n > sp.u_hi || w.y_lo + s.m < sp.y_lo ||
        w.y_hi + s.m > sp.y_hi)
        throw Error("translation exceeds the sampled grid");
    const std::size_t ny = f.ny();
    const std::size_t i0 = static_cast<std::size_t>(w.u_lo - sp.u_lo) * f.order;
    const std::size_t i1 = static_cast<std::size_t>(w.u_hi - sp.u_lo) * f.order;
    const std::size_t j0 = static_cast<std::size_t>(w.y_lo - sp.y_lo) * f.order;
    const std::size_t j1 = static_cast<std::size_t>(w.y_hi - sp.y_lo) * f.order;
    const long di = static_cast<long>(s.n) * f.order, dj = static_cast<long>(s.m) * f.order;
    cplx total{};
    for (std::size_t i = i0; i < i1; ++i) {
        cplx row{};
        for (std::size_t j = j0; j < j1; ++j) {
            const cplx tg = g.values[(i + di) * ny + (j + dj)];
            const cplx ph = translation_phase(f.lat, s, {f.x_at(i, j), f.y[j]});
            row += f.wy[j] * std::conj(f.values[i * ny + j]) * ph * tg;
        }
        total += f.wu[i] * row;
    }
    return total;
}

inline double squared_norm(const AlignedGrid& g) { return overlap(g, g, {0, 0}).real(); }

} // namespace lmra
