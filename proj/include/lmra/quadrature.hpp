#pragma once

// Gauss-Legendre / Gauss-Hermite rules and the integration drivers shared by
// the generator, zak and landau modules.

#include <lmra/common.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <type_traits>
#include <vector>

namespace lmra::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Rule compute_gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

// Physicists' weight exp(-x^2). Nodes start from the Golub-Welsch eigenvalues
// and are polished by Newton on the normalized Hermite recurrence, which also
// gives the weights; weights below the double range come out as zero.
inline Rule compute_gauss_hermite(int n) {
    constexpr double pim4 = 0.7511255444649425; // pi^{-1/4}
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(0.5 * j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = eig.eigenvalues()[i];
        double pp = 0.0;
        for (int it = 0; it < 20; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        r.nodes[i] = z;
        r.weights[i] = std::isfinite(pp) ? 2.0 / (pp * pp) : 0.0;
    }
    // exact symmetry
    for (int i = 0; i < n / 2; ++i) {
        const double z = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
        const double w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

template <class Compute>
const Rule& cached_rule(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mu, int n,
                        Compute compute) {
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule>(compute(n));
    return *slot;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]. Cached, thread-safe.
inline const Rule& gauss_legendre(int n) {
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mu;
    return detail::cached_rule(cache, mu, n, detail::compute_gauss_legendre);
}

/// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
inline const Rule& gauss_hermite(int n) {
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mu;
    return detail::cached_rule(cache, mu, n, detail::compute_gauss_hermite);
}

/// Composite Gauss-Legendre over `panels` equal panels of [lo, hi].
template <class F>
auto integrate_panels(F&& f, double lo, double hi, int panels, int order = 16) {
    using R = std::invoke_result_t<F&, double>;
    const Rule& rule = gauss_legendre(order);
    const double width = (hi - lo) / panels;
    R total{};
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        R part{};
        for (std::size_t k = 0; k < rule.size(); ++k)
            part += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
        total += 0.5 * width * part;
    }
    return total;
}

template <class R>
struct Estimate {
    R value{};
    double error = 0.0;
};

namespace detail {

inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
auto gk15(F& f, double lo, double hi) {
    using R = std::invoke_result_t<F&, double>;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const R fc = f(c);
    R k = gk_wk[7] * fc;
    R g = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const R s = f(c - h * gk_x[i]) + f(c + h * gk_x[i]);
        k += gk_wk[i] * s;
        if (i % 2 == 1) g += gk_wg[i / 2] * s;
    }
    return Estimate<R>{k * h, std::abs(k - g) * h};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) with an absolute tolerance.
/// Throws QuadratureError when `max_intervals` is exhausted.
template <class F>
auto integrate_adaptive(F&& f, double lo, double hi, double abs_tol = 1e-10,
                        int max_intervals = 4000) {
    using R = std::invoke_result_t<F&, double>;
    struct Piece {
        double lo, hi;
        Estimate<R> est;
        bool operator<(const Piece& o) const { return est.error < o.est.error; }
    };
    std::priority_queue<Piece> heap;
    auto first = detail::gk15(f, lo, hi);
    R total = first.value;
    double err = first.error;
    heap.push({lo, hi, first});
    int count = 1;
    while (!(err <= abs_tol)) {
        if (count >= max_intervals || !std::isfinite(err)) {
            cplx shown;
            if constexpr (std::is_same_v<R, cplx>) shown = total;
            else shown = cplx(static_cast<double>(total), 0.0);
            throw QuadratureError("adaptive quadrature did not converge", shown, err);
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        auto left = detail::gk15(f, worst.lo, mid);
        auto right = detail::gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.est.value;
        err += left.error + right.error - worst.est.error;
        heap.push({worst.lo, mid, left});
        heap.push({mid, worst.hi, right});
        ++count;
        // The running error sum drifts; recompute it occasionally.
        if (count % 64 == 0) {
            auto copy = heap;
            double e = 0.0;
            while (!copy.empty()) {
                e += copy.top().est.error;
                copy.pop();
            }
            err = e;
        }
    }
    return Estimate<R>{total, err};
}

/// Panel rule checked against a rule with doubled panels; falls back to the
/// adaptive driver when the two disagree by more than `abs_tol`.
template <class F>
auto integrate_smooth(F&& f, double lo, double hi, int panels, double abs_tol = 1e-10,
                      int order = 16) {
    using R = std::invoke_result_t<F&, double>;
    panels = std::max(panels, 1);
    const R coarse = integrate_panels(f, lo, hi, panels, order);
    const R fine = integrate_panels(f, lo, hi, 2 * panels, order);
    const double diff = std::abs(fine - coarse);
    if (diff <= abs_tol) return Estimate<R>{fine, diff};
    return integrate_adaptive(f, lo, hi, abs_tol);
}

} // namespace lmra::quad
