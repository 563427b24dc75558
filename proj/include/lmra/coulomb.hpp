#pragma once

// Coulomb energy of the crystal built from one orbital: the classical Wigner
// energy by Ewald summation, and the direct/exchange pair integrals by
// seeded Monte Carlo, assembled into the quantum correction
//   dE = 1/2 sum_{s in C} [E_d(s) - E_ex(s) - 1/|R_s|].

#include <lmra/common.hpp>
#include <lmra/landau.hpp>
#include <lmra/lattice.hpp>
#include <lmra/parallel.hpp>
#include <lmra/quadrature.hpp>
#include <lmra/rng.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lmra {

// ---------------------------------------------------------------------------
// Wigner energy

struct EwaldResult {
    double energy = 0.0; // per electron
    double eta = 0.0;
    int real_terms = 0;
    int reciprocal_terms = 0;
};

/// Energy per electron of a triangular lattice of unit charges with cell area
/// `area` in a neutralizing background. `eta` is the splitting parameter.
inline EwaldResult ewald_triangular(double area, double eta) {
    if (!(area > 0.0) || !(eta > 0.0)) throw Error("Ewald sum needs positive area and eta");
    constexpr double cut = 7.0; // erfc(7) ~ 4e-23
    const double L = std::sqrt(2.0 * area / sqrt3);
    EwaldResult res;
    res.eta = eta;

    double real = 0.0;
    const int nr = static_cast<int>(std::ceil(cut / eta / (0.5 * sqrt3 * L))) + 1;
    for (int n = -nr; n <= nr; ++n)
        for (int m = -nr; m <= nr; ++m) {
            if (n == 0 && m == 0) continue;
            const double R = L * std::hypot(n + 0.5 * m, 0.5 * sqrt3 * m);
            if (eta * R > cut) continue;
            real += std::erfc(eta * R) / R;
            ++res.real_terms;
        }

    // reciprocal lattice: b1 = (2pi/L)(1, -1/sqrt3), b2 = (2pi/L)(0, 2/sqrt3)
    double recip = 0.0;
    const double g0 = 2.0 * pi / L;
    const int ng = static_cast<int>(std::ceil(2.0 * eta * cut / g0)) + 1;
    for (int n = -ng; n <= ng; ++n)
        for (int m = -ng; m <= ng; ++m) {
            if (n == 0 && m == 0) continue;
            const double G = g0 * std::hypot(double(n), (-n + 2.0 * m) / sqrt3);
            if (G / (2.0 * eta) > cut) continue;
            recip += std::erfc(G / (2.0 * eta)) / G;
            ++res.reciprocal_terms;
        }

    res.energy = 0.5 * (real + 2.0 * pi / area * recip - 2.0 * sqrt_pi / (area * eta) -
                        2.0 * eta / sqrt_pi);
    return res;
}

/// Classical Wigner-crystal energy per electron at filling nu (cell area 2pi/nu).
inline double wigner_energy(double nu, double eta_scale = 1.0) {
    if (!(nu > 0.0 && nu <= 1.0)) throw Error("filling factor must lie in (0, 1]");
    const double area = 2.0 * pi / nu;
    return ewald_triangular(area, eta_scale * std::sqrt(pi / area)).energy;
}

/// Reference value of the earlier Gaussian-based construction; kept for
/// comparison only.
inline constexpr double gaussian_construction_delta_e = 0.0657;
/// The rough Monte Carlo value quoted for psi_3.
inline constexpr double quoted_haar3_delta_e = 0.3184;
/// Kinetic energy per electron (hbar omega / 2) in the same units.
inline constexpr double kinetic_term = 0.5;

// ---------------------------------------------------------------------------
// Monte Carlo configuration and densities

enum class Sampler { uniform, gaussian_importance };

inline std::string to_string(Sampler s) {
    return s == Sampler::uniform ? "uniform" : "gaussian-importance";
}

inline Sampler parse_sampler(const std::string& s) {
    if (s == "uniform") return Sampler::uniform;
    if (s == "gaussian-importance" || s == "gaussian") return Sampler::gaussian_importance;
    throw UnknownName("unknown sampler '" + s + "'");
}

struct MonteCarloConfig {
    std::uint64_t seed = 42;
    std::int64_t n_points = 250000;
    double box_half_width = 0.0; // 0: six lattice spacings
    Sampler sampler = Sampler::gaussian_importance;
    int blocks = 64;             // fixed partition of the sample indices
    int threads = 1;             // does not affect results
    int moment_panels = 24;      // per axis, for box norm and moments
};

struct Box {
    Vec2 lo, hi;
    double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
    bool contains(Vec2 r) const { return r.x >= lo.x && r.x < hi.x && r.y >= lo.y && r.y < hi.y; }
    Box shifted(Vec2 c) const { return {lo + c, hi + c}; }
    Vec2 centre() const { return 0.5 * (lo + hi); }
};

inline Box box_around(Vec2 c, double half_width) {
    return {{c.x - half_width, c.y - half_width}, {c.x + half_width, c.y + half_width}};
}

inline bool overlaps(const Box& a, const Box& b) {
    return a.lo.x < b.hi.x && b.lo.x < a.hi.x && a.lo.y < b.hi.y && b.lo.y < a.hi.y;
}

inline Box bounding_box(const Box& a, const Box& b) {
    return {{std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y)},
            {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y)}};
}

/// |psi|^2 restricted to a box: its mass, mean and covariance.
struct DensityModel {
    Box box;
    double norm = 0.0;
    Vec2 mean;
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;

    double smallest_variance() const {
        const double tr = 0.5 * (cxx + cyy);
        const double det = cxx * cyy - cxy * cxy;
        return tr - std::sqrt(std::max(0.0, tr * tr - det));
    }
    DensityModel shifted(Vec2 c) const {
        DensityModel d = *this;
        d.box = box.shifted(c);
        d.mean = mean + c;
        return d;
    }
};

inline DensityModel analyse_density(const Wavefunction& psi, const Box& box, int panels = 24) {
    const quad::Rule& r = quad::gauss_legendre(8);
    const double wx = (box.hi.x - box.lo.x) / panels, wy = (box.hi.y - box.lo.y) / panels;
    double m0 = 0, mx = 0, my = 0, mxx = 0, mxy = 0, myy = 0;
    for (int px = 0; px < panels; ++px)
        for (std::size_t a = 0; a < r.size(); ++a) {
            const double x = box.lo.x + (px + 0.5 + 0.5 * r.nodes[a]) * wx;
            const double ax = 0.5 * wx * r.weights[a];
            for (int pj = 0; pj < panels; ++pj)
                for (std::size_t b = 0; b < r.size(); ++b) {
                    const double y = box.lo.y + (pj + 0.5 + 0.5 * r.nodes[b]) * wy;
                    const double w = ax * 0.5 * wy * r.weights[b] * std::norm(psi({x, y}));
                    m0 += w;
                    mx += w * x;
                    my += w * y;
                    mxx += w * x * x;
                    mxy += w * x * y;
                    myy += w * y * y;
                }
        }
    if (!(m0 > 0.0)) throw Error("wavefunction vanishes on the sampling box");
    DensityModel d;
    d.box = box;
    d.norm = m0;
    d.mean = {mx / m0, my / m0};
    d.cxx = mxx / m0 - d.mean.x * d.mean.x;
    d.cxy = mxy / m0 - d.mean.x * d.mean.y;
    d.cyy = myy / m0 - d.mean.y * d.mean.y;
    return d;
}

/// Box of the given half-width centred on the centroid of |psi|^2 (one
/// recentring step from a box around `guess`).
inline DensityModel locate_density(const Wavefunction& psi, double half_width, Vec2 guess = {},
                                   int panels = 24) {
    const DensityModel first = analyse_density(psi, box_around(guess, half_width), panels);
    return analyse_density(psi, box_around(first.mean, half_width), panels);
}

// ---------------------------------------------------------------------------
// Proposals

namespace detail {

struct GaussianComponent {
    Vec2 mean;
    double l11 = 1, l21 = 0, l22 = 1; // Cholesky factor
    double inv_xx = 1, inv_xy = 0, inv_yy = 1, norm_const = 1;

    static GaussianComponent from(const DensityModel& d, double inflate) {
        GaussianComponent g;
        g.mean = d.mean;
        const double xx = inflate * d.cxx, xy = inflate * d.cxy, yy = inflate * d.cyy;
        g.l11 = std::sqrt(xx);
        g.l21 = xy / g.l11;
        g.l22 = std::sqrt(std::max(yy - g.l21 * g.l21, 1e-300));
        const double det = xx * yy - xy * xy;
        g.inv_xx = yy / det;
        g.inv_xy = -xy / det;
        g.inv_yy = xx / det;
        g.norm_const = 1.0 / (2.0 * pi * std::sqrt(det));
        return g;
    }
    Vec2 sample(double u1, double u2) const {
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double z1 = rad * std::cos(2.0 * pi * u2), z2 = rad * std::sin(2.0 * pi * u2);
        return {mean.x + l11 * z1, mean.y + l21 * z1 + l22 * z2};
    }
    double density(Vec2 r) const {
        const double dx = r.x - mean.x, dy = r.y - mean.y;
        return norm_const * std::exp(-0.5 * (inv_xx * dx * dx + 2 * inv_xy * dx * dy + inv_yy * dy * dy));
    }
};

/// Mixture of Gaussians plus a uniform floor on a box.
struct Proposal {
    std::vector<GaussianComponent> gaussians;
    std::vector<double> weights; // same length; the uniform weight is the rest
    Box box;
    double uniform_weight = 1.0;

    Vec2 sample(double choice, double u1, double u2) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < gaussians.size(); ++k) {
            acc += weights[k];
            if (choice < acc) return gaussians[k].sample(u1, u2);
        }
        return {box.lo.x + u1 * (box.hi.x - box.lo.x), box.lo.y + u2 * (box.hi.y - box.lo.y)};
    }
    double density(Vec2 r) const {
        double q = box.contains(r) ? uniform_weight / box.area() : 0.0;
        for (std::size_t k = 0; k < gaussians.size(); ++k) q += weights[k] * gaussians[k].density(r);
        return q;
    }
};

inline constexpr double gaussian_share = 0.9;
inline constexpr double variance_inflation = 1.25;
inline constexpr double singular_share = 0.25;

inline Proposal make_proposal(const std::vector<const DensityModel*>& models, const Box& box,
                              Sampler sampler) {
    Proposal p;
    p.box = box;
    if (sampler == Sampler::uniform) return p;
    for (const DensityModel* m : models) {
        p.gaussians.push_back(GaussianComponent::from(*m, variance_inflation));
        p.weights.push_back(gaussian_share / models.size());
    }
    p.uniform_weight = 1.0 - gaussian_share;
    return p;
}

/// Stream id for the integral over site s; kind 0 direct, 1 exchange.
inline std::uint32_t stream_id(SiteIndex s, int kind) {
    return (std::uint32_t(s.n & 0x7fff) << 16) | (std::uint32_t(s.m & 0x7fff) << 1) |
           std::uint32_t(kind);
}

} // namespace detail

struct McEstimate {
    double value = 0.0;      // real part
    double stderr_ = 0.0;
    double imag = 0.0;       // imaginary residual
    double imag_stderr = 0.0;
    std::int64_t n_points = 0;
};

namespace detail {

/// Estimate int_{b1 x b2} f(r1, r2) with r1 ~ q1 and r2 ~ mixture of q2 and,
/// when rho_c > 0, a 1/|r2 - r1| polar density of radius rho_c around r1
/// that cancels the Coulomb singularity.
template <class F>
McEstimate integrate_pair(F&& f, const Proposal& q1, const Proposal& q2, const Box& b1,
                          const Box& b2, double rho_c, const MonteCarloConfig& cfg,
                          std::uint32_t stream) {
    if (cfg.n_points < 1) throw Error("n_points must be >= 1");
    const int blocks = static_cast<int>(std::min<std::int64_t>(std::max(cfg.blocks, 1), cfg.n_points));
    const double p_sing = rho_c > 0.0 ? singular_share : 0.0;
    std::vector<cplx> block_mean(blocks);
    parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        const std::int64_t lo = cfg.n_points * std::int64_t(b) / blocks;
        const std::int64_t hi = cfg.n_points * std::int64_t(b + 1) / blocks;
        cplx sum{};
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto d0 = uniform_pair(cfg.seed, i, stream, 0);
            const auto d1 = uniform_pair(cfg.seed, i, stream, 1);
            const auto d2 = uniform_pair(cfg.seed, i, stream, 2);
            const auto d3 = uniform_pair(cfg.seed, i, stream, 3);
            const Vec2 r1 = q1.sample(d0[0], d0[1], d1[0]);
            Vec2 r2;
            if (d1[1] < p_sing) {
                const double rad = rho_c * d2[0], th = 2.0 * pi * d2[1];
                r2 = {r1.x + rad * std::cos(th), r1.y + rad * std::sin(th)};
            } else {
                r2 = q2.sample(d3[0], d2[0], d2[1]);
            }
            if (!b1.contains(r1) || !b2.contains(r2)) continue;
            const double dist = norm(r1 - r2);
            if (!(dist > 0.0)) continue;
            double q_cond = (1.0 - p_sing) * q2.density(r2);
            if (p_sing > 0.0 && dist < rho_c) q_cond += p_sing / (2.0 * pi * rho_c * dist);
            const double q = q1.density(r1) * q_cond;
            sum += f(r1, r2) / (dist * q);
        }
        block_mean[b] = sum / double(hi - lo);
    });
    McEstimate est;
    est.n_points = cfg.n_points;
    cplx mean{};
    for (int b = 0; b < blocks; ++b) mean += block_mean[b] * double(cfg.n_points * (b + 1) / blocks - cfg.n_points * b / blocks);
    mean /= double(cfg.n_points);
    double vr = 0.0, vi = 0.0;
    for (const cplx& m : block_mean) {
        vr += (m.real() - mean.real()) * (m.real() - mean.real());
        vi += (m.imag() - mean.imag()) * (m.imag() - mean.imag());
    }
    est.value = mean.real();
    est.imag = mean.imag();
    if (blocks > 1) {
        est.stderr_ = std::sqrt(vr / (double(blocks) * (blocks - 1)));
        est.imag_stderr = std::sqrt(vi / (double(blocks) * (blocks - 1)));
    }
    return est;
}

} // namespace detail

/// One orbital prepared for the pair integrals: the wavefunction, its box and
/// the density model inside it.
struct Orbital {
    Wavefunction psi;
    DensityModel model;
};

inline Orbital prepare_orbital(Wavefunction psi, double half_width, Vec2 guess = {}, int panels = 24) {
    Orbital o{std::move(psi), {}};
    o.model = locate_density(o.psi, half_width, guess, panels);
    return o;
}

/// Orbital boxed as the config asks: half-width box_half_width, or six
/// lattice spacings when that is 0.
inline Orbital prepare_orbital(Wavefunction psi, const LatticeSpec& lat, const MonteCarloConfig& cfg,
                               Vec2 guess = {}) {
    const double hw = cfg.box_half_width > 0.0 ? cfg.box_half_width : 6.0 * lat.a;
    return prepare_orbital(std::move(psi), hw, guess, cfg.moment_panels);
}

/// E_d(s) = int |psi_s(r1)|^2 |psi(r2)|^2 / |r1 - r2|, densities normalized to
/// their mass inside the boxes.
inline McEstimate direct_energy(const Orbital& orb, const LatticeSpec& lat, SiteIndex s,
                                const MonteCarloConfig& cfg) {
    const Vec2 c = site_position(lat, s);
    const DensityModel m1 = orb.model.shifted(c);
    const DensityModel& m2 = orb.model;
    const auto q1 = detail::make_proposal({&m1}, m1.box, cfg.sampler);
    const auto q2 = detail::make_proposal({&m2}, m2.box, cfg.sampler);
    // disjoint boxes keep |r1 - r2| away from zero: no singular component needed
    const bool singular = cfg.sampler != Sampler::uniform && overlaps(m1.box, m2.box);
    const double rho_c = singular ? std::sqrt(m2.smallest_variance()) : 0.0;
    const double scale = 1.0 / (m1.norm * m2.norm);
    auto f = [&](Vec2 r1, Vec2 r2) {
        return cplx(scale * std::norm(orb.psi(r1 - c)) * std::norm(orb.psi(r2)), 0.0);
    };
    return detail::integrate_pair(f, q1, q2, m1.box, m2.box, rho_c, cfg, detail::stream_id(s, 0));
}

/// E_ex(s) = int conj(psi_s(r1)) conj(psi(r2)) psi(r1) psi_s(r2) / |r1 - r2|
/// over the box covering both orbitals. Complex in general; the imaginary
/// part is a consistency residual.
inline McEstimate exchange_energy(const Orbital& orb, const LatticeSpec& lat, SiteIndex s,
                                  const MonteCarloConfig& cfg) {
    const Vec2 c = site_position(lat, s);
    const DensityModel m1 = orb.model.shifted(c);
    const DensityModel& m0 = orb.model;
    const Box box = bounding_box(m0.box, m1.box);
    const auto q = detail::make_proposal({&m0, &m1}, box, cfg.sampler);
    const double rho_c = cfg.sampler == Sampler::uniform ? 0.0 : std::sqrt(m0.smallest_variance());
    const double scale = 1.0 / (m0.norm * m0.norm);
    const Wavefunction shifted = magnetic_translate(orb.psi, lat, s);
    auto f = [&](Vec2 r1, Vec2 r2) {
        return scale * std::conj(shifted(r1)) * std::conj(orb.psi(r2)) * orb.psi(r1) * shifted(r2);
    };
    return detail::integrate_pair(f, q, q, box, box, rho_c, cfg, detail::stream_id(s, 1));
}

// ---------------------------------------------------------------------------
// Energy report

struct PairTerm {
    SiteIndex site;
    double distance = 0.0;
    McEstimate direct;
    std::optional<McEstimate> exchange;
    double classical = 0.0; // 1/|R|
    double term() const {
        return direct.value - (exchange ? exchange->value : 0.0) - classical;
    }
};

struct EnergyReport {
    double nu = 0.0;
    double wigner = 0.0;
    double kinetic = kinetic_term;
    std::vector<PairTerm> pairs;
    double delta_e = 0.0;
    double delta_e_stderr = 0.0;
    double total = 0.0; // kinetic + wigner + delta_e
    // provenance
    MonteCarloConfig config;
    double truncation_radius = 0.0;
    double box_norm = 0.0;
    Vec2 orbital_centre;
    bool include_exchange = false;
    std::vector<std::string> warnings;
};

inline constexpr double box_norm_warning = 0.99;

/// dE and the total energy per electron for the crystal on the sublattice of
/// period d, summing pairs out to `truncation_radius`.
inline EnergyReport delta_e(const Orbital& orb, const LatticeSpec& lat, double truncation_radius,
                            const MonteCarloConfig& cfg, bool include_exchange = false) {
    EnergyReport rep;
    rep.nu = 1.0 / lat.d;
    rep.config = cfg;
    rep.truncation_radius = truncation_radius;
    rep.box_norm = orb.model.norm;
    rep.orbital_centre = orb.model.mean;
    rep.include_exchange = include_exchange;
    if (orb.model.norm < box_norm_warning)
        rep.warnings.push_back("wavefunction mass inside the sampling box is " +
                               std::to_string(orb.model.norm) +
                               " (< 0.99); densities were renormalized to the box");
    rep.wigner = wigner_energy(rep.nu);
    double var = 0.0;
    for (SiteIndex s : sublattice_sites(lat, truncation_radius)) {
        PairTerm p;
        p.site = s;
        p.distance = norm(site_position(lat, s));
        p.classical = 1.0 / p.distance;
        p.direct = direct_energy(orb, lat, s, cfg);
        var += p.direct.stderr_ * p.direct.stderr_;
        if (include_exchange) {
            p.exchange = exchange_energy(orb, lat, s, cfg);
            var += p.exchange->stderr_ * p.exchange->stderr_;
        }
        rep.delta_e += 0.5 * p.term();
        rep.pairs.push_back(p);
    }
    rep.delta_e_stderr = 0.5 * std::sqrt(var);
    rep.total = rep.kinetic + rep.wigner + rep.delta_e;
    return rep;
}

} // namespace lmra
