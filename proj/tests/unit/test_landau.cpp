#include <lmra/landau.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lmra;

namespace {

const LatticeSpec tri = make_lattice(Shape::triangular, 3);
const LatticeSpec sq = make_lattice(Shape::square, 2);
const KernelSpec k_tri{Shape::triangular, 0};
const KernelSpec k_sq{Shape::square, 0};

/// Normalized symmetric-gauge LLL Gaussian centred at the origin.
cplx lll_gaussian(Vec2 r) { return std::exp(-0.25 * (r.x * r.x + r.y * r.y)) / std::sqrt(2 * pi); }

} // namespace

TEST(Kernel, SquareAtOrigin) {
    const cplx k = kernel_eval(k_sq, {0, 0}, 0);
    EXPECT_NEAR(k.real(), 0.2996557, 1e-7);
    EXPECT_NEAR(k.real(), 1.0 / (std::sqrt(2.0) * std::pow(pi, 0.75)), 1e-15);
    EXPECT_EQ(k.imag(), 0.0);
}

TEST(Kernel, TriangularModulusAtOrigin) {
    const double k = std::abs(kernel_eval(k_tri, {0, 0}, 0));
    EXPECT_NEAR(k, 0.2788611, 1e-7);
    EXPECT_NEAR(k, 1.0 / (std::pow(pi, 0.75) * std::sqrt(4.0 / std::sqrt(3.0))), 1e-15);
}

TEST(Kernel, SquareMatchesTextbookForm) {
    // e^{ixy/2} e^{iys} e^{-(x+s)^2/2} / (sqrt2 pi^{3/4})
    for (auto [x, y, s] : {std::tuple{0.3, -1.2, 0.8}, std::tuple{-2.0, 0.5, 1.9}, std::tuple{1.1, 2.2, -0.4}}) {
        const cplx want = std::polar(1.0, 0.5 * x * y + y * s) * std::exp(-0.5 * (x + s) * (x + s)) /
                          (std::sqrt(2.0) * std::pow(pi, 0.75));
        EXPECT_LT(std::abs(kernel_eval(k_sq, {x, y}, s) - want), 1e-16);
    }
}

TEST(Kernel, TriangularGaussianDecayAlongX) {
    const double k0 = std::abs(kernel_eval(k_tri, {0, 0}, 0));
    for (double x : {0.5, 1.5, 3.0, 5.0})
        EXPECT_NEAR(std::abs(kernel_eval(k_tri, {x, 0}, 0)) / k0, std::exp(-3.0 / 8.0 * x * x), 1e-14);
}

TEST(Kernel, HermiteFunctionsAreOrthonormal) {
    const auto& gh = quad::gauss_hermite(60);
    for (int l = 0; l <= 5; ++l)
        for (int k = 0; k <= l; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < gh.size(); ++j)
                acc += gh.weights[j] * hermite_poly_normalized(l, gh.nodes[j]) * hermite_poly_normalized(k, gh.nodes[j]);
            EXPECT_NEAR(acc, l == k ? 1.0 : 0.0, 1e-13) << l << " " << k;
        }
    // direct integral of |f_l|^2 on a plain panel rule, independent of the GH nodes
    for (int l = 0; l <= 5; ++l)
        EXPECT_NEAR(quad::integrate_panels([l](double P) { return std::pow(hermite_function(l, P), 2); }, -14, 14, 40),
                    1.0, 1e-10);
}

TEST(Kernel, LevelZeroQuadratureMatchesClosedForm) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-6.0, 6.0), S(0.0, 2.7);
    for (const KernelSpec& ks : {k_tri, k_sq})
        for (int i = 0; i < 25; ++i) {
            const Vec2 r{U(rng), U(rng)};
            const double s = S(rng);
            EXPECT_LT(std::abs(kernel_level(ks, r, s) - kernel_eval(ks, r, s)), 1e-12);
        }
}

TEST(Kernel, LevelOneIsTheDerivativeOfLevelZero) {
    // f_1 = sqrt2 P f_0 makes I_1(w) = -i sqrt2 dI_0/dw = 2 sqrt2 i beta w C e^{-beta w^2}
    for (const KernelSpec& base : {k_tri, k_sq}) {
        const KernelSpec k1{base.shape, 1};
        for (double w : {-5.0, -1.3, 0.0, 0.4, 2.2, 7.0}) {
            const cplx want = 2.0 * std::sqrt(2.0) * I * base.beta() * w * base.prefactor() *
                              std::exp(-base.beta() * w * w);
            EXPECT_LT(std::abs(level_integral(k1, w) - want), 1e-12) << w;
        }
    }
}

TEST(Kernel, LevelParity) {
    // I_l(-w) = (-1)^l I_l(w) from the parity of f_l
    for (int l = 0; l <= 4; ++l) {
        const KernelSpec ks{Shape::triangular, l};
        for (double w : {0.3, 1.7, 4.0}) {
            const cplx plus = level_integral(ks, w), minus = level_integral(ks, -w);
            EXPECT_LT(std::abs(minus - (l % 2 ? -1.0 : 1.0) * plus), 1e-13) << l << " " << w;
        }
        if (l % 2) {
            EXPECT_LT(std::abs(level_integral(ks, 0.0)), 1e-15);
        }
    }
}

TEST(Kernel, LevelRange) {
    EXPECT_THROW(kernel_level(KernelSpec{Shape::square, 11}, {0, 0}, 0), Error);
    EXPECT_THROW(kernel_level(KernelSpec{Shape::square, -1}, {0, 0}, 0), Error);
    EXPECT_NO_THROW(kernel_level(KernelSpec{Shape::square, 10}, {1, 1}, 0.5));
}

TEST(ClosedForm, Haar3MatchesLiteralErfExpression) {
    const double a = tri.a;
    for (Vec2 r : {Vec2{0, 0}, Vec2{a, 0}, Vec2{a / 2, 2 * pi / a}, Vec2{-1.3, 2.1}, Vec2{-a, -2 * pi / a},
                   Vec2{2.5, -1.0}})
        EXPECT_LT(std::abs(haar3_closed_form(r) - oracle::psi3_literal(r.x, r.y)), 1e-14);
}

TEST(ClosedForm, SquareT2MatchesLiteralRemarkFormula) {
    for (Vec2 r : {Vec2{0, 0}, Vec2{sq.a, 0}, Vec2{-1, 1}, Vec2{-2, -1.5}, Vec2{0.5, 2}})
        EXPECT_LT(std::abs(haar2_square_closed_form(r) - oracle::t2_square_literal(r.x, r.y)), 1e-14);
}

TEST(ClosedForm, FiniteFarAway) {
    for (Vec2 r : {Vec2{0, 300}, Vec2{300 / sqrt3, 300}, Vec2{-200, 50}, Vec2{40, -400}}) {
        EXPECT_TRUE(std::isfinite(std::abs(haar3_closed_form(r))));
        EXPECT_TRUE(std::isfinite(std::abs(haar2_square_closed_form(r))));
    }
}

TEST(Synthesize, Haar3MatchesClosedForm) {
    const auto h = make_t_d(haar(3), tri);
    const double a = tri.a;
    for (Vec2 r : {Vec2{0, 0}, Vec2{a, 0}, Vec2{a / 2, 2 * pi / a}})
        EXPECT_LT(std::abs(synthesize(k_tri, h, r) - haar3_closed_form(r)), 1e-6);
}

TEST(Synthesize, SquareT2MatchesRemarkFormula) {
    const auto h = make_t_d(haar2_square_filter(), sq);
    for (Vec2 r : {Vec2{0, 0}, Vec2{1.0, -0.5}, Vec2{-2.0, 1.5}})
        EXPECT_LT(std::abs(synthesize(k_sq, h, r) - oracle::t2_square_literal(r.x, r.y)), 1e-6);
}

TEST(Synthesize, ZeroGenerator) {
    const auto zero = make_generator([](double) { return cplx{}; }, 0.0, tri.a, tri.a);
    EXPECT_EQ(synthesize(k_tri, zero, {0.4, -0.2}), cplx{});
}

TEST(Synthesize, Linear) {
    const FilterBank f1 = haar(3);
    const FilterBank f2{3, {{0, {0.2, 0.5}}, {2, {-0.7, 0.1}}}};
    const cplx alpha{0.3, -1.2};
    auto combo = make_generator([&](double s) { return alpha * t_d_eval(f1, tri, s) + t_d_eval(f2, tri, s); },
                                0.0, tri.a, tri.a, 2);
    for (Vec2 r : {Vec2{0.1, 0.2}, Vec2{-1.5, 2.0}}) {
        const cplx lhs = synthesize(k_tri, combo, r);
        const cplx rhs = alpha * synthesize(k_tri, make_t_d(f1, tri), r) + synthesize(k_tri, make_t_d(f2, tri), r);
        EXPECT_LT(std::abs(lhs - rhs), 1e-9);
    }
}

TEST(Synthesize, GeneralFilterMatchesClosedForm) {
    const FilterBank f{3, {{-1, {0.3, 0.1}}, {0, 0.6}, {4, {-0.2, 0.5}}}};
    const auto h = make_t_d(f, tri);
    for (Vec2 r : {Vec2{0.7, -0.3}, Vec2{-3.0, 2.0}, Vec2{1.0, 6.0}})
        EXPECT_LT(std::abs(synthesize(k_tri, h, r) - lll_closed_form(tri, f, r)), 1e-9);
}

TEST(Synthesize, LevelOneSwappedOrderMatchesDirectIntegral) {
    const KernelSpec k1{Shape::triangular, 1};
    const auto h = make_t_d(haar(3), tri);
    for (Vec2 r : {Vec2{0.2, 0.3}, Vec2{-2.0, 1.0}}) {
        const cplx direct = quad::integrate_panels([&](double s) { return kernel_level(k1, r, s) * h(s); }, 0.0, tri.a, 16);
        EXPECT_LT(std::abs(synthesize(k1, h, r) - direct), 1e-10);
    }
}

TEST(Asymptotic, Haar3FarOffTheSingularLine) {
    const double a = tri.a;
    const cplx c = haar3_closed_form({5 * a, 0});
    EXPECT_LT(std::abs(haar3_asymptotic({5 * a, 0}) - c) / std::abs(c), 0.01);
}

TEST(Asymptotic, Haar3DecaysLikeOneOverYOnTheLine) {
    const double a = tri.a;
    const double c1 = std::abs(haar3_closed_form({20 * a / sqrt3, 20 * a})) * 20 * a;
    const double c2 = std::abs(haar3_closed_form({40 * a / sqrt3, 40 * a})) * 40 * a;
    EXPECT_NEAR(c1 / c2, 1.0, 0.2);
}

TEST(Asymptotic, Haar3GaussianEnvelopeOffTheLine) {
    // |psi| e^{(3/8) u^2} stays of order 1/|alpha| away from u = 0
    const double a = tri.a;
    for (double u : {3.0, 5.0, 7.0}) {
        const Vec2 r{u + a, a * sqrt3};
        const double env = std::abs(haar3_closed_form(r)) * std::exp(3.0 / 8.0 * u * u);
        EXPECT_GT(env, 1e-3);
        EXPECT_LT(env, 1.0);
    }
}

TEST(Asymptotic, SquareT2) {
    for (Vec2 r : {Vec2{4.0, 20.0}, Vec2{-5.0, 30.0}, Vec2{3.0, -25.0}}) {
        const cplx c = haar2_square_closed_form(r);
        EXPECT_LT(std::abs(haar2_square_asymptotic(r) - c) / std::abs(c), 0.05) << r.x << " " << r.y;
    }
}

TEST(Translation, IdentityAndSign) {
    const Wavefunction g = lll_gaussian;
    const Wavefunction same = magnetic_translate(g, tri, {0, 0});
    EXPECT_EQ(same({0.3, 0.4}), g({0.3, 0.4}));
    // at the centre of site (1,1) the phase reduces to the sign (-1)^{nm}
    const Vec2 c = site_position(tri, {1, 1});
    const cplx ph = translation_phase(tri, {1, 1}, c);
    EXPECT_NEAR(ph.real(), -1.0, 1e-15);
    EXPECT_NEAR(ph.imag(), 0.0, 1e-15);
}

TEST(Translation, GaussianPeakMoves) {
    const Wavefunction t = magnetic_translate(lll_gaussian, tri, {1, 0});
    EXPECT_NEAR(std::abs(t({-tri.a, 0})), std::abs(lll_gaussian({0, 0})), 1e-15);
    EXPECT_LT(std::abs(t({-tri.a + 0.1, 0})), std::abs(t({-tri.a, 0})));
    EXPECT_LT(std::abs(t({-tri.a - 0.1, 0})), std::abs(t({-tri.a, 0})));
}

TEST(Translation, GeneratorsCommute) {
    for (const LatticeSpec& lat : {tri, sq}) {
        const Wavefunction t1t2 = magnetic_translate(magnetic_translate(lll_gaussian, lat, {0, 1}), lat, {1, 0});
        const Wavefunction t2t1 = magnetic_translate(magnetic_translate(lll_gaussian, lat, {1, 0}), lat, {0, 1});
        const Wavefunction both = magnetic_translate(lll_gaussian, lat, {1, 1});
        for (Vec2 r : {Vec2{0.3, -0.7}, Vec2{-2.0, -1.5}}) {
            EXPECT_LT(std::abs(t1t2(r) - t2t1(r)), 1e-14);
            EXPECT_LT(std::abs(t1t2(r) - both(r)), 1e-14);
        }
    }
}

TEST(Translation, MapsThePsi3FamilyIntoItself) {
    // T_1 psi_3 is the image of T_3(s - a): check against synthesis
    const double a = tri.a;
    const auto shifted = make_generator([a](double s) { return t_d_eval(haar(3), tri, s - a); }, a, 2 * a, a, 2);
    const Wavefunction t = magnetic_translate(haar3_closed_form, tri, {1, 0});
    for (Vec2 r : {Vec2{-a, 0.2}, Vec2{0.5, -1.0}})
        EXPECT_LT(std::abs(t(r) - synthesize(k_tri, shifted, r)), 1e-9);
}

TEST(AlignedGrid, TranslatedOverlapEqualsExplicitTranslate) {
    const PanelWindow w{-4, 4, -5, 5};
    auto f = make_aligned_grid(tri, w, 2, 3);
    auto g = make_aligned_grid(tri, w, 2, 3);
    fill(f, haar3_closed_form);
    fill(g, lll_gaussian);
    auto gt = make_aligned_grid(tri, w, 2, 3);
    const SiteIndex s{1, -2};
    fill(gt, magnetic_translate(lll_gaussian, tri, s));
    EXPECT_LT(std::abs(overlap(f, g, s) - overlap(f, gt, {0, 0})), 1e-13);
}

TEST(AlignedGrid, GaussianNormAndCovariance) {
    const PanelWindow w{-4, 4, -5, 5};
    auto f = make_aligned_grid(tri, w, 0, 0);
    fill(f, lll_gaussian);
    EXPECT_NEAR(squared_norm(f), 1.0, 1e-10);
    // <T f, T g> = <f, g> for a second state
    const Wavefunction g = [](Vec2 r) { return cplx(r.x, -r.y) * lll_gaussian(r) / std::sqrt(2.0); };
    auto gg = make_aligned_grid(tri, w, 0, 0);
    fill(gg, g);
    const cplx base = overlap(f, gg, {0, 0});
    for (SiteIndex s : {SiteIndex{1, 0}, SiteIndex{0, 1}, SiteIndex{-1, 2}}) {
        auto fs = make_aligned_grid(tri, w, 0, 0), gs = make_aligned_grid(tri, w, 0, 0);
        fill(fs, magnetic_translate(lll_gaussian, tri, s));
        fill(gs, magnetic_translate(g, tri, s));
        EXPECT_LT(std::abs(overlap(fs, gs, {0, 0}) - base), 1e-9);
    }
}

TEST(AlignedGrid, RejectsOutOfRangeShift) {
    auto f = make_aligned_grid(tri, {-2, 2, -2, 2}, 1, 1);
    EXPECT_THROW(overlap(f, f, {2, 0}), Error);
}

TEST(AlignedGrid, FillLevelZeroMatchesClosedForm) {
    auto g = make_aligned_grid(tri, {-3, 2, -2, 2}, 0, 0, 8);
    fill_level(g, k_tri, make_t_d(haar(3), tri));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.nu(); i += 3)
        for (std::size_t j = 0; j < g.ny(); j += 3)
            worst = std::max(worst, std::abs(g.at(i, j) - haar3_closed_form({g.x_at(i, j), g.y[j]})));
    EXPECT_LT(worst, 1e-11);
}

TEST(AlignedGrid, FillLevelOneMatchesSynthesize) {
    const KernelSpec k1{Shape::triangular, 1};
    const auto h = make_t_d(haar(3), tri);
    auto g = make_aligned_grid(tri, {-2, 1, -1, 1}, 0, 0, 4);
    fill_level(g, k1, h);
    for (std::size_t i = 0; i < g.nu(); i += 2)
        for (std::size_t j = 0; j < g.ny(); j += 3)
            EXPECT_LT(std::abs(g.at(i, j) - synthesize(k1, h, {g.x_at(i, j), g.y[j]})), 1e-9);
}

TEST(WaveFieldSampling, ThreadCountDoesNotChangeValues) {
    const auto a = sample_field(haar3_closed_form, -3, 3, 17, -3, 3, 13, "haar3", 1);
    const auto b = sample_field(haar3_closed_form, -3, 3, 17, -3, 3, 13, "haar3", 4);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.norm_estimate, b.norm_estimate);
    EXPECT_GT(a.norm_estimate, 0.0);
    EXPECT_DOUBLE_EQ(a.x_at(16), 3.0);
    EXPECT_THROW(sample_field(haar3_closed_form, 0, 1, 0, 0, 1, 1), Error);
}
