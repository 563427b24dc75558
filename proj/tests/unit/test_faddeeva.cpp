#include <lmra/faddeeva.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lmra;

namespace {

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

} // namespace

TEST(ComplexErf, SpecialValues) {
    EXPECT_EQ(complex_erf(0.0), cplx{});
    EXPECT_NEAR(complex_erf(1.0).real(), 0.8427008, 1e-7);
    EXPECT_NEAR(complex_erf(1.0).real(), std::erf(1.0), 1e-15);
    const cplx ei = complex_erf(I);
    EXPECT_NEAR(ei.real(), 0.0, 1e-15);
    EXPECT_NEAR(ei.imag(), 1.6504258, 1e-7);
}

TEST(ComplexErf, MatchesStdErfOnRealAxis) {
    for (double x = -6.0; x <= 6.0; x += 0.37) EXPECT_NEAR(complex_erf(x).real(), std::erf(x), 2e-15) << x;
}

TEST(ComplexErf, MatchesHighPrecisionSeries) {
    double worst = 0.0;
    for (double r : {0.05, 0.5, 0.99, 1.01, 2.0, 3.5, 5.0, 6.5, 8.0})
        for (int k = 0; k < 24; ++k) {
            const cplx z = std::polar(r, 2.0 * pi * (k + 0.3) / 24);
            const cplx want = oracle::erf(z);
            // only where the value itself is representable
            if (!std::isfinite(std::abs(want))) continue;
            worst = std::max(worst, rel(complex_erf(z), want));
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(ComplexErf, Symmetries) {
    for (cplx z : {cplx{0.3, 0.7}, cplx{2.1, -1.4}, cplx{-4.0, 3.0}, cplx{0.9, 0.1}}) {
        EXPECT_LT(std::abs(complex_erf(-z) + complex_erf(z)), 1e-15 * std::max(1.0, std::abs(complex_erf(z))));
        EXPECT_LT(std::abs(complex_erf(std::conj(z)) - std::conj(complex_erf(z))),
                  1e-15 * std::max(1.0, std::abs(complex_erf(z))));
    }
}

TEST(ComplexErf, LargeArgumentsWithinBound) {
    // along the real directions erf saturates at +-1
    EXPECT_NEAR(std::abs(complex_erf(cplx{25.0, 0.0}) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(complex_erf(cplx{-25.0, 3.0}) + 1.0), 0.0, 1e-15);
    EXPECT_TRUE(std::isfinite(std::abs(complex_erf(cplx{18.0, 18.0}))));
}

TEST(ComplexErf, OverflowIsAnError) {
    EXPECT_THROW(complex_erf(cplx{0.0, 27.0}), OverflowError);
    EXPECT_THROW(complex_erf(cplx{2.0, -30.0}), OverflowError);
}

TEST(ComplexErf, ScaledFormRecombines) {
    for (cplx z : {cplx{1.5, 2.0}, cplx{-2.5, 1.0}, cplx{0.2, -0.4}, cplx{4.0, -3.9}}) {
        const ScaledErf s = scaled_erf(z);
        const cplx back = std::exp(-z * z) * (double(s.sign) * std::exp(z * z) + s.remainder);
        EXPECT_LT(rel(back, oracle::erf(z)), 1e-12) << z;
    }
}
