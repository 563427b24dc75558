#include <lmra/filters.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lmra;

TEST(Filters, Haar2ResidualsAreExactlyZero) {
    const auto rep = validate_orthonormality(builtin("haar2"));
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_residual, 1e-15);
}

TEST(Filters, Haar3ResidualsAreExactlyZero) {
    const auto rep = validate_orthonormality(builtin("haar3"));
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_residual, 1e-15);
}

TEST(Filters, UnnormalizedPairFailsWithUnitResidualAtLagZero) {
    FilterBank f{2, {{0, 1.0}, {1, 1.0}}};
    const auto rep = validate_orthonormality(f);
    EXPECT_FALSE(rep.pass);
    ASSERT_EQ(rep.residuals.size(), 1u);
    EXPECT_EQ(rep.residuals[0].lag, 0);
    EXPECT_DOUBLE_EQ(rep.residuals[0].residual.real(), 1.0);
    EXPECT_DOUBLE_EQ(rep.max_residual, 1.0);
}

TEST(Filters, EmptyFilterIsInvalid) {
    EXPECT_THROW(validate_orthonormality(FilterBank{2, {}}), InvalidFilter);
    EXPECT_THROW(validate_sum_rule(FilterBank{3, {}}), InvalidFilter);
}

TEST(Filters, SumRule) {
    EXPECT_LT(validate_sum_rule(builtin("haar3")), 1e-15);
    EXPECT_LT(validate_sum_rule(builtin("haar2")), 1e-15);
    EXPECT_NEAR(validate_sum_rule(FilterBank{2, {{0, 1.0}}}), std::sqrt(2.0) - 1.0, 1e-15);
}

TEST(Filters, BuiltinNames) {
    const FilterBank h3 = builtin("haar3");
    EXPECT_EQ(h3.d, 3);
    ASSERT_EQ(h3.coeffs.size(), 3u);
    for (int n = 0; n < 3; ++n) EXPECT_DOUBLE_EQ(h3[n].real(), 1.0 / std::sqrt(3.0));
    EXPECT_EQ(builtin("haar_7"), haar(7));
    EXPECT_EQ(builtin("haar5").coeffs.size(), 5u);
    EXPECT_THROW(builtin("daub4"), UnknownName);
    EXPECT_THROW(builtin("haar"), UnknownName);
    EXPECT_THROW(builtin("haar1"), InvalidFilter);
}

TEST(Filters, Haar5AutocorrelationAtLagsZeroAndFive) {
    const FilterBank f = builtin("haar5");
    EXPECT_NEAR(std::abs(oracle::autocorrelation(f, 0) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(oracle::autocorrelation(f, 5), cplx{});
    EXPECT_EQ(oracle::autocorrelation(f, -5), cplx{});
    EXPECT_TRUE(validate_orthonormality(f).pass);
}

TEST(Filters, HaarFamilyPassesUpToSixteen) {
    for (int d = 2; d <= 16; ++d) {
        const auto rep = validate_orthonormality(haar(d));
        EXPECT_TRUE(rep.pass) << d;
        EXPECT_LT(rep.max_residual, 1e-14) << d;
        double norm2 = 0.0;
        for (const auto& [n, h] : haar(d).coeffs) norm2 += std::norm(h);
        EXPECT_NEAR(norm2, 1.0, 1e-15) << d;
    }
}

TEST(Filters, ResidualsMatchBruteForceAutocorrelation) {
    // irregular complex coefficients with a negative index and a gap
    FilterBank f{3, {{-2, {0.3, -0.1}}, {0, {0.5, 0.2}}, {1, {-0.4, 0.7}}, {4, {0.1, 0.05}}, {5, {0.2, -0.3}}}};
    const auto rep = validate_orthonormality(f, 0.0);
    for (const auto& r : rep.residuals) {
        const cplx expect = oracle::autocorrelation(f, f.d * r.lag) - (r.lag == 0 ? 1.0 : 0.0);
        EXPECT_EQ(r.residual, expect) << "lag " << r.lag;
    }
    // every lag with overlapping support is reported: span 7 -> lags -2..2
    EXPECT_EQ(rep.residuals.size(), 5u);
}

TEST(Filters, ValidatedFilterRejectsFailingSets) {
    EXPECT_NO_THROW(ValidatedFilter(haar(4)));
    EXPECT_THROW(ValidatedFilter(FilterBank{2, {{0, 1.0}, {1, 1.0}}}), InvalidFilter);
}

TEST(Filters, ParseRoundTripsHaar3) {
    const FilterBank f = parse_filter("d=3; 0 0.57735 0; 1 0.57735 0; 2 0.57735 0");
    EXPECT_EQ(f.d, 3);
    ASSERT_EQ(f.coeffs.size(), 3u);
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(std::abs(f[n] - builtin("haar3")[n]), 0.0, 1e-5);
}

TEST(Filters, ParseCommentsAndNegativeIndices) {
    const FilterBank f = parse_filter("# header\nd = 2\n-1 0.7071067811865476 0  # left\n0 0.7071067811865476 0\n");
    EXPECT_EQ(f.d, 2);
    EXPECT_EQ(f.min_index(), -1);
    EXPECT_TRUE(validate_orthonormality(f).pass);
}

TEST(Filters, ParseErrors) {
    EXPECT_THROW(parse_filter("d=3; 0 1 0; 0 1 0"), ParseError);
    EXPECT_THROW(parse_filter("d=1; 0 1 0"), InvalidFilter);
    EXPECT_THROW(parse_filter("0 1 0"), ParseError);
    EXPECT_THROW(parse_filter("d=2; 0 1"), ParseError);
    EXPECT_THROW(parse_filter("d=2; 0 1 0 extra"), ParseError);
    EXPECT_THROW(parse_filter("d=2"), InvalidFilter);
}

TEST(Filters, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "lmra_test_filter.flt";
    {
        std::ofstream out(path);
        out << "d=2\n0 0.7071067811865476 0\n1 0.7071067811865476 0\n";
    }
    const FilterBank f = load_filter(path.string());
    EXPECT_TRUE(validate_orthonormality(f).pass);
    std::filesystem::remove(path);
    EXPECT_THROW(load_filter(path.string()), ParseError);
}
