#pragma once

// d-MRA filter coefficient sets: representation, validation and loading.

#include <lmra/common.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lmra {

inline constexpr double default_filter_tol = 1e-12;

/// Dilation d plus finitely supported complex coefficients h_n. Indices not
/// present are zero; negative indices are allowed.
struct FilterBank {
    int d = 2;
    std::map<int, cplx> coeffs;

    cplx operator[](int n) const {
        auto it = coeffs.find(n);
        return it == coeffs.end() ? cplx{} : it->second;
    }
    int min_index() const { return coeffs.empty() ? 0 : coeffs.begin()->first; }
    int max_index() const { return coeffs.empty() ? 0 : coeffs.rbegin()->first; }

    friend bool operator==(const FilterBank&, const FilterBank&) = default;
};

struct LagResidual {
    int lag = 0;
    cplx residual;
};

struct ValidationReport {
    int d = 2;
    double tol = default_filter_tol;
    std::vector<LagResidual> residuals; // every lag with overlapping support
    double max_residual = 0.0;
    bool pass = false;
};

namespace detail {

inline void check_usable(const FilterBank& f) {
    if (f.coeffs.empty()) throw InvalidFilter("filter has no coefficients");
    if (f.d < 2) throw InvalidFilter("dilation d must be >= 2, got " + std::to_string(f.d));
    const bool any_nonzero = std::any_of(f.coeffs.begin(), f.coeffs.end(),
                                         [](const auto& kv) { return kv.second != cplx{}; });
    if (!any_nonzero) throw InvalidFilter("all filter coefficients are zero");
}

} // namespace detail

/// Discrete autocorrelation at shift k: sum_n h_n conj(h_{n+k}).
inline cplx autocorrelation(const FilterBank& f, int shift) {
    cplx acc{};
    for (const auto& [n, h] : f.coeffs) {
        auto it = f.coeffs.find(n + shift);
        if (it != f.coeffs.end()) acc += h * std::conj(it->second);
    }
    return acc;
}

/// Residuals r_l = sum_n h_n conj(h_{n+dl}) - delta_{l0} for every lag l
/// whose shifted support overlaps the support.
inline ValidationReport validate_orthonormality(const FilterBank& f,
                                                double tol = default_filter_tol) {
    detail::check_usable(f);
    if (!(tol >= 0.0)) throw Error("validation tolerance must be non-negative");
    ValidationReport rep;
    rep.d = f.d;
    rep.tol = tol;
    const int span = f.max_index() - f.min_index();
    const int max_lag = span / f.d;
    for (int l = -max_lag; l <= max_lag; ++l) {
        const cplx r = autocorrelation(f, f.d * l) - (l == 0 ? 1.0 : 0.0);
        rep.residuals.push_back({l, r});
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

/// |sum_n h_n - sqrt(d)|. Advisory only.
inline double validate_sum_rule(const FilterBank& f) {
    detail::check_usable(f);
    cplx sum{};
    for (const auto& [n, h] : f.coeffs) sum += h;
    return std::abs(sum - std::sqrt(static_cast<double>(f.d)));
}

/// A filter known to satisfy the orthonormality condition.
class ValidatedFilter {
public:
    explicit ValidatedFilter(FilterBank f, double tol = default_filter_tol)
        : filter_(std::move(f)), report_(validate_orthonormality(filter_, tol)) {
        if (!report_.pass)
            throw InvalidFilter("filter fails orthonormality: max residual " +
                                std::to_string(report_.max_residual));
    }
    const FilterBank& filter() const { return filter_; }
    const ValidationReport& report() const { return report_; }
    operator const FilterBank&() const { return filter_; }

private:
    FilterBank filter_;
    ValidationReport report_;
};

/// Haar-like filter for dilation d: h_0 = ... = h_{d-1} = 1/sqrt(d).
inline FilterBank haar(int d) {
    if (d < 2) throw InvalidFilter("haar filter needs d >= 2");
    FilterBank f;
    f.d = d;
    const double h = 1.0 / std::sqrt(static_cast<double>(d));
    for (int n = 0; n < d; ++n) f.coeffs[n] = h;
    return f;
}

/// Built-in filters: "haar2", "haar3", ..., "haar<d>" for any d >= 2, and
/// "haar_d" spelled with an explicit dilation ("haar_7").
inline FilterBank builtin(const std::string& name) {
    auto parse_d = [&](std::string_view digits) -> int {
        int d = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty())
            throw UnknownName("unknown builtin filter '" + name + "'");
        return d;
    };
    std::string_view sv = name;
    if (sv.starts_with("haar_")) return haar(parse_d(sv.substr(5)));
    if (sv.starts_with("haar")) return haar(parse_d(sv.substr(4)));
    throw UnknownName("unknown builtin filter '" + name + "'");
}

/// Parse the text filter format:
///   d=<int>
///   <index> <re> <im>
/// '#' starts a comment; ';' is accepted as a line separator.
inline FilterBank parse_filter(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::replace(text.begin(), text.end(), ';', '\n');
    std::istringstream lines(text);
    FilterBank f;
    bool have_d = false;
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!have_d) {
            std::string tok = first, rest;
            while (ls >> rest) tok += rest;
            if (!tok.starts_with("d=")) throw ParseError("line " + std::to_string(lineno) +
                                                         ": expected 'd=<int>'");
            std::istringstream ds(tok.substr(2));
            int d = 0;
            std::string junk;
            if (!(ds >> d) || (ds >> junk)) throw ParseError("line " + std::to_string(lineno) +
                                                             ": bad dilation");
            if (d < 2) throw InvalidFilter("dilation d must be >= 2, got " + std::to_string(d));
            f.d = d;
            have_d = true;
            continue;
        }
        std::istringstream row(line);
        long long index = 0;
        double re = 0.0, im = 0.0;
        std::string junk;
        if (!(row >> index >> re >> im) || (row >> junk))
            throw ParseError("line " + std::to_string(lineno) + ": expected '<index> <re> <im>'");
        if (!f.coeffs.emplace(static_cast<int>(index), cplx{re, im}).second)
            throw ParseError("line " + std::to_string(lineno) + ": duplicate index " +
                             std::to_string(index));
    }
    if (!have_d) throw ParseError("missing 'd=<int>' header");
    if (f.coeffs.empty()) throw InvalidFilter("filter has no coefficients");
    return f;
}

inline FilterBank parse_filter(const std::string& text) {
    std::istringstream in(text);
    return parse_filter(in);
}

inline FilterBank load_filter(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open filter file '" + path + "'");
    return parse_filter(in);
}

} // namespace lmra
