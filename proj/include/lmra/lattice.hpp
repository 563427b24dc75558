#pragma once

// Magnetic lattices obeying the rationality condition (unit cell area 2*pi)
// and enumeration of the occupied sublattice.

#include <lmra/common.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

namespace lmra {

enum class Shape { triangular, square };

/// Which direction is decimated by d: along_a2 occupies (Z, dZ), along_a1
/// occupies (dZ, Z).
enum class Pattern { along_a2, along_a1 };

inline std::string to_string(Shape s) { return s == Shape::triangular ? "triangular" : "square"; }
inline std::string to_string(Pattern p) { return p == Pattern::along_a2 ? "along_a2" : "along_a1"; }

inline Shape parse_shape(const std::string& s) {
    if (s == "triangular" || s == "tri") return Shape::triangular;
    if (s == "square" || s == "sq") return Shape::square;
    throw UnknownName("unsupported lattice shape '" + s + "'");
}

inline Pattern parse_pattern(const std::string& s) {
    if (s == "along_a2") return Pattern::along_a2;
    if (s == "along_a1") return Pattern::along_a1;
    throw UnknownName("unknown sublattice pattern '" + s + "'");
}

/// Powers of the two magnetic translations: T_1^n T_2^m.
struct SiteIndex {
    int n = 0;
    int m = 0;
    friend constexpr bool operator==(SiteIndex, SiteIndex) = default;
    friend constexpr SiteIndex operator+(SiteIndex a, SiteIndex b) { return {a.n + b.n, a.m + b.m}; }
    friend constexpr SiteIndex operator-(SiteIndex a) { return {-a.n, -a.m}; }
};

struct LatticeSpec {
    Shape shape = Shape::triangular;
    double a = 0.0; // spacing, fixed by the rationality condition
    Vec2 a1;
    Vec2 a2;
    int d = 1;
    Pattern pattern = Pattern::along_a2;

    /// Spacing along y between neighbouring rows of the full lattice (2*pi/a).
    double row_spacing() const { return 2.0 * pi / a; }
    /// Shear of the kernel coordinate u = x - shear()*y.
    double shear() const { return shape == Shape::triangular ? 1.0 / sqrt3 : 0.0; }
    /// Cell area a1 x a2; equals 2*pi by construction.
    double cell_area() const { return a1.x * a2.y - a1.y * a2.x; }
};

inline LatticeSpec make_lattice(Shape shape, int d = 1, Pattern pattern = Pattern::along_a2) {
    if (d < 1) throw Error("sublattice period d must be >= 1");
    LatticeSpec lat;
    lat.shape = shape;
    lat.d = d;
    lat.pattern = pattern;
    switch (shape) {
    case Shape::triangular:
        lat.a = std::sqrt(4.0 * pi / sqrt3);
        lat.a1 = {lat.a, 0.0};
        lat.a2 = {0.5 * lat.a, 0.5 * lat.a * sqrt3};
        break;
    case Shape::square:
        lat.a = std::sqrt(2.0 * pi);
        lat.a1 = {lat.a, 0.0};
        lat.a2 = {0.0, lat.a};
        break;
    }
    return lat;
}

/// Localization centre (X_nm, Y_nm) of T_1^n T_2^m psi for psi centred at the
/// origin: minus the lattice vector n*a1 + m*a2.
inline Vec2 site_position(const LatticeSpec& lat, SiteIndex s) {
    if (lat.shape == Shape::triangular)
        return {-lat.a * (s.n + 0.5 * s.m), -s.m * lat.row_spacing()};
    return {-lat.a * s.n, -lat.a * s.m};
}

/// |n a1 + m a2|^2 / a^2 as an exact integer.
inline long long squared_norm_units(const LatticeSpec& lat, SiteIndex s) {
    const long long n = s.n, m = s.m;
    return lat.shape == Shape::triangular ? n * n + n * m + m * m : n * n + m * m;
}

inline bool occupied(const LatticeSpec& lat, SiteIndex s) {
    const int k = lat.pattern == Pattern::along_a2 ? s.m : s.n;
    return k % lat.d == 0;
}

/// Occupied sites with 0 < |position| <= radius, ordered by distance and then
/// lexicographically in (n, m).
inline std::vector<SiteIndex> sublattice_sites(const LatticeSpec& lat, double radius) {
    if (!(radius > 0.0)) throw Error("radius must be positive");
    // |n a1 + m a2| >= a*sqrt(3)/2 * max(|n|,|m|) on both lattices
    const int bound = static_cast<int>(std::ceil(radius / (0.5 * sqrt3 * lat.a))) + 1;
    const double limit = (radius / lat.a) * (radius / lat.a);
    std::vector<std::pair<long long, SiteIndex>> found;
    for (int n = -bound; n <= bound; ++n)
        for (int m = -bound; m <= bound; ++m) {
            const SiteIndex s{n, m};
            if ((n == 0 && m == 0) || !occupied(lat, s)) continue;
            const long long q = squared_norm_units(lat, s);
            if (static_cast<double>(q) <= limit * (1.0 + 1e-14)) found.push_back({q, s});
        }
    std::sort(found.begin(), found.end(), [](const auto& l, const auto& r) {
        return std::tie(l.first, l.second.n, l.second.m) < std::tie(r.first, r.second.n, r.second.m);
    });
    std::vector<SiteIndex> out;
    out.reserve(found.size());
    for (const auto& [q, s] : found) out.push_back(s);
    return out;
}

} // namespace lmra
