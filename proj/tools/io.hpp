#pragma once

// JSON with 17 significant digits per float, and CSV helpers.

#include <lmra/common.hpp>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>

namespace lmra::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace detail {

inline void dump(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << json(k).dump() << (indent > 0 ? ": " : ":");
            dump(os, v, indent, depth + 1);
        }
        os << nl << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
        if (flat || indent == 0) {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                dump(os, j[i], 0, 0);
            }
            os << ']';
            return;
        }
        os << '[' << nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ',' << nl;
            os << pad;
            dump(os, j[i], indent, depth + 1);
        }
        os << nl << close << ']';
        return;
    }
    case json::value_t::number_float:
        os << format_double(j.get<double>());
        return;
    default:
        os << j.dump();
    }
}

} // namespace detail

/// Serialize with every float printed to 17 significant digits.
inline void dump17(std::ostream& os, const json& j, int indent = 2) {
    detail::dump(os, j, indent, 0);
    os << '\n';
}

inline std::string dump17(const json& j, int indent = 2) {
    std::ostringstream os;
    dump17(os, j, indent);
    return os.str();
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }
inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }

/// One CSV row; doubles use 17 significant digits.
template <class... Ts>
void csv_row(std::ostream& os, const Ts&... fields) {
    bool first = true;
    auto put = [&](const auto& f) {
        if (!first) os << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>)
            os << format_double(f);
        else
            os << f;
    };
    (put(fields), ...);
    os << '\n';
}

} // namespace lmra::io
