#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lmra {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr double sqrt3 = std::numbers::sqrt3;
inline constexpr cplx I{0.0, 1.0};

/// A point of the plane in magnetic units.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Error hierarchy. Everything derives from Error so callers (the CLI in
// particular) can separate numeric failures from usage/IO problems.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidFilter : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

/// Quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, cplx estimate, double error_bound)
        : Error(what + " (estimate " + std::to_string(estimate.real()) + "+" +
                std::to_string(estimate.imag()) + "i, error bound " +
                std::to_string(error_bound) + ")"),
          estimate_(estimate), error_bound_(error_bound) {}

    cplx estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    cplx estimate_;
    double error_bound_;
};

/// A truncated series did not converge; carries the partial sum.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, cplx partial)
        : Error(what), partial_(partial) {}
    cplx partial_sum() const { return partial_; }

private:
    cplx partial_;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

} // namespace lmra
