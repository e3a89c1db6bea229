#pragma once

#include <cmath>

namespace datalens::numerics {

// Forward-mode scalar: value plus directional derivative. Running the
// backprop kernels on Dual instead of double turns a gradient computation
// into an exact Hessian-vector product (forward-over-reverse).
struct Dual {
    double v = 0.0; // value
    double t = 0.0; // tangent

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double tangent) : v(value), t(tangent) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.t + b.t}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.t - b.t}; }
inline Dual operator-(Dual a) { return {-a.v, -a.t}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.t * b.v + a.v * b.t}; }
inline Dual operator/(Dual a, Dual b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.t - q * b.t) * inv};
}

inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }

inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }

inline Dual exp(Dual a) {
    const double e = std::exp(a.v);
    return {e, e * a.t};
}
inline Dual log(Dual a) { return {std::log(a.v), a.t / a.v}; }
inline Dual sqrt(Dual a) {
    const double s = std::sqrt(a.v);
    return {s, 0.5 * a.t / s};
}

// scalar-kind helpers shared by the templated network kernels
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(Dual x) { return std::isfinite(x.v) && std::isfinite(x.t); }

} // namespace datalens::numerics
