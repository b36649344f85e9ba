#pragma once

#include <cmath>

namespace nsgapinn::ad {

/// Second-order truncated Taylor value with respect to a single seeded
/// coordinate: carries f, f' and f''. Arithmetic follows the chain rule,
/// so any composition of Jet2 operations yields exact derivatives.
struct Jet2 {
    double v = 0.0;   // value
    double d1 = 0.0;  // first derivative
    double d2 = 0.0;  // second derivative

    constexpr Jet2() = default;
    constexpr Jet2(double value) : v(value) {}
    constexpr Jet2(double value, double first, double second)
        : v(value), d1(first), d2(second) {}

    /// The seeded independent variable itself: d/dx x = 1, d2/dx2 x = 0.
    static constexpr Jet2 variable(double x) { return Jet2(x, 1.0, 0.0); }

    constexpr Jet2 operator-() const { return {-v, -d1, -d2}; }

    constexpr Jet2& operator+=(const Jet2& o) {
        v += o.v; d1 += o.d1; d2 += o.d2;
        return *this;
    }
    constexpr Jet2& operator-=(const Jet2& o) {
        v -= o.v; d1 -= o.d1; d2 -= o.d2;
        return *this;
    }
};

constexpr Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
constexpr Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }

constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

constexpr Jet2 operator*(double c, const Jet2& a) { return {c * a.v, c * a.d1, c * a.d2}; }
constexpr Jet2 operator*(const Jet2& a, double c) { return c * a; }
constexpr Jet2 operator+(const Jet2& a, double c) { return {a.v + c, a.d1, a.d2}; }
constexpr Jet2 operator+(double c, const Jet2& a) { return a + c; }
constexpr Jet2 operator-(const Jet2& a, double c) { return {a.v - c, a.d1, a.d2}; }
constexpr Jet2 operator-(double c, const Jet2& a) { return {c - a.v, -a.d1, -a.d2}; }

constexpr Jet2 inverse(const Jet2& a) {
    const double iv = 1.0 / a.v;
    const double iv2 = iv * iv;
    return {iv, -a.d1 * iv2, (2.0 * a.d1 * a.d1 * iv - a.d2) * iv2};
}

constexpr Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inverse(b); }
constexpr Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }
constexpr Jet2 operator/(double c, const Jet2& a) { return c * inverse(a); }

/// Lift a scalar function with known first/second derivative at a.v.
constexpr Jet2 compose(const Jet2& a, double f, double fp, double fpp) {
    return {f, fp * a.d1, fp * a.d2 + fpp * a.d1 * a.d1};
}

inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.v);
    const double s = 1.0 - t * t;
    return compose(a, t, s, -2.0 * t * s);
}

inline Jet2 sin(const Jet2& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return compose(a, c, -s, -c);
}

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return compose(a, e, e, e);
}

inline Jet2 sqr(const Jet2& a) { return a * a; }
constexpr double sqr(double a) { return a * a; }

// Make generic code written against Jet2 also accept plain doubles.
using std::cos;
using std::exp;
using std::sin;
using std::tanh;

}  // namespace nsgapinn::ad
