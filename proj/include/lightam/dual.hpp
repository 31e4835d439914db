#pragma once

// Forward-mode jets over the three Cartesian wave-vector components.
// Dual<1> carries value and gradient, Dual<2> adds the (symmetric) Hessian.

#include <array>
#include <complex>

#include "lightam/vec3.hpp"

namespace lightam {

// Packed symmetric index for 3x3.
constexpr int sym_index(int i, int j) {
    if (i > j) {
        int t = i;
        i = j;
        j = t;
    }
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
}

template <int Order>
struct Dual {
    static_assert(Order == 1 || Order == 2);
    cplx v{};
    std::array<cplx, 3> g{};
    std::array<cplx, 6> h{};

    Dual() = default;
    Dual(double x) : v(x) {}  // NOLINT(google-explicit-constructor)
    Dual(cplx x) : v(x) {}    // NOLINT(google-explicit-constructor)

    static Dual variable(double x, int axis) {
        Dual d(x);
        d.g[axis] = 1.0;
        return d;
    }

    [[nodiscard]] cplx hess(int i, int j) const { return h[sym_index(i, j)]; }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < 3; ++i) g[i] += o.g[i];
        if constexpr (Order == 2)
            for (int i = 0; i < 6; ++i) h[i] += o.h[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < 3; ++i) g[i] -= o.g[i];
        if constexpr (Order == 2)
            for (int i = 0; i < 6; ++i) h[i] -= o.h[i];
        return *this;
    }
    Dual& operator*=(cplx s) {
        v *= s;
        for (auto& x : g) x *= s;
        if constexpr (Order == 2)
            for (auto& x : h) x *= s;
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        *this = *this * o;
        return *this;
    }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator-(Dual a) {
        a *= cplx(-1.0);
        return a;
    }
    friend Dual operator+(Dual a, cplx s) {
        a.v += s;
        return a;
    }
    friend Dual operator+(cplx s, Dual a) {
        a.v += s;
        return a;
    }
    friend Dual operator-(Dual a, cplx s) {
        a.v -= s;
        return a;
    }
    friend Dual operator-(cplx s, const Dual& a) { return (-a) + s; }
    friend Dual operator+(Dual a, double s) { return a + cplx(s); }
    friend Dual operator+(double s, Dual a) { return a + cplx(s); }
    friend Dual operator-(Dual a, double s) { return a - cplx(s); }
    friend Dual operator-(double s, const Dual& a) { return cplx(s) - a; }
    friend Dual operator*(Dual a, cplx s) { return a *= s; }
    friend Dual operator*(cplx s, Dual a) { return a *= s; }
    friend Dual operator*(Dual a, double s) { return a *= cplx(s); }
    friend Dual operator*(double s, Dual a) { return a *= cplx(s); }
    friend Dual operator/(Dual a, cplx s) { return a *= (1.0 / s); }
    friend Dual operator/(Dual a, double s) { return a *= cplx(1.0 / s); }

    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r;
        r.v = a.v * b.v;
        for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
        if constexpr (Order == 2) {
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    const int s = sym_index(i, j);
                    r.h[s] = a.h[s] * b.v + a.v * b.h[s] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
                }
        }
        return r;
    }

    // f(a) given f, f', f'' at a.v
    [[nodiscard]] Dual chain(cplx f0, cplx f1, cplx f2) const {
        Dual r;
        r.v = f0;
        for (int i = 0; i < 3; ++i) r.g[i] = f1 * g[i];
        if constexpr (Order == 2) {
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    const int s = sym_index(i, j);
                    r.h[s] = f1 * h[s] + f2 * g[i] * g[j];
                }
        }
        return r;
    }

    friend Dual inv(const Dual& a) {
        const cplx r = 1.0 / a.v;
        return a.chain(r, -r * r, 2.0 * r * r * r);
    }
    friend Dual operator/(const Dual& a, const Dual& b) { return a * inv(b); }
    friend Dual operator/(cplx s, const Dual& b) { return inv(b) * s; }
    friend Dual operator/(double s, const Dual& b) { return inv(b) * cplx(s); }

    friend Dual sqrt(const Dual& a) {
        const cplx s = std::sqrt(a.v);
        return a.chain(s, 0.5 / s, -0.25 / (s * a.v));
    }
    friend Dual exp(const Dual& a) {
        const cplx e = std::exp(a.v);
        return a.chain(e, e, e);
    }
    friend Dual conj(const Dual& a) {
        Dual r;
        r.v = std::conj(a.v);
        for (int i = 0; i < 3; ++i) r.g[i] = std::conj(a.g[i]);
        if constexpr (Order == 2)
            for (int i = 0; i < 6; ++i) r.h[i] = std::conj(a.h[i]);
        return r;
    }
};

using Dual1 = Dual<1>;
using Dual2 = Dual<2>;

inline cplx value_of(cplx x) { return x; }
inline cplx value_of(double x) { return x; }
template <int N>
cplx value_of(const Dual<N>& x) {
    return x.v;
}

template <class T>
T ipow(const T& x, int n) {
    T r(1.0);
    for (int i = 0; i < n; ++i) r = r * x;
    return r;
}

template <class T>
Vec3<T> seed_wavevector(const Vec3d& k);

template <>
inline Vec3<cplx> seed_wavevector<cplx>(const Vec3d& k) {
    return {k[0], k[1], k[2]};
}

template <>
inline Vec3<Dual1> seed_wavevector<Dual1>(const Vec3d& k) {
    return {Dual1::variable(k[0], 0), Dual1::variable(k[1], 1), Dual1::variable(k[2], 2)};
}

template <>
inline Vec3<Dual2> seed_wavevector<Dual2>(const Vec3d& k) {
    return {Dual2::variable(k[0], 0), Dual2::variable(k[1], 1), Dual2::variable(k[2], 2)};
}

}  // namespace lightam
