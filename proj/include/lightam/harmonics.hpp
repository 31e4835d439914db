#pragma once

// Orthonormal spherical harmonics with the Condon-Shortley phase, evaluated
// from Cartesian components so that forward-mode jets pass through.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lightam/dual.hpp"
#include "lightam/vec3.hpp"

namespace lightam {

inline std::size_t ylm_index(int l, int m) { return static_cast<std::size_t>(l * l + l + m); }

inline double ylm_norm(int l, int m) {
    // sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!), m >= 0
    double ratio = 1.0;
    for (int j = l - m + 1; j <= l + m; ++j) ratio /= j;
    return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
}

// Fills Y[ylm_index(l,m)] for 0 <= l <= lmax at direction k/|k|.
template <class T>
void spherical_harmonics(const Vec3<T>& k, int lmax, std::vector<T>& Y) {
    Y.assign(static_cast<std::size_t>((lmax + 1) * (lmax + 1)), T(0.0));
    const T r = sqrt(dot(k, k));
    const T x = k[2] / r;
    const T sp = (k[0] + kI * k[1]) / r;
    const T sm = (k[0] - kI * k[1]) / r;
    T spm(1.0), smm(1.0);
    double dfact = 1.0;  // (2m-1)!!
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) {
            spm = spm * sp;
            smm = smm * sm;
            dfact *= (2.0 * m - 1.0);
        }
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        // q_l^m(x) = P_l^m(x) / sin^m(theta), Condon-Shortley sign included
        T q_prev(0.0);
        T q(sign * dfact);
        for (int l = m; l <= lmax; ++l) {
            if (l == m + 1) {
                T next = (2.0 * m + 1.0) * (x * q);
                q_prev = q;
                q = next;
            } else if (l > m + 1) {
                T next = ((2.0 * l - 1.0) * (x * q) - (l + m - 1.0) * q_prev) / static_cast<double>(l - m);
                q_prev = q;
                q = next;
            }
            const double n = ylm_norm(l, m);
            Y[ylm_index(l, m)] = n * (spm * q);
            if (m > 0) Y[ylm_index(l, -m)] = (sign * n) * (smm * q);
        }
    }
}

inline cplx ylm(int l, int m, double theta, double phi) {
    if (l < 0 || std::abs(m) > l) throw std::invalid_argument("ylm: invalid (l, m)");
    std::vector<cplx> Y;
    const Vec3<cplx> k{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
    spherical_harmonics(k, l, Y);
    return Y[ylm_index(l, m)];
}

// Vector spherical harmonic from a precomputed scalar table.
//   a = 1: L Y_lm / sqrt(l(l+1)),  a = 2: khat ^ (L Y_lm) / sqrt(l(l+1)),
// with L = -i k ^ grad acting through the ladder relations.
template <class T>
Vec3<T> vsh_from_table(const std::vector<T>& Y, const Vec3<T>& k, int a, int l, int m) {
    const double cp = (m < l) ? std::sqrt(static_cast<double>((l - m) * (l + m + 1))) : 0.0;
    const double cm = (m > -l) ? std::sqrt(static_cast<double>((l + m) * (l - m + 1))) : 0.0;
    const T up = (m < l) ? cp * Y[ylm_index(l, m + 1)] : T(0.0);
    const T dn = (m > -l) ? cm * Y[ylm_index(l, m - 1)] : T(0.0);
    const double inv = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    Vec3<T> y1{(0.5 * inv) * (up + dn), (cplx(0.0, -0.5) * inv) * (up - dn),
               (m * inv) * Y[ylm_index(l, m)]};
    if (a == 1) return y1;
    const T r = sqrt(dot(k, k));
    const Vec3<T> khat{k[0] / r, k[1] / r, k[2] / r};
    return cross(khat, y1);
}

struct VSHIndex {
    int a = 1;
    int l = 1;
    int m = 0;
    void validate() const {
        if (a != 1 && a != 2) throw std::invalid_argument("VSHIndex: a must be 1 or 2");
        if (l < 1) throw std::invalid_argument("VSHIndex: l must be >= 1");
        if (m < -l || m > l) throw std::invalid_argument("VSHIndex: |m| must not exceed l");
    }
    bool operator==(const VSHIndex&) const = default;
};

Vec3c vsh(const VSHIndex& idx, const Vec3d& khat);

}  // namespace lightam
