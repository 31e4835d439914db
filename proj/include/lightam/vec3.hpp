#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

namespace lightam {

using cplx = std::complex<double>;

template <class T>
using Vec3 = std::array<T, 3>;
using Vec3d = Vec3<double>;
using Vec3c = Vec3<cplx>;
using Mat3d = std::array<Vec3d, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

template <class T>
struct is_vec3 : std::false_type {};
template <class T>
struct is_vec3<std::array<T, 3>> : std::true_type {};

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <class T>
Vec3<T> operator-(const Vec3<T>& a) {
    return {-a[0], -a[1], -a[2]};
}

template <class S, class T>
    requires(!is_vec3<S>::value)
auto operator*(const S& s, const Vec3<T>& v) -> Vec3<decltype(s * v[0])> {
    return {s * v[0], s * v[1], s * v[2]};
}

template <class T>
Vec3<T>& operator+=(Vec3<T>& a, const Vec3<T>& b) {
    a[0] += b[0];
    a[1] += b[1];
    a[2] += b[2];
    return a;
}

// Bilinear (no conjugation).
template <class T, class U>
auto dot(const Vec3<T>& a, const Vec3<U>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T, class U>
auto cross(const Vec3<T>& a, const Vec3<U>& b) -> Vec3<decltype(a[0] * b[0])> {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Sesquilinear a* . b
inline cplx cdot(const Vec3c& a, const Vec3c& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

inline double norm2(const Vec3c& a) {
    return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]);
}

inline double norm(const Vec3d& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

inline Vec3c to_complex(const Vec3d& a) { return {a[0], a[1], a[2]}; }

inline Vec3c conj(const Vec3c& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }

inline Vec3d matvec(const Mat3d& m, const Vec3d& v) {
    return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

inline Vec3c matvec(const Mat3d& m, const Vec3c& v) {
    Vec3c out{};
    for (int i = 0; i < 3; ++i)
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return out;
}

inline Mat3d transpose(const Mat3d& m) {
    Mat3d t{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
    return t;
}

inline Mat3d matmul(const Mat3d& a, const Mat3d& b) {
    Mat3d c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Levi-Civita symbol.
constexpr int levi_civita(int i, int j, int k) {
    return ((i - j) * (j - k) * (k - i)) / 2;
}

}  // namespace lightam
