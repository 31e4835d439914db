#pragma once

#include <cstddef>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/dual.hpp"

namespace lightam {

struct PolarizationPair {
    Vec3c eps_plus{};
    Vec3c eps_minus{};
    // Set at theta = pi, where the basis has a phi-dependent limit.
    bool south_pole = false;
};

// Circular polarization basis at direction (theta, phi), khat ^ eps(+/-) = -/+ i eps(+/-).
PolarizationPair helicity_basis(double theta, double phi);

// Same basis obtained as R3(phi) R2(theta) R3(phi)^-1 applied to the basis at the north pole.
PolarizationPair helicity_basis_by_rotation(double theta, double phi);

// (1 + cos theta) eps(+) written in Cartesian wave-vector components; smooth
// everywhere except k = 0 and vanishing on the negative k3 axis.
template <class T>
Vec3<T> regular_helicity_plus(const Vec3<T>& k) {
    const T r = sqrt(dot(k, k));
    const T c1 = 1.0 + k[2] / r;
    const T sp = (k[0] + kI * k[1]) / r;
    const T c1sq = c1 * c1;
    const T sp2 = sp * sp;
    const double s = 1.0 / std::sqrt(2.0);
    return {(0.5 * s) * (c1sq - sp2), (kI * (0.5 * s)) * (c1sq + sp2), -s * (c1 * sp)};
}

template <class T>
Vec3<T> regular_helicity_minus(const Vec3<T>& k) {
    const Vec3<T> p = regular_helicity_plus(k);
    return {kI * conj(p[0]), kI * conj(p[1]), kI * conj(p[2])};
}

struct HelicityComponents {
    GridPtr grid;
    std::vector<cplx> plus;
    std::vector<cplx> minus;
    std::size_t south_pole_nodes = 0;
    // Fraction of the squared norm carried by nodes with theta > pi - 0.1.
    double south_cap_fraction = 0.0;
};

HelicityComponents helicity_decompose(const TransverseAmplitude& v);

// eps(+) v_plus + eps(-) v_minus at every node.
std::vector<Vec3c> helicity_reconstruct(const HelicityComponents& h);

}  // namespace lightam
