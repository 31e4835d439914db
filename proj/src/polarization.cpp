#include "lightam/polarization.hpp"

#include <cmath>

#include "lightam/parallel.hpp"

namespace lightam {

PolarizationPair helicity_basis(double theta, double phi) {
    const double s2 = 1.0 / std::sqrt(2.0);
    PolarizationPair p;
    if (theta == kPi) {
        const cplx e2 = std::polar(1.0, 2.0 * phi);
        p.eps_plus = {-s2 * e2, kI * s2 * e2, 0.0};
        const cplx em2 = std::polar(1.0, -2.0 * phi);
        p.eps_minus = {-kI * s2 * em2, s2 * em2, 0.0};
        p.south_pole = true;
        return p;
    }
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const cplx e = std::polar(s2, phi);
    p.eps_plus = {e * cplx(ct * cp, -sp), e * cplx(ct * sp, cp), e * (-st)};
    p.eps_minus = {kI * std::conj(p.eps_plus[0]), kI * std::conj(p.eps_plus[1]), kI * std::conj(p.eps_plus[2])};
    return p;
}

PolarizationPair helicity_basis_by_rotation(double theta, double phi) {
    auto r3 = [](double a) {
        return Mat3d{Vec3d{std::cos(a), -std::sin(a), 0.0}, Vec3d{std::sin(a), std::cos(a), 0.0},
                     Vec3d{0.0, 0.0, 1.0}};
    };
    const Mat3d r2{Vec3d{std::cos(theta), 0.0, std::sin(theta)}, Vec3d{0.0, 1.0, 0.0},
                   Vec3d{-std::sin(theta), 0.0, std::cos(theta)}};
    const Mat3d R = matmul(matmul(r3(phi), r2), r3(-phi));
    const double s2 = 1.0 / std::sqrt(2.0);
    PolarizationPair p;
    p.eps_plus = matvec(R, Vec3c{s2, kI * s2, 0.0});
    p.eps_minus = matvec(R, Vec3c{kI * s2, s2, 0.0});
    p.south_pole = theta == kPi;
    return p;
}

HelicityComponents helicity_decompose(const TransverseAmplitude& v) {
    const KGrid& g = v.grid();
    HelicityComponents h;
    h.grid = v.grid_ptr();
    h.plus.resize(v.size());
    h.minus.resize(v.size());
    parallel_for(v.size(), [&](std::size_t i) {
        int ik, it, ip;
        g.unravel(i, ik, it, ip);
        const double ct = g.cos_theta(it);
        const double theta = ct <= -1.0 ? kPi : g.theta(it);
        const PolarizationPair e = helicity_basis(theta, g.phi(ip));
        h.plus[i] = cdot(e.eps_plus, v[i]);
        h.minus[i] = cdot(e.eps_minus, v[i]);
    });
    double total = 0.0, cap = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        int ik, it, ip;
        g.unravel(i, ik, it, ip);
        const double w = g.weight(i) * norm2(v[i]);
        total += w;
        if (g.cos_theta(it) <= -1.0) ++h.south_pole_nodes;
        if (g.cos_theta(it) < std::cos(kPi - 0.1)) cap += w;
    }
    h.south_cap_fraction = total > 0.0 ? cap / total : 0.0;
    return h;
}

std::vector<Vec3c> helicity_reconstruct(const HelicityComponents& h) {
    const KGrid& g = *h.grid;
    std::vector<Vec3c> out(h.plus.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        int ik, it, ip;
        g.unravel(i, ik, it, ip);
        const double ct = g.cos_theta(it);
        const PolarizationPair e = helicity_basis(ct <= -1.0 ? kPi : g.theta(it), g.phi(ip));
        out[i] = h.plus[i] * e.eps_plus + h.minus[i] * e.eps_minus;
    }
    return out;
}

}  // namespace lightam
