#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lightam/quadrature.hpp"
#include "lightam/vec3.hpp"

namespace lightam {

// Product grid on k-space: Gauss-Legendre in |k|, Gauss-Legendre in cos(theta),
// uniform trapezoid in phi.
//   kind "sphere": radial GL on [k_lo, k_hi], polar GL on [cos_lo, cos_hi]
//   kind "shell" : one radial node at k_lo with weight 1/k_lo^2, so the
//                  quadrature measure is the solid angle on that shell.
struct GridSpec {
    std::string kind = "sphere";
    int nk = 32;
    int ntheta = 32;
    int nphi = 32;
    double k_lo = 0.0;
    double k_hi = 2.0;
    double cos_lo = -1.0;
    double cos_hi = 1.0;

    bool operator==(const GridSpec&) const = default;
    void validate() const;
};

class KGrid {
public:
    explicit KGrid(const GridSpec& spec);

    [[nodiscard]] const GridSpec& spec() const { return spec_; }
    [[nodiscard]] int nk() const { return spec_.nk; }
    [[nodiscard]] int ntheta() const { return spec_.ntheta; }
    [[nodiscard]] int nphi() const { return spec_.nphi; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }

    [[nodiscard]] std::size_t index(int ik, int it, int ip) const {
        return (static_cast<std::size_t>(ik) * spec_.ntheta + it) * spec_.nphi + ip;
    }
    void unravel(std::size_t i, int& ik, int& it, int& ip) const {
        ip = static_cast<int>(i % spec_.nphi);
        it = static_cast<int>((i / spec_.nphi) % spec_.ntheta);
        ik = static_cast<int>(i / (static_cast<std::size_t>(spec_.nphi) * spec_.ntheta));
    }

    [[nodiscard]] const QuadRule& radial() const { return radial_; }
    [[nodiscard]] const QuadRule& polar() const { return polar_; }
    [[nodiscard]] double k(int ik) const { return radial_.nodes[ik]; }
    [[nodiscard]] double cos_theta(int it) const { return polar_.nodes[it]; }
    [[nodiscard]] double theta(int it) const;
    [[nodiscard]] double phi(int ip) const { return 2.0 * kPi * ip / spec_.nphi; }
    [[nodiscard]] double dphi() const { return 2.0 * kPi / spec_.nphi; }

    [[nodiscard]] const Vec3d& point(std::size_t i) const { return points_[i]; }
    // Full d^3k weight: w_k k^2 w_cos dphi.
    [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
    [[nodiscard]] const std::vector<Vec3d>& points() const { return points_; }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

    // Highest spherical-harmonic degree resolved exactly by the angular rule.
    [[nodiscard]] int band_limit() const;
    [[nodiscard]] bool full_sphere() const { return spec_.cos_lo == -1.0 && spec_.cos_hi == 1.0; }

private:
    GridSpec spec_;
    QuadRule radial_;
    QuadRule polar_;
    std::vector<Vec3d> points_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const KGrid>;

GridPtr make_grid(const GridSpec& spec);
GridPtr make_sphere_grid(int nk, int ntheta, int nphi, double k_lo, double k_hi);
GridPtr make_shell_grid(double k0, int ntheta, int nphi);

bool same_grid(const KGrid& a, const KGrid& b);

}  // namespace lightam
