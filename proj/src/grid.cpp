#include "lightam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lightam {

void GridSpec::validate() const {
    if (kind != "sphere" && kind != "shell")
        throw std::invalid_argument("grid: unknown kind '" + kind + "'");
    if (ntheta < 1 || nphi < 1) throw std::invalid_argument("grid: node counts must be positive");
    if (!(cos_lo >= -1.0 && cos_hi <= 1.0 && cos_hi > cos_lo))
        throw std::invalid_argument("grid: cos(theta) range must lie in [-1,1] and be non-empty");
    if (kind == "shell") {
        if (nk != 1) throw std::invalid_argument("grid: shell grids have exactly one radial node");
        if (!(k_lo > 0.0)) throw std::invalid_argument("grid: shell radius must be positive");
    } else {
        if (nk < 1) throw std::invalid_argument("grid: nk must be positive");
        if (!(k_lo >= 0.0 && k_hi > k_lo))
            throw std::invalid_argument("grid: radial interval must satisfy 0 <= k_lo < k_hi");
    }
}

KGrid::KGrid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.kind == "shell") {
        radial_.nodes = {spec_.k_lo};
        radial_.weights = {1.0 / (spec_.k_lo * spec_.k_lo)};
        spec_.k_hi = spec_.k_lo;
    } else {
        radial_ = gauss_legendre(spec_.nk, spec_.k_lo, spec_.k_hi);
    }
    polar_ = gauss_legendre(spec_.ntheta, spec_.cos_lo, spec_.cos_hi);
    for (double k : radial_.nodes)
        if (!(k > 0.0)) throw std::invalid_argument("grid: radial node at k <= 0");

    const std::size_t n = static_cast<std::size_t>(spec_.nk) * spec_.ntheta * spec_.nphi;
    points_.resize(n);
    weights_.resize(n);
    const double dp = dphi();
    for (int ik = 0; ik < spec_.nk; ++ik) {
        const double kk = radial_.nodes[ik];
        const double wk = radial_.weights[ik] * kk * kk;
        for (int it = 0; it < spec_.ntheta; ++it) {
            const double c = polar_.nodes[it];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int ip = 0; ip < spec_.nphi; ++ip) {
                const double ph = phi(ip);
                const std::size_t i = index(ik, it, ip);
                points_[i] = {kk * s * std::cos(ph), kk * s * std::sin(ph), kk * c};
                weights_[i] = wk * polar_.weights[it] * dp;
            }
        }
    }
}

double KGrid::theta(int it) const { return std::acos(polar_.nodes[it]); }

int KGrid::band_limit() const {
    return std::max(0, std::min(spec_.ntheta - 1, (spec_.nphi - 1) / 2));
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const KGrid>(spec); }

GridPtr make_sphere_grid(int nk, int ntheta, int nphi, double k_lo, double k_hi) {
    GridSpec s;
    s.nk = nk;
    s.ntheta = ntheta;
    s.nphi = nphi;
    s.k_lo = k_lo;
    s.k_hi = k_hi;
    return make_grid(s);
}

GridPtr make_shell_grid(double k0, int ntheta, int nphi) {
    GridSpec s;
    s.kind = "shell";
    s.nk = 1;
    s.ntheta = ntheta;
    s.nphi = nphi;
    s.k_lo = k0;
    s.k_hi = k0;
    return make_grid(s);
}

bool same_grid(const KGrid& a, const KGrid& b) { return &a == &b || a.spec() == b.spec(); }

}  // namespace lightam
