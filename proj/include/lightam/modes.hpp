#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lightam/grid.hpp"
#include "lightam/harmonics.hpp"
#include "lightam/jet_field.hpp"

namespace lightam {

// f(k) = amplitude * exp(-(k - k0)^2 / (2 sigma^2)); normalize() scales the
// amplitude so that the integral of k^2 |f|^2 over (0, inf) is one.
struct GaussianShell {
    double k0 = 1.0;
    double sigma = 0.15;
    double amplitude = 1.0;

    template <class T>
    T operator()(const T& k) const {
        const T d = k - k0;
        return amplitude * exp((-0.5 / (sigma * sigma)) * (d * d));
    }
    [[nodiscard]] double eval(double k) const {
        const double d = k - k0;
        return amplitude * std::exp(-0.5 * d * d / (sigma * sigma));
    }
    [[nodiscard]] GaussianShell normalized() const;
    void validate() const;
};

// Integral of k^2 f(k) g(k) over (0, inf) by high-order quadrature.
double radial_overlap(const GaussianShell& f, const GaussianShell& g);

struct VSHTerm {
    VSHIndex index;
    cplx coeff{1.0, 0.0};
    GaussianShell radial;
};

JetField vsh_field(const VSHIndex& idx, const GaussianShell& radial);
JetField vsh_expansion(std::vector<VSHTerm> terms);
double vsh_expansion_norm2(const std::vector<VSHTerm>& terms);

struct RandomFieldOptions {
    int lmax = 6;
    int terms = 6;
};

// Seeded Gaussian-radial x VSH mixture, band limited to l <= lmax.
std::vector<VSHTerm> random_vsh_terms(std::uint64_t seed, const RandomFieldOptions& opt = {});
JetField random_field(std::uint64_t seed, const RandomFieldOptions& opt = {});

// Generalised Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
template <class T>
T laguerre(int n, int alpha, const T& x) {
    if (n == 0) return T(1.0);
    T l0(1.0);
    T l1 = (1.0 + alpha) - x;
    for (int j = 1; j < n; ++j) {
        T l2 = ((2.0 * j + 1.0 + alpha) * l1 - x * l1 - (j + static_cast<double>(alpha)) * l0) / (j + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

enum class LGVariant { scalar, vector_alpha, vector_beta };

struct LGModeSpec {
    int m = 0;
    int p = 0;
    double w = 20.0;
    double k = 1.0;
    LGVariant variant = LGVariant::scalar;
    double paraxial_threshold = 20.0;

    void validate() const;
    [[nodiscard]] double rayleigh_range() const { return 0.5 * w * w * k; }
    [[nodiscard]] bool paraxial() const { return w * k >= paraxial_threshold; }
    [[nodiscard]] double theta_eff() const { return 2.0 / (w * k); }
};

std::string to_string(LGVariant v);
LGVariant lg_variant_from_string(const std::string& s);

// Transverse-plane mode phi_{m,p}(k_perp), unit L2 norm over d^2k.
cplx lg_k(const LGModeSpec& spec, double kx, double ky);
// psi_{m,p}(x_perp, z), the paraxial propagation of lg_k.
cplx lg_x(const LGModeSpec& spec, double x, double y, double z);
// Gouy phase (2p + |m| + 1) atan(z / z_R).
double gouy_phase(const LGModeSpec& spec, double z);

struct VectorLGOptions {
    // Relative width sigma_k/k of the Gaussian band of radial shells;
    // zero selects a single shell at the carrier.
    double band = 0.05;
};

struct VectorLGMode {
    LGModeSpec spec;
    VectorLGOptions options;
    JetField field;  // transverse projection, unit norm
    JetField raw;    // the approximately transverse paraxial form, same constant
    double norm_constant = 1.0;
    bool paraxial = true;
    double transversality_residual = 0.0;  // ||khat.raw|| / ||raw||
    double longitudinal_fraction = 0.0;    // ||v3|| / ||v_perp|| of the projected field
    GridSpec natural_grid;                 // grid used for the normalisation
};

// Polar-cap grid that contains the mode's support.
GridSpec vector_lg_grid(const LGModeSpec& spec, const VectorLGOptions& opt, int nk, int ntheta, int nphi);

VectorLGMode vector_lg(const LGModeSpec& spec, const VectorLGOptions& opt = {});

struct J3EigenSpec {
    int m = 1;
    GaussianShell radial_a;
    GaussianShell radial_b;
    // Polynomials in cos(theta), lowest order first.
    std::vector<cplx> poly_a{1.0};
    std::vector<cplx> poly_b{};
};

// a(k,th) e^{i(m-1)phi} eps(+) + b(k,th) e^{i(m+1)phi} eps(-), with
// a = f_a(k) P_a(cos th) (1 + cos th) sin^{|m-1|} th and likewise for b.
JetField j3_eigenfield(const J3EigenSpec& spec);
// 2 pi int k^2 dk int sin th dth (|a|^2 + |b|^2)
double j3_norm2(const J3EigenSpec& spec);

struct BasisMatrices {
    std::array<std::array<cplx, 2>, 2> forward{};
    std::array<std::array<cplx, 2>, 2> inverse{};
};

// (alpha_m, beta_m) = forward (e^{i(m-1)phi} eps+, e^{i(m+1)phi} eps-); theta in [0, pi/2).
BasisMatrices basis_convert(int m, double theta);

// The alpha_m and beta_m eigenfunction structures at (theta, phi).
Vec3c alpha_structure(int m, double theta, double phi);
Vec3c beta_structure(int m, double theta, double phi);

}  // namespace lightam
