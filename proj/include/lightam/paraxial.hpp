#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/fieldsynth.hpp"
#include "lightam/jet_field.hpp"
#include "lightam/modes.hpp"
#include "lightam/space_field.hpp"

namespace lightam {

struct ParaxialityReport {
    double theta_cut = 0.0;
    double norm_fraction_outside = 0.0;  // theta > theta_cut
    double backward_norm_fraction = 0.0;  // k3 < 0
    double k_min = 0.0;
    double below_k_min_fraction = 0.0;  // |k| < k_min
    double eps_par = 1e-3;
    bool paraxial = false;
};

ParaxialityReport paraxiality_report(const TransverseAmplitude& v, double theta_cut, double k_min = 0.0,
                                     double eps_par = 1e-3);

// Scalar field on a uniform transverse grid, x_i = (i - nx/2) dx, x fastest.
struct TransverseScalarField {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double k = 1.0;  // carrier wavenumber, lambda-bar = 1/k
    double z = 0.0;
    std::vector<cplx> data;

    [[nodiscard]] double x(int i) const { return (i - nx / 2) * dx; }
    [[nodiscard]] double y(int j) const { return (j - ny / 2) * dy; }
    [[nodiscard]] cplx& at(int ix, int iy) { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    [[nodiscard]] const cplx& at(int ix, int iy) const { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    [[nodiscard]] double norm2() const;
    void validate() const;
};

class AliasingError : public std::runtime_error {
public:
    AliasingError(const std::string& what, double fraction) : std::runtime_error(what), edge_fraction(fraction) {}
    double edge_fraction;
};

// psi_{m,p}(x, y, z) sampled on an n x n grid of side `length`.
TransverseScalarField sample_lg(const LGModeSpec& spec, int n, double length, double z);

// Exact Fourier multiplier exp(-i k_perp^2 z / 2k). Throws AliasingError when more
// than alias_tol of the spectral norm lies beyond 0.8 of the Nyquist frequency.
TransverseScalarField pwe_propagate(const TransverseScalarField& psi, double z, double alias_tol = 1e-10);

cplx overlap(const TransverseScalarField& a, const TransverseScalarField& b);
// <r^2> = int r^2 |psi|^2 / int |psi|^2
double second_moment(const TransverseScalarField& psi);
// Gouy phase read off as -arg <psi_closed_form_without_gouy, psi>.
double measured_gouy(const LGModeSpec& spec, const TransverseScalarField& psi);

class NonParaxialError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ParaxialAOptions {
    double k_min = 0.0;  // required, > 0
    double theta_cut = 0.2;
    double eps_par = 1e-3;
    bool force = false;
    double t = 0.0;
    PhysConfig cfg{};
};

// Paraxial vector potential on planes z: every shell's z = 0 profile carried
// by the PWE multiplier with the carrier phase e^{ikz} retained.
SampledSpaceField paraxial_A(const JetField& v, const GridPtr& grid, const PlanarGrid& plane,
                             const std::vector<double>& z, const ParaxialAOptions& opt);

struct TransversalityResult {
    std::vector<double> per_slice;  // ||div A|| / ||grad A|| per plane
    double overall = 0.0;
    bool zero_field = false;
};

// div A = div_perp A_perp + d3 A3 with transverse derivatives taken spectrally
// and d3 from the stored dz samples.
TransversalityResult transversality_residual(const SampledSpaceField& A);

// Relative residual of i dA/dz + kA + (1/2k) lap_perp A = 0 on the middle plane of
// three equally spaced planes, with second-order differences in x, y and z.
double pwe_fd_residual(const SampledSpaceField& A, double k);

// Bivariate polynomial in (k_x, k_y).
struct Poly2 {
    std::map<std::pair<int, int>, cplx> c;  // (i, j) -> coefficient of kx^i ky^j

    [[nodiscard]] int degree() const;
    [[nodiscard]] cplx operator()(double kx, double ky) const;
    Poly2& add(int i, int j, cplx v);
    [[nodiscard]] std::size_t terms() const { return c.size(); }
};

Poly2 operator+(const Poly2& a, const Poly2& b);
Poly2 operator*(const Poly2& a, const Poly2& b);
Poly2 operator*(cplx s, const Poly2& a);

// a_perp = (ax, ay) times a shared Gaussian exp(-w^2 rho^2 / 4).
struct GaussianPoly {
    Poly2 ax, ay;
    double w = 1.0;
};

// c = -(1 + rho^2 / 2k^2) (k_perp . a_perp) / k, on the same Gaussian.
Poly2 gaussian_longitudinal(const GaussianPoly& a, double k);
// The exact solution c = -(k_perp . a_perp) / k3 at one point, for comparison.
cplx exact_longitudinal(const GaussianPoly& a, double k, double kx, double ky);

struct IdentityCheckOptions {
    double radius = 0.0;  // test disk r <= radius; 0 selects 2w
    double z = 0.0;
    int radial_nodes = 48;
    int angular_nodes = 96;
};

// Relative L2 residual over the disk of
//   exp(i k.x - i k^2 z / 2k0) - 2 pi sum_{p<=P, |m|<=M} conj(phi_mp(k)) psi_mp(x, z).
double pwe_identity_check(double kx, double ky, const LGModeSpec& base, int P, int M,
                          const IdentityCheckOptions& opt = {});

}  // namespace lightam
