#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/config.hpp"
#include "lightam/jet_field.hpp"
#include "lightam/observables.hpp"
#include "lightam/space_field.hpp"

namespace lightam {

enum class Quantity { A, E, B };

std::string to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

// Cubic periodic box of n^3 points, side `length`, centred on the origin.
struct BoxSpec {
    int n = 48;
    double length = 60.0;

    void validate() const;
    [[nodiscard]] double dx() const { return length / n; }
    [[nodiscard]] double dk() const { return 2.0 * kPi / length; }
    [[nodiscard]] double k_nyquist() const { return kPi * n / length; }
};

struct SynthesisOptions {
    double t = 0.0;
    double tail_tol = 1e-4;
    PhysConfig cfg{};
};

class BoxTooSmall : public std::runtime_error {
public:
    BoxTooSmall(const std::string& what, double fraction) : std::runtime_error(what), tail_fraction(fraction) {}
    double tail_fraction;
};

// A+ = (c/2pi) int d^3k w^-1/2 e^{i(k.x - wt)} v,  E+ = (i/2pi) int d^3k w^1/2 e^{i(k.x - wt)} v,
// B+ = curl A+, evaluated by FFT from samples of v on the reciprocal lattice of the box.
SampledSpaceField synthesize(const JetField& v, const BoxSpec& box, Quantity which, const SynthesisOptions& opt = {});

// Norm fraction of a box field outside the central cube of relative side `inner`.
double tail_fraction(const SampledSpaceField& f, double inner = 0.8);

// (1 / 2 pi c^2) int A*.(w A) d^3x with w = c |k| applied spectrally.
double xspace_norm(const SampledSpaceField& A_plus);

// Constants of motion from the analytic signals:
//   P0 = (1/2pi) int |E|^2,  P = (1/2pi c) int E*_m grad A_m,
//   L = (1/2pi c) int E*_m (x ^ grad) A_m,  S = (1/2pi c) int E* ^ A,
//   K(t) = (1/2pi c) int x |E|^2.
ObservableSet xspace_com(const SampledSpaceField& E_plus, const SampledSpaceField& A_plus);

// ||div A|| / ||grad A|| with derivatives taken spectrally on a box field.
double spectral_divergence(const SampledSpaceField& A);

// || E - (i/c) w A || / ||E|| on box fields.
double spectral_e_from_a(const SampledSpaceField& E_plus, const SampledSpaceField& A_plus);

// Square transverse grid for plane-by-plane synthesis.
struct PlanarGrid {
    int n = 128;
    double length = 200.0;
    void validate() const;
    [[nodiscard]] double dx() const { return length / n; }
    [[nodiscard]] double dk() const { return 2.0 * kPi / length; }
};

// A+ on planes z from the radial shells of `grid`: each shell is written over
// k_perp with k3 = sqrt(k^2 - k_perp^2) and the Jacobian k/k3. With `paraxial`
// the propagation phase e^{i k3 z} is replaced by e^{ikz} e^{-i k_perp^2 z / 2k}.
SampledSpaceField planar_synthesis(const JetField& v, const KGrid& grid, const PlanarGrid& plane,
                                   const std::vector<double>& z, double t, bool paraxial, const PhysConfig& cfg = {});

// Direct quadrature of the synthesis integral at arbitrary points (probe values).
std::vector<Vec3c> synthesize_points(const TransverseAmplitude& v, const std::vector<Vec3d>& x, double t,
                                     Quantity which, const PhysConfig& cfg = {});

namespace reference {
std::vector<Vec3c> synthesize_points_serial(const TransverseAmplitude& v, const std::vector<Vec3d>& x, double t,
                                            Quantity which, const PhysConfig& cfg = {});
}

}  // namespace lightam
