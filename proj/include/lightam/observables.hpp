#pragma once

#include <string>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/config.hpp"
#include "lightam/jet_field.hpp"
#include "lightam/operators.hpp"

namespace lightam {

enum class Normalization { classical, per_photon };

std::string to_string(Normalization n);

// The ten constants of motion plus the orbital/spin split.
struct ObservableSet {
    double P0 = 0.0;
    Vec3d P{};
    Vec3d J{};
    Vec3d K{};  // K(t), evaluated at time t
    Vec3d L{};
    Vec3d S{};
    double t = 0.0;
    double norm2 = 0.0;
    Normalization normalization = Normalization::classical;

    // |full - reduced resolution| for each entry; zero when not estimated.
    double err_P0 = 0.0;
    Vec3d err_P{}, err_J{}, err_K{}, err_L{}, err_S{};
    double err_norm2 = 0.0;

    // Largest |Im| / scale over the quadratic forms before real parts were taken.
    double max_imag_ratio = 0.0;
    // J, L and K obtained from derivatives of sampled values rather than exact jets.
    bool fd = false;
};

enum class Observable { P0, P, J, L, S, K };

Observable observable_from_string(const std::string& s);

struct ComOptions {
    double t = 0.0;
    bool estimate_error = true;
    PhysConfig cfg{};
};

// Exact route: values and jets of an analytic field integrated on `grid`.
ObservableSet classical_com(const JetField& v, const GridPtr& grid, const ComOptions& opt = {});

// Sampled route: gradients from spectral differentiation of the samples (tagged fd).
ObservableSet classical_com(const TransverseAmplitude& v, const ComOptions& opt = {});

// hbar * classical / ||v||^2.
ObservableSet per_photon(const ObservableSet& classical, const PhysConfig& cfg = {});

// Per-photon expectation of one observable: size 1 for P0, otherwise 3.
std::vector<double> photon_expectation(const JetField& v, const GridPtr& grid, Observable which,
                                       const ComOptions& opt = {});
std::vector<double> photon_expectation(const TransverseAmplitude& v, Observable which, const ComOptions& opt = {});

// hbar int khat (p(k,+) - p(k,-)) with p the normalised helicity densities.
Vec3d spin_via_helicity(const TransverseAmplitude& v, const PhysConfig& cfg = {});

// <S_j^2> - <S_j>^2 per photon along direction alpha (normalised internally).
double spin_variance(const TransverseAmplitude& v, const Vec3d& alpha, const PhysConfig& cfg = {});

// Cartesian gradient dv/dk_j at every node from the samples: collocation in k
// and cos(theta), Fourier differentiation in phi.
std::vector<std::array<Vec3c, 3>> sampled_gradient(const TransverseAmplitude& v);

}  // namespace lightam
