#pragma once

#include <cstddef>
#include <vector>

#include "lightam/config.hpp"
#include "lightam/grid.hpp"
#include "lightam/vec3.hpp"

namespace lightam {

inline constexpr double kDefaultTransverseTol = 1e-10;

// Arbitrary complex vector field sampled on a k-grid.
struct SampledVectorField {
    GridPtr grid;
    std::vector<Vec3c> values;
};

// Element of the Hilbert space of transverse amplitudes.
class TransverseAmplitude {
public:
    TransverseAmplitude() = default;
    // Validates |khat.v| <= tol |v| at every node.
    TransverseAmplitude(GridPtr grid, std::vector<Vec3c> values, double tol = kDefaultTransverseTol);

    [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
    [[nodiscard]] const KGrid& grid() const { return *grid_; }
    [[nodiscard]] const std::vector<Vec3c>& values() const { return values_; }
    [[nodiscard]] const Vec3c& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    // Largest |khat.v|/|v| over nodes with nonzero v.
    [[nodiscard]] double max_transverse_residual() const;

private:
    GridPtr grid_;
    std::vector<Vec3c> values_;
};

// w - khat (khat.w) at every node.
TransverseAmplitude transverse_project(const SampledVectorField& w);
Vec3c project_transverse(const Vec3d& k, const Vec3c& w);

cplx inner_product(const TransverseAmplitude& a, const TransverseAmplitude& b);
double norm_squared(const TransverseAmplitude& v);

// Quadrature of a*.b for raw sampled fields on the same grid.
cplx inner_product(const SampledVectorField& a, const SampledVectorField& b);

TransverseAmplitude scaled(const TransverseAmplitude& v, cplx s);
TransverseAmplitude added(const TransverseAmplitude& a, const TransverseAmplitude& b);

void require_same_grid(const KGrid& a, const KGrid& b, const char* what);

}  // namespace lightam
