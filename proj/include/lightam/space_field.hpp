#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lightam/config.hpp"
#include "lightam/vec3.hpp"

namespace lightam {

// Complex 3-vector analytic-signal samples on a stack of uniform x-y planes.
// A full 3-D box is the case of nz equally spaced planes. x_i = (i - nx/2) dx.
struct SampledSpaceField {
    std::string quantity = "A";      // A, E or B
    std::string provenance = "exact";  // exact, exact-planar, paraxial
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    std::vector<double> z;
    double t = 0.0;
    PhysConfig cfg{};
    double k_min = 0.0;
    std::vector<Vec3c> values;  // (iz, iy, ix), x fastest
    std::vector<Vec3c> dz;      // d/dz of the samples when known spectrally; may be empty

    [[nodiscard]] std::size_t plane() const { return static_cast<std::size_t>(nx) * ny; }
    [[nodiscard]] std::size_t index(int iz, int iy, int ix) const {
        return (static_cast<std::size_t>(iz) * ny + iy) * nx + ix;
    }
    [[nodiscard]] double x(int ix) const { return (ix - nx / 2) * dx; }
    [[nodiscard]] double y(int iy) const { return (iy - ny / 2) * dy; }
    [[nodiscard]] int nz() const { return static_cast<int>(z.size()); }
    void validate() const;
};

}  // namespace lightam
