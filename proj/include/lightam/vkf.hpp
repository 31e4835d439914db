#pragma once

// "VKF v1" field files: a first line "VKF v1", one line of JSON header, then
// little-endian float64 pairs (Re, Im) for the three components of every node.
//   layout "kgrid":  nodes in (k, theta, phi) row-major order
//   layout "xgrid":  nodes in (z, y, x) row-major order
//   layout "planar": one complex scalar per node in (y, x) order

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "lightam/amplitude.hpp"
#include "lightam/paraxial.hpp"
#include "lightam/space_field.hpp"

namespace lightam {

using nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

void write_vkf(const std::string& path, const TransverseAmplitude& v, const PhysConfig& cfg, const json& meta = json::object());
TransverseAmplitude read_vkf(const std::string& path, PhysConfig* cfg = nullptr, json* meta = nullptr,
                             double transverse_tol = 1e-8);

void write_vkf(const std::string& path, const SampledSpaceField& f, const json& meta = json::object());
SampledSpaceField read_vkf_space(const std::string& path, json* meta = nullptr);

void write_vkf(const std::string& path, const TransverseScalarField& f, const json& meta = json::object());
TransverseScalarField read_vkf_planar(const std::string& path, json* meta = nullptr);

// Reads only the JSON header.
json read_vkf_header(const std::string& path);

// One row per node: index, k-vector, weight, Re/Im of the three components.
void write_csv(const std::string& path, const TransverseAmplitude& v);

}  // namespace lightam
