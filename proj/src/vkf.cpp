#include "lightam/vkf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace lightam {

namespace {

constexpr const char* kMagic = "VKF v1";

void put_f64(std::ostream& os, double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    os.write(reinterpret_cast<const char*>(&u), sizeof u);
}

double get_f64(std::istream& is) {
    std::uint64_t u;
    if (!is.read(reinterpret_cast<char*>(&u), sizeof u)) throw FormatError("VKF: truncated payload");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    double x;
    std::memcpy(&x, &u, sizeof x);
    return x;
}

std::ofstream open_out(const std::string& path, const json& header) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("VKF: cannot open '" + path + "' for writing");
    os << kMagic << '\n' << header.dump() << '\n';
    return os;
}

std::ifstream open_in(const std::string& path, json& header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("VKF: cannot open '" + path + "'");
    std::string line;
    std::getline(is, line);
    if (line != kMagic) throw FormatError("VKF: '" + path + "' does not start with '" + kMagic + "'");
    std::getline(is, line);
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw FormatError(std::string("VKF: bad header: ") + e.what());
    }
    return is;
}

void expect_layout(const json& h, const char* layout) {
    if (h.value("layout", "") != layout)
        throw FormatError(std::string("VKF: expected layout '") + layout + "', found '" + h.value("layout", "") + "'");
}

json units(const PhysConfig& cfg) { return {{"c", cfg.c}, {"hbar", cfg.hbar}}; }

PhysConfig units_from(const json& h) {
    PhysConfig cfg;
    if (h.contains("units")) {
        cfg.c = h["units"].value("c", 1.0);
        cfg.hbar = h["units"].value("hbar", 1.0);
    }
    cfg.validate();
    return cfg;
}

}  // namespace

json grid_to_json(const GridSpec& g) {
    return {{"kind", g.kind}, {"nk", g.nk},         {"ntheta", g.ntheta}, {"nphi", g.nphi},
            {"k_lo", g.k_lo}, {"k_hi", g.k_hi},     {"cos_lo", g.cos_lo}, {"cos_hi", g.cos_hi}};
}

GridSpec grid_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("grid: expected an object");
    GridSpec g;
    g.kind = j.value("kind", g.kind);
    g.nk = j.value("nk", g.nk);
    g.ntheta = j.value("ntheta", g.ntheta);
    g.nphi = j.value("nphi", g.nphi);
    g.k_lo = j.value("k_lo", g.k_lo);
    g.k_hi = j.value("k_hi", g.k_hi);
    g.cos_lo = j.value("cos_lo", g.cos_lo);
    g.cos_hi = j.value("cos_hi", g.cos_hi);
    if (g.kind == "shell") g.k_hi = g.k_lo;
    g.validate();
    return g;
}

void write_vkf(const std::string& path, const TransverseAmplitude& v, const PhysConfig& cfg, const json& meta) {
    const json h = {{"format", kMagic}, {"layout", "kgrid"}, {"grid", grid_to_json(v.grid().spec())},
                    {"units", units(cfg)}, {"count", v.size()}, {"metadata", meta}};
    std::ofstream os = open_out(path, h);
    for (const Vec3c& x : v.values())
        for (const cplx& c : x) {
            put_f64(os, c.real());
            put_f64(os, c.imag());
        }
    if (!os) throw std::runtime_error("VKF: write failed for '" + path + "'");
}

TransverseAmplitude read_vkf(const std::string& path, PhysConfig* cfg, json* meta, double transverse_tol) {
    json h;
    std::ifstream is = open_in(path, h);
    expect_layout(h, "kgrid");
    const GridPtr grid = make_grid(grid_from_json(h.at("grid")));
    if (h.value("count", std::size_t{0}) != grid->size()) throw FormatError("VKF: node count does not match grid");
    std::vector<Vec3c> vals(grid->size());
    for (auto& x : vals)
        for (auto& c : x) {
            const double re = get_f64(is);
            const double im = get_f64(is);
            c = cplx(re, im);
        }
    if (cfg) *cfg = units_from(h);
    if (meta) *meta = h.value("metadata", json::object());
    return TransverseAmplitude(grid, std::move(vals), transverse_tol);
}

void write_vkf(const std::string& path, const SampledSpaceField& f, const json& meta) {
    f.validate();
    const json h = {{"format", kMagic}, {"layout", "xgrid"}, {"quantity", f.quantity}, {"provenance", f.provenance},
                    {"nx", f.nx}, {"ny", f.ny}, {"dx", f.dx}, {"dy", f.dy}, {"z", f.z}, {"t", f.t},
                    {"k_min", f.k_min}, {"units", units(f.cfg)}, {"has_dz", !f.dz.empty()},
                    {"count", f.values.size()}, {"metadata", meta}};
    std::ofstream os = open_out(path, h);
    auto dump = [&](const std::vector<Vec3c>& vals) {
        for (const Vec3c& x : vals)
            for (const cplx& c : x) {
                put_f64(os, c.real());
                put_f64(os, c.imag());
            }
    };
    dump(f.values);
    if (!f.dz.empty()) dump(f.dz);
    if (!os) throw std::runtime_error("VKF: write failed for '" + path + "'");
}

SampledSpaceField read_vkf_space(const std::string& path, json* meta) {
    json h;
    std::ifstream is = open_in(path, h);
    expect_layout(h, "xgrid");
    SampledSpaceField f;
    try {
        f.quantity = h.at("quantity").get<std::string>();
        f.provenance = h.value("provenance", "exact");
        f.nx = h.at("nx");
        f.ny = h.at("ny");
        f.dx = h.at("dx");
        f.dy = h.at("dy");
        f.z = h.at("z").get<std::vector<double>>();
        f.t = h.value("t", 0.0);
        f.k_min = h.value("k_min", 0.0);
    } catch (const json::exception& e) {
        throw FormatError(std::string("VKF: bad xgrid header: ") + e.what());
    }
    f.cfg = units_from(h);
    const std::size_t n = f.plane() * f.z.size();
    auto load = [&](std::vector<Vec3c>& vals) {
        vals.resize(n);
        for (auto& x : vals)
            for (auto& c : x) {
                const double re = get_f64(is);
                const double im = get_f64(is);
                c = cplx(re, im);
            }
    };
    load(f.values);
    if (h.value("has_dz", false)) load(f.dz);
    f.validate();
    if (meta) *meta = h.value("metadata", json::object());
    return f;
}

void write_vkf(const std::string& path, const TransverseScalarField& f, const json& meta) {
    f.validate();
    const json h = {{"format", kMagic}, {"layout", "planar"}, {"nx", f.nx}, {"ny", f.ny}, {"dx", f.dx},
                    {"dy", f.dy}, {"k", f.k}, {"z", f.z}, {"count", f.data.size()}, {"metadata", meta}};
    std::ofstream os = open_out(path, h);
    for (const cplx& c : f.data) {
        put_f64(os, c.real());
        put_f64(os, c.imag());
    }
    if (!os) throw std::runtime_error("VKF: write failed for '" + path + "'");
}

TransverseScalarField read_vkf_planar(const std::string& path, json* meta) {
    json h;
    std::ifstream is = open_in(path, h);
    expect_layout(h, "planar");
    TransverseScalarField f;
    try {
        f.nx = h.at("nx");
        f.ny = h.at("ny");
        f.dx = h.at("dx");
        f.dy = h.at("dy");
        f.k = h.at("k");
        f.z = h.value("z", 0.0);
    } catch (const json::exception& e) {
        throw FormatError(std::string("VKF: bad planar header: ") + e.what());
    }
    f.data.resize(static_cast<std::size_t>(f.nx) * f.ny);
    for (auto& c : f.data) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        c = cplx(re, im);
    }
    f.validate();
    if (meta) *meta = h.value("metadata", json::object());
    return f;
}

json read_vkf_header(const std::string& path) {
    json h;
    open_in(path, h);
    return h;
}

void write_csv(const std::string& path, const TransverseAmplitude& v) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("CSV: cannot open '" + path + "' for writing");
    os << "index,kx,ky,kz,weight,re_vx,im_vx,re_vy,im_vy,re_vz,im_vz\n" << std::setprecision(17);
    const KGrid& g = v.grid();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec3d& k = g.point(i);
        os << i << ',' << k[0] << ',' << k[1] << ',' << k[2] << ',' << g.weight(i);
        for (const cplx& c : v[i]) os << ',' << c.real() << ',' << c.imag();
        os << '\n';
    }
}

}  // namespace lightam
