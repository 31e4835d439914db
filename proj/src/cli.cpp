#include "lightam/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lightam/fieldsynth.hpp"
#include "lightam/modes.hpp"
#include "lightam/observables.hpp"
#include "lightam/operators.hpp"
#include "lightam/paraxial.hpp"
#include "lightam/vkf.hpp"

namespace lightam::cli {

using nlohmann::json;

double RunConfig::tolerance(const std::string& key, double fallback) const {
    if (!tolerances.contains(key)) return fallback;
    return tolerances.at(key).get<double>();
}

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw SchemaError(where + ": unknown key '" + key + "'");
}

double positive(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    const double v = j.get<double>();
    if (!(v > 0.0)) throw SchemaError(where + ": must be positive");
    return v;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    require_keys(j, {"units", "grid", "mode", "seed", "tolerances", "output", "options"}, "config");
    RunConfig rc;
    if (!j.contains("grid")) throw SchemaError("config: missing required key 'grid'");
    if (j.contains("units")) {
        require_keys(j["units"], {"c", "hbar"}, "config.units");
        if (j["units"].contains("c")) rc.units.c = positive(j["units"]["c"], "config.units.c");
        if (j["units"].contains("hbar")) rc.units.hbar = positive(j["units"]["hbar"], "config.units.hbar");
    }
    const json& g = j["grid"];
    require_keys(g, {"kind", "nk", "ntheta", "nphi", "k_lo", "k_hi", "cos_lo", "cos_hi"}, "config.grid");
    try {
        GridSpec spec = grid_from_json(g);
        spec.validate();
        rc.grid = spec;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("config.grid: ") + e.what());
    }
    if (j.contains("mode")) {
        if (!j["mode"].is_object()) throw SchemaError("config.mode: expected an object");
        rc.mode = j["mode"];
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            throw SchemaError("config.seed: expected a non-negative integer");
        rc.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object()) throw SchemaError("config.tolerances: expected an object");
        for (const auto& [key, val] : j["tolerances"].items()) positive(val, "config.tolerances." + key);
        rc.tolerances = j["tolerances"];
    }
    if (j.contains("output")) {
        if (!j["output"].is_object()) throw SchemaError("config.output: expected an object");
        for (const auto& [key, val] : j["output"].items())
            if (!val.is_string()) throw SchemaError("config.output." + key + ": expected a path string");
        rc.output = j["output"];
    }
    if (j.contains("options")) {
        if (!j["options"].is_object()) throw SchemaError("config.options: expected an object");
        rc.options = j["options"];
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw SchemaError("config '" + path + "': " + e.what());
    }
    return parse_run_config(j);
}

namespace {

json vec_json(const Vec3d& v) { return json::array({v[0], v[1], v[2]}); }

json set_json(const ObservableSet& s) {
    return {{"P0", s.P0},
            {"P", vec_json(s.P)},
            {"J", vec_json(s.J)},
            {"K", vec_json(s.K)},
            {"L", vec_json(s.L)},
            {"S", vec_json(s.S)},
            {"t", s.t},
            {"norm", s.norm2},
            {"normalization", to_string(s.normalization)},
            {"errors",
             {{"P0", s.err_P0},
              {"P", vec_json(s.err_P)},
              {"J", vec_json(s.err_J)},
              {"K", vec_json(s.err_K)},
              {"L", vec_json(s.err_L)},
              {"S", vec_json(s.err_S)},
              {"norm", s.err_norm2}}},
            {"max_imag_ratio", s.max_imag_ratio},
            {"fd", s.fd}};
}

json grid_report(const KGrid& g) {
    json j = grid_to_json(g.spec());
    j["nodes"] = g.size();
    return j;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) throw std::exception();
        } catch (...) {
            throw SchemaError(what + ": cannot parse '" + item + "' as a number");
        }
    }
    return out;
}

Vec3d parse_vec3(const std::string& s, const std::string& what) {
    const auto v = parse_doubles(s, what);
    if (v.size() != 3) throw SchemaError(what + ": expected three comma-separated numbers");
    return {v[0], v[1], v[2]};
}

double rel_diff(const Vec3d& a, const Vec3d& b, double floor) {
    return norm(a - b) / std::max(norm(b), floor);
}

// Flags shared by all subcommands; unset optionals leave the config untouched.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> c, hbar;
    std::string report;

    std::optional<std::string> grid_kind;
    std::optional<int> nk, ntheta, nphi;
    std::optional<double> k_lo, k_hi, cos_lo, cos_hi;

    std::optional<std::string> type, variant;
    std::optional<int> a, l, m, p, lmax, terms;
    std::optional<double> w, k, band, k0, sigma;
};

void add_common(CLI::App* sub, Common& o, bool with_mode) {
    sub->add_option("--config", o.config, "JSON run config (units, grid, mode, seed, tolerances, output, options)");
    sub->add_option("--seed", o.seed, "Seed for random fields; recorded in the report (default 1)");
    sub->add_option("--c", o.c, "Speed of light (default 1)");
    sub->add_option("--hbar", o.hbar, "Reduced Planck constant (default 1)");
    sub->add_option("--report", o.report, "Write the JSON report here instead of stdout");
    sub->add_option("--grid-kind", o.grid_kind, "k-grid kind: sphere or shell");
    sub->add_option("--nk", o.nk, "Radial Gauss-Legendre nodes");
    sub->add_option("--ntheta", o.ntheta, "Polar Gauss-Legendre nodes");
    sub->add_option("--nphi", o.nphi, "Azimuthal trapezoid nodes");
    sub->add_option("--k-lo", o.k_lo, "Lower |k| of the grid (shell radius for shell grids)");
    sub->add_option("--k-hi", o.k_hi, "Upper |k| of the grid");
    sub->add_option("--cos-lo", o.cos_lo, "Lower cos(theta) of the grid");
    sub->add_option("--cos-hi", o.cos_hi, "Upper cos(theta) of the grid");
    if (!with_mode) return;
    sub->add_option("--type", o.type, "Field type: random, vsh, j3, vector-lg or lg");
    sub->add_option("-a", o.a, "VSH family a (1 or 2)");
    sub->add_option("-l", o.l, "VSH degree l");
    sub->add_option("-m", o.m, "Azimuthal index m (vsh, j3, lg, vector-lg)");
    sub->add_option("-p", o.p, "LG radial index p");
    sub->add_option("-w", o.w, "LG waist w");
    sub->add_option("-k", o.k, "LG carrier wavenumber");
    sub->add_option("--variant", o.variant, "vector-lg variant: vector-alpha or vector-beta");
    sub->add_option("--band", o.band, "vector-lg relative radial band width; 0 selects one shell");
    sub->add_option("--k0", o.k0, "Centre of the Gaussian radial profile (vsh, j3)");
    sub->add_option("--sigma", o.sigma, "Width of the Gaussian radial profile (vsh, j3)");
    sub->add_option("--lmax", o.lmax, "Band limit of random fields");
    sub->add_option("--terms", o.terms, "Number of terms in random fields");
}

RunConfig resolve(const Common& o) {
    RunConfig rc = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.seed) rc.seed = *o.seed;
    if (o.c) rc.units.c = *o.c;
    if (o.hbar) rc.units.hbar = *o.hbar;
    try {
        rc.units.validate();
    } catch (const std::exception& e) {
        throw SchemaError(e.what());
    }
    const bool grid_flag = o.grid_kind || o.nk || o.ntheta || o.nphi || o.k_lo || o.k_hi || o.cos_lo || o.cos_hi;
    if (grid_flag) {
        GridSpec g = rc.grid.value_or(GridSpec{});
        if (o.grid_kind) g.kind = *o.grid_kind;
        if (o.nk) g.nk = *o.nk;
        if (o.ntheta) g.ntheta = *o.ntheta;
        if (o.nphi) g.nphi = *o.nphi;
        if (o.k_lo) g.k_lo = *o.k_lo;
        if (o.k_hi) g.k_hi = *o.k_hi;
        if (o.cos_lo) g.cos_lo = *o.cos_lo;
        if (o.cos_hi) g.cos_hi = *o.cos_hi;
        if (g.kind == "shell") {
            g.nk = 1;
            g.k_hi = g.k_lo;
        }
        try {
            g.validate();
        } catch (const std::exception& e) {
            throw SchemaError(std::string("grid: ") + e.what());
        }
        rc.grid = g;
    }
    auto put = [&](const char* key, const auto& opt) {
        if (opt) rc.mode[key] = *opt;
    };
    put("type", o.type);
    put("variant", o.variant);
    put("a", o.a);
    put("l", o.l);
    put("m", o.m);
    put("p", o.p);
    put("w", o.w);
    put("k", o.k);
    put("band", o.band);
    put("k0", o.k0);
    put("sigma", o.sigma);
    put("lmax", o.lmax);
    put("terms", o.terms);
    return rc;
}

std::string mode_type(const RunConfig& rc) { return rc.mode.value("type", std::string("random")); }

template <class T>
T mode_value(const RunConfig& rc, const char* key, T fallback) {
    if (!rc.mode.contains(key)) return fallback;
    try {
        return rc.mode.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(std::string("mode.") + key + ": wrong type");
    }
}

LGModeSpec lg_spec(const RunConfig& rc, LGVariant fallback) {
    LGModeSpec s;
    s.m = mode_value(rc, "m", 0);
    s.p = mode_value(rc, "p", 0);
    s.w = mode_value(rc, "w", 20.0);
    s.k = mode_value(rc, "k", 1.0);
    s.paraxial_threshold = mode_value(rc, "paraxial_threshold", 20.0);
    s.variant = rc.mode.contains("variant") ? lg_variant_from_string(mode_value(rc, "variant", std::string()))
                                            : fallback;
    s.validate();
    return s;
}

std::vector<cplx> poly_from(const json& j, const char* what) {
    std::vector<cplx> out;
    if (!j.is_array()) throw SchemaError(std::string("mode.") + what + ": expected an array");
    for (const auto& e : j) {
        if (e.is_number()) {
            out.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2) {
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            throw SchemaError(std::string("mode.") + what + ": entries must be numbers or [re, im] pairs");
        }
    }
    return out;
}

struct ModeSource {
    JetField field;
    GridPtr grid;
    json description;
};

GridSpec default_sphere(double k_hi) {
    GridSpec g;
    g.nk = 48;
    g.k_lo = 0.0;
    g.k_hi = std::max(2.0, k_hi);
    return g;
}

ModeSource build_mode(const RunConfig& rc) {
    const std::string type = mode_type(rc);
    ModeSource src;
    json d = rc.mode;
    d["type"] = type;
    GridSpec natural;
    if (type == "random") {
        RandomFieldOptions ro;
        ro.lmax = mode_value(rc, "lmax", ro.lmax);
        ro.terms = mode_value(rc, "terms", ro.terms);
        const auto seed = mode_value<std::uint64_t>(rc, "seed", rc.seed);
        d["seed"] = seed;
        src.field = random_field(seed, ro);
        natural = default_sphere(2.0);
    } else if (type == "vsh") {
        VSHIndex idx{mode_value(rc, "a", 1), mode_value(rc, "l", 1), mode_value(rc, "m", 0)};
        idx.validate();
        const GaussianShell r = GaussianShell{mode_value(rc, "k0", 1.0), mode_value(rc, "sigma", 0.15), 1.0}.normalized();
        src.field = vsh_field(idx, r);
        natural = default_sphere(r.k0 + 8.0 * r.sigma);
    } else if (type == "j3") {
        J3EigenSpec s;
        s.m = mode_value(rc, "m", 1);
        const GaussianShell r = GaussianShell{mode_value(rc, "k0", 1.0), mode_value(rc, "sigma", 0.15), 1.0}.normalized();
        s.radial_a = s.radial_b = r;
        if (rc.mode.contains("poly_a")) s.poly_a = poly_from(rc.mode["poly_a"], "poly_a");
        if (rc.mode.contains("poly_b")) s.poly_b = poly_from(rc.mode["poly_b"], "poly_b");
        src.field = j3_eigenfield(s);
        natural = default_sphere(r.k0 + 8.0 * r.sigma);
    } else if (type == "vector-lg") {
        const LGModeSpec spec = lg_spec(rc, LGVariant::vector_alpha);
        VectorLGOptions vo;
        vo.band = mode_value(rc, "band", vo.band);
        const VectorLGMode mode = vector_lg(spec, vo);
        src.field = mode.field;
        natural = mode.natural_grid;
        d["variant"] = to_string(spec.variant);
        d["paraxial"] = mode.paraxial;
        d["longitudinal_fraction"] = mode.longitudinal_fraction;
        d["transversality_residual"] = mode.transversality_residual;
    } else if (type == "lg") {
        throw SchemaError("mode type 'lg' is a transverse scalar mode; use it with 'mode' or 'propagate'");
    } else {
        throw SchemaError("unknown mode type '" + type + "'");
    }
    src.grid = make_grid(rc.grid.value_or(natural));
    src.description = d;
    return src;
}

class Reporter {
public:
    explicit Reporter(std::string path) : path_(std::move(path)) {}
    void emit(const json& report) const {
        if (path_.empty()) {
            std::cout << report.dump(2) << '\n';
            return;
        }
        std::ofstream os(path_);
        if (!os) throw std::runtime_error("cannot write report '" + path_ + "'");
        os << report.dump(2) << '\n';
    }

private:
    std::string path_;
};

json base_report(const std::string& command, const RunConfig& rc) {
    return {{"command", command}, {"seed", rc.seed}, {"units", {{"c", rc.units.c}, {"hbar", rc.units.hbar}}}};
}

std::string output_path(const std::string& flag, const RunConfig& rc, const char* key) {
    if (!flag.empty()) return flag;
    return rc.output.value(key, std::string());
}

int finish(json report, const Common& o, bool pass) {
    report["pass"] = pass;
    Reporter(o.report).emit(report);
    return pass ? kExitPass : kExitCheckFailed;
}

json check_json(const std::string& name, double value, double tol) {
    return {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", value <= tol}};
}

bool all_pass(const json& checks) {
    for (const auto& c : checks)
        if (!c["pass"].get<bool>()) return false;
    return true;
}

// ---------------------------------------------------------------- mode

struct ModeArgs {
    std::string out, csv;
    int n = 256;
    std::optional<double> length;
    double z = 0.0;
};

int cmd_mode(const Common& o, const ModeArgs& a) {
    const RunConfig rc = resolve(o);
    const std::string out = output_path(a.out, rc, "field");
    if (out.empty()) throw SchemaError("mode: an output path is required (--out or output.field)");
    json report = base_report("mode", rc);
    if (mode_type(rc) == "lg") {
        const LGModeSpec spec = lg_spec(rc, LGVariant::scalar);
        const double length = a.length.value_or(40.0 * spec.w);
        const TransverseScalarField f = sample_lg(spec, a.n, length, a.z);
        json d = rc.mode;
        d["type"] = "lg";
        write_vkf(out, f, {{"mode", d}, {"seed", rc.seed}});
        report["mode"] = d;
        report["plane"] = {{"n", a.n}, {"length", length}, {"z", a.z}};
        report["norm"] = f.norm2();
        report["output"] = out;
        return finish(report, o, true);
    }
    const ModeSource src = build_mode(rc);
    const TransverseAmplitude v = sample(src.field, src.grid, 1e-8);
    write_vkf(out, v, rc.units, {{"mode", src.description}, {"seed", rc.seed}});
    const std::string csv = output_path(a.csv, rc, "csv");
    if (!csv.empty()) write_csv(csv, v);
    report["mode"] = src.description;
    report["grid"] = grid_report(*src.grid);
    report["norm"] = norm_squared(v);
    report["max_transverse_residual"] = v.max_transverse_residual();
    report["output"] = out;
    return finish(report, o, true);
}

// ---------------------------------------------------------------- observables

struct ObsArgs {
    std::string input;
    double t = 0.0;
    std::optional<double> expect_j3;
};

// Norm fraction in a small cap around theta = pi, where the helicity basis is
// only defined by its limit; reported, never fatal.
json south_cap_json(const TransverseAmplitude& v) {
    constexpr double kCap = 0.2;
    const double cut = -std::cos(kCap);
    double tot = 0.0, cap = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec3d& k = v.grid().point(i);
        const double d = v.grid().weight(i) * norm2(v[i]);
        tot += d;
        if (k[2] / norm(k) < cut) cap += d;
    }
    const double frac = tot > 0.0 ? cap / tot : 0.0;
    return {{"theta_min", kPi - kCap}, {"norm_fraction", frac}, {"flagged", frac > 1e-3}};
}

int cmd_observables(const Common& o, const ObsArgs& a) {
    const RunConfig rc = resolve(o);
    ComOptions co;
    co.t = a.t;
    co.cfg = rc.units;
    ObservableSet s;
    json report = base_report("observables", rc);
    if (!a.input.empty()) {
        PhysConfig file_cfg;
        json meta;
        const TransverseAmplitude v = read_vkf(a.input, &file_cfg, &meta);
        co.cfg = file_cfg;
        report["units"] = {{"c", file_cfg.c}, {"hbar", file_cfg.hbar}};
        s = classical_com(v, co);
        report["input"] = a.input;
        report["grid"] = grid_report(v.grid());
        report["south_cap"] = south_cap_json(v);
        if (meta.contains("mode")) report["mode"] = meta["mode"];
    } else {
        const ModeSource src = build_mode(rc);
        s = classical_com(src.field, src.grid, co);
        report["mode"] = src.description;
        report["grid"] = grid_report(*src.grid);
        report["south_cap"] = south_cap_json(sample(src.field, src.grid));
    }
    report["route"] = s.fd ? "sampled" : "exact";
    report["classical"] = set_json(s);
    report["norm"] = s.norm2;
    report["per_photon"] = s.norm2 > 0.0 ? set_json(per_photon(s, co.cfg)) : json(nullptr);

    json checks = json::array();
    const double jls_tol = rc.tolerance("jls", s.fd ? 1e-6 : 1e-9);
    const double floor = std::max(s.norm2, 1e-300);
    checks.push_back(check_json("J=L+S", rel_diff(s.J, s.L + s.S, floor), jls_tol));
    std::optional<double> expect = a.expect_j3;
    if (!expect && rc.options.contains("expect_j3")) expect = rc.options["expect_j3"].get<double>();
    if (expect) {
        if (!(s.norm2 > 0.0)) throw std::domain_error("observables: zero norm, J3 per photon undefined");
        const double j3 = per_photon(s, co.cfg).J[2] / co.cfg.hbar;
        json c = check_json("J3 per photon / hbar", std::abs(j3 - *expect), rc.tolerance("j3", s.fd ? 1e-4 : 1e-8));
        c["measured"] = j3;
        c["expected"] = *expect;
        checks.push_back(c);
    }
    report["checks"] = checks;
    return finish(report, o, all_pass(checks));
}

// ---------------------------------------------------------------- algebra

struct AlgebraArgs {
    std::optional<std::string> resolution, relations;
    std::optional<int> pairs;
};

int cmd_algebra(const Common& o, const AlgebraArgs& a) {
    const RunConfig rc = resolve(o);
    AlgebraOptions ao;
    ao.seed = rc.seed;
    ao.cfg = rc.units;
    ao.threshold = rc.tolerance("algebra", ao.threshold);
    ao.pairs = a.pairs.value_or(rc.options.value("pairs", ao.pairs));
    if (ao.pairs < 1) throw SchemaError("algebra: --pairs must be >= 1");
    if (rc.grid) ao.resolution = {rc.grid->nk, rc.grid->ntheta, rc.grid->nphi};
    if (a.resolution) {
        const auto r = parse_doubles(*a.resolution, "--resolution");
        if (r.size() == 1) ao.resolution = {int(r[0]), int(r[0]), int(r[0])};
        else if (r.size() == 3) ao.resolution = {int(r[0]), int(r[1]), int(r[2])};
        else throw SchemaError("--resolution: expected N or NK,NTHETA,NPHI");
    }
    for (int n : ao.resolution)
        if (n < 4) throw SchemaError("--resolution: every entry must be >= 4");
    if (a.relations) {
        // ids such as "[J,K]" contain commas, so only split outside brackets
        const auto& known = algebra_relation_ids();
        std::vector<std::string> ids(1);
        int depth = 0;
        for (char ch : *a.relations) {
            if (ch == '[') ++depth;
            if (ch == ']') --depth;
            if (ch == ',' && depth == 0) ids.emplace_back();
            else ids.back() += ch;
        }
        for (const auto& id : ids) {
            if (std::find(known.begin(), known.end(), id) == known.end())
                throw SchemaError("--relations: unknown relation '" + id + "'");
            ao.relations.push_back(id);
        }
    }
    const auto reports = verify_algebra(ao);
    json rel = json::array();
    bool pass = true;
    for (const auto& r : reports) {
        pass = pass && r.pass;
        rel.push_back({{"relation", r.relation},
                       {"lhs", json::array({r.lhs.real(), r.lhs.imag()})},
                       {"rhs", json::array({r.rhs.real(), r.rhs.imag()})},
                       {"abs_residual", r.abs_residual},
                       {"rel_residual", r.rel_residual},
                       {"threshold", r.threshold},
                       {"worst_components", r.components},
                       {"worst_seeds", json::array({r.seed_left, r.seed_right})},
                       {"pass", r.pass}});
    }
    json report = base_report("algebra", rc);
    report["resolution"] = json::array({ao.resolution[0], ao.resolution[1], ao.resolution[2]});
    report["pairs"] = ao.pairs;
    report["relations"] = rel;
    return finish(report, o, pass);
}

// ---------------------------------------------------------------- propagate

struct PropagateArgs {
    std::string input, out_prefix, csv;
    std::optional<std::string> z, zeta;
    int n = 256;
    std::optional<double> length;
};

int cmd_propagate(const Common& o, const PropagateArgs& a) {
    const RunConfig rc = resolve(o);
    json report = base_report("propagate", rc);
    TransverseScalarField psi;
    std::optional<LGModeSpec> spec;
    if (!a.input.empty()) {
        json meta;
        psi = read_vkf_planar(a.input, &meta);
        report["input"] = a.input;
        if (meta.contains("mode") && meta["mode"].value("type", "") == "lg") {
            RunConfig tmp;
            tmp.mode = meta["mode"];
            spec = lg_spec(tmp, LGVariant::scalar);
        }
    } else {
        if (rc.mode.contains("type") && mode_type(rc) != "lg") throw SchemaError("propagate: mode type must be 'lg'");
        spec = lg_spec(rc, LGVariant::scalar);
        psi = sample_lg(*spec, a.n, a.length.value_or(40.0 * spec->w), 0.0);
    }
    std::vector<double> zs;
    if (a.z) zs = parse_doubles(*a.z, "--z");
    if (a.zeta) {
        if (!spec) throw SchemaError("propagate: --zeta needs a known LG mode; use --z");
        for (double zeta : parse_doubles(*a.zeta, "--zeta")) zs.push_back(zeta * spec->rayleigh_range());
    }
    if (zs.empty()) {
        if (!spec) throw SchemaError("propagate: give --z for fields without LG metadata");
        for (double zeta : {0.5, 1.0, 2.0}) zs.push_back(zeta * spec->rayleigh_range());
    }

    const double n0 = psi.norm2();
    const double tol_unit = rc.tolerance("unitarity", 1e-12);
    const double tol_waist = rc.tolerance("waist", 1e-6);
    const double tol_gouy = rc.tolerance("gouy", 1e-6);
    const double tol_closed = rc.tolerance("closed_form", 1e-7);
    json rows = json::array();
    json checks = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "z,zeta,norm_ratio,w_measured,w_expected,gouy_measured,gouy_expected,closed_form_error\n";
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const TransverseScalarField out = pwe_propagate(psi, zs[i]);
        if (!a.out_prefix.empty())
            write_vkf(a.out_prefix + "_z" + std::to_string(i) + ".vkf", out,
                      spec ? json{{"propagated_from", psi.z}, {"mode", {{"type", "lg"}, {"m", spec->m}, {"p", spec->p},
                                                                         {"w", spec->w}, {"k", spec->k}}}}
                           : json{{"propagated_from", psi.z}});
        const double ratio = out.norm2() / n0;
        json row{{"z", out.z}, {"norm_ratio", ratio}};
        checks.push_back(check_json("unitarity z=" + std::to_string(out.z), std::abs(ratio - 1.0), tol_unit));
        double zeta = std::nan(""), wm = std::nan(""), we = std::nan(""), gm = std::nan(""), ge = std::nan(""),
               cf = std::nan("");
        if (spec) {
            zeta = out.z / spec->rayleigh_range();
            const double order = 2.0 * spec->p + std::abs(spec->m) + 1.0;
            wm = std::sqrt(2.0 * second_moment(out) / order);
            we = spec->w * std::sqrt(1.0 + zeta * zeta);
            gm = measured_gouy(*spec, out);
            ge = gouy_phase(*spec, out.z);
            // arg() wraps; report the branch nearest the expected phase
            const double dg = std::remainder(gm - ge, 2.0 * kPi);
            gm = ge + dg;
            TransverseScalarField ref = out;
            double num = 0.0, den = 0.0;
            for (int iy = 0; iy < out.ny; ++iy)
                for (int ix = 0; ix < out.nx; ++ix) {
                    const cplx r = lg_x(*spec, out.x(ix), out.y(iy), out.z);
                    num += std::norm(out.at(ix, iy) - r);
                    den += std::norm(r);
                }
            cf = std::sqrt(num / den);
            row["zeta"] = zeta;
            row["w_measured"] = wm;
            row["w_expected"] = we;
            row["gouy_measured"] = gm;
            row["gouy_expected"] = ge;
            row["closed_form_error"] = cf;
            checks.push_back(check_json("waist z=" + std::to_string(out.z), std::abs(wm / we - 1.0), tol_waist));
            checks.push_back(check_json("gouy z=" + std::to_string(out.z), std::abs(dg), tol_gouy));
            checks.push_back(check_json("closed form z=" + std::to_string(out.z), cf, tol_closed));
        }
        csv << out.z << ',' << zeta << ',' << ratio << ',' << wm << ',' << we << ',' << gm << ',' << ge << ',' << cf
            << '\n';
        rows.push_back(row);
    }
    const std::string csv_path = output_path(a.csv, rc, "csv");
    if (!csv_path.empty()) {
        std::ofstream os(csv_path);
        if (!os) throw std::runtime_error("cannot write '" + csv_path + "'");
        os << csv.str();
    }
    report["plane"] = {{"nx", psi.nx}, {"ny", psi.ny}, {"dx", psi.dx}, {"dy", psi.dy}, {"k", psi.k}};
    report["propagation"] = rows;
    report["checks"] = checks;
    return finish(report, o, all_pass(checks));
}

// ---------------------------------------------------------------- paraxiality

struct ParaxialityArgs {
    std::string input, out;
    double theta_cut = 0.2;
    double k_min = 0.0;
    bool force = false;
    int plane_n = 128;
    double plane_length = 200.0;
    std::string z = "0";
};

json paraxiality_json(const ParaxialityReport& r) {
    return {{"theta_cut", r.theta_cut},
            {"norm_fraction_outside", r.norm_fraction_outside},
            {"backward_norm_fraction", r.backward_norm_fraction},
            {"k_min", r.k_min},
            {"below_k_min_fraction", r.below_k_min_fraction},
            {"eps_par", r.eps_par},
            {"paraxial", r.paraxial}};
}

int cmd_paraxiality(const Common& o, const ParaxialityArgs& a) {
    const RunConfig rc = resolve(o);
    json report = base_report("paraxiality", rc);
    const double eps = rc.tolerance("eps_par", 1e-3);
    std::optional<ModeSource> src;
    TransverseAmplitude v;
    if (!a.input.empty()) {
        json meta;
        v = read_vkf(a.input, nullptr, &meta);
        report["input"] = a.input;
        if (meta.contains("mode")) report["mode"] = meta["mode"];
    } else {
        src = build_mode(rc);
        v = sample(src->field, src->grid, 1e-6);
        report["mode"] = src->description;
    }
    report["grid"] = grid_report(v.grid());
    const ParaxialityReport pr = paraxiality_report(v, a.theta_cut, a.k_min, eps);
    report["paraxiality"] = paraxiality_json(pr);
    bool pass = pr.paraxial;
    const std::string out = output_path(a.out, rc, "field");
    if (!out.empty()) {
        if (!src) throw SchemaError("paraxiality: writing the paraxial A needs an analytic mode, not --input");
        ParaxialAOptions po;
        po.k_min = a.k_min;
        po.theta_cut = a.theta_cut;
        po.eps_par = eps;
        po.force = a.force;
        po.cfg = rc.units;
        const PlanarGrid plane{a.plane_n, a.plane_length};
        try {
            const SampledSpaceField A = paraxial_A(src->field, src->grid, plane, parse_doubles(a.z, "--z"), po);
            write_vkf(out, A, {{"mode", src->description}, {"seed", rc.seed}});
            const TransversalityResult tr = transversality_residual(A);
            report["paraxial_A"] = {{"output", out},
                                    {"forced", a.force && !pr.paraxial},
                                    {"transversality_residual", tr.overall},
                                    {"per_slice", tr.per_slice}};
            if (a.force) pass = true;
        } catch (const NonParaxialError& e) {
            report["paraxial_A"] = {{"refused", e.what()}};
            pass = false;
        }
    }
    return finish(report, o, pass);
}

// ---------------------------------------------------------------- synthesize

struct SynthArgs {
    std::string out, quantity = "A", probes, probe_out;
    int n = 48;
    double length = 60.0;
    double t = 0.0;
};

std::vector<Vec3d> read_probes(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open probe file '" + path + "'");
    std::vector<Vec3d> pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' ||
                                                 line[0] == '+' || line[0] == '.'))
            continue;
        pts.push_back(parse_vec3(line, "probe row"));
    }
    return pts;
}

int cmd_synthesize(const Common& o, const SynthArgs& a) {
    const RunConfig rc = resolve(o);
    const ModeSource src = build_mode(rc);
    const Quantity which = quantity_from_string(a.quantity);
    BoxSpec box{a.n, a.length};
    box.validate();
    SynthesisOptions so;
    so.t = a.t;
    so.cfg = rc.units;
    so.tail_tol = rc.tolerance("tail", so.tail_tol);
    json report = base_report("synthesize", rc);
    report["mode"] = src.description;
    report["grid"] = grid_report(*src.grid);
    report["box"] = {{"n", box.n}, {"length", box.length}, {"t", a.t}};
    json checks = json::array();
    try {
        const SampledSpaceField A = synthesize(src.field, box, Quantity::A, so);
        const SampledSpaceField E = synthesize(src.field, box, Quantity::E, so);
        const std::string out = output_path(a.out, rc, "field");
        if (!out.empty()) {
            const SampledSpaceField& f = which == Quantity::A ? A : which == Quantity::E ? E
                                                                                      : synthesize(src.field, box, which, so);
            write_vkf(out, f, {{"mode", src.description}, {"seed", rc.seed}});
            report["output"] = out;
        }
        ComOptions co;
        co.t = a.t;
        co.cfg = rc.units;
        co.estimate_error = false;
        const ObservableSet ks = classical_com(src.field, src.grid, co);
        const ObservableSet xs = xspace_com(E, A);
        const double tol = rc.tolerance("cross", 1e-3);
        const double nfloor = std::max(ks.norm2, 1e-300);
        const double pfloor = std::max(ks.P0 / rc.units.c, 1e-300);
        checks.push_back(check_json("norm", std::abs(xspace_norm(A) - ks.norm2) / nfloor, tol));
        checks.push_back(check_json("P0", std::abs(xs.P0 - ks.P0) / std::max(ks.P0, 1e-300), tol));
        checks.push_back(check_json("P", rel_diff(xs.P, ks.P, 1e-3 * pfloor), tol));
        checks.push_back(check_json("J", rel_diff(xs.J, ks.J, 1e-3 * nfloor), tol));
        checks.push_back(check_json("L", rel_diff(xs.L, ks.L, 1e-3 * nfloor), tol));
        checks.push_back(check_json("S", rel_diff(xs.S, ks.S, 1e-3 * nfloor), tol));
        checks.push_back(check_json("K", rel_diff(xs.K, ks.K, 1e-3 * nfloor), tol));
        checks.push_back(check_json("div A", spectral_divergence(A), rc.tolerance("divergence", 1e-10)));
        report["kspace"] = set_json(ks);
        report["xspace"] = set_json(xs);
        report["tail_fraction"] = tail_fraction(A);
    } catch (const BoxTooSmall& e) {
        report["error"] = e.what();
        report["tail_fraction"] = e.tail_fraction;
        report["checks"] = checks;
        return finish(report, o, false);
    }
    if (!a.probes.empty()) {
        const auto pts = read_probes(a.probes);
        const TransverseAmplitude v = sample(src.field, src.grid, 1e-8);
        const auto vals = synthesize_points(v, pts, a.t, which, rc.units);
        const std::string path = a.probe_out.empty() ? a.probes + ".out.csv" : a.probe_out;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write '" + path + "'");
        os << std::setprecision(17) << "x,y,z,re_x,im_x,re_y,im_y,re_z,im_z\n";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            os << pts[i][0] << ',' << pts[i][1] << ',' << pts[i][2];
            for (int c = 0; c < 3; ++c) os << ',' << vals[i][c].real() << ',' << vals[i][c].imag();
            os << '\n';
        }
        report["probes"] = {{"count", pts.size()}, {"output", path}, {"quantity", to_string(which)}};
    }
    report["checks"] = checks;
    return finish(report, o, all_pass(checks));
}

// ---------------------------------------------------------------- boost / rotate

struct TransformArgs {
    std::string out, input;
    std::string vec;
    int lmax = -1;
};

json delta_json(const ObservableSet& before, const ObservableSet& after) {
    return {{"P0", after.P0 - before.P0},
            {"P", vec_json(after.P - before.P)},
            {"J", vec_json(after.J - before.J)},
            {"K", vec_json(after.K - before.K)},
            {"L", vec_json(after.L - before.L)},
            {"S", vec_json(after.S - before.S)},
            {"norm", after.norm2 - before.norm2}};
}

int cmd_boost(const Common& o, const TransformArgs& a) {
    const RunConfig rc = resolve(o);
    const Vec3d beta = parse_vec3(a.vec, "--beta");
    const ModeSource src = build_mode(rc);
    const BoostResult br = apply_K(beta, src.field, src.grid, rc.units);
    const TransverseAmplitude v = sample(src.field, src.grid, 1e-8);
    const TransverseAmplitude vb = added(v, br.delta);
    ComOptions co;
    co.cfg = rc.units;
    co.estimate_error = false;
    const ObservableSet before = classical_com(src.field, src.grid, co);
    const JetField boosted = src.field + boost_variation(beta, src.field, rc.units);
    const ObservableSet after = classical_com(boosted, src.grid, co);

    const double n0 = norm_squared(v);
    const double first = 2.0 * inner_product(v, br.delta).real();
    const double dd = norm_squared(br.delta);
    const double speed = norm(beta) / rc.units.c;
    json report = base_report("boost", rc);
    report["mode"] = src.description;
    report["grid"] = grid_report(*src.grid);
    report["beta"] = vec_json(beta);
    report["large_velocity"] = br.large_velocity;
    report["norm"] = {{"before", n0},
                      {"after", norm_squared(vb)},
                      {"first_order", first},
                      {"second_order", dd}};
    report["before"] = set_json(before);
    report["after"] = set_json(after);
    report["delta"] = delta_json(before, after);
    const std::string out = output_path(a.out, rc, "field");
    if (!out.empty()) {
        write_vkf(out, TransverseAmplitude(vb.grid_ptr(), transverse_project({vb.grid_ptr(), vb.values()}).values()),
                  rc.units, {{"mode", src.description}, {"seed", rc.seed}, {"boost", vec_json(beta)}});
        report["output"] = out;
    }
    json checks = json::array();
    checks.push_back(check_json("norm first order", std::abs(first) / std::max(n0 * speed, 1e-300),
                                rc.tolerance("boost_first_order", 1e-9)));
    report["checks"] = checks;
    return finish(report, o, all_pass(checks));
}

int cmd_rotate(const Common& o, const TransformArgs& a) {
    const RunConfig rc = resolve(o);
    const Vec3d alpha = parse_vec3(a.vec, "--alpha");
    const Mat3d R = rotation_matrix(alpha);
    json report = base_report("rotate", rc);
    report["alpha"] = vec_json(alpha);
    ComOptions co;
    co.cfg = rc.units;
    co.estimate_error = false;
    ObservableSet before, after;
    TransverseAmplitude rotated_samples;
    if (!a.input.empty()) {
        PhysConfig cfg;
        json meta;
        const TransverseAmplitude v = read_vkf(a.input, &cfg, &meta);
        co.cfg = cfg;
        rotated_samples = rotate_finite(alpha, v, a.lmax);
        before = classical_com(v, co);
        after = classical_com(rotated_samples, co);
        report["input"] = a.input;
        report["grid"] = grid_report(v.grid());
        if (meta.contains("mode")) report["mode"] = meta["mode"];
        report["route"] = "sampled";
    } else {
        const ModeSource src = build_mode(rc);
        const JetField rf = rotate_finite(alpha, src.field);
        before = classical_com(src.field, src.grid, co);
        after = classical_com(rf, src.grid, co);
        rotated_samples = sample(rf, src.grid, 1e-8);
        report["mode"] = src.description;
        report["grid"] = grid_report(*src.grid);
        report["route"] = "exact";
    }
    report["before"] = set_json(before);
    report["after"] = set_json(after);
    report["delta"] = delta_json(before, after);
    const std::string out = output_path(a.out, rc, "field");
    if (!out.empty()) {
        write_vkf(out, rotated_samples, co.cfg, {{"seed", rc.seed}, {"rotation", vec_json(alpha)}});
        report["output"] = out;
    }
    const double tol = rc.tolerance("covariance", a.input.empty() ? 1e-8 : 1e-6);
    const double floor = std::max(before.norm2, 1e-300) * 1e-3;
    json checks = json::array();
    checks.push_back(check_json("P -> RP", rel_diff(after.P, matvec(R, before.P), floor), tol));
    checks.push_back(check_json("J -> RJ", rel_diff(after.J, matvec(R, before.J), floor), tol));
    checks.push_back(check_json("L -> RL", rel_diff(after.L, matvec(R, before.L), floor), tol));
    checks.push_back(check_json("S -> RS", rel_diff(after.S, matvec(R, before.S), floor), tol));
    checks.push_back(check_json("norm", std::abs(after.norm2 - before.norm2) / std::max(before.norm2, 1e-300), tol));
    report["checks"] = checks;
    return finish(report, o, all_pass(checks));
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"lightam: transverse wave-vector amplitudes, constants of motion, operator algebra and paraxial modes"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 all checks pass, 1 a check failed, 2 usage or schema error.\n"
        "Thread count: set OMP_NUM_THREADS.");

    Common c_mode, c_obs, c_alg, c_prop, c_par, c_syn, c_boost, c_rot;
    ModeArgs a_mode;
    ObsArgs a_obs;
    AlgebraArgs a_alg;
    PropagateArgs a_prop;
    ParaxialityArgs a_par;
    SynthArgs a_syn;
    TransformArgs a_boost, a_rot;

    auto* s_mode = app.add_subcommand("mode", "Construct a field and write it as VKF");
    add_common(s_mode, c_mode, true);
    s_mode->add_option("--out", a_mode.out, "Output VKF path");
    s_mode->add_option("--csv", a_mode.csv, "Also write node samples as CSV");
    s_mode->add_option("--n", a_mode.n, "Transverse samples per side for type lg (default 256)");
    s_mode->add_option("--length", a_mode.length, "Transverse side length for type lg (default 40 w)");
    s_mode->add_option("--z", a_mode.z, "Propagation distance of the sampled lg plane (default 0)");

    auto* s_obs = app.add_subcommand("observables", "Constants of motion, orbital/spin split, classical and per photon");
    add_common(s_obs, c_obs, true);
    s_obs->add_option("--input", a_obs.input, "Read v(k) samples from a VKF file (sampled route)");
    s_obs->add_option("--t", a_obs.t, "Time argument of K(t) (default 0)");
    s_obs->add_option("--expect-j3", a_obs.expect_j3, "Check J3 per photon / hbar against this value");

    auto* s_alg = app.add_subcommand("algebra", "Verify the single-photon operator algebra on seeded random fields");
    add_common(s_alg, c_alg, false);
    s_alg->add_option("--resolution", a_alg.resolution, "Grid resolution N or NK,NTHETA,NPHI (default 32,32,32)");
    s_alg->add_option("--relations", a_alg.relations, "Comma-separated relation ids (default: all)");
    s_alg->add_option("--pairs", a_alg.pairs, "Number of random field pairs (default 20)");

    auto* s_prop = app.add_subcommand("propagate", "Propagate a transverse scalar field with the PWE multiplier");
    add_common(s_prop, c_prop, true);
    s_prop->add_option("--input", a_prop.input, "Planar VKF input; otherwise an LG mode from -m -p -w -k");
    s_prop->add_option("--z", a_prop.z, "Comma-separated propagation distances");
    s_prop->add_option("--zeta", a_prop.zeta, "Comma-separated distances in units of z_R (default 0.5,1,2)");
    s_prop->add_option("--n", a_prop.n, "Transverse samples per side (default 256)");
    s_prop->add_option("--length", a_prop.length, "Transverse side length (default 40 w)");
    s_prop->add_option("--out-prefix", a_prop.out_prefix, "Write each propagated plane to PREFIX_zI.vkf");
    s_prop->add_option("--csv", a_prop.csv, "Waist and Gouy table as CSV");

    auto* s_par = app.add_subcommand("paraxiality", "Paraxiality report and optional paraxial vector potential");
    add_common(s_par, c_par, true);
    s_par->add_option("--input", a_par.input, "Read v(k) samples from a VKF file");
    s_par->add_option("--theta-cut", a_par.theta_cut, "Cone half-angle for the norm fraction (default 0.2)");
    s_par->add_option("--k-min", a_par.k_min, "Minimum |k|; required > 0 when writing the paraxial A");
    s_par->add_option("--out", a_par.out, "Write the paraxial A on planes z to this VKF path");
    s_par->add_flag("--force", a_par.force, "Synthesize the paraxial A even for non-paraxial v");
    s_par->add_option("--plane-n", a_par.plane_n, "Samples per side of the transverse planes (default 128)");
    s_par->add_option("--plane-length", a_par.plane_length, "Side of the transverse planes (default 200)");
    s_par->add_option("--z", a_par.z, "Comma-separated plane positions (default 0)");

    auto* s_syn = app.add_subcommand("synthesize", "x-space analytic signals by FFT with the cross-picture check");
    add_common(s_syn, c_syn, true);
    s_syn->add_option("--out", a_syn.out, "Write the chosen quantity as VKF");
    s_syn->add_option("--quantity", a_syn.quantity, "A, E or B (default A)");
    s_syn->add_option("--n", a_syn.n, "Box points per side (default 48)");
    s_syn->add_option("--length", a_syn.length, "Box side (default 60)");
    s_syn->add_option("--t", a_syn.t, "Time (default 0)");
    s_syn->add_option("--probes", a_syn.probes, "CSV of probe points x,y,z evaluated by direct quadrature");
    s_syn->add_option("--probe-out", a_syn.probe_out, "Probe output CSV (default PROBES.out.csv)");

    auto* s_boost = app.add_subcommand("boost", "First-order boost v + delta v with observable deltas");
    add_common(s_boost, c_boost, true);
    s_boost->add_option("--beta", a_boost.vec, "Boost velocity bx,by,bz")->required();
    s_boost->add_option("--out", a_boost.out, "Write the boosted samples as VKF");

    auto* s_rot = app.add_subcommand("rotate", "Finite rotation exp(-i alpha.J / hbar) with observable deltas");
    add_common(s_rot, c_rot, true);
    s_rot->add_option("--alpha", a_rot.vec, "Rotation vector ax,ay,az (angle = |alpha|)")->required();
    s_rot->add_option("--input", a_rot.input, "Rotate VKF samples by spherical-harmonic resampling");
    s_rot->add_option("--resample-lmax", a_rot.lmax, "Resampling band limit (default: the grid's)");
    s_rot->add_option("--out", a_rot.out, "Write the rotated samples as VKF");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*s_mode) return cmd_mode(c_mode, a_mode);
        if (*s_obs) return cmd_observables(c_obs, a_obs);
        if (*s_alg) return cmd_algebra(c_alg, a_alg);
        if (*s_prop) return cmd_propagate(c_prop, a_prop);
        if (*s_par) return cmd_paraxiality(c_par, a_par);
        if (*s_syn) return cmd_synthesize(c_syn, a_syn);
        if (*s_boost) return cmd_boost(c_boost, a_boost);
        if (*s_rot) return cmd_rotate(c_rot, a_rot);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}

}  // namespace lightam::cli
