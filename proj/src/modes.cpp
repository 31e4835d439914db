#include "lightam/modes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lightam/parallel.hpp"
#include "lightam/polarization.hpp"
#include "lightam/quadrature.hpp"

namespace lightam {

void GaussianShell::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("GaussianShell: sigma must be positive");
    if (!(k0 > 0.0)) throw std::invalid_argument("GaussianShell: k0 must be positive");
}

double radial_overlap(const GaussianShell& f, const GaussianShell& g) {
    const double smax = std::max(f.sigma, g.sigma);
    const double lo = std::max(0.0, std::min(f.k0, g.k0) - 12.0 * smax);
    const double hi = std::max(f.k0, g.k0) + 12.0 * smax;
    const QuadRule q = gauss_legendre(240, lo, hi);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double k = q.nodes[i];
        s += q.weights[i] * k * k * f.eval(k) * g.eval(k);
    }
    return s;
}

GaussianShell GaussianShell::normalized() const {
    validate();
    GaussianShell out = *this;
    out.amplitude = 1.0;
    out.amplitude = 1.0 / std::sqrt(radial_overlap(out, out));
    return out;
}

Vec3c vsh(const VSHIndex& idx, const Vec3d& khat) {
    idx.validate();
    std::vector<cplx> Y;
    const Vec3<cplx> k{khat[0], khat[1], khat[2]};
    spherical_harmonics(k, idx.l, Y);
    return vsh_from_table(Y, k, idx.a, idx.l, idx.m);
}

namespace {

struct VSHExpansionFunctor {
    std::vector<VSHTerm> terms;
    int lmax = 1;

    template <class T>
    Vec3<T> operator()(const Vec3<T>& k) const {
        std::vector<T> Y;
        spherical_harmonics(k, lmax, Y);
        const T r = sqrt(dot(k, k));
        Vec3<T> out{T(0.0), T(0.0), T(0.0)};
        for (const VSHTerm& t : terms) {
            const T f = t.coeff * t.radial(r);
            out = out + f * vsh_from_table(Y, k, t.index.a, t.index.l, t.index.m);
        }
        return out;
    }
};

template <class T>
T horner(const std::vector<cplx>& c, const T& x) {
    T acc(0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// sin^|n| th e^{i n phi} from Cartesian components.
template <class T>
T azimuthal_power(const Vec3<T>& k, const T& r, int n) {
    const T s = n >= 0 ? (k[0] + kI * k[1]) / r : (k[0] - kI * k[1]) / r;
    return ipow(s, std::abs(n));
}

struct J3Functor {
    J3EigenSpec spec;

    template <class T>
    Vec3<T> operator()(const Vec3<T>& k) const {
        const T r = sqrt(dot(k, k));
        const T x = k[2] / r;
        Vec3<T> out{T(0.0), T(0.0), T(0.0)};
        if (!spec.poly_a.empty()) {
            const T a = spec.radial_a(r) * horner(spec.poly_a, x) * azimuthal_power(k, r, spec.m - 1);
            out = out + a * regular_helicity_plus(k);
        }
        if (!spec.poly_b.empty()) {
            const T b = spec.radial_b(r) * horner(spec.poly_b, x) * azimuthal_power(k, r, spec.m + 1);
            out = out + b * regular_helicity_minus(k);
        }
        return out;
    }
};

struct VectorLGFunctor {
    LGModeSpec spec;
    double sigma_k = 0.0;  // zero: no radial factor
    double scale = 1.0;
    bool alpha = true;

    template <class T>
    Vec3<T> operator()(const Vec3<T>& k) const {
        if (!(value_of(k[2]).real() > 0.0)) return {T(0.0), T(0.0), T(0.0)};
        const double w = spec.w, kc = spec.k;
        const int shift = alpha ? spec.m - 1 : spec.m + 1;
        const int n = std::abs(shift);
        const T rho2 = k[0] * k[0] + k[1] * k[1];
        const T u = (0.5 * w * w) * rho2;
        const T trans = shift >= 0 ? ipow(k[0] + kI * k[1], n) : ipow(k[0] - kI * k[1], n);
        const cplx pre = scale * w * ipow(kI * (w / std::sqrt(2.0)), n);
        T A = pre * (trans * laguerre(spec.p, n, u) * exp(-0.5 * u));
        if (sigma_k > 0.0) {
            const T r = sqrt(dot(k, k));
            const T d = r - kc;
            A = A * exp((-0.5 / (sigma_k * sigma_k)) * (d * d));
        }
        const T corr = 1.0 + rho2 / (2.0 * kc * kc);
        if (alpha) {
            const T c = (-1.0 / kc) * (corr * ((k[0] + kI * k[1]) * A));
            return {A, kI * A, c};
        }
        const T c = (-kI / kc) * (corr * ((k[0] - kI * k[1]) * A));
        return {kI * A, A, c};
    }
};

}  // namespace

JetField vsh_field(const VSHIndex& idx, const GaussianShell& radial) {
    idx.validate();
    return vsh_expansion({VSHTerm{idx, 1.0, radial}});
}

JetField vsh_expansion(std::vector<VSHTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("vsh_expansion: no terms");
    int lmax = 1;
    for (const auto& t : terms) {
        t.index.validate();
        t.radial.validate();
        lmax = std::max(lmax, t.index.l);
    }
    return make_jet_field(VSHExpansionFunctor{std::move(terms), lmax}, "vsh_expansion");
}

double vsh_expansion_norm2(const std::vector<VSHTerm>& terms) {
    cplx s = 0.0;
    for (const auto& a : terms)
        for (const auto& b : terms)
            if (a.index == b.index) s += std::conj(a.coeff) * b.coeff * radial_overlap(a.radial, b.radial);
    return s.real();
}

std::vector<VSHTerm> random_vsh_terms(std::uint64_t seed, const RandomFieldOptions& opt) {
    if (opt.lmax < 1 || opt.terms < 1) throw std::invalid_argument("random field: lmax and terms must be >= 1");
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> dl(1, opt.lmax);
    std::uniform_int_distribution<int> da(1, 2);
    std::uniform_int_distribution<int> dk(0, 2);
    std::normal_distribution<double> dn(0.0, 1.0);
    const double centres[3] = {0.9, 1.0, 1.1};
    std::vector<VSHTerm> terms;
    for (int i = 0; i < opt.terms; ++i) {
        VSHTerm t;
        t.index.a = da(gen);
        t.index.l = dl(gen);
        std::uniform_int_distribution<int> dm(-t.index.l, t.index.l);
        t.index.m = dm(gen);
        const double re = dn(gen);
        const double im = dn(gen);
        t.coeff = cplx(re, im);
        t.radial = GaussianShell{centres[dk(gen)], 0.15, 1.0}.normalized();
        terms.push_back(t);
    }
    return terms;
}

JetField random_field(std::uint64_t seed, const RandomFieldOptions& opt) {
    return vsh_expansion(random_vsh_terms(seed, opt));
}

void LGModeSpec::validate() const {
    if (!(w > 0.0)) throw std::invalid_argument("LGModeSpec: w must be positive");
    if (!(k > 0.0)) throw std::invalid_argument("LGModeSpec: k must be positive");
    if (p < 0) throw std::invalid_argument("LGModeSpec: p must be >= 0");
}

std::string to_string(LGVariant v) {
    switch (v) {
        case LGVariant::scalar: return "scalar";
        case LGVariant::vector_alpha: return "vector-alpha";
        case LGVariant::vector_beta: return "vector-beta";
    }
    return "scalar";
}

LGVariant lg_variant_from_string(const std::string& s) {
    if (s == "scalar") return LGVariant::scalar;
    if (s == "vector-alpha" || s == "alpha") return LGVariant::vector_alpha;
    if (s == "vector-beta" || s == "beta") return LGVariant::vector_beta;
    throw std::invalid_argument("unknown LG variant '" + s + "'");
}

namespace {
double factorial_ratio(int p, int am) {
    // p! / (p + am)!
    double r = 1.0;
    for (int j = p + 1; j <= p + am; ++j) r /= j;
    return r;
}
}  // namespace

cplx lg_k(const LGModeSpec& spec, double kx, double ky) {
    spec.validate();
    const int am = std::abs(spec.m);
    const double w = spec.w;
    const double rho2 = kx * kx + ky * ky;
    const double u = 0.5 * w * w * rho2;
    const cplx trans = ipow(cplx(kx, spec.m >= 0 ? ky : -ky), am);
    const cplx pre = (w / std::sqrt(2.0 * kPi)) * std::sqrt(factorial_ratio(spec.p, am)) *
                     ipow(kI * (w / std::sqrt(2.0)), am);
    return pre * trans * laguerre(spec.p, am, u) * std::exp(-0.5 * u);
}

double gouy_phase(const LGModeSpec& spec, double z) {
    return (2.0 * spec.p + std::abs(spec.m) + 1.0) * std::atan(z / spec.rayleigh_range());
}

cplx lg_x(const LGModeSpec& spec, double x, double y, double z) {
    spec.validate();
    const int am = std::abs(spec.m);
    const double zeta = z / spec.rayleigh_range();
    const double wz = spec.w * std::sqrt(1.0 + zeta * zeta);
    const double r2 = x * x + y * y;
    const double sign = ((spec.p + am) % 2 == 0) ? 1.0 : -1.0;
    const double amp = sign / wz * std::sqrt(2.0 / kPi * factorial_ratio(spec.p, am));
    // e^{i m phi} (sqrt2 r / w(z))^|m|
    const cplx trans = ipow(cplx(x, spec.m >= 0 ? y : -y) * (std::sqrt(2.0) / wz), am);
    const cplx gauss = std::exp(-r2 / (spec.w * spec.w * cplx(1.0, zeta)));
    return amp * std::polar(1.0, -gouy_phase(spec, z)) * trans * laguerre(spec.p, am, 2.0 * r2 / (wz * wz)) * gauss;
}

GridSpec vector_lg_grid(const LGModeSpec& spec, const VectorLGOptions& opt, int nk, int ntheta, int nphi) {
    const int n = std::max(std::abs(spec.m - 1), std::abs(spec.m + 1));
    const double umax = 45.0 + 6.0 * (spec.p + n);
    const double rho_max = std::sqrt(2.0 * umax) / spec.w;
    double theta_max = rho_max >= spec.k ? 0.5 * kPi : std::asin(rho_max / spec.k);
    theta_max = std::min(theta_max, 0.5 * kPi);
    GridSpec g;
    g.ntheta = ntheta;
    g.nphi = nphi;
    g.cos_lo = std::cos(theta_max);
    g.cos_hi = 1.0;
    if (opt.band > 0.0) {
        g.kind = "sphere";
        g.nk = nk;
        g.k_lo = std::max(0.0, spec.k * (1.0 - 7.0 * opt.band));
        g.k_hi = spec.k * (1.0 + 7.0 * opt.band);
    } else {
        g.kind = "shell";
        g.nk = 1;
        g.k_lo = g.k_hi = spec.k;
    }
    return g;
}

VectorLGMode vector_lg(const LGModeSpec& spec, const VectorLGOptions& opt) {
    spec.validate();
    if (spec.variant == LGVariant::scalar) throw std::invalid_argument("vector_lg: variant must be vector-alpha or vector-beta");
    if (opt.band < 0.0 || opt.band >= 1.0 / 7.0) throw std::invalid_argument("vector_lg: band must lie in [0, 1/7)");
    VectorLGMode mode;
    mode.spec = spec;
    mode.options = opt;
    mode.paraxial = spec.paraxial();
    const int nphi = 4 * (std::abs(spec.m) + 2) + 8;
    mode.natural_grid = vector_lg_grid(spec, opt, 48, 128, nphi);
    const GridPtr grid = make_grid(mode.natural_grid);

    VectorLGFunctor f{spec, opt.band * spec.k, 1.0, spec.variant == LGVariant::vector_alpha};
    const JetField raw1 = make_jet_field(f, "vector_lg_raw");
    const SampledVectorField s = sample_raw(raw1, grid);
    double n_raw = 0.0, n_long = 0.0, n_proj = 0.0, n_par = 0.0, n_perp = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const Vec3d& k = grid->point(i);
        const Vec3c& v = s.values[i];
        const double w = grid->weight(i);
        const double kn = norm(k);
        const Vec3c pv = project_transverse(k, v);
        n_raw += w * norm2(v);
        n_long += w * std::norm(dot(k, v) / kn);
        n_proj += w * norm2(pv);
        n_par += w * std::norm(pv[2]);
        n_perp += w * (std::norm(pv[0]) + std::norm(pv[1]));
    }
    if (!(n_proj > 0.0)) throw std::runtime_error("vector_lg: mode has zero norm on its grid");
    mode.transversality_residual = std::sqrt(n_long / n_raw);
    mode.longitudinal_fraction = std::sqrt(n_par / n_perp);
    mode.norm_constant = 1.0 / std::sqrt(n_proj);
    f.scale = mode.norm_constant;
    mode.raw = make_jet_field(f, "vector_lg_raw");
    mode.field = projected(mode.raw);
    return mode;
}

JetField j3_eigenfield(const J3EigenSpec& spec) {
    if (spec.poly_a.empty() && spec.poly_b.empty()) throw std::invalid_argument("j3_eigenfield: both profiles empty");
    spec.radial_a.validate();
    spec.radial_b.validate();
    return make_jet_field(J3Functor{spec}, "j3_eigenfield");
}

double j3_norm2(const J3EigenSpec& spec) {
    auto angular = [&](const std::vector<cplx>& poly, int n) {
        if (poly.empty()) return 0.0;
        const QuadRule q = gauss_legendre(static_cast<int>(poly.size()) + std::abs(n) + 4);
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double x = q.nodes[i];
            const double a = std::norm(horner(poly, cplx(x))) * std::pow(1.0 - x * x, std::abs(n)) * (1.0 + x) * (1.0 + x);
            s += q.weights[i] * a;
        }
        return s;
    };
    const double ra = spec.poly_a.empty() ? 0.0 : radial_overlap(spec.radial_a, spec.radial_a);
    const double rb = spec.poly_b.empty() ? 0.0 : radial_overlap(spec.radial_b, spec.radial_b);
    return 2.0 * kPi * (ra * angular(spec.poly_a, spec.m - 1) + rb * angular(spec.poly_b, spec.m + 1));
}

BasisMatrices basis_convert(int /*m*/, double theta) {
    if (!(theta >= 0.0 && theta < 0.5 * kPi))
        throw std::domain_error("basis_convert: theta must lie in [0, pi/2) where sec(theta) is finite");
    const double c = std::cos(theta);
    const double sec = 1.0 / c;
    const double s2 = 1.0 / std::sqrt(2.0);
    BasisMatrices b;
    b.forward = {{{s2 * (1.0 + c), -kI * (s2 * (1.0 - c))}, {kI * (s2 * (1.0 - c)), s2 * (1.0 + c)}}};
    const double f = 1.0 / (2.0 * std::sqrt(2.0));
    b.inverse = {{{f * (1.0 + sec), kI * (f * (sec - 1.0))}, {-kI * (f * (sec - 1.0)), f * (1.0 + sec)}}};
    return b;
}

Vec3c alpha_structure(int m, double theta, double phi) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx e = std::polar(1.0, (m - 1) * phi);
    return {e * c, e * kI * c, -e * s * std::polar(1.0, phi)};
}

Vec3c beta_structure(int m, double theta, double phi) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx e = std::polar(1.0, (m + 1) * phi);
    return {e * kI * c, e * c, -e * kI * s * std::polar(1.0, -phi)};
}

}  // namespace lightam
