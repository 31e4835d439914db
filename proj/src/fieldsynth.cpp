#include "lightam/fieldsynth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lightam/fft.hpp"
#include "lightam/parallel.hpp"

namespace lightam {

void SampledSpaceField::validate() const {
    if (nx < 1 || ny < 1 || z.empty()) throw std::invalid_argument("space field: empty grid");
    if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("space field: non-positive spacing");
    if (values.size() != plane() * z.size()) throw std::invalid_argument("space field: sample count mismatch");
    if (!dz.empty() && dz.size() != values.size()) throw std::invalid_argument("space field: dz sample count mismatch");
}

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::A: return "A";
        case Quantity::E: return "E";
        case Quantity::B: return "B";
    }
    return "?";
}

Quantity quantity_from_string(const std::string& s) {
    if (s == "A") return Quantity::A;
    if (s == "E") return Quantity::E;
    if (s == "B") return Quantity::B;
    throw std::invalid_argument("unknown field quantity '" + s + "' (expected A, E or B)");
}

void BoxSpec::validate() const {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("box: n must be even and at least 4");
    if (!(length > 0.0)) throw std::invalid_argument("box: length must be positive");
}

void PlanarGrid::validate() const {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("planar grid: n must be even and at least 4");
    if (!(length > 0.0)) throw std::invalid_argument("planar grid: length must be positive");
}

namespace {

// Per-component inverse transform of FFT-ordered coefficients into x order.
void components_backward(const FFTPlan& plan, const std::vector<Vec3c>& coef, std::vector<Vec3c>& out,
                         std::size_t offset = 0) {
    const std::size_t n = plan.size();
    std::vector<cplx> a(n), b(n);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i) a[i] = coef[i][c];
        plan.execute(a.data(), b.data());
        for (std::size_t i = 0; i < n; ++i) out[offset + i][c] = b[i];
    }
}

void components_forward(const FFTPlan& plan, const std::vector<Vec3c>& in, std::vector<Vec3c>& out) {
    const std::size_t n = plan.size();
    std::vector<cplx> a(n), b(n);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i) a[i] = in[i][c];
        plan.execute(a.data(), b.data());
        for (std::size_t i = 0; i < n; ++i) out[i][c] = b[i];
    }
}

struct BoxGeometry {
    int n;
    double dk, dx;
    [[nodiscard]] Vec3d k(std::size_t i) const {
        const int ix = static_cast<int>(i % n), iy = static_cast<int>((i / n) % n), iz = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
        return {fft_freq(ix, n) * dk, fft_freq(iy, n) * dk, fft_freq(iz, n) * dk};
    }
    [[nodiscard]] Vec3d x(std::size_t i) const {
        const int ix = static_cast<int>(i % n), iy = static_cast<int>((i / n) % n), iz = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
        return {(ix - n / 2) * dx, (iy - n / 2) * dx, (iz - n / 2) * dx};
    }
    [[nodiscard]] int nyquist_axes(std::size_t i) const {
        const int ix = static_cast<int>(i % n), iy = static_cast<int>((i / n) % n), iz = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
        return (ix == n / 2) + (iy == n / 2) + (iz == n / 2);
    }
};

BoxGeometry box_of(const SampledSpaceField& f) {
    if (f.nx != f.ny || f.nx != f.nz() || f.nx % 2 != 0)
        throw std::invalid_argument("space field: expected a cubic box with an even side count");
    for (int i = 1; i < f.nz(); ++i)
        if (std::abs((f.z[i] - f.z[i - 1]) - f.dx) > 1e-9 * f.dx)
            throw std::invalid_argument("space field: planes are not uniformly spaced at dx");
    return {f.nx, 2.0 * kPi / (f.nx * f.dx), f.dx};
}

// Spectral derivative d/dx_j of every component.
std::vector<Vec3c> spectral_derivative(const SampledSpaceField& f, const BoxGeometry& g, const FFTPlan& fwd,
                                       const FFTPlan& bwd, int j) {
    const std::size_t N = f.values.size();
    std::vector<Vec3c> hat(N), out(N);
    components_forward(fwd, f.values, hat);
    const double inv = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Vec3d k = g.k(i);
        const int idx = j == 0 ? static_cast<int>(i % g.n) : j == 1 ? static_cast<int>((i / g.n) % g.n)
                                                                    : static_cast<int>(i / (static_cast<std::size_t>(g.n) * g.n));
        const cplx m = idx == g.n / 2 ? cplx(0.0) : cplx(0.0, k[j] * inv);
        hat[i] = m * hat[i];
    }
    components_backward(bwd, hat, out);
    return out;
}

}  // namespace

SampledSpaceField synthesize(const JetField& v, const BoxSpec& box, Quantity which, const SynthesisOptions& opt) {
    box.validate();
    opt.cfg.validate();
    if (!v.valid()) throw std::invalid_argument("synthesize: empty field");
    const int n = box.n;
    const BoxGeometry g{n, box.dk(), box.dx()};
    const std::size_t N = static_cast<std::size_t>(n) * n * n;
    const double c = opt.cfg.c;
    const double dk3 = g.dk * g.dk * g.dk;

    std::vector<Vec3c> coef(N);
    std::vector<double> dens(N, 0.0);
    std::vector<char> edge(N, 0);
    parallel_for(N, [&](std::size_t i) {
        const Vec3d k = g.k(i);
        const double kn = norm(k);
        if (kn == 0.0) return;
        const Vec3c vk = v.value(k);
        dens[i] = norm2(vk);
        const double kmax = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
        edge[i] = kmax > 0.8 * box.k_nyquist();
        const double w = c * kn;
        const cplx phase = std::polar(1.0, -w * opt.t);
        const Vec3c a = ((c / (2.0 * kPi)) * dk3 / std::sqrt(w) * phase) * vk;
        Vec3c out;
        switch (which) {
            case Quantity::A: out = a; break;
            case Quantity::E: out = ((kI / (2.0 * kPi)) * dk3 * std::sqrt(w) * phase) * vk; break;
            case Quantity::B: out = kI * cross(to_complex(k), a); break;
        }
        const int ix = static_cast<int>(i % n), iy = static_cast<int>((i / n) % n), iz = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
        const int parity = (fft_freq(ix, n) + fft_freq(iy, n) + fft_freq(iz, n)) & 1;
        coef[i] = parity ? -1.0 * out : out;
    });
    double tot = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        tot += dens[i];
        if (edge[i]) tail += dens[i];
    }
    if (tot > 0.0 && tail / tot > opt.tail_tol) {
        std::ostringstream os;
        os << "synthesize: amplitude not resolved by the box lattice (spectral edge fraction " << tail / tot
           << " > " << opt.tail_tol << "); reduce the box spacing";
        throw BoxTooSmall(os.str(), tail / tot);
    }

    SampledSpaceField f;
    f.quantity = to_string(which);
    f.provenance = "exact";
    f.nx = f.ny = n;
    f.dx = f.dy = g.dx;
    f.z.resize(n);
    for (int i = 0; i < n; ++i) f.z[i] = (i - n / 2) * g.dx;
    f.t = opt.t;
    f.cfg = opt.cfg;
    f.values.resize(N);
    const FFTPlan bwd({n, n, n}, +1);
    components_backward(bwd, coef, f.values);

    const double frac = tail_fraction(f);
    if (frac > opt.tail_tol) {
        std::ostringstream os;
        os << "synthesize: box too small, tail fraction " << frac << " > " << opt.tail_tol;
        throw BoxTooSmall(os.str(), frac);
    }
    return f;
}

double tail_fraction(const SampledSpaceField& f, double inner) {
    f.validate();
    const double hx = 0.5 * inner * f.nx * f.dx, hy = 0.5 * inner * f.ny * f.dy;
    const double z0 = f.z.front(), z1 = f.z.back();
    const double zc = 0.5 * (z0 + z1), hz = 0.5 * inner * (z1 - z0 + f.dx);
    double tot = 0.0, out = 0.0;
    for (int iz = 0; iz < f.nz(); ++iz)
        for (int iy = 0; iy < f.ny; ++iy)
            for (int ix = 0; ix < f.nx; ++ix) {
                const double d = norm2(f.values[f.index(iz, iy, ix)]);
                tot += d;
                const bool in = std::abs(f.x(ix)) <= hx && std::abs(f.y(iy)) <= hy &&
                                (f.nz() == 1 || std::abs(f.z[iz] - zc) <= hz);
                if (!in) out += d;
            }
    return tot > 0.0 ? out / tot : 0.0;
}

double xspace_norm(const SampledSpaceField& A) {
    if (A.quantity != "A") throw std::invalid_argument("xspace_norm: expects an A+ field");
    const BoxGeometry g = box_of(A);
    const std::size_t N = A.values.size();
    const FFTPlan fwd({g.n, g.n, g.n}, -1), bwd({g.n, g.n, g.n}, +1);
    std::vector<Vec3c> hat(N), wa(N);
    components_forward(fwd, A.values, hat);
    for (std::size_t i = 0; i < N; ++i) hat[i] = (A.cfg.c * norm(g.k(i)) / static_cast<double>(N)) * hat[i];
    components_backward(bwd, hat, wa);
    const double dx3 = g.dx * g.dx * g.dx;
    const cplx s = parallel_sum<cplx>(N, [&](std::size_t i) { return cdot(A.values[i], wa[i]); });
    return s.real() * dx3 / (2.0 * kPi * A.cfg.c * A.cfg.c);
}

ObservableSet xspace_com(const SampledSpaceField& E, const SampledSpaceField& A) {
    if (E.quantity != "E" || A.quantity != "A") throw std::invalid_argument("xspace_com: expects (E+, A+)");
    const BoxGeometry g = box_of(A);
    if (E.nx != A.nx || E.dx != A.dx || E.t != A.t) throw std::invalid_argument("xspace_com: E+ and A+ grids differ");
    const std::size_t N = A.values.size();
    const FFTPlan fwd({g.n, g.n, g.n}, -1), bwd({g.n, g.n, g.n}, +1);
    std::array<std::vector<Vec3c>, 3> dA;
    for (int j = 0; j < 3; ++j) dA[j] = spectral_derivative(A, g, fwd, bwd, j);
    const double c = A.cfg.c;

    struct Acc {
        std::array<cplx, 13> a{};
        Acc operator+(const Acc& o) const {
            Acc r;
            for (int i = 0; i < 13; ++i) r.a[i] = a[i] + o.a[i];
            return r;
        }
    };
    const Acc t = parallel_sum<Acc>(N, [&](std::size_t i) {
        Acc r;
        const Vec3c& e = E.values[i];
        const Vec3d x = g.x(i);
        const double e2 = norm2(e);
        r.a[0] = e2;
        for (int j = 0; j < 3; ++j) {
            const Vec3c dj{dA[j][i][0], dA[j][i][1], dA[j][i][2]};
            r.a[1 + j] = cdot(e, dj);
            r.a[10 + j] = x[j] * e2;
        }
        // (x ^ grad)_j A_m
        for (int j = 0; j < 3; ++j) {
            const int a = (j + 1) % 3, b = (j + 2) % 3;
            Vec3c lv;
            for (int m = 0; m < 3; ++m) lv[m] = x[a] * dA[b][i][m] - x[b] * dA[a][i][m];
            r.a[4 + j] = cdot(e, lv);
        }
        const Vec3c ea = cross(conj(e), A.values[i]);
        for (int j = 0; j < 3; ++j) r.a[7 + j] = ea[j];
        return r;
    });
    const double dx3 = g.dx * g.dx * g.dx;
    ObservableSet o;
    o.t = A.t;
    o.norm2 = xspace_norm(A);
    o.P0 = t.a[0].real() * dx3 / (2.0 * kPi);
    const double s = dx3 / (2.0 * kPi * c);
    double imag = std::abs(t.a[0].imag());
    for (int j = 0; j < 3; ++j) {
        o.P[j] = t.a[1 + j].real() * s;
        o.L[j] = t.a[4 + j].real() * s;
        o.S[j] = t.a[7 + j].real() * s;
        o.J[j] = o.L[j] + o.S[j];
        o.K[j] = t.a[10 + j].real() * s;
        for (int q : {1 + j, 4 + j, 7 + j}) imag = std::max(imag, std::abs(t.a[q].imag()) * s);
    }
    o.max_imag_ratio = o.P0 > 0.0 ? imag / o.P0 : 0.0;
    return o;
}

double spectral_divergence(const SampledSpaceField& A) {
    const BoxGeometry g = box_of(A);
    const std::size_t N = A.values.size();
    const FFTPlan fwd({g.n, g.n, g.n}, -1), bwd({g.n, g.n, g.n}, +1);
    double num = 0.0, den = 0.0;
    std::array<std::vector<Vec3c>, 3> dA;
    for (int j = 0; j < 3; ++j) dA[j] = spectral_derivative(A, g, fwd, bwd, j);
    for (std::size_t i = 0; i < N; ++i) {
        num += std::norm(dA[0][i][0] + dA[1][i][1] + dA[2][i][2]);
        for (int j = 0; j < 3; ++j) den += norm2(dA[j][i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double spectral_e_from_a(const SampledSpaceField& E, const SampledSpaceField& A) {
    const BoxGeometry g = box_of(A);
    const std::size_t N = A.values.size();
    const FFTPlan fwd({g.n, g.n, g.n}, -1), bwd({g.n, g.n, g.n}, +1);
    std::vector<Vec3c> hat(N), wa(N);
    components_forward(fwd, A.values, hat);
    for (std::size_t i = 0; i < N; ++i) hat[i] = (kI * norm(g.k(i)) / static_cast<double>(N)) * hat[i];
    components_backward(bwd, hat, wa);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        num += norm2(E.values[i] - wa[i]);
        den += norm2(E.values[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

SampledSpaceField planar_synthesis(const JetField& v, const KGrid& grid, const PlanarGrid& plane,
                                   const std::vector<double>& z, double t, bool paraxial, const PhysConfig& cfg) {
    plane.validate();
    cfg.validate();
    if (z.empty()) throw std::invalid_argument("planar_synthesis: no planes requested");
    const int n = plane.n;
    const std::size_t M = static_cast<std::size_t>(n) * n;
    const double dk = plane.dk(), c = cfg.c;
    const int nk = grid.nk();

    // Shell coefficients over k_perp, FFT order, with the x-origin shift folded in.
    std::vector<std::vector<Vec3c>> shell(static_cast<std::size_t>(nk), std::vector<Vec3c>(M));
    std::vector<double> kz(M * nk, -1.0);
#pragma omp parallel for collapse(2) schedule(static)
    for (int s = 0; s < nk; ++s)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(M); ++i) {
            const int fx = fft_freq(static_cast<int>(i % n), n), fy = fft_freq(static_cast<int>(i / n), n);
            const double kx = fx * dk, ky = fy * dk;
            const double ks = grid.k(s);
            const double rho2 = kx * kx + ky * ky;
            if (rho2 >= ks * ks) continue;
            const double k3 = std::sqrt(ks * ks - rho2);
            const Vec3c val = v.value({kx, ky, k3});
            const double w = c * ks;
            const double jac = ks / k3 * grid.radial().weights[s];
            const cplx pre = (c / (2.0 * kPi)) * jac * dk * dk / std::sqrt(w) * std::polar(1.0, -w * t) *
                             (((fx + fy) & 1) ? -1.0 : 1.0);
            shell[s][i] = pre * val;
            kz[static_cast<std::size_t>(s) * M + i] = k3;
        }

    SampledSpaceField f;
    f.quantity = "A";
    f.provenance = paraxial ? "paraxial" : "exact-planar";
    f.nx = f.ny = n;
    f.dx = f.dy = plane.dx();
    f.z = z;
    f.t = t;
    f.cfg = cfg;
    f.k_min = grid.k(0);
    f.values.resize(M * z.size());
    f.dz.resize(M * z.size());
    const FFTPlan bwd({n, n}, +1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t iz = 0; iz < static_cast<std::ptrdiff_t>(z.size()); ++iz) {
        std::vector<Vec3c> acc(M), dacc(M);
        const double zz = z[iz];
        for (int s = 0; s < nk; ++s) {
            const double ks = grid.k(s);
            for (std::size_t i = 0; i < M; ++i) {
                const double k3 = kz[static_cast<std::size_t>(s) * M + i];
                if (k3 < 0.0) continue;
                double kzeff;
                if (paraxial) {
                    const double rho2 = ks * ks - k3 * k3;
                    kzeff = ks - rho2 / (2.0 * ks);
                } else {
                    kzeff = k3;
                }
                const cplx ph = std::polar(1.0, kzeff * zz);
                acc[i] += ph * shell[s][i];
                dacc[i] += (kI * kzeff * ph) * shell[s][i];
            }
        }
        components_backward(bwd, acc, f.values, static_cast<std::size_t>(iz) * M);
        components_backward(bwd, dacc, f.dz, static_cast<std::size_t>(iz) * M);
    }
    return f;
}

namespace {
Vec3c point_kernel(const TransverseAmplitude& v, const Vec3d& x, double t, Quantity which, const PhysConfig& cfg,
                   std::size_t i) {
    const KGrid& g = v.grid();
    const Vec3d& k = g.point(i);
    const double w = cfg.c * norm(k);
    const cplx ph = std::polar(g.weight(i), dot(k, x) - w * t);
    switch (which) {
        case Quantity::A: return (ph * cfg.c / (2.0 * kPi) / std::sqrt(w)) * v[i];
        case Quantity::E: return (ph * kI / (2.0 * kPi) * std::sqrt(w)) * v[i];
        case Quantity::B: return (ph * kI * cfg.c / (2.0 * kPi) / std::sqrt(w)) * cross(to_complex(k), v[i]);
    }
    return {};
}
}  // namespace

std::vector<Vec3c> synthesize_points(const TransverseAmplitude& v, const std::vector<Vec3d>& x, double t,
                                     Quantity which, const PhysConfig& cfg) {
    cfg.validate();
    std::vector<Vec3c> out(x.size());
    for (std::size_t p = 0; p < x.size(); ++p)
        out[p] = parallel_sum<Vec3c>(v.size(), [&](std::size_t i) { return point_kernel(v, x[p], t, which, cfg, i); });
    return out;
}

namespace reference {
std::vector<Vec3c> synthesize_points_serial(const TransverseAmplitude& v, const std::vector<Vec3d>& x, double t,
                                            Quantity which, const PhysConfig& cfg) {
    cfg.validate();
    std::vector<Vec3c> out(x.size());
    for (std::size_t p = 0; p < x.size(); ++p)
        for (std::size_t i = 0; i < v.size(); ++i) out[p] += point_kernel(v, x[p], t, which, cfg, i);
    return out;
}
}  // namespace reference

}  // namespace lightam
