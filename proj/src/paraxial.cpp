#include "lightam/paraxial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lightam/fft.hpp"
#include "lightam/parallel.hpp"
#include "lightam/quadrature.hpp"

namespace lightam {

ParaxialityReport paraxiality_report(const TransverseAmplitude& v, double theta_cut, double k_min, double eps_par) {
    if (!(theta_cut >= 0.0 && theta_cut <= kPi)) throw std::invalid_argument("paraxiality_report: theta_cut outside [0, pi]");
    if (!(eps_par > 0.0)) throw std::invalid_argument("paraxiality_report: eps_par must be positive");
    if (k_min < 0.0) throw std::invalid_argument("paraxiality_report: k_min must be non-negative");
    const KGrid& g = v.grid();
    struct Acc4 {
        std::array<double, 4> a{};
        Acc4 operator+(const Acc4& o) const { return {{a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]}}; }
    };
    const double cut = std::cos(theta_cut);
    const Acc4 t = parallel_sum<Acc4>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        const double d = g.weight(i) * norm2(v[i]);
        const double kn = norm(k);
        Acc4 r;
        r.a[0] = d;
        r.a[1] = k[2] / kn < cut ? d : 0.0;
        r.a[2] = k[2] < 0.0 ? d : 0.0;
        r.a[3] = kn < k_min ? d : 0.0;
        return r;
    });
    ParaxialityReport rep;
    rep.theta_cut = theta_cut;
    rep.k_min = k_min;
    rep.eps_par = eps_par;
    if (t.a[0] > 0.0) {
        rep.norm_fraction_outside = t.a[1] / t.a[0];
        rep.backward_norm_fraction = t.a[2] / t.a[0];
        rep.below_k_min_fraction = t.a[3] / t.a[0];
    }
    rep.paraxial = rep.norm_fraction_outside <= eps_par && rep.below_k_min_fraction <= eps_par;
    return rep;
}

double TransverseScalarField::norm2() const {
    double s = 0.0;
    for (const cplx& c : data) s += std::norm(c);
    return s * dx * dy;
}

void TransverseScalarField::validate() const {
    if (nx < 2 || ny < 2 || nx % 2 || ny % 2) throw std::invalid_argument("transverse field: sides must be even");
    if (!(dx > 0.0 && dy > 0.0)) throw std::invalid_argument("transverse field: spacing must be positive");
    if (!(k > 0.0)) throw std::invalid_argument("transverse field: carrier k must be positive");
    if (data.size() != static_cast<std::size_t>(nx) * ny) throw std::invalid_argument("transverse field: sample count mismatch");
}

TransverseScalarField sample_lg(const LGModeSpec& spec, int n, double length, double z) {
    TransverseScalarField f;
    f.nx = f.ny = n;
    f.dx = f.dy = length / n;
    f.k = spec.k;
    f.z = z;
    f.data.resize(static_cast<std::size_t>(n) * n);
    f.validate();
    parallel_for(f.data.size(), [&](std::size_t i) {
        const int ix = static_cast<int>(i % n), iy = static_cast<int>(i / n);
        f.data[i] = lg_x(spec, f.x(ix), f.y(iy), z);
    });
    return f;
}

TransverseScalarField pwe_propagate(const TransverseScalarField& psi, double z, double alias_tol) {
    psi.validate();
    const int nx = psi.nx, ny = psi.ny;
    const std::size_t M = psi.data.size();
    const FFTPlan fwd({ny, nx}, -1), bwd({ny, nx}, +1);
    std::vector<cplx> hat(M);
    fwd.execute(psi.data.data(), hat.data());
    const double dkx = 2.0 * kPi / (nx * psi.dx), dky = 2.0 * kPi / (ny * psi.dy);
    double tot = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const int fx = fft_freq(static_cast<int>(i % nx), nx), fy = fft_freq(static_cast<int>(i / nx), ny);
        const double d = std::norm(hat[i]);
        tot += d;
        if (std::abs(fx) > 0.4 * nx || std::abs(fy) > 0.4 * ny) edge += d;
        const double kx = fx * dkx, ky = fy * dky;
        hat[i] *= std::polar(1.0 / static_cast<double>(M), -(kx * kx + ky * ky) * z / (2.0 * psi.k));
    }
    if (tot > 0.0 && edge / tot > alias_tol) {
        std::ostringstream os;
        os << "pwe_propagate: spectral mass near the grid Nyquist frequency (" << edge / tot << " > " << alias_tol
           << "); refine the grid";
        throw AliasingError(os.str(), edge / tot);
    }
    TransverseScalarField out = psi;
    out.z = psi.z + z;
    bwd.execute(hat.data(), out.data.data());
    return out;
}

cplx overlap(const TransverseScalarField& a, const TransverseScalarField& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.dx != b.dx || a.dy != b.dy)
        throw std::invalid_argument("overlap: grids differ");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += std::conj(a.data[i]) * b.data[i];
    return s * a.dx * a.dy;
}

double second_moment(const TransverseScalarField& psi) {
    double num = 0.0, den = 0.0;
    for (int iy = 0; iy < psi.ny; ++iy)
        for (int ix = 0; ix < psi.nx; ++ix) {
            const double d = std::norm(psi.at(ix, iy));
            const double x = psi.x(ix), y = psi.y(iy);
            num += (x * x + y * y) * d;
            den += d;
        }
    if (!(den > 0.0)) throw std::domain_error("second_moment: zero field");
    return num / den;
}

double measured_gouy(const LGModeSpec& spec, const TransverseScalarField& psi) {
    TransverseScalarField ref = psi;
    const cplx undo = std::polar(1.0, gouy_phase(spec, psi.z));
    for (int iy = 0; iy < psi.ny; ++iy)
        for (int ix = 0; ix < psi.nx; ++ix) ref.at(ix, iy) = undo * lg_x(spec, psi.x(ix), psi.y(iy), psi.z);
    return -std::arg(overlap(ref, psi));
}

SampledSpaceField paraxial_A(const JetField& v, const GridPtr& grid, const PlanarGrid& plane,
                             const std::vector<double>& z, const ParaxialAOptions& opt) {
    if (!(opt.k_min > 0.0)) throw std::invalid_argument("paraxial_A: k_min must be configured and positive");
    if (grid->k(0) < opt.k_min) {
        std::ostringstream os;
        os << "paraxial_A: grid has radial nodes below k_min (" << grid->k(0) << " < " << opt.k_min << ")";
        throw std::invalid_argument(os.str());
    }
    const TransverseAmplitude s = sample(v, grid, 1e-6);
    const ParaxialityReport rep = paraxiality_report(s, opt.theta_cut, opt.k_min, opt.eps_par);
    if (!rep.paraxial && !opt.force) {
        std::ostringstream os;
        os << "paraxial_A: amplitude is not paraxial (fraction outside theta_cut " << rep.norm_fraction_outside
           << ", eps_par " << opt.eps_par << "); pass force to override";
        throw NonParaxialError(os.str());
    }
    SampledSpaceField f = planar_synthesis(v, *grid, plane, z, opt.t, true, opt.cfg);
    f.k_min = opt.k_min;
    return f;
}

TransversalityResult transversality_residual(const SampledSpaceField& A) {
    A.validate();
    if (A.dz.empty()) throw std::invalid_argument("transversality_residual: field carries no d/dz samples");
    const int nx = A.nx, ny = A.ny;
    const std::size_t M = A.plane();
    const FFTPlan fwd({ny, nx}, -1), bwd({ny, nx}, +1);
    const double dkx = 2.0 * kPi / (nx * A.dx), dky = 2.0 * kPi / (ny * A.dy);
    TransversalityResult r;
    double num_all = 0.0, den_all = 0.0;
    for (int iz = 0; iz < A.nz(); ++iz) {
        const std::size_t off = static_cast<std::size_t>(iz) * M;
        std::array<std::vector<cplx>, 3> hat;
        std::vector<cplx> tmp(M);
        for (int c = 0; c < 3; ++c) {
            hat[c].resize(M);
            for (std::size_t i = 0; i < M; ++i) tmp[i] = A.values[off + i][c];
            fwd.execute(tmp.data(), hat[c].data());
        }
        // Spectral sums via Parseval: ||f||^2 = sum |f_hat|^2 / M.
        double num = 0.0, den = 0.0;
        std::vector<cplx> dz3(M), dzh(M);
        std::array<std::vector<cplx>, 3> dzhat;
        for (int c = 0; c < 3; ++c) {
            dzhat[c].resize(M);
            for (std::size_t i = 0; i < M; ++i) tmp[i] = A.dz[off + i][c];
            fwd.execute(tmp.data(), dzhat[c].data());
        }
        for (std::size_t i = 0; i < M; ++i) {
            const int ix = static_cast<int>(i % nx), iy = static_cast<int>(i / nx);
            const double kx = ix == nx / 2 ? 0.0 : fft_freq(ix, nx) * dkx;
            const double ky = iy == ny / 2 ? 0.0 : fft_freq(iy, ny) * dky;
            const cplx div = kI * kx * hat[0][i] + kI * ky * hat[1][i] + dzhat[2][i];
            num += std::norm(div);
            for (int c = 0; c < 3; ++c)
                den += (kx * kx + ky * ky) * std::norm(hat[c][i]) + std::norm(dzhat[c][i]);
        }
        r.per_slice.push_back(den > 0.0 ? std::sqrt(num / den) : 0.0);
        num_all += num;
        den_all += den;
    }
    if (!(den_all > 0.0)) {
        r.zero_field = true;
        r.overall = 0.0;
        return r;
    }
    r.overall = std::sqrt(num_all / den_all);
    return r;
}

double pwe_fd_residual(const SampledSpaceField& A, double k) {
    A.validate();
    if (A.nz() != 3) throw std::invalid_argument("pwe_fd_residual: expects exactly three planes");
    const double h = A.z[1] - A.z[0];
    if (!(h > 0.0) || std::abs((A.z[2] - A.z[1]) - h) > 1e-12 * h)
        throw std::invalid_argument("pwe_fd_residual: planes must be equally spaced");
    const int nx = A.nx, ny = A.ny;
    double num = 0.0, den = 0.0;
    for (int iy = 1; iy + 1 < ny; ++iy)
        for (int ix = 1; ix + 1 < nx; ++ix) {
            const Vec3c& a = A.values[A.index(1, iy, ix)];
            const Vec3c lap = (1.0 / (A.dx * A.dx)) * (A.values[A.index(1, iy, ix + 1)] + A.values[A.index(1, iy, ix - 1)] - 2.0 * a) +
                              (1.0 / (A.dy * A.dy)) * (A.values[A.index(1, iy + 1, ix)] + A.values[A.index(1, iy - 1, ix)] - 2.0 * a);
            const Vec3c dzv = (1.0 / (2.0 * h)) * (A.values[A.index(2, iy, ix)] - A.values[A.index(0, iy, ix)]);
            const Vec3c res = kI * dzv + k * a + (0.5 / k) * lap;
            num += norm2(res);
            den += k * k * norm2(a);
        }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

int Poly2::degree() const {
    int d = -1;
    for (const auto& [ij, v] : c)
        if (v != cplx(0.0)) d = std::max(d, ij.first + ij.second);
    return d;
}

cplx Poly2::operator()(double kx, double ky) const {
    cplx s = 0.0;
    for (const auto& [ij, v] : c) s += v * std::pow(kx, ij.first) * std::pow(ky, ij.second);
    return s;
}

Poly2& Poly2::add(int i, int j, cplx v) {
    if (i < 0 || j < 0) throw std::invalid_argument("Poly2: negative exponent");
    c[{i, j}] += v;
    return *this;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
    Poly2 r = a;
    for (const auto& [ij, v] : b.c) r.add(ij.first, ij.second, v);
    return r;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
    Poly2 r;
    for (const auto& [i, u] : a.c)
        for (const auto& [j, v] : b.c) r.add(i.first + j.first, i.second + j.second, u * v);
    return r;
}

Poly2 operator*(cplx s, const Poly2& a) {
    Poly2 r;
    for (const auto& [ij, v] : a.c) r.add(ij.first, ij.second, s * v);
    return r;
}

Poly2 gaussian_longitudinal(const GaussianPoly& a, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("gaussian_longitudinal: k must be positive");
    Poly2 kx, ky, corr;
    kx.add(1, 0, 1.0);
    ky.add(0, 1, 1.0);
    corr.add(0, 0, 1.0).add(2, 0, 0.5 / (k * k)).add(0, 2, 0.5 / (k * k));
    const Poly2 kdota = kx * a.ax + ky * a.ay;
    Poly2 c = cplx(-1.0 / k) * (corr * kdota);
    for (auto it = c.c.begin(); it != c.c.end();) it = (it->second == cplx(0.0)) ? c.c.erase(it) : std::next(it);
    return c;
}

cplx exact_longitudinal(const GaussianPoly& a, double k, double kx, double ky) {
    const double rho2 = kx * kx + ky * ky;
    if (rho2 >= k * k) throw std::domain_error("exact_longitudinal: k_perp outside the shell");
    return -(kx * a.ax(kx, ky) + ky * a.ay(kx, ky)) / std::sqrt(k * k - rho2);
}

double pwe_identity_check(double kx, double ky, const LGModeSpec& base, int P, int M, const IdentityCheckOptions& opt) {
    if (P < 0 || M < 0) throw std::invalid_argument("pwe_identity_check: truncation orders must be non-negative");
    const double R = opt.radius > 0.0 ? opt.radius : 2.0 * base.w;
    const QuadRule rr = gauss_legendre(opt.radial_nodes, 0.0, R);
    const int na = opt.angular_nodes;
    // Mode coefficients 2 pi conj(phi_mp(k)).
    std::vector<std::pair<LGModeSpec, cplx>> modes;
    for (int m = -M; m <= M; ++m)
        for (int p = 0; p <= P; ++p) {
            LGModeSpec s = base;
            s.m = m;
            s.p = p;
            s.variant = LGVariant::scalar;
            modes.emplace_back(s, 2.0 * kPi * std::conj(lg_k(s, kx, ky)));
        }
    struct Acc2 {
        double num = 0.0, den = 0.0;
        Acc2 operator+(const Acc2& o) const { return {num + o.num, den + o.den}; }
    };
    const std::size_t npts = rr.size() * static_cast<std::size_t>(na);
    const Acc2 t = parallel_sum<Acc2>(npts, [&](std::size_t i) {
        const std::size_t ir = i / na;
        const int ia = static_cast<int>(i % na);
        const double r = rr.nodes[ir], ph = 2.0 * kPi * ia / na;
        const double x = r * std::cos(ph), y = r * std::sin(ph);
        const double w = rr.weights[ir] * r * (2.0 * kPi / na);
        const cplx exact = std::polar(1.0, kx * x + ky * y - (kx * kx + ky * ky) * opt.z / (2.0 * base.k));
        cplx sum = 0.0;
        for (const auto& [s, coef] : modes) sum += coef * lg_x(s, x, y, opt.z);
        return Acc2{w * std::norm(exact - sum), w * std::norm(exact)};
    });
    return std::sqrt(t.num / t.den);
}

}  // namespace lightam
