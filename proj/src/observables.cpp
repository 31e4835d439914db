#include "lightam/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lightam/harmonics.hpp"
#include "lightam/parallel.hpp"
#include "lightam/polarization.hpp"
#include "lightam/quadrature.hpp"

namespace lightam {

std::string to_string(Normalization n) { return n == Normalization::classical ? "classical" : "per-photon"; }

Observable observable_from_string(const std::string& s) {
    if (s == "P0") return Observable::P0;
    if (s == "P") return Observable::P;
    if (s == "J") return Observable::J;
    if (s == "L") return Observable::L;
    if (s == "S") return Observable::S;
    if (s == "K") return Observable::K;
    throw std::invalid_argument("unknown observable '" + s + "'");
}

namespace {

constexpr int kForms = 17;

struct Totals {
    std::array<cplx, kForms> a{};
    Totals operator+(const Totals& o) const {
        Totals r;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
};

// All quadratic forms at one node, index layout:
// 0 norm2, 1 P0, 2-4 P, 5-7 J, 8-10 L, 11-13 S, 14-16 K(0)
Totals node_forms(const Vec3d& k, const FieldJet1& j, double w, const PhysConfig& cfg, bool derivs) {
    Totals r;
    const double n2 = norm2(j.v);
    const double kn = norm(k);
    r.a[0] = w * n2;
    r.a[1] = w * cfg.c * kn * n2;
    for (int c = 0; c < 3; ++c) {
        r.a[2 + c] = w * k[c] * n2;
        r.a[11 + c] = w * cdot(j.v, apply_value(OperatorTag::S(c), k, FieldJet1{j.v, {}}, cfg)) / cfg.hbar;
        if (!derivs) continue;
        r.a[5 + c] = w * cdot(j.v, apply_value(OperatorTag::J(c), k, j, cfg)) / cfg.hbar;
        r.a[8 + c] = w * cdot(j.v, apply_value(OperatorTag::L(c), k, j, cfg)) / cfg.hbar;
        r.a[14 + c] = w * cdot(j.v, apply_value(OperatorTag::K(c), k, j, cfg)) / cfg.hbar;
    }
    return r;
}

ObservableSet finish(const Totals& t, const ComOptions& opt) {
    ObservableSet o;
    o.t = opt.t;
    o.norm2 = t.a[0].real();
    o.P0 = t.a[1].real();
    double scale = std::abs(t.a[1]);
    for (int c = 0; c < 3; ++c) {
        o.P[c] = t.a[2 + c].real();
        o.J[c] = t.a[5 + c].real();
        o.L[c] = t.a[8 + c].real();
        o.S[c] = t.a[11 + c].real();
        o.K[c] = t.a[14 + c].real() + opt.cfg.c * opt.t * o.P[c];
    }
    scale = std::max(scale, o.norm2);
    for (std::size_t i = 0; i < t.a.size(); ++i)
        if (scale > 0.0) o.max_imag_ratio = std::max(o.max_imag_ratio, std::abs(t.a[i].imag()) / scale);
    for (double x : {o.P0, o.norm2})
        if (!std::isfinite(x)) throw std::runtime_error("classical_com: non-finite integrand");
    for (const Vec3d* v : {&o.P, &o.J, &o.L, &o.S, &o.K})
        for (double x : *v)
            if (!std::isfinite(x)) throw std::runtime_error("classical_com: non-finite integrand");
    return o;
}

Vec3d absdiff(const Vec3d& a, const Vec3d& b) {
    return {std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])};
}

void attach_errors(ObservableSet& full, const ObservableSet& coarse) {
    full.err_norm2 = std::abs(full.norm2 - coarse.norm2);
    full.err_P0 = std::abs(full.P0 - coarse.P0);
    full.err_P = absdiff(full.P, coarse.P);
    full.err_J = absdiff(full.J, coarse.J);
    full.err_L = absdiff(full.L, coarse.L);
    full.err_S = absdiff(full.S, coarse.S);
    full.err_K = absdiff(full.K, coarse.K);
}

Totals integrate_jet(const JetField& v, const KGrid& g, const PhysConfig& cfg) {
    const bool derivs = v.order() >= 1;
    return parallel_sum<Totals>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        if (derivs) {
            const FieldJet j = v.jet(k);
            return node_forms(k, FieldJet1{j.v, j.d1}, g.weight(i), cfg, true);
        }
        return node_forms(k, FieldJet1{v.value(k), {}}, g.weight(i), cfg, false);
    });
}

GridSpec halved(const GridSpec& s) {
    GridSpec h = s;
    if (h.kind != "shell") h.nk = std::max(1, s.nk / 2);
    h.ntheta = std::max(1, s.ntheta / 2);
    h.nphi = std::max(1, s.nphi / 2);
    return h;
}

}  // namespace

ObservableSet classical_com(const JetField& v, const GridPtr& grid, const ComOptions& opt) {
    opt.cfg.validate();
    if (!v.valid()) throw std::invalid_argument("classical_com: empty field");
    if (v.order() < 1) throw std::invalid_argument("classical_com: field provides no derivatives for J, L, K");
    ObservableSet out = finish(integrate_jet(v, *grid, opt.cfg), opt);
    if (opt.estimate_error) {
        const KGrid coarse(halved(grid->spec()));
        attach_errors(out, finish(integrate_jet(v, coarse, opt.cfg), opt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Derivatives of sampled fields

namespace {

// Fourier derivative in phi of one ring of nphi samples.
void phi_derivative(const cplx* f, cplx* df, int n) {
    // Direct DFT; rings are short.
    std::vector<cplx> c(n);
    for (int q = 0; q < n; ++q) {
        cplx s = 0.0;
        for (int p = 0; p < n; ++p) s += f[p] * std::polar(1.0, -2.0 * kPi * q * p / n);
        c[q] = s / static_cast<double>(n);
    }
    for (int p = 0; p < n; ++p) {
        cplx s = 0.0;
        for (int q = 0; q < n; ++q) {
            int m = q <= n / 2 ? q : q - n;
            if (n % 2 == 0 && q == n / 2) m = 0;
            s += c[q] * cplx(0.0, m) * std::polar(1.0, 2.0 * kPi * m * p / n);
        }
        df[p] = s;
    }
}

// Angular part (k ^ grad) f on one shell from a spherical-harmonic expansion.
// Returns false when the samples are not resolved by the expansion.
bool shell_orbital_sh(const KGrid& g, int ik, const std::vector<Vec3c>& vals, int lmax,
                      const std::vector<std::vector<cplx>>& Y, std::vector<std::array<Vec3c, 3>>& kgrad) {
    const std::size_t shell = static_cast<std::size_t>(g.ntheta()) * g.nphi();
    const std::size_t nlm = static_cast<std::size_t>((lmax + 1) * (lmax + 1));
    std::array<std::vector<cplx>, 3> coef;
    for (auto& c : coef) c.assign(nlm, 0.0);
    for (std::size_t s = 0; s < shell; ++s) {
        int jk, it, ip;
        g.unravel(s, jk, it, ip);
        const double w = g.polar().weights[it] * g.dphi();
        const Vec3c& f = vals[static_cast<std::size_t>(ik) * shell + s];
        for (std::size_t q = 0; q < nlm; ++q) {
            const cplx yc = std::conj(Y[s][q]) * w;
            for (int a = 0; a < 3; ++a) coef[a][q] += yc * f[a];
        }
    }
    // (k ^ grad)_j = i L_j with L+- ladders on Y_lm.
    std::array<std::array<std::vector<cplx>, 3>, 3> d;  // d[j][a]
    for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a) d[j][a].assign(nlm, 0.0);
    for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m) {
            const std::size_t q = ylm_index(l, m);
            for (int a = 0; a < 3; ++a) {
                const cplx lp = (m > -l) ? std::sqrt(static_cast<double>((l - m + 1) * (l + m))) * coef[a][ylm_index(l, m - 1)] : 0.0;
                const cplx lm = (m < l) ? std::sqrt(static_cast<double>((l + m + 1) * (l - m))) * coef[a][ylm_index(l, m + 1)] : 0.0;
                const cplx Lx = 0.5 * (lp + lm);
                const cplx Ly = cplx(0.0, -0.5) * (lp - lm);
                const cplx Lz = static_cast<double>(m) * coef[a][q];
                d[0][a][q] = kI * Lx;
                d[1][a][q] = kI * Ly;
                d[2][a][q] = kI * Lz;
            }
        }
    double worst = 0.0, scale = 0.0;
    for (std::size_t s = 0; s < shell; ++s) {
        const std::size_t i = static_cast<std::size_t>(ik) * shell + s;
        Vec3c back{};
        for (std::size_t q = 0; q < nlm; ++q)
            for (int a = 0; a < 3; ++a) back[a] += coef[a][q] * Y[s][q];
        worst = std::max(worst, std::sqrt(norm2(back - vals[i])));
        scale = std::max(scale, std::sqrt(norm2(vals[i])));
        for (int j = 0; j < 3; ++j) {
            Vec3c acc{};
            for (std::size_t q = 0; q < nlm; ++q)
                for (int a = 0; a < 3; ++a) acc[a] += d[j][a][q] * Y[s][q];
            kgrad[i][j] = acc;
        }
    }
    return worst <= 1e-9 * std::max(scale, 1e-300);
}

}  // namespace

std::vector<std::array<Vec3c, 3>> sampled_gradient(const TransverseAmplitude& v) {
    const KGrid& g = v.grid();
    const int nk = g.nk(), nt = g.ntheta(), np = g.nphi();
    const std::size_t shell = static_cast<std::size_t>(nt) * np;
    const auto& vals = v.values();

    // kgrad[i][j][a] = ((k ^ grad)_j v_a)
    std::vector<std::array<Vec3c, 3>> kgrad(v.size());
    std::vector<char> done(static_cast<std::size_t>(nk), 0);
    if (g.full_sphere()) {
        const int lmax = g.band_limit();
        std::vector<std::vector<cplx>> Y(shell);
        for (std::size_t s = 0; s < shell; ++s) {
            const Vec3d& k = g.point(s);
            spherical_harmonics<cplx>(to_complex((1.0 / norm(k)) * k), lmax, Y[s]);
        }
#pragma omp parallel for schedule(static)
        for (int ik = 0; ik < nk; ++ik) done[ik] = shell_orbital_sh(g, ik, vals, lmax, Y, kgrad) ? 1 : 0;
    }

    // Fallback: collocation in cos(theta), Fourier in phi.
    const std::vector<double> Dx = collocation_derivative(g.polar().nodes);
#pragma omp parallel for schedule(static)
    for (int ik = 0; ik < nk; ++ik) {
        if (done[ik]) continue;
        std::vector<cplx> ring(np), dring(np);
        std::vector<Vec3c> dphi(shell), dx(shell);
        for (int it = 0; it < nt; ++it)
            for (int a = 0; a < 3; ++a) {
                for (int ip = 0; ip < np; ++ip) ring[ip] = vals[g.index(ik, it, ip)][a];
                phi_derivative(ring.data(), dring.data(), np);
                for (int ip = 0; ip < np; ++ip) dphi[static_cast<std::size_t>(it) * np + ip][a] = dring[ip];
            }
        for (int it = 0; it < nt; ++it)
            for (int ip = 0; ip < np; ++ip) {
                Vec3c acc{};
                for (int jt = 0; jt < nt; ++jt) acc += Dx[static_cast<std::size_t>(it) * nt + jt] * vals[g.index(ik, jt, ip)];
                dx[static_cast<std::size_t>(it) * np + ip] = acc;
            }
        for (int it = 0; it < nt; ++it) {
            const double ct = g.cos_theta(it), st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int ip = 0; ip < np; ++ip) {
                const double ph = g.phi(ip);
                const Vec3d th_hat{ct * std::cos(ph), ct * std::sin(ph), -st};
                const Vec3d ph_hat{-std::sin(ph), std::cos(ph), 0.0};
                const std::size_t s = static_cast<std::size_t>(it) * np + ip;
                // k ^ grad = k (phi_hat d_theta - theta_hat / sin d_phi) / k
                const Vec3c dth = (-st) * dx[s];
                for (int j = 0; j < 3; ++j) {
                    Vec3c r = ph_hat[j] * dth;
                    if (st > 0.0) r += (-th_hat[j] / st) * dphi[s];
                    kgrad[g.index(ik, it, ip)][j] = r;
                }
            }
        }
    }

    // Radial derivative and assembly: grad = khat d_r - k ^ (k ^ grad) / k^2.
    std::vector<double> Dr;
    if (nk > 1) Dr = collocation_derivative(g.radial().nodes);
    std::vector<std::array<Vec3c, 3>> grad(v.size());
    parallel_for(v.size(), [&](std::size_t i) {
        int ik, it, ip;
        g.unravel(i, ik, it, ip);
        const Vec3d& k = g.point(i);
        const double k2 = dot(k, k), kn = std::sqrt(k2);
        Vec3c dr{};
        if (nk > 1)
            for (int jk = 0; jk < nk; ++jk) dr += Dr[static_cast<std::size_t>(ik) * nk + jk] * vals[g.index(jk, it, ip)];
        for (int a = 0; a < 3; ++a) {
            const Vec3c kg{kgrad[i][0][a], kgrad[i][1][a], kgrad[i][2][a]};
            const Vec3c ang = cross(to_complex(k), kg);
            for (int j = 0; j < 3; ++j) grad[i][j][a] = (k[j] / kn) * dr[a] - ang[j] / k2;
        }
    });
    return grad;
}

ObservableSet classical_com(const TransverseAmplitude& v, const ComOptions& opt) {
    opt.cfg.validate();
    const KGrid& g = v.grid();
    const auto grad = sampled_gradient(v);
    std::vector<Totals> terms(v.size());
    parallel_for(v.size(), [&](std::size_t i) {
        terms[i] = node_forms(g.point(i), FieldJet1{v[i], grad[i]}, g.weight(i), opt.cfg, true);
    });
    const Totals full = parallel_sum<Totals>(v.size(), [&](std::size_t i) { return terms[i]; });
    ObservableSet out = finish(full, opt);
    out.fd = true;
    if (opt.estimate_error && g.nphi() >= 4 && g.nphi() % 2 == 0) {
        const Totals half = parallel_sum<Totals>(v.size(), [&](std::size_t i) {
            int ik, it, ip;
            g.unravel(i, ik, it, ip);
            Totals t;
            if (ip % 2 == 0)
                for (std::size_t q = 0; q < t.a.size(); ++q) t.a[q] = 2.0 * terms[i].a[q];
            return t;
        });
        attach_errors(out, finish(half, opt));
    }
    return out;
}

ObservableSet per_photon(const ObservableSet& cl, const PhysConfig& cfg) {
    cfg.validate();
    if (cl.normalization == Normalization::per_photon) return cl;
    if (!(cl.norm2 > 0.0)) throw std::domain_error("per_photon: zero-norm field");
    const double s = cfg.hbar / cl.norm2;
    ObservableSet o = cl;
    o.normalization = Normalization::per_photon;
    o.P0 *= s;
    o.err_P0 *= s;
    for (int c = 0; c < 3; ++c) {
        o.P[c] *= s;
        o.J[c] *= s;
        o.K[c] *= s;
        o.L[c] *= s;
        o.S[c] *= s;
        o.err_P[c] *= s;
        o.err_J[c] *= s;
        o.err_K[c] *= s;
        o.err_L[c] *= s;
        o.err_S[c] *= s;
    }
    return o;
}

namespace {
std::vector<double> select(const ObservableSet& o, Observable which) {
    switch (which) {
        case Observable::P0: return {o.P0};
        case Observable::P: return {o.P[0], o.P[1], o.P[2]};
        case Observable::J: return {o.J[0], o.J[1], o.J[2]};
        case Observable::L: return {o.L[0], o.L[1], o.L[2]};
        case Observable::S: return {o.S[0], o.S[1], o.S[2]};
        case Observable::K: return {o.K[0], o.K[1], o.K[2]};
    }
    return {};
}
}  // namespace

std::vector<double> photon_expectation(const JetField& v, const GridPtr& grid, Observable which, const ComOptions& opt) {
    ComOptions o = opt;
    o.estimate_error = false;
    return select(per_photon(classical_com(v, grid, o), opt.cfg), which);
}

std::vector<double> photon_expectation(const TransverseAmplitude& v, Observable which, const ComOptions& opt) {
    ComOptions o = opt;
    o.estimate_error = false;
    return select(per_photon(classical_com(v, o), opt.cfg), which);
}

Vec3d spin_via_helicity(const TransverseAmplitude& v, const PhysConfig& cfg) {
    cfg.validate();
    const HelicityComponents h = helicity_decompose(v);
    const KGrid& g = v.grid();
    struct Acc4 {
        std::array<double, 4> a{};
        Acc4 operator+(const Acc4& o) const { return {{a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]}}; }
    };
    const Acc4 t = parallel_sum<Acc4>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        const double kn = norm(k), w = g.weight(i);
        const double d = std::norm(h.plus[i]) - std::norm(h.minus[i]);
        return Acc4{{w * d * k[0] / kn, w * d * k[1] / kn, w * d * k[2] / kn,
                     w * (std::norm(h.plus[i]) + std::norm(h.minus[i]))}};
    });
    if (!(t.a[3] > 0.0)) throw std::domain_error("spin_via_helicity: zero-norm field");
    return {cfg.hbar * t.a[0] / t.a[3], cfg.hbar * t.a[1] / t.a[3], cfg.hbar * t.a[2] / t.a[3]};
}

double spin_variance(const TransverseAmplitude& v, const Vec3d& alpha, const PhysConfig& cfg) {
    cfg.validate();
    const OperatorTag op{OpKind::SalongAlpha, alpha};
    const KGrid& g = v.grid();
    struct Acc3 {
        cplx s1{}, s2{};
        double n = 0.0;
        Acc3 operator+(const Acc3& o) const { return {s1 + o.s1, s2 + o.s2, n + o.n}; }
    };
    const Acc3 t = parallel_sum<Acc3>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        const double w = g.weight(i);
        const Vec3c a = apply_value(op, k, FieldJet1{v[i], {}}, cfg);
        const Vec3c b = apply_value(op, k, FieldJet1{a, {}}, cfg);
        return Acc3{w * cdot(v[i], a), w * cdot(v[i], b), w * norm2(v[i])};
    });
    if (!(t.n > 0.0)) throw std::domain_error("spin_variance: zero-norm field");
    const double mean = t.s1.real() / t.n;
    return t.s2.real() / t.n - mean * mean;
}

}  // namespace lightam
