#include <cmath>

#include "doctest.h"
#include "lightam/harmonics.hpp"
#include "lightam/modes.hpp"
#include "lightam/observables.hpp"
#include "lightam/operators.hpp"
#include "lightam/polarization.hpp"
#include "test_util.hpp"

using namespace lightam;
using testutil::cdiff;

namespace {

cplx ylm_oracle(int l, int m, double th, double ph) {
    if (std::abs(m) > l) return 0.0;
    const int am = std::abs(m);
    cplx y = std::sph_legendre(l, am, th) * std::polar(1.0, am * ph);
    if (m < 0) y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
    return y;
}

// L Y_lm / sqrt(l(l+1)) from ladder relations on std::sph_legendre values.
Vec3c y1_oracle(int l, int m, double th, double ph) {
    const cplx up = std::sqrt(double((l - m) * (l + m + 1))) * ylm_oracle(l, m + 1, th, ph);
    const cplx dn = std::sqrt(double((l + m) * (l - m + 1))) * ylm_oracle(l, m - 1, th, ph);
    const double n = std::sqrt(double(l * (l + 1)));
    return {0.5 * (up + dn) / n, -0.5 * kI * (up - dn) / n, double(m) * ylm_oracle(l, m, th, ph) / n};
}

Vec3d direction(double th, double ph) {
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

// Jet model of alpha.J v: value and gradient from the order-2 jets of v.
class JAction final : public FieldModel {
public:
    JAction(JetField v, int j) : v_(std::move(v)), op_(OperatorTag::J(j)) {}
    [[nodiscard]] Vec3c value(const Vec3d& k) const override { return apply_jet(op_, k, v_.jet(k), {}).v; }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override {
        const FieldJet1 r = apply_jet(op_, k, v_.jet(k), {});
        FieldJet out;
        out.v = r.v;
        out.d1 = r.d1;
        return out;
    }
    [[nodiscard]] int order() const override { return 1; }

private:
    JetField v_;
    OperatorTag op_;
};

template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("vector spherical harmonics against a ladder-operator oracle") {
    double worst = 0.0;
    for (int l = 1; l <= 6; ++l)
        for (int m = -l; m <= l; ++m)
            for (double th : {0.3, 1.1, 2.5})
                for (double ph : {0.2, 3.8}) {
                    const Vec3d kh = direction(th, ph);
                    const Vec3c y1 = y1_oracle(l, m, th, ph);
                    worst = std::max(worst, cdiff(vsh({1, l, m}, kh), y1));
                    worst = std::max(worst, cdiff(vsh({2, l, m}, kh), cross(to_complex(kh), y1)));
                    worst = std::max(worst, std::abs(dot(to_complex(kh), vsh({1, l, m}, kh))));
                    worst = std::max(worst, std::abs(dot(to_complex(kh), vsh({2, l, m}, kh))));
                }
    CHECK(worst < 1e-12);
    CHECK_THROWS(vsh({1, 0, 0}, {0, 0, 1}));
    CHECK_THROWS(vsh({3, 1, 0}, {0, 0, 1}));
    CHECK_THROWS(vsh({1, 2, 3}, {0, 0, 1}));
}

TEST_CASE("VSH orthonormality for a in {1,2}, l <= 6") {
    const GridPtr g = make_shell_grid(1.0, 32, 32);
    std::vector<VSHIndex> idx;
    for (int a = 1; a <= 2; ++a)
        for (int l = 1; l <= 6; ++l)
            for (int m = -l; m <= l; ++m) idx.push_back({a, l, m});
    std::vector<std::vector<Vec3c>> tab(idx.size());
    for (std::size_t n = 0; n < idx.size(); ++n)
        for (std::size_t i = 0; i < g->size(); ++i) {
            const Vec3d& k = g->point(i);
            tab[n].push_back(vsh(idx[n], k));
        }
    double worst = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) s += g->weight(i) * cdot(tab[a][i], tab[b][i]);
            worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("VSH parity on antipodal node pairs") {
    const GridPtr g = make_shell_grid(1.0, 12, 16);
    for (int l = 1; l <= 6; ++l)
        for (int m = -l; m <= l; ++m)
            for (int it = 0; it < g->ntheta(); ++it)
                for (int ip = 0; ip < g->nphi(); ++ip) {
                    const Vec3d& k = g->point(g->index(0, it, ip));
                    const Vec3d& q = g->point(g->index(0, g->ntheta() - 1 - it, (ip + g->nphi() / 2) % g->nphi()));
                    CHECK(testutil::vdiff(q, -k) < 1e-15);
                    const double s = (l % 2) ? -1.0 : 1.0;
                    CHECK(cdiff(vsh({1, l, m}, q), s * vsh({1, l, m}, k)) < 1e-13);
                    CHECK(cdiff(vsh({2, l, m}, q), -s * vsh({2, l, m}, k)) < 1e-13);
                }
}

TEST_CASE("VSH fields are J^2 and J3 eigenfields") {
    const GridPtr g = make_sphere_grid(32, 16, 16, 0.0, 2.0);
    const GaussianShell r = GaussianShell{1.0, 0.15, 1.0}.normalized();
    for (const VSHIndex idx : {VSHIndex{1, 1, 1}, VSHIndex{2, 3, -2}, VSHIndex{1, 6, 4}}) {
        const JetField f = vsh_field(idx, r);
        const TransverseAmplitude v = sample(f, g);
        const double nv = std::sqrt(norm_squared(v));
        const TransverseAmplitude j3 = apply_J({0, 0, 1}, f, g);
        const TransverseAmplitude want3 = scaled(v, double(idx.m));
        const TransverseAmplitude d3 = added(j3, scaled(want3, -1.0));
        CHECK(std::sqrt(norm_squared(d3)) < 1e-9 * nv);
        TransverseAmplitude jsq = scaled(v, 0.0);
        for (int j = 0; j < 3; ++j) {
            const JetField jv(std::make_shared<const JAction>(f, j));
            jsq = added(jsq, apply_J(OperatorTag::unit(j), jv, g));
        }
        const TransverseAmplitude d2 = added(jsq, scaled(v, -double(idx.l * (idx.l + 1))));
        CHECK(std::sqrt(norm_squared(d2)) < 1e-9 * nv);
        const auto pj = photon_expectation(f, g, Observable::J);
        CHECK(std::abs(pj[2] - idx.m) < 1e-9);
    }
}

TEST_CASE("VSH expansion norms") {
    const GaussianShell r1 = GaussianShell{1.0, 0.15, 1.0}.normalized();
    const GaussianShell r2 = GaussianShell{0.9, 0.1, 1.0}.normalized();
    const GridPtr g = make_sphere_grid(64, 16, 16, 0.0, 2.0);
    CHECK(std::abs(norm_squared(sample(vsh_field({2, 2, 0}, r1), g)) - 1.0) < 1e-9);
    const std::vector<VSHTerm> terms{{{1, 2, 1}, cplx(0.6, 0.0), r1}, {{2, 4, -3}, cplx(0.0, 0.8), r2}};
    const TransverseAmplitude v = sample(vsh_expansion(terms), g);
    CHECK(std::abs(norm_squared(v) - 1.0) < 1e-9);
    CHECK(std::abs(vsh_expansion_norm2(terms) - 1.0) < 1e-12);
    // radial normalisation oracle
    CHECK(std::abs(simpson([&](double k) { return k * k * r2.eval(k) * r2.eval(k); }, 0.0, 3.0, 6000) - 1.0) < 1e-10);
}

TEST_CASE("random fields are seeded and band limited") {
    const auto a = random_vsh_terms(42), b = random_vsh_terms(42), c = random_vsh_terms(43);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].index == b[i].index);
        CHECK(a[i].coeff == b[i].coeff);
        CHECK(a[i].index.l <= 6);
    }
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) differ = differ || !(a[i].index == c[i].index) || a[i].coeff != c[i].coeff;
    CHECK(differ);
}

TEST_CASE("scalar LG modes in k-space") {
    LGModeSpec s;
    s.w = 3.0;
    // (0,0) closed form
    for (double kx : {0.0, 0.2, -0.5})
        for (double ky : {0.0, 0.3}) {
            const double rho2 = kx * kx + ky * ky;
            const cplx want = s.w / std::sqrt(2.0 * kPi) * std::exp(-s.w * s.w * rho2 / 4.0);
            CHECK(std::abs(lg_k(s, kx, ky) - want) < 1e-15);
        }
    // azimuthal index
    s.m = -3;
    s.p = 2;
    for (double d : {0.4, 2.0}) {
        const double r = 0.35, ph = 0.7;
        const cplx a = lg_k(s, r * std::cos(ph), r * std::sin(ph));
        const cplx b = lg_k(s, r * std::cos(ph + d), r * std::sin(ph + d));
        CHECK(std::abs(b - std::polar(1.0, s.m * d) * a) < 1e-14);
    }
    // orthonormality over the plane: GL in rho, trapezoid in phi
    const QuadRule q = gauss_legendre(80, 0.0, 12.0 / s.w);
    const int nph = 32;
    double worst = 0.0;
    for (int m1 = -2; m1 <= 2; ++m1)
        for (int p1 = 0; p1 <= 2; ++p1)
            for (int m2 = -2; m2 <= 2; ++m2)
                for (int p2 = 0; p2 <= 2; ++p2) {
                    LGModeSpec a = s, b = s;
                    a.m = m1;
                    a.p = p1;
                    b.m = m2;
                    b.p = p2;
                    cplx acc = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i)
                        for (int j = 0; j < nph; ++j) {
                            const double ph = 2.0 * kPi * j / nph, r = q.nodes[i];
                            acc += q.weights[i] * r * (2.0 * kPi / nph) *
                                   std::conj(lg_k(a, r * std::cos(ph), r * std::sin(ph))) *
                                   lg_k(b, r * std::cos(ph), r * std::sin(ph));
                        }
                    worst = std::max(worst, std::abs(acc - ((m1 == m2 && p1 == p2) ? 1.0 : 0.0)));
                }
    CHECK(worst < 1e-10);
}

TEST_CASE("lg_x is the Fourier transform of lg_k at z = 0") {
    LGModeSpec s;
    s.m = 1;
    s.p = 1;
    s.w = 2.0;
    // psi(x) = (1/2pi) int d^2k e^{i k.x} phi(k), by a direct trapezoid sum
    const int n = 160;
    const double K = 14.0 / s.w, h = 2.0 * K / n;
    double num = 0.0, den = 0.0;
    for (double x : {0.0, 0.7, -1.9, 3.1})
        for (double y : {0.0, 1.3, -2.2}) {
            cplx acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double kx = -K + i * h, ky = -K + j * h;
                    acc += std::polar(1.0, kx * x + ky * y) * lg_k(s, kx, ky);
                }
            acc *= h * h / (2.0 * kPi);
            num += std::norm(acc - lg_x(s, x, y, 0.0));
            den += std::norm(acc);
        }
    CHECK(std::sqrt(num / den) < 1e-8);
}

TEST_CASE("lg_x solves the paraxial wave equation") {
    LGModeSpec s;
    s.m = 2;
    s.p = 1;
    s.w = 4.0;
    s.k = 2.0;
    const double h = 1e-3, hz = 1e-2;
    for (double z : {0.0, 5.0, 20.0}) {
        const double x = 1.1, y = -0.6;
        const cplx dz = (lg_x(s, x, y, z + hz) - lg_x(s, x, y, z - hz)) / (2 * hz);
        const cplx lap = (lg_x(s, x + h, y, z) + lg_x(s, x - h, y, z) + lg_x(s, x, y + h, z) + lg_x(s, x, y - h, z) -
                          4.0 * lg_x(s, x, y, z)) /
                         (h * h);
        CHECK(std::abs(kI * dz + lap / (2.0 * s.k)) < 1e-5 * std::abs(dz));
    }
}

TEST_CASE("Gouy phase and the (0,0) waist profile") {
    LGModeSpec s;
    s.p = 1;
    s.w = 1.5;
    const double far = 1e7 * s.rayleigh_range();
    // on-axis phase advance from z = 0 to z -> infinity is (2p + |m| + 1) pi / 2
    const double d = std::arg(lg_x(s, 0, 0, 0)) - std::arg(lg_x(s, 0, 0, far));
    CHECK(std::abs(std::remainder(d - 1.5 * kPi, 2.0 * kPi)) < 1e-6);
    CHECK(std::abs(gouy_phase(s, s.rayleigh_range()) - 3.0 * kPi / 4.0) < 1e-15);
    LGModeSpec g;
    g.w = 2.0;
    for (double x : {0.0, 0.5, 2.0}) CHECK(std::abs(lg_x(g, x, 0.3, 0.0).imag()) < 1e-16);
    CHECK(std::abs(std::abs(lg_x(g, 1.0, 1.0, 0.0)) / std::abs(lg_x(g, 0, 0, 0)) - std::exp(-2.0 / 4.0)) < 1e-14);
}

TEST_CASE("vector LG modes") {
    for (LGVariant var : {LGVariant::vector_alpha, LGVariant::vector_beta}) {
        LGModeSpec s;
        s.m = 1;
        s.p = 1;
        s.variant = var;
        const VectorLGMode mode = vector_lg(s);
        CHECK(mode.paraxial);
        const GridPtr g = make_grid(mode.natural_grid);
        const TransverseAmplitude v = sample(mode.field, g);
        CHECK(std::abs(norm_squared(v) - 1.0) < 1e-12);
        const TransverseAmplitude jv = apply_J({0, 0, 1}, mode.field, g);
        CHECK(std::sqrt(norm_squared(added(jv, scaled(v, -double(s.m))))) < 1e-9);
        // |c| / |a| at rho = 1/w is of order 1/(wk)
        const Vec3d k{1.0 / s.w, 0.0, std::sqrt(1.0 - 1.0 / (s.w * s.w))};
        const Vec3c raw = mode.raw.value(k);
        const double ratio = std::abs(raw[2]) / std::sqrt(std::norm(raw[0]) + std::norm(raw[1]));
        CHECK(ratio * s.w * s.k > 0.3);
        CHECK(ratio * s.w * s.k < 3.0);
    }
    LGModeSpec narrow;
    narrow.w = 5.0;
    narrow.variant = LGVariant::vector_alpha;
    CHECK(!vector_lg(narrow).paraxial);
    LGModeSpec scalar;
    CHECK_THROWS(vector_lg(scalar));
}

TEST_CASE("vector LG transversality residual halves when w doubles") {
    std::vector<double> res;
    for (double w : {20.0, 40.0}) {
        LGModeSpec s;
        s.w = w;
        s.m = 2;
        s.variant = LGVariant::vector_alpha;
        res.push_back(vector_lg(s).transversality_residual);
    }
    const double slope = std::log(res[1] / res[0]) / std::log(2.0);
    CHECK(std::abs(slope + 1.0) < 0.1);
}

TEST_CASE("J3 eigenfield structure and norms") {
    J3EigenSpec s;
    s.m = 2;
    s.radial_a = GaussianShell{1.0, 0.15, 1.0}.normalized();
    s.radial_b = s.radial_a;
    s.poly_a = {1.0, 0.5};
    s.poly_b = {};
    const JetField f = j3_eigenfield(s);
    const GridPtr g = make_sphere_grid(48, 24, 16, 0.0, 2.0);
    const TransverseAmplitude v = sample(f, g);
    const HelicityComponents h = helicity_decompose(v);
    for (std::size_t i = 0; i < g->size(); i += 97) {
        CHECK(std::abs(h.minus[i]) < 1e-13 * (1.0 + std::abs(h.plus[i])));
        int ik, it, ip;
        g->unravel(i, ik, it, ip);
        const std::size_t i2 = g->index(ik, it, (ip + 3) % g->nphi());
        const double dphi = std::remainder(g->phi((ip + 3) % g->nphi()) - g->phi(ip), 2.0 * kPi);
        CHECK(std::abs(h.plus[i2] - std::polar(1.0, (s.m - 1) * dphi) * h.plus[i]) < 1e-13);
    }
    // norm 2 pi int k^2 dk int sin dth (|a|^2 + |b|^2), by an independent Simpson sum
    auto a2 = [&](double k, double th) {
        const double c = std::cos(th);
        const double prof = s.radial_a.eval(k) * (1.0 + 0.5 * c) * (1.0 + c) * std::pow(std::sin(th), std::abs(s.m - 1));
        return prof * prof;
    };
    const double oracle = 2.0 * kPi * simpson([&](double k) {
        return k * k * simpson([&](double th) { return std::sin(th) * a2(k, th); }, 0.0, kPi, 1000);
    }, 0.0, 2.5, 400);
    CHECK(std::abs(j3_norm2(s) - oracle) < 1e-9 * oracle);
    CHECK(std::abs(norm_squared(v) - oracle) < 1e-9 * oracle);

    J3EigenSpec t = s;
    t.m = 3;
    t.poly_b = {0.3};
    CHECK(std::abs(inner_product(v, sample(j3_eigenfield(t), g))) < 1e-10);
    J3EigenSpec empty;
    empty.poly_a = {};
    CHECK_THROWS(j3_eigenfield(empty));
}

TEST_CASE("J3 eigenfields are regular at both poles") {
    for (int m : {-2, 0, 1, 3}) {
        J3EigenSpec s;
        s.m = m;
        s.poly_b = {1.0};
        const JetField f = j3_eigenfield(s);
        // values tend to a phi-independent limit on the axis
        for (double th : {1e-6, kPi - 1e-6}) {
            const Vec3c a = f.value(1.0 * direction(th, 0.0));
            const Vec3c b = f.value(1.0 * direction(th, 2.0));
            CHECK(cdiff(a, b) < 1e-5);
        }
    }
}

TEST_CASE("basis conversion between alpha/beta and helicity eigenfunctions") {
    for (int m : {-1, 0, 2})
        for (double th : {0.0, 0.4, 1.2})
            for (double ph : {0.0, 1.7}) {
                const BasisMatrices B = basis_convert(m, th);
                const PolarizationPair e = helicity_basis(th, ph);
                const Vec3c u = std::polar(1.0, (m - 1) * ph) * e.eps_plus;
                const Vec3c d = std::polar(1.0, (m + 1) * ph) * e.eps_minus;
                const Vec3c al = B.forward[0][0] * u + B.forward[0][1] * d;
                const Vec3c be = B.forward[1][0] * u + B.forward[1][1] * d;
                CHECK(cdiff(al, alpha_structure(m, th, ph)) < 1e-14);
                CHECK(cdiff(be, beta_structure(m, th, ph)) < 1e-14);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        cplx p = 0.0;
                        for (int l = 0; l < 2; ++l) p += B.forward[i][l] * B.inverse[l][j];
                        CHECK(std::abs(p - (i == j ? 1.0 : 0.0)) < 1e-12);
                    }
            }
    const BasisMatrices b0 = basis_convert(1, 0.0);
    CHECK(std::abs(b0.forward[0][0] - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(b0.forward[0][1]) == 0.0);
    // sec(theta) growth of the inverse near pi/2
    for (double eps : {1e-2, 1e-4}) {
        const BasisMatrices b = basis_convert(0, 0.5 * kPi - eps);
        CHECK(std::abs(std::abs(b.inverse[0][0]) * std::cos(0.5 * kPi - eps) - 1.0 / (2.0 * std::sqrt(2.0))) < 2e-2);
    }
    CHECK_THROWS_AS(basis_convert(0, 0.5 * kPi), std::domain_error);
}

TEST_CASE("LG variant names") {
    CHECK(lg_variant_from_string("vector-beta") == LGVariant::vector_beta);
    CHECK(to_string(LGVariant::vector_alpha) == "vector-alpha");
    CHECK_THROWS(lg_variant_from_string("gamma"));
}
