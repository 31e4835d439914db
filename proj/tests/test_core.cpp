#include <cmath>
#include <random>

#include "doctest.h"
#include "lightam/amplitude.hpp"
#include "lightam/grid.hpp"
#include "lightam/harmonics.hpp"
#include "lightam/jet_field.hpp"
#include "lightam/modes.hpp"
#include "lightam/parallel.hpp"
#include "lightam/polarization.hpp"
#include "lightam/quadrature.hpp"
#include "test_util.hpp"

using namespace lightam;
using testutil::cdiff;

TEST_CASE("gauss-legendre integrates monomials exactly") {
    const QuadRule r = gauss_legendre(12);
    for (int j = 0; j <= 23; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], j);
        const double exact = (j % 2 == 0) ? 2.0 / (j + 1) : 0.0;
        CHECK(std::abs(s - exact) < 1e-14);
    }
    const QuadRule m = gauss_legendre(8, 1.0, 3.0);
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.weights[i] * m.nodes[i] * m.nodes[i];
    CHECK(std::abs(s - 26.0 / 3.0) < 1e-13);
}

TEST_CASE("collocation derivative is exact for polynomials") {
    const QuadRule r = gauss_legendre(9, 0.5, 2.0);
    const auto D = collocation_derivative(r.nodes);
    const int n = static_cast<int>(r.size());
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        for (int j = 0; j < n; ++j) {
            const double x = r.nodes[j];
            d += D[i * n + j] * (x * x * x * x - 3.0 * x * x + 2.0);
        }
        const double x = r.nodes[i];
        CHECK(std::abs(d - (4.0 * x * x * x - 6.0 * x)) < 1e-10);
    }
}

TEST_CASE("grid weights") {
    const GridPtr shell = make_shell_grid(1.7, 16, 20);
    double s = 0.0;
    for (double w : shell->weights()) s += w;
    CHECK(std::abs(s - 4.0 * kPi) < 1e-12 * 4.0 * kPi);

    const GridPtr sph = make_sphere_grid(10, 12, 14, 0.2, 1.5);
    double v = 0.0;
    for (double w : sph->weights()) {
        CHECK(w > 0.0);
        v += w;
    }
    const double exact = 4.0 * kPi / 3.0 * (std::pow(1.5, 3) - std::pow(0.2, 3));
    CHECK(std::abs(v - exact) < 1e-12 * exact);
    for (int ik = 0; ik < sph->nk(); ++ik) CHECK(sph->k(ik) > 0.0);

    GridSpec bad;
    bad.nphi = 0;
    CHECK_THROWS(make_grid(bad));
    GridSpec neg;
    neg.k_lo = -1.0;
    CHECK_THROWS(make_grid(neg));
}

TEST_CASE("grid indexing round trip") {
    const GridPtr g = make_sphere_grid(3, 4, 5, 0.5, 1.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
        int ik, it, ip;
        g->unravel(i, ik, it, ip);
        CHECK(g->index(ik, it, ip) == i);
        const Vec3d& k = g->point(i);
        CHECK(std::abs(norm(k) - g->k(ik)) < 1e-14);
        CHECK(std::abs(k[2] / norm(k) - g->cos_theta(it)) < 1e-14);
    }
}

TEST_CASE("spherical harmonics match std::sph_legendre") {
    for (int l = 0; l <= 8; ++l)
        for (int m = -l; m <= l; ++m)
            for (double th : {0.1, 0.7, 1.5, 2.4, 3.0})
                for (double ph : {0.0, 0.9, 4.0}) {
                    const int am = std::abs(m);
                    cplx ref = std::sph_legendre(l, am, th) * std::polar(1.0, am * ph);
                    if (m < 0) ref = ((am % 2) ? -1.0 : 1.0) * std::conj(ref);
                    CHECK(std::abs(ylm(l, m, th, ph) - ref) < 1e-12);
                }
}

TEST_CASE("angular quadrature is exact for harmonics up to l = 8") {
    const GridPtr g = make_shell_grid(1.0, 10, 20);
    double worst = 0.0;
    for (int l1 = 0; l1 <= 8; ++l1)
        for (int m1 = -l1; m1 <= l1; ++m1)
            for (int l2 = 0; l2 <= 8; ++l2)
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    cplx s = 0.0;
                    for (std::size_t i = 0; i < g->size(); ++i) {
                        int ik, it, ip;
                        g->unravel(i, ik, it, ip);
                        s += g->weight(i) * std::conj(ylm(l1, m1, g->theta(it), g->phi(ip))) *
                             ylm(l2, m2, g->theta(it), g->phi(ip));
                    }
                    const double want = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(s - want));
                }
    CHECK(worst < 1e-10);
}

TEST_CASE("transverse projection examples") {
    CHECK(cdiff(project_transverse({0, 0, 1}, {0.0, 0.0, 1.0}), {0.0, 0.0, 0.0}) < 1e-15);
    CHECK(cdiff(project_transverse({0, 0, 1}, {1.0, 0.0, 0.0}), {1.0, 0.0, 0.0}) < 1e-15);
    const double s = 1.0 / std::sqrt(3.0);
    CHECK(cdiff(project_transverse({s, s, s}, {1.0, 0.0, 0.0}), {2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0}) < 1e-15);
}

TEST_CASE("transverse projection is idempotent and exact") {
    const GridPtr g = make_sphere_grid(4, 6, 7, 0.5, 1.5);
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n(0.0, 1.0);
    SampledVectorField w{g, {}};
    for (std::size_t i = 0; i < g->size(); ++i) w.values.push_back({cplx(n(gen), n(gen)), cplx(n(gen), n(gen)), cplx(n(gen), n(gen))});
    const TransverseAmplitude v = transverse_project(w);
    CHECK(v.max_transverse_residual() < 1e-15);
    const TransverseAmplitude v2 = transverse_project({g, v.values()});
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(cdiff(v[i], v2[i]) <= 1e-15 * std::sqrt(norm2(v[i])) + 1e-300);
    CHECK_THROWS_AS(TransverseAmplitude(g, w.values), TransversalityError);
}

TEST_CASE("helicity basis invariants on a scan") {
    double worst = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 128; ++j) {
            const double th = i * kPi / 64.0, ph = 2.0 * kPi * j / 128.0;
            const PolarizationPair e = helicity_basis(th, ph);
            const Vec3d kh{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            const Vec3c khc = to_complex(kh);
            worst = std::max(worst, std::abs(cdot(e.eps_plus, e.eps_plus) - 1.0));
            worst = std::max(worst, std::abs(cdot(e.eps_minus, e.eps_minus) - 1.0));
            worst = std::max(worst, std::abs(cdot(e.eps_plus, e.eps_minus)));
            worst = std::max(worst, std::abs(dot(khc, e.eps_plus)));
            worst = std::max(worst, std::abs(dot(khc, e.eps_minus)));
            worst = std::max(worst, cdiff(e.eps_minus, kI * conj(e.eps_plus)));
            worst = std::max(worst, cdiff(cross(khc, e.eps_plus), -kI * e.eps_plus));
            worst = std::max(worst, cdiff(cross(khc, e.eps_minus), kI * e.eps_minus));
            // completeness: e+ e+^dag + e- e-^dag + khat khat = 1
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const cplx p = e.eps_plus[a] * std::conj(e.eps_plus[b]) + e.eps_minus[a] * std::conj(e.eps_minus[b]) +
                                   kh[a] * kh[b];
                    worst = std::max(worst, std::abs(p - (a == b ? 1.0 : 0.0)));
                }
            CHECK(!e.south_pole);
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("helicity basis pole values") {
    const double s = 1.0 / std::sqrt(2.0);
    for (double ph : {0.0, 1.0, 3.0}) {
        const PolarizationPair n = helicity_basis(0.0, ph);
        CHECK(cdiff(n.eps_plus, {s, kI * s, 0.0}) < 1e-15);
    }
    const PolarizationPair south = helicity_basis(kPi, 0.0);
    CHECK(south.south_pole);
    CHECK(cdiff(south.eps_plus, {-s, kI * s, 0.0}) == 0.0);
    // phi-dependent limit: e+ -> -e^{-2 i phi}... read off the rotation construction
    const PolarizationPair s1 = helicity_basis(kPi, 1.2);
    const PolarizationPair r1 = helicity_basis_by_rotation(kPi, 1.2);
    CHECK(cdiff(s1.eps_plus, r1.eps_plus) < 1e-15);
}

TEST_CASE("regular helicity vectors equal (1 + cos theta) eps+") {
    for (double th : {0.2, 1.0, 2.0, 2.9})
        for (double ph : {0.0, 2.0}) {
            const Vec3c k{1.3 * std::sin(th) * std::cos(ph), 1.3 * std::sin(th) * std::sin(ph), 1.3 * std::cos(th)};
            const PolarizationPair e = helicity_basis(th, ph);
            CHECK(cdiff(regular_helicity_plus(k), (1.0 + std::cos(th)) * e.eps_plus) < 1e-14);
            CHECK(cdiff(regular_helicity_minus(k), (1.0 + std::cos(th)) * e.eps_minus) < 1e-14);
        }
}

namespace {
TransverseAmplitude basis_field(const GridPtr& g, bool plus) {
    std::vector<Vec3c> vals;
    for (std::size_t i = 0; i < g->size(); ++i) {
        int ik, it, ip;
        g->unravel(i, ik, it, ip);
        const PolarizationPair e = helicity_basis(g->theta(it), g->phi(ip));
        vals.push_back(plus ? e.eps_plus : e.eps_minus);
    }
    return TransverseAmplitude(g, vals);
}
}  // namespace

TEST_CASE("helicity decomposition") {
    const GridPtr g = make_sphere_grid(3, 8, 9, 0.5, 1.0);
    const HelicityComponents hp = helicity_decompose(basis_field(g, true));
    const HelicityComponents hm = helicity_decompose(basis_field(g, false));
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(std::abs(hp.plus[i] - 1.0) < 1e-14);
        CHECK(std::abs(hp.minus[i]) < 1e-14);
        CHECK(std::abs(hm.plus[i]) < 1e-14);
        CHECK(std::abs(hm.minus[i] - 1.0) < 1e-14);
    }

    // real-valued transverse field: |v+| = |v-| at every node
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n(0.0, 1.0);
    SampledVectorField w{g, {}};
    for (std::size_t i = 0; i < g->size(); ++i) w.values.push_back({n(gen), n(gen), n(gen)});
    const TransverseAmplitude v = transverse_project(w);
    const HelicityComponents h = helicity_decompose(v);
    double n2 = 0.0;
    const auto rec = helicity_reconstruct(h);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(std::abs(std::abs(h.plus[i]) - std::abs(h.minus[i])) < 1e-12);
        CHECK(cdiff(rec[i], v[i]) <= 1e-10 * std::sqrt(norm2(v[i])));
        n2 += g->weight(i) * (std::norm(h.plus[i]) + std::norm(h.minus[i]));
    }
    CHECK(std::abs(n2 - norm_squared(v)) < 1e-10 * norm_squared(v));
}

TEST_CASE("inner product properties") {
    const GridPtr g = make_sphere_grid(48, 16, 16, 0.0, 2.0);
    const GaussianShell r = GaussianShell{1.0, 0.15, 1.0}.normalized();
    const TransverseAmplitude a = sample(vsh_field({1, 2, 1}, r), g);
    const TransverseAmplitude b = sample(vsh_field({2, 3, -1}, r), g);
    const TransverseAmplitude c = sample(random_field(11), g);
    CHECK(std::abs(norm_squared(a) - 1.0) < 1e-9);
    CHECK(std::abs(inner_product(a, b)) < 1e-8);
    CHECK(std::abs(inner_product(a, c) - std::conj(inner_product(c, a))) < 1e-14);
    CHECK(norm_squared(c) > 0.0);
    const GridPtr other = make_sphere_grid(48, 16, 18, 0.0, 2.0);
    CHECK_THROWS_AS(inner_product(a, sample(vsh_field({1, 2, 1}, r), other)), GridMismatch);
}

TEST_CASE("jets agree with central differences and have symmetric Hessians") {
    const JetField f = random_field(5);
    const Vec3d k0{0.3, -0.6, 0.7};
    const FieldJet j = f.jet(k0);
    const double h = 1e-5;
    for (int d = 0; d < 3; ++d) {
        Vec3d kp = k0, km = k0;
        kp[d] += h;
        km[d] -= h;
        const Vec3c fd = (1.0 / (2 * h)) * (f.value(kp) - f.value(km));
        CHECK(cdiff(fd, j.d1[d]) < 1e-7);
        const FieldJet jp = f.jet(kp), jm = f.jet(km);
        for (int e = 0; e < 3; ++e) {
            const Vec3c fd2 = (1.0 / (2 * h)) * (jp.d1[e] - jm.d1[e]);
            CHECK(cdiff(fd2, j.d2[d][e]) < 1e-6);
            CHECK(cdiff(j.d2[d][e], j.d2[e][d]) < 1e-12);
        }
    }
    CHECK(cdiff(f.value(k0), j.v) < 1e-15);
}

TEST_CASE("parallel kernels match serial references") {
    const GridPtr g = make_sphere_grid(8, 8, 8, 0.1, 2.0);
    const JetField f = random_field(9);
    const SampledVectorField a = sample_raw(f, g);
    const SampledVectorField b = reference::sample_raw_serial(f, g);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(cdiff(a.values[i], b.values[i]) == 0.0);

    const double p = parallel_sum<double>(100000, [](std::size_t i) { return 1.0 / (1.0 + i); });
    const double s = reference::serial_sum<double>(100000, [](std::size_t i) { return 1.0 / (1.0 + i); });
    CHECK(std::abs(p - s) < 1e-12);
    CHECK(thread_count() >= 1);
}

TEST_CASE("helicity basis closed form over a direction scan") {
    double worst = 0.0;
    for (int it = 0; it < 33; ++it)
        for (int ip = 0; ip < 40; ++ip) {
            const double th = kPi * it / 32.0 * 0.999, ph = 2.0 * kPi * ip / 40.0;
            const double c = std::cos(th), s = std::sin(th);
            const cplx e = std::polar(1.0, ph) / std::sqrt(2.0);
            const Vec3c plus{e * (c * std::cos(ph) - kI * std::sin(ph)), e * (c * std::sin(ph) + kI * std::cos(ph)),
                             -e * s};
            const Vec3c minus{kI * std::conj(plus[0]), kI * std::conj(plus[1]), kI * std::conj(plus[2])};
            const PolarizationPair p = helicity_basis(th, ph);
            worst = std::max({worst, testutil::cdiff(p.eps_plus, plus), testutil::cdiff(p.eps_minus, minus)});
        }
    CHECK(worst < 1e-14);
    for (double ph : {0.0, 0.9, 4.0}) {
        const PolarizationPair p = helicity_basis(kPi, ph);
        const Vec3c plus{-1.0, kI, 0.0};
        const Vec3c minus{1.0, kI, 0.0};
        CHECK(testutil::cdiff(p.eps_plus, std::polar(1.0, 2 * ph) / std::sqrt(2.0) * plus) < 1e-14);
        CHECK(testutil::cdiff(p.eps_minus, -kI * std::polar(1.0, -2 * ph) / std::sqrt(2.0) * minus) < 1e-14);
    }
}
