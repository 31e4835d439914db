// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "lightam/fieldsynth.hpp"
#include "lightam/harmonics.hpp"
#include "lightam/modes.hpp"
#include "lightam/observables.hpp"
#include "lightam/operators.hpp"
#include "lightam/paraxial.hpp"
#include "lightam/polarization.hpp"

using namespace lightam;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double cdiff(const Vec3c& a, const Vec3c& b) { return std::sqrt(norm2(a - b)); }

double raw_diff(const TransverseAmplitude& a, const TransverseAmplitude& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.grid().weight(i) * norm2(a[i] - b[i]);
    return std::sqrt(s);
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vec3d direction(double th, double ph) {
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

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

Outcome algebra_suite() {
    AlgebraOptions opt;  // 20 pairs at (32, 32, 32), threshold 1e-9
    const auto t0 = std::chrono::steady_clock::now();
    const auto reps = verify_algebra(opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    std::string worst_id;
    bool ok = true;
    for (const auto& r : reps) {
        ok = ok && r.pass;
        if (r.rel_residual >= worst) {
            worst = r.rel_residual;
            worst_id = r.relation;
        }
    }
    ok = ok && reps.size() == algebra_relation_ids().size() && worst <= 1e-9 && secs <= 120.0;
    return {ok, fmt("%zu relations, %d pairs at 32^3: worst rel residual %.2e (%s), %.1f s (limits 1e-9, 120 s)",
                    reps.size(), opt.pairs, worst, worst_id.c_str(), secs)};
}

Outcome j_equals_l_plus_s() {
    const GridPtr g = make_sphere_grid(48, 24, 24, 0.0, 2.5);
    std::vector<JetField> fields;
    for (std::uint64_t s = 1; s <= 5; ++s) fields.push_back(random_field(s));
    fields.push_back(vsh_field({2, 3, -2}, GaussianShell{1.0, 0.15, 1.0}.normalized()));
    J3EigenSpec j;
    j.m = 2;
    j.poly_b = {0.4, -0.3};
    fields.push_back(j3_eigenfield(j));
    LGModeSpec lg;
    lg.m = 1;
    lg.p = 1;
    lg.variant = LGVariant::vector_beta;
    const VectorLGMode mode = vector_lg(lg);
    double worst = 0.0;
    auto check_on = [&](const JetField& f, const GridPtr& grid) {
        ComOptions co;
        co.estimate_error = false;
        const ObservableSet o = classical_com(f, grid, co);
        const double scale = std::max({norm(o.J), norm(o.L) + norm(o.S), 1e-3 * o.norm2});
        for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(o.J[a] - o.L[a] - o.S[a]) / scale);
        // operator level: J v = L v + S v at every node
        const TransverseAmplitude v = sample(f, grid);
        for (int a = 0; a < 3; ++a) {
            const Vec3d e = OperatorTag::unit(a);
            const TransverseAmplitude jv = apply_J(e, f, grid);
            const TransverseAmplitude lsv = added(apply_L_projected(e, f, grid), apply_S(e, v));
            const double s = std::max(std::sqrt(norm_squared(jv)), 1e-3 * std::sqrt(norm_squared(v)));
            worst = std::max(worst, raw_diff(jv, lsv) / s);
        }
    };
    for (const auto& f : fields) check_on(f, g);
    check_on(mode.field, make_grid(mode.natural_grid));
    return {worst <= 1e-9, fmt("%zu fields, COM and operator components: worst rel |J - L - S| %.2e (limit 1e-9)",
                               fields.size() + 1, worst)};
}

Outcome vsh_suite() {
    const GridPtr shell = make_shell_grid(1.0, 32, 32);
    std::vector<VSHIndex> idx;
    for (int a = 1; a <= 2; ++a)
        for (int l = 1; l <= 6; ++l)
            for (int m = -l; m <= l; ++m) idx.push_back({a, l, m});
    std::vector<std::vector<Vec3c>> tab(idx.size());
    for (std::size_t n = 0; n < idx.size(); ++n)
        for (std::size_t i = 0; i < shell->size(); ++i) tab[n].push_back(vsh(idx[n], shell->point(i)));
    double ortho = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < shell->size(); ++i) s += shell->weight(i) * cdot(tab[a][i], tab[b][i]);
            ortho = std::max(ortho, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    double parity = 0.0;
    for (const VSHIndex& id : idx)
        for (double th : {0.2, 0.9, 1.4, 2.2})
            for (double ph : {0.1, 2.0, 4.4}) {
                const double s = ((id.l + (id.a == 2 ? 1 : 0)) % 2) ? -1.0 : 1.0;
                const Vec3d k = direction(th, ph);
                parity = std::max(parity, cdiff(vsh(id, -1.0 * k), s * vsh(id, k)));
            }
    // the eigen residual is a nodewise property, so a coarse radial grid suffices
    const GridPtr g = make_sphere_grid(8, 12, 12, 0.5, 1.5);
    const GaussianShell r = GaussianShell{1.0, 0.15, 1.0}.normalized();
    double eig = 0.0;
    for (const VSHIndex& id : idx) {
        const JetField f = vsh_field(id, r);
        const TransverseAmplitude v = sample(f, g);
        const double nv = std::sqrt(norm_squared(v));
        eig = std::max(eig, raw_diff(apply_J({0, 0, 1}, f, g), scaled(v, double(id.m))) / nv);
        TransverseAmplitude jsq = scaled(v, 0.0);
        for (int j = 0; j < 3; ++j) {
            const JetField jv(std::make_shared<const JAction>(f, j));
            // J_j v vanishing to rounding (m = 0 and J3) contributes nothing to J^2
            if (std::sqrt(norm_squared(sample(jv, g, 1.0))) < 1e-13 * nv) continue;
            jsq = added(jsq, apply_J(OperatorTag::unit(j), jv, g));
        }
        eig = std::max(eig, raw_diff(jsq, scaled(v, double(id.l * (id.l + 1)))) / nv);
    }
    const bool ok = ortho <= 1e-9 && parity <= 1e-9 && eig <= 1e-9;
    return {ok, fmt("a in {1,2}, l <= 6: orthonormality %.2e, parity %.2e, J^2/J3 eigen residual %.2e (limit 1e-9)",
                    ortho, parity, eig)};
}

Outcome spin_bounds() {
    const GridPtr g = make_sphere_grid(32, 24, 24, 0.0, 2.5);
    double closest = 0.0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        const TransverseAmplitude v = sample(random_field(1000 + s), g);
        const double s3 = photon_expectation(v, Observable::S)[2];
        closest = std::max(closest, std::abs(s3));
    }
    double min_var = 1e300;
    int count = 0;
    for (int m = -3; m <= 3; ++m)
        for (int variant = 0; variant < 3; ++variant) {
            J3EigenSpec j;
            j.m = m;
            if (variant == 1) j.poly_b = {0.7};
            if (variant == 2) {
                j.poly_a = {0.2, 1.0};
                j.poly_b = {0.0, 0.5, 0.3};
            }
            min_var = std::min(min_var, spin_variance(sample(j3_eigenfield(j), g), {0, 0, 1}));
            ++count;
        }
    for (int l = 1; l <= 4; ++l)
        for (int a = 1; a <= 2; ++a) {
            min_var = std::min(min_var, spin_variance(sample(vsh_field({a, l, l - 1}, GaussianShell{1.0, 0.15, 1.0}), g),
                                                      {0, 0, 1}));
            ++count;
        }
    const bool ok = closest < 1.0 && min_var > 0.0;
    return {ok, fmt("100 random fields: max |<S3>|/hbar %.4f (< 1); %d J3 eigenfields: min Var(S3)/hbar^2 %.3e (> 0)",
                    closest, count, min_var)};
}

Outcome lg_propagation() {
    double waist = 0.0, gouy = 0.0, unit = 0.0;
    for (auto [m, p] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}, std::pair{2, 1}}) {
        LGModeSpec s;
        s.m = m;
        s.p = p;
        s.w = 1.0;
        const TransverseScalarField f0 = sample_lg(s, 256, 40.0 * s.w, 0.0);
        const double r0 = second_moment(f0);
        for (double zeta : {0.5, 1.0, 2.0}) {
            const TransverseScalarField fz = pwe_propagate(f0, zeta * s.rayleigh_range());
            unit = std::max(unit, std::abs(fz.norm2() / f0.norm2() - 1.0));
            waist = std::max(waist, std::abs(std::sqrt(second_moment(fz) / r0) / std::sqrt(1.0 + zeta * zeta) - 1.0));
            const double want = (2 * p + std::abs(m) + 1) * std::atan(zeta);
            gouy = std::max(gouy, std::abs(std::remainder(measured_gouy(s, fz) - want, 2.0 * kPi)));
        }
    }
    const bool ok = waist <= 1e-6 && gouy <= 1e-6 && unit <= 1e-12;
    return {ok, fmt("4 modes x zeta {0.5,1,2}: waist rel %.2e, Gouy %.2e rad (limits 1e-6), unitarity %.2e (limit 1e-12)",
                    waist, gouy, unit)};
}

Outcome paraxial_scaling() {
    std::vector<double> th, lf, gap;
    for (double wk : {10.0, 20.0, 40.0, 80.0}) {
        LGModeSpec s;
        s.w = wk;
        s.m = 1;
        s.variant = LGVariant::vector_alpha;
        VectorLGOptions vo;
        vo.band = 0.0;
        const VectorLGMode mode = vector_lg(s, vo);
        th.push_back(s.theta_eff());
        lf.push_back(mode.longitudinal_fraction);
        const GridPtr g = make_grid(mode.natural_grid);
        const PlanarGrid plane{64, 10.0 * s.w};
        const double z = s.rayleigh_range();
        const SampledSpaceField ex = planar_synthesis(mode.field, *g, plane, {z}, 0.0, false);
        const SampledSpaceField px = planar_synthesis(mode.field, *g, plane, {z}, 0.0, true);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ex.values.size(); ++i) {
            num += norm2(ex.values[i] - px.values[i]);
            den += norm2(ex.values[i]);
        }
        gap.push_back(std::sqrt(num / den));
    }
    const double s1 = loglog_slope(th, lf), s2 = loglog_slope(th, gap);
    const bool ok = std::abs(s1 - 1.0) <= 0.1 && std::abs(s2 - 2.0) <= 0.2;
    return {ok, fmt("wk {10,20,40,80}: longitudinal fraction slope %.3f (1 +- 0.1), paraxial vs exact gap slope %.3f "
                    "(2 +- 0.2)",
                    s1, s2)};
}

Outcome cross_picture() {
    PhysConfig cfg;
    cfg.c = 1.5;
    cfg.hbar = 0.8;
    const BoxSpec box{48, 60.0};
    const GridPtr g = make_sphere_grid(48, 24, 24, 0.0, 2.5);
    J3EigenSpec j;
    j.m = 2;
    j.poly_b = {0.5, 0.2};
    const std::vector<std::pair<std::string, JetField>> fields{
        {"random", random_field(11)},
        {"vsh", vsh_field({2, 2, 1}, GaussianShell{1.0, 0.15, 1.0}.normalized())},
        {"j3", j3_eigenfield(j)}};
    double worst = 0.0, drift = 0.0;
    for (const auto& [name, v] : fields) {
        std::vector<ObservableSet> xs;
        std::vector<double> ns;
        for (double t : {0.0, 2.0, 5.0}) {
            SynthesisOptions so;
            so.cfg = cfg;
            so.t = t;
            const SampledSpaceField A = synthesize(v, box, Quantity::A, so);
            xs.push_back(xspace_com(synthesize(v, box, Quantity::E, so), A));
            ns.push_back(xspace_norm(A));
        }
        ComOptions co;
        co.cfg = cfg;
        co.estimate_error = false;
        const ObservableSet k = classical_com(v, g, co);
        const ObservableSet& x = xs[0];
        const double js = std::max(1.0, norm(k.J)) * k.norm2, ks = std::max(1.0, norm(k.K)) * k.P0;
        worst = std::max({worst, std::abs(ns[0] / k.norm2 - 1.0), std::abs(x.P0 / k.P0 - 1.0),
                          norm(x.P - k.P) / (k.P0 / cfg.c), norm(x.J - k.J) / js, norm(x.L - k.L) / js,
                          norm(x.S - k.S) / js, norm(x.K - k.K) / ks});
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double dt = xs[i].t - xs[0].t;
            drift = std::max({drift, std::abs(ns[i] / ns[0] - 1.0), std::abs(xs[i].P0 / xs[0].P0 - 1.0),
                              norm(xs[i].P - xs[0].P) / xs[0].P0, norm(xs[i].J - xs[0].J) / xs[0].P0,
                              norm(xs[i].K - (xs[0].K + (cfg.c * dt) * xs[0].P)) / (xs[0].P0 * (1.0 + dt))});
        }
    }
    const bool ok = worst <= 1e-3 && drift <= 1e-6;
    return {ok, fmt("3 field types, box 48^3 side 60: x vs k worst rel %.2e (limit 1e-3); t in {0,2,5} drift %.2e "
                    "(limit 1e-6)",
                    worst, drift)};
}

Outcome boost_norm() {
    const GridPtr g = make_sphere_grid(48, 24, 24, 0.0, 2.5);
    const JetField f = random_field(17);
    const TransverseAmplitude v = sample(f, g);
    const double n0 = norm_squared(v);
    const Vec3d dir{0.36, -0.48, 0.8};
    std::vector<double> b, r;
    double first = 0.0;
    for (double beta : {1e-2, 3e-2, 1e-1}) {
        const BoostResult br = apply_K(beta * dir, f, g);
        first = std::max(first, std::abs(2.0 * inner_product(v, br.delta).real()) / (n0 * beta));
        b.push_back(beta);
        r.push_back(std::abs(norm_squared(added(v, br.delta)) / n0 - 1.0));
    }
    const double s = loglog_slope(b, r);
    return {std::abs(s - 2.0) <= 0.1,
            fmt("|beta|/c {1e-2,3e-2,1e-1}: norm residual slope %.4f (2 +- 0.1), first-order term %.1e", s, first)};
}

Outcome helicity_basis_suite() {
    double worst = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 128; ++j) {
            const double th = i * kPi / 64.0, ph = 2.0 * kPi * j / 128.0;  // theta = pi is excluded
            const PolarizationPair e = helicity_basis(th, ph);
            const Vec3d kh = direction(th, ph);
            const Vec3c khc = to_complex(kh);
            worst = std::max({worst, std::abs(cdot(e.eps_plus, e.eps_plus) - 1.0),
                              std::abs(cdot(e.eps_minus, e.eps_minus) - 1.0), std::abs(cdot(e.eps_plus, e.eps_minus)),
                              std::abs(dot(khc, e.eps_plus)), std::abs(dot(khc, e.eps_minus)),
                              cdiff(e.eps_minus, kI * conj(e.eps_plus)), cdiff(cross(khc, e.eps_plus), -kI * e.eps_plus),
                              cdiff(cross(khc, e.eps_minus), kI * e.eps_minus)});
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) {
                    const cplx p = e.eps_plus[a] * std::conj(e.eps_plus[c]) +
                                   e.eps_minus[a] * std::conj(e.eps_minus[c]) + kh[a] * kh[c];
                    worst = std::max(worst, std::abs(p - (a == c ? 1.0 : 0.0)));
                }
        }
    // south pole: e+ = e^{2i phi}/sqrt2 (-1, i, 0), e- = -i e^{-2i phi}/sqrt2 (1, i, 0)
    double pole = 0.0;
    bool flagged = true;
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < 128; ++j) {
        const double ph = 2.0 * kPi * j / 128.0;
        const PolarizationPair e = helicity_basis(kPi, ph);
        flagged = flagged && e.south_pole;
        const cplx up = std::polar(r, 2.0 * ph), dn = -kI * std::polar(r, -2.0 * ph);
        pole = std::max({pole, cdiff(e.eps_plus, {-up, kI * up, 0.0}), cdiff(e.eps_minus, {dn, kI * dn, 0.0})});
    }
    const bool ok = worst <= 1e-12 && pole <= 1e-15 && flagged;
    return {ok, fmt("64x128 scan: worst invariant %.2e (limit 1e-12); south-pole limits %.1e from the displayed values",
                    worst, pole)};
}

}  // namespace

// Optional arguments select criteria by id, e.g. `acceptance A3 A6`.
int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"A1 algebra suite", algebra_suite},
        {"A2 J = L + S", j_equals_l_plus_s},
        {"A3 vector spherical harmonics", vsh_suite},
        {"A4 spin bounds and variance", spin_bounds},
        {"A5 LG propagation", lg_propagation},
        {"A6 paraxial scaling", paraxial_scaling},
        {"A7 cross-picture consistency", cross_picture},
        {"A8 boost norm invariance", boost_norm},
        {"A9 helicity basis", helicity_basis_suite},
    };
    const std::vector<std::string> only(argv + 1, argv + argc);
    int failed = 0, ran = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name.substr(0, name.find(' '))) == only.end()) continue;
        ++ran;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
