#include "lightam/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lightam/harmonics.hpp"
#include "lightam/modes.hpp"
#include "lightam/parallel.hpp"

namespace lightam {

std::string OperatorTag::label() const {
    const char* name = "?";
    switch (kind) {
        case OpKind::J: name = "J"; break;
        case OpKind::L: name = "L"; break;
        case OpKind::Lbare: name = "Lbare"; break;
        case OpKind::S: name = "S"; break;
        case OpKind::K: name = "K"; break;
        case OpKind::JdotKhat: return "khat.J";
        case OpKind::KhatKhatJ: name = "khat(khat.J)"; break;
        case OpKind::SalongAlpha: name = "S_alphahat"; break;
    }
    std::ostringstream os;
    os << name << "[" << direction[0] << "," << direction[1] << "," << direction[2] << "]";
    return os.str();
}

void lift_order1(const FieldJet& j, Vec3<Dual1>& v, std::array<Vec3<Dual1>, 3>& dv) {
    for (int a = 0; a < 3; ++a) {
        v[a].v = j.v[a];
        for (int l = 0; l < 3; ++l) v[a].g[l] = j.d1[l][a];
        for (int i = 0; i < 3; ++i) {
            dv[i][a].v = j.d1[i][a];
            for (int l = 0; l < 3; ++l) dv[i][a].g[l] = j.d2[i][l][a];
        }
    }
}

FieldJet1 apply_jet(const OperatorTag& op, const Vec3d& k, const FieldJet& j, const PhysConfig& cfg) {
    Vec3<Dual1> v;
    std::array<Vec3<Dual1>, 3> dv;
    lift_order1(j, v, dv);
    const Vec3<Dual1> w = apply_node(op, seed_wavevector<Dual1>(k), v, dv, cfg);
    FieldJet1 out;
    for (int a = 0; a < 3; ++a) {
        out.v[a] = w[a].v;
        for (int l = 0; l < 3; ++l) out.d1[l][a] = w[a].g[l];
    }
    return out;
}

Vec3c apply_value(const OperatorTag& op, const Vec3d& k, const FieldJet1& j, const PhysConfig& cfg) {
    return apply_node(op, seed_wavevector<cplx>(k), j.v, j.d1, cfg);
}

namespace {
FieldJet1 first_order(const FieldJet& j) { return FieldJet1{j.v, j.d1}; }
}  // namespace

SampledVectorField apply_operator(const OperatorTag& op, const JetField& v, const GridPtr& grid,
                                  const PhysConfig& cfg) {
    cfg.validate();
    if (op.differential() && v.order() < 1)
        throw std::invalid_argument("apply_operator: field provides no derivatives");
    SampledVectorField out{grid, std::vector<Vec3c>(grid->size())};
    parallel_for(grid->size(), [&](std::size_t i) {
        const Vec3d& k = grid->point(i);
        if (op.differential()) {
            out.values[i] = apply_value(op, k, first_order(v.jet(k)), cfg);
        } else {
            out.values[i] = apply_value(op, k, FieldJet1{v.value(k), {}}, cfg);
        }
    });
    return out;
}

namespace {
// The actions are transverse analytically. Nodes where the result nearly
// cancels carry only roundoff, so the check is against the field scale
// hbar |alpha| max|v| rather than node by node; the residue is then removed.
TransverseAmplitude checked_transverse(SampledVectorField w, const JetField& v, const Vec3d& alpha,
                                       const PhysConfig& cfg, const char* what) {
    const KGrid& g = *w.grid;
    double vmax = 0.0, wmax = 0.0, lmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3d& k = g.point(i);
        vmax = std::max(vmax, std::sqrt(norm2(v.value(k))));
        wmax = std::max(wmax, std::sqrt(norm2(w.values[i])));
        lmax = std::max(lmax, std::abs(dot(to_complex(k), w.values[i])) / norm(k));
    }
    const double scale = wmax + cfg.hbar * norm(alpha) * vmax;
    if (lmax > 1e-9 * scale) {
        std::ostringstream os;
        os << what << ": result not transverse (" << lmax / scale << " of the field scale)";
        throw TransversalityError(os.str());
    }
    return transverse_project(w);
}
}  // namespace

TransverseAmplitude apply_J(const Vec3d& alpha, const JetField& v, const GridPtr& grid, const PhysConfig& cfg) {
    return checked_transverse(apply_operator({OpKind::J, alpha}, v, grid, cfg), v, alpha, cfg, "apply_J");
}

SampledVectorField apply_L(const Vec3d& alpha, const JetField& v, const GridPtr& grid, const PhysConfig& cfg) {
    return apply_operator({OpKind::Lbare, alpha}, v, grid, cfg);
}

TransverseAmplitude apply_L_projected(const Vec3d& alpha, const JetField& v, const GridPtr& grid,
                                      const PhysConfig& cfg) {
    return checked_transverse(apply_operator({OpKind::L, alpha}, v, grid, cfg), v, alpha, cfg, "apply_L_projected");
}

TransverseAmplitude apply_S(const Vec3d& alpha, const TransverseAmplitude& v, const PhysConfig& cfg) {
    cfg.validate();
    const OperatorTag op{OpKind::S, alpha};
    std::vector<Vec3c> out(v.size());
    parallel_for(v.size(), [&](std::size_t i) {
        out[i] = apply_value(op, v.grid().point(i), FieldJet1{v[i], {}}, cfg);
    });
    return TransverseAmplitude(v.grid_ptr(), std::move(out), 1e-9);
}

namespace {

class BoostVariationModel final : public FieldModel {
public:
    BoostVariationModel(JetField v, const Vec3d& beta, const PhysConfig& cfg) : v_(std::move(v)), beta_(beta), cfg_(cfg) {}
    [[nodiscard]] Vec3c value(const Vec3d& k) const override {
        const FieldJet j = v_.jet(k);
        const Vec3c kv = apply_value({OpKind::K, beta_}, k, FieldJet1{j.v, j.d1}, cfg_);
        return (1.0 / (kI * cfg_.hbar * cfg_.c)) * kv;
    }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override {
        const FieldJet j = v_.jet(k);
        const FieldJet1 kv = apply_jet({OpKind::K, beta_}, k, j, cfg_);
        const cplx s = 1.0 / (kI * cfg_.hbar * cfg_.c);
        FieldJet out;
        out.v = s * kv.v;
        for (int l = 0; l < 3; ++l) out.d1[l] = s * kv.d1[l];
        return out;
    }
    [[nodiscard]] int order() const override { return std::min(1, v_.order() - 1); }
    [[nodiscard]] std::string name() const override { return "boost_variation(" + v_.name() + ")"; }

private:
    JetField v_;
    Vec3d beta_;
    PhysConfig cfg_;
};

}  // namespace

JetField boost_variation(const Vec3d& beta, const JetField& v, const PhysConfig& cfg) {
    cfg.validate();
    return JetField(std::make_shared<const BoostVariationModel>(v, beta, cfg));
}

BoostResult apply_K(const Vec3d& beta, const JetField& v, const GridPtr& grid, const PhysConfig& cfg) {
    cfg.validate();
    SampledVectorField w = apply_operator({OpKind::K, beta}, v, grid, cfg);
    const cplx s = 1.0 / (kI * cfg.hbar * cfg.c);
    for (auto& x : w.values) x = s * x;
    BoostResult r{TransverseAmplitude(grid, std::move(w.values), 1e-9), norm(beta) / cfg.c > 0.1};
    return r;
}

Mat3d rotation_matrix(const Vec3d& alpha) {
    const double a = norm(alpha);
    Mat3d R{Vec3d{1.0, 0.0, 0.0}, Vec3d{0.0, 1.0, 0.0}, Vec3d{0.0, 0.0, 1.0}};
    if (a == 0.0) return R;
    const Vec3d n{alpha[0] / a, alpha[1] / a, alpha[2] / a};
    const double c = std::cos(a), s = std::sin(a);
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            double x = (j == l ? c : 0.0) + n[j] * n[l] * (1.0 - c);
            for (int m = 0; m < 3; ++m) x -= levi_civita(j, l, m) * n[m] * s;
            R[j][l] = x;
        }
    return R;
}

JetField rotate_finite(const Vec3d& alpha, const JetField& v) { return rotated(v, rotation_matrix(alpha)); }

TransverseAmplitude rotate_finite(const Vec3d& alpha, const TransverseAmplitude& v, int lmax) {
    const KGrid& g = v.grid();
    if (!g.full_sphere()) throw std::invalid_argument("rotate_finite: resampling needs a full-sphere grid");
    const int band = g.band_limit();
    if (lmax < 0) lmax = band;
    if (lmax > band) {
        std::ostringstream os;
        os << "rotate_finite: requested degree " << lmax << " exceeds the grid band limit " << band;
        throw std::invalid_argument(os.str());
    }
    const Mat3d R = rotation_matrix(alpha);
    const Mat3d Rt = transpose(R);
    const int nt = g.ntheta(), np = g.nphi();
    const std::size_t nlm = static_cast<std::size_t>((lmax + 1) * (lmax + 1));
    const std::size_t shell = static_cast<std::size_t>(nt) * np;

    // Harmonic tables at the source nodes and at the rotated directions.
    std::vector<std::vector<cplx>> ysrc(shell), ydst(shell);
    parallel_for(shell, [&](std::size_t s) {
        const Vec3d& k = g.point(s);  // first radial shell carries all directions
        const Vec3d kh = (1.0 / norm(k)) * k;
        spherical_harmonics<cplx>(to_complex(kh), lmax, ysrc[s]);
        spherical_harmonics<cplx>(to_complex(matvec(Rt, kh)), lmax, ydst[s]);
    });

    std::vector<Vec3c> out(v.size());
    double worst = 0.0, scale = 0.0;
    for (int ik = 0; ik < g.nk(); ++ik) {
        std::array<std::vector<cplx>, 3> coef;
        for (auto& c : coef) c.assign(nlm, 0.0);
        for (std::size_t s = 0; s < shell; ++s) {
            int jk, it, ip;
            g.unravel(s, jk, it, ip);
            const double w = g.polar().weights[it] * g.dphi();
            const Vec3c& f = v[static_cast<std::size_t>(ik) * shell + s];
            for (std::size_t q = 0; q < nlm; ++q) {
                const cplx yc = std::conj(ysrc[s][q]) * w;
                for (int a = 0; a < 3; ++a) coef[a][q] += yc * f[a];
            }
        }
        for (std::size_t s = 0; s < shell; ++s) {
            const std::size_t i = static_cast<std::size_t>(ik) * shell + s;
            Vec3c back{}, rot{};
            for (std::size_t q = 0; q < nlm; ++q)
                for (int a = 0; a < 3; ++a) {
                    back[a] += coef[a][q] * ysrc[s][q];
                    rot[a] += coef[a][q] * ydst[s][q];
                }
            worst = std::max(worst, std::sqrt(norm2(back - v[i])));
            scale = std::max(scale, std::sqrt(norm2(v[i])));
            out[i] = project_transverse(g.point(i), matvec(R, rot));
        }
    }
    if (worst > 1e-8 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "rotate_finite: field has angular content beyond degree " << lmax << " (reconstruction error "
           << worst / scale << ")";
        throw std::domain_error(os.str());
    }
    return TransverseAmplitude(v.grid_ptr(), std::move(out), 1e-9);
}

cplx matrix_element(const OperatorTag& op, const JetField& v1, const JetField& v2, const GridPtr& grid,
                    const PhysConfig& cfg) {
    cfg.validate();
    const KGrid& g = *grid;
    return parallel_sum<cplx>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        const Vec3c a = v1.value(k);
        const Vec3c b = apply_value(op, k, first_order(v2.jet(k)), cfg);
        return g.weight(i) * cdot(a, b);
    });
}

cplx commutator_element(const OperatorTag& A, const OperatorTag& B, const JetField& v1, const JetField& v2,
                        const GridPtr& grid, const PhysConfig& cfg) {
    cfg.validate();
    if ((A.differential() || B.differential()) && v2.order() < 2)
        return commutator_element_fd(A, B, v1, v2, grid, cfg);
    const KGrid& g = *grid;
    return parallel_sum<cplx>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        const FieldJet j = v2.jet(k);
        const Vec3c ab = apply_value(A, k, apply_jet(B, k, j, cfg), cfg);
        const Vec3c ba = apply_value(B, k, apply_jet(A, k, j, cfg), cfg);
        return g.weight(i) * cdot(v1.value(k), ab - ba);
    });
}

cplx commutator_element_fd(const OperatorTag& A, const OperatorTag& B, const JetField& v1, const JetField& v2,
                           const GridPtr& grid, const PhysConfig& cfg, double step) {
    cfg.validate();
    const KGrid& g = *grid;
    return parallel_sum<cplx>(g.size(), [&](std::size_t i) {
        const Vec3d& k = g.point(i);
        FieldJet j = v2.jet(k);
        const double h = step * norm(k);
        for (int a = 0; a < 3; ++a) {
            Vec3d kp = k, km = k;
            kp[a] += h;
            km[a] -= h;
            const FieldJet jp = v2.jet(kp), jm = v2.jet(km);
            for (int l = 0; l < 3; ++l) j.d2[a][l] = (1.0 / (2.0 * h)) * (jp.d1[l] - jm.d1[l]);
        }
        for (int a = 0; a < 3; ++a)
            for (int l = a + 1; l < 3; ++l) {
                const Vec3c s = 0.5 * (j.d2[a][l] + j.d2[l][a]);
                j.d2[a][l] = s;
                j.d2[l][a] = s;
            }
        const Vec3c ab = apply_value(A, k, apply_jet(B, k, j, cfg), cfg);
        const Vec3c ba = apply_value(B, k, apply_jet(A, k, j, cfg), cfg);
        return g.weight(i) * cdot(v1.value(k), ab - ba);
    });
}

// ---------------------------------------------------------------------------
// Relation suite

namespace {

struct CheckAcc {
    cplx lhs{};
    cplx rhs{};
    double na = 0.0;
    double nb = 0.0;
    CheckAcc operator+(const CheckAcc& o) const { return {lhs + o.lhs, rhs + o.rhs, na + o.na, nb + o.nb}; }
};

struct CheckDef {
    std::string relation;
    std::string components;
};

enum Gen { GJ = 0, GK = 1, GL = 2, GS = 3 };

const char* gen_name(int g) {
    static const char* names[] = {"J", "K", "L", "S"};
    return names[g];
}

OperatorTag gen_tag(int g, int j) {
    switch (g) {
        case GJ: return OperatorTag::J(j);
        case GK: return OperatorTag::K(j);
        case GL: return OperatorTag::L(j);
        default: return OperatorTag::S(j);
    }
}

struct CommutatorRel {
    const char* id;
    int a, b;  // generators in [A_j, B_l]
    // rhs = coeff * ih * eps_jlm (sum_r sign_r G_r)_m
    double coeff;
    std::vector<std::pair<int, double>> rhs;
};

const std::vector<CommutatorRel>& commutator_relations() {
    static const std::vector<CommutatorRel> rels = {
        {"[J,J]", GJ, GJ, 1.0, {{GJ, 1.0}}},
        {"[J,K]", GJ, GK, 1.0, {{GK, 1.0}}},
        {"[K,K]", GK, GK, -1.0, {{GJ, 1.0}}},
        {"[L,L]", GL, GL, 1.0, {{GL, 1.0}, {GS, -1.0}}},
        {"[S,S]", GS, GS, 1.0, {}},
        {"[S,L]", GS, GL, 1.0, {{GS, 1.0}}},
        {"[J,L]", GJ, GL, 1.0, {{GL, 1.0}}},
        {"[J,S]", GJ, GS, 1.0, {{GS, 1.0}}},
    };
    return rels;
}

}  // namespace

const std::vector<std::string>& algebra_relation_ids() {
    static const std::vector<std::string> ids = {"[J,J]", "[J,K]", "[K,K]", "[L,L]", "[S,S]", "[S,L]",
                                                 "[J,L]", "[J,S]", "S=k(k.J)", "S.S", "J=L+S", "E3"};
    return ids;
}

std::vector<AlgebraReport> verify_algebra(const AlgebraOptions& opt) {
    opt.cfg.validate();
    if (opt.pairs < 1) throw std::invalid_argument("verify_algebra: need at least one field pair");
    std::vector<std::string> wanted = opt.relations.empty() ? algebra_relation_ids() : opt.relations;
    for (const auto& r : wanted)
        if (std::find(algebra_relation_ids().begin(), algebra_relation_ids().end(), r) == algebra_relation_ids().end())
            throw std::invalid_argument("verify_algebra: unknown relation '" + r + "'");
    auto want = [&](const std::string& id) {
        if (std::find(wanted.begin(), wanted.end(), id) != wanted.end()) return true;
        if (std::find(wanted.begin(), wanted.end(), std::string("E3")) != wanted.end())
            return id == "[J,J]" || id == "[J,S]" || id == "[S,S]";
        return false;
    };

    const PhysConfig& cfg = opt.cfg;
    const cplx ih = kI * cfg.hbar;
    GridSpec gs;
    gs.nk = opt.resolution[0];
    gs.ntheta = opt.resolution[1];
    gs.nphi = opt.resolution[2];
    gs.k_lo = 0.0;
    gs.k_hi = 2.0;
    const GridPtr grid = make_grid(gs);
    const KGrid& g = *grid;

    // Fixed list of checks.
    std::vector<CheckDef> defs;
    std::vector<std::array<int, 3>> comm;  // (relation index, j, l)
    const auto& rels = commutator_relations();
    for (std::size_t r = 0; r < rels.size(); ++r) {
        if (!want(rels[r].id)) continue;
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                comm.push_back({static_cast<int>(r), j, l});
                defs.push_back({rels[r].id, std::string(gen_name(rels[r].a)) + std::to_string(j + 1) + "," +
                                                gen_name(rels[r].b) + std::to_string(l + 1)});
            }
    }
    const bool do_skj = want("S=k(k.J)"), do_ss = want("S.S"), do_jls = want("J=L+S");
    if (do_skj)
        for (int j = 0; j < 3; ++j) defs.push_back({"S=k(k.J)", "S" + std::to_string(j + 1)});
    if (do_ss) defs.push_back({"S.S", "sum_j S_j S_j"});
    if (do_jls)
        for (int j = 0; j < 3; ++j) defs.push_back({"J=L+S", "J" + std::to_string(j + 1)});
    const std::size_t nchecks = defs.size();

    std::map<std::string, AlgebraReport> worst;
    for (int p = 0; p < opt.pairs; ++p) {
        const std::uint64_t s1 = opt.seed * 1000003ULL + 2ULL * p;
        const std::uint64_t s2 = s1 + 1;
        const JetField v1 = random_field(s1);
        const JetField v2 = random_field(s2);

        const std::size_t nb = (g.size() + kReduceBlock - 1) / kReduceBlock;
        std::vector<std::vector<CheckAcc>> parts(nb, std::vector<CheckAcc>(nchecks));
        std::vector<double> v1norm_parts(nb, 0.0);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
            const std::size_t hi = std::min(g.size(), lo + kReduceBlock);
            auto& acc = parts[b];
            for (std::size_t i = lo; i < hi; ++i) {
                const Vec3d& k = g.point(i);
                const double w = g.weight(i);
                const Vec3c u = v1.value(k);
                const FieldJet j2 = v2.jet(k);
                v1norm_parts[b] += w * norm2(u);
                std::array<std::array<FieldJet1, 3>, 4> G;
                for (int gi = 0; gi < 4; ++gi)
                    for (int c = 0; c < 3; ++c) G[gi][c] = apply_jet(gen_tag(gi, c), k, j2, cfg);
                std::size_t ci = 0;
                auto add = [&](const Vec3c& a, const Vec3c& bvec, const Vec3c& lhs, const Vec3c& rhs) {
                    acc[ci].lhs += w * cdot(u, lhs);
                    acc[ci].rhs += w * cdot(u, rhs);
                    acc[ci].na += w * norm2(a);
                    acc[ci].nb += w * norm2(bvec);
                    ++ci;
                };
                for (const auto& c : comm) {
                    const CommutatorRel& rel = rels[c[0]];
                    const int jj = c[1], ll = c[2];
                    const Vec3c ab = apply_value(gen_tag(rel.a, jj), k, G[rel.b][ll], cfg);
                    const Vec3c ba = apply_value(gen_tag(rel.b, ll), k, G[rel.a][jj], cfg);
                    Vec3c rhs{};
                    for (int m = 0; m < 3; ++m) {
                        const int e = levi_civita(jj, ll, m);
                        if (e == 0) continue;
                        for (const auto& [gen, sgn] : rel.rhs) rhs += (rel.coeff * sgn * e) * G[gen][m].v;
                    }
                    add(ab, ba, ab - ba, ih * rhs);
                }
                if (do_skj)
                    for (int c = 0; c < 3; ++c) {
                        const Vec3c r = apply_value({OpKind::KhatKhatJ, OperatorTag::unit(c)}, k,
                                                    FieldJet1{j2.v, j2.d1}, cfg);
                        add(G[GS][c].v, r, G[GS][c].v, r);
                    }
                if (do_ss) {
                    Vec3c s2v{};
                    for (int c = 0; c < 3; ++c) s2v += apply_value(OperatorTag::S(c), k, G[GS][c], cfg);
                    const Vec3c r = (cfg.hbar * cfg.hbar) * j2.v;
                    add(s2v, r, s2v, r);
                }
                if (do_jls)
                    for (int c = 0; c < 3; ++c) {
                        const Vec3c r = G[GL][c].v + G[GS][c].v;
                        add(G[GJ][c].v, r, G[GJ][c].v, r);
                    }
            }
        }
        std::vector<double> n1p = v1norm_parts;
        const double v1n = std::sqrt(pairwise_combine(n1p));
        for (std::size_t c = 0; c < nchecks; ++c) {
            std::vector<CheckAcc> col(nb);
            for (std::size_t b = 0; b < nb; ++b) col[b] = parts[b][c];
            const CheckAcc tot = pairwise_combine(col);
            AlgebraReport rep;
            rep.relation = defs[c].relation;
            rep.components = defs[c].components;
            rep.lhs = tot.lhs;
            rep.rhs = tot.rhs;
            rep.abs_residual = std::abs(tot.lhs - tot.rhs);
            const double scale = v1n * (std::sqrt(tot.na) + std::sqrt(tot.nb));
            rep.rel_residual = scale > 0.0 ? rep.abs_residual / scale : rep.abs_residual;
            rep.seed_left = s1;
            rep.seed_right = s2;
            rep.resolution = opt.resolution;
            rep.threshold = opt.threshold;
            auto it = worst.find(rep.relation);
            if (it == worst.end() || rep.rel_residual > it->second.rel_residual) worst[rep.relation] = rep;
        }
    }

    std::vector<AlgebraReport> out;
    for (const auto& id : algebra_relation_ids()) {
        if (id == "E3") {
            if (std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
            AlgebraReport e3;
            bool first = true;
            for (const char* part : {"[J,J]", "[J,S]", "[S,S]"}) {
                const auto it = worst.find(part);
                if (it == worst.end()) continue;
                if (first || it->second.rel_residual > e3.rel_residual) e3 = it->second;
                first = false;
            }
            e3.components = e3.relation + ":" + e3.components;
            e3.relation = "E3";
            out.push_back(e3);
            continue;
        }
        if (std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
        out.push_back(worst.at(id));
    }
    for (auto& r : out) {
        r.pairs = opt.pairs;
        r.pass = r.rel_residual <= opt.threshold;
    }
    return out;
}

}  // namespace lightam
