#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/config.hpp"
#include "lightam/dual.hpp"
#include "lightam/jet_field.hpp"

namespace lightam {

enum class OpKind {
    J,            // alpha . J
    L,            // alpha . L including the compensating longitudinal term
    Lbare,        // -i hbar alpha . (k ^ grad) alone; not transverse in general
    S,            // alpha . S
    K,            // beta . K(0)
    JdotKhat,     // khat . J
    KhatKhatJ,    // (alpha . khat)(khat . J)
    SalongAlpha,  // alphahat . S with alpha normalised
};

struct OperatorTag {
    OpKind kind = OpKind::J;
    Vec3d direction{0.0, 0.0, 1.0};

    static OperatorTag J(int j) { return {OpKind::J, unit(j)}; }
    static OperatorTag L(int j) { return {OpKind::L, unit(j)}; }
    static OperatorTag S(int j) { return {OpKind::S, unit(j)}; }
    static OperatorTag K(int j) { return {OpKind::K, unit(j)}; }
    static Vec3d unit(int j) {
        Vec3d e{0.0, 0.0, 0.0};
        e[j] = 1.0;
        return e;
    }
    [[nodiscard]] bool differential() const {
        return kind == OpKind::J || kind == OpKind::L || kind == OpKind::Lbare || kind == OpKind::K ||
               kind == OpKind::JdotKhat || kind == OpKind::KhatKhatJ;
    }
    [[nodiscard]] std::string label() const;
};

// Action of one operator at a single wave vector, given v and its gradient
// dv[j] = dv/dk_j. T = cplx for values, Dual1 to carry one more derivative.
template <class T>
Vec3<T> apply_node(const OperatorTag& op, const Vec3<T>& k, const Vec3<T>& v, const std::array<Vec3<T>, 3>& dv,
                   const PhysConfig& cfg) {
    const cplx ih = kI * cfg.hbar;
    const T k2 = dot(k, k);
    const T kn = sqrt(k2);
    const Vec3d& a = op.direction;
    auto orbital = [&](const Vec3d& alpha) {
        // (alpha ^ k) . grad v
        const Vec3<T> ak = cross(alpha, k);
        return (ak[0] * dv[0] + ak[1] * dv[1]) + ak[2] * dv[2];
    };
    auto total = [&](const Vec3d& alpha) { return (-ih) * orbital(alpha) + ih * cross(alpha, v); };
    switch (op.kind) {
        case OpKind::J:
            return total(a);
        case OpKind::Lbare:
            return (-ih) * orbital(a);
        case OpKind::L: {
            const T akv = dot(a, cross(k, v)) / k2;
            return (-ih) * orbital(a) - (ih * akv) * k;
        }
        case OpKind::S: {
            const Vec3<T> kh{k[0] / kn, k[1] / kn, k[2] / kn};
            return (ih * dot(a, kh)) * cross(kh, v);
        }
        case OpKind::SalongAlpha: {
            const double an = norm(a);
            const Vec3d u{a[0] / an, a[1] / an, a[2] / an};
            const Vec3<T> kh{k[0] / kn, k[1] / kn, k[2] / kn};
            return (ih * dot(u, kh)) * cross(kh, v);
        }
        case OpKind::K: {
            const T omega = cfg.c * kn;
            const T bk = dot(a, k) / kn;
            const Vec3<T> bdv = (a[0] * dv[0] + a[1] * dv[1]) + a[2] * dv[2];
            Vec3<T> w = omega * bdv + (0.5 * cfg.c * bk) * v;
            const T kw = dot(k, w) / k2;
            w = w - kw * k;
            return (ih / cfg.c) * w;
        }
        case OpKind::JdotKhat:
        case OpKind::KhatKhatJ: {
            Vec3<T> acc{T(0.0), T(0.0), T(0.0)};
            for (int j = 0; j < 3; ++j) acc = acc + (k[j] / kn) * total(OperatorTag::unit(j));
            if (op.kind == OpKind::JdotKhat) return acc;
            return (dot(a, k) / kn) * acc;
        }
    }
    return v;
}

// First-order jet of a vector field at a node.
struct FieldJet1 {
    Vec3c v{};
    std::array<Vec3c, 3> d1{};
};

// v and dv as order-1 jets, built from an order-2 field jet.
void lift_order1(const FieldJet& j, Vec3<Dual1>& v, std::array<Vec3<Dual1>, 3>& dv);

// Apply op to a field given by its order-2 jet; the result keeps its gradient.
FieldJet1 apply_jet(const OperatorTag& op, const Vec3d& k, const FieldJet& j, const PhysConfig& cfg);
Vec3c apply_value(const OperatorTag& op, const Vec3d& k, const FieldJet1& j, const PhysConfig& cfg);

// Grid-level actions.
SampledVectorField apply_operator(const OperatorTag& op, const JetField& v, const GridPtr& grid,
                                  const PhysConfig& cfg = {});
TransverseAmplitude apply_J(const Vec3d& alpha, const JetField& v, const GridPtr& grid, const PhysConfig& cfg = {});
// Bare -i hbar alpha.(k ^ grad) v, without the compensating k-term.
SampledVectorField apply_L(const Vec3d& alpha, const JetField& v, const GridPtr& grid, const PhysConfig& cfg = {});
TransverseAmplitude apply_L_projected(const Vec3d& alpha, const JetField& v, const GridPtr& grid,
                                      const PhysConfig& cfg = {});
TransverseAmplitude apply_S(const Vec3d& alpha, const TransverseAmplitude& v, const PhysConfig& cfg = {});

struct BoostResult {
    TransverseAmplitude delta;  // first-order change of v
    bool large_velocity = false;  // |beta|/c above 0.1
};
// delta v = (1/c^2) P sqrt(w) beta . grad (sqrt(w) v)
BoostResult apply_K(const Vec3d& beta, const JetField& v, const GridPtr& grid, const PhysConfig& cfg = {});
// Same variation as a field model (values only, built from v's jets).
JetField boost_variation(const Vec3d& beta, const JetField& v, const PhysConfig& cfg = {});

// R(alpha): rotation by |alpha| about alpha/|alpha|.
Mat3d rotation_matrix(const Vec3d& alpha);

// exp(-i alpha.J / hbar) v, i.e. v'(k) = R v(R^-1 k).
JetField rotate_finite(const Vec3d& alpha, const JetField& v);
// Grid version via spherical-harmonic resampling on each radial shell.
TransverseAmplitude rotate_finite(const Vec3d& alpha, const TransverseAmplitude& v, int lmax = -1);

// <v1, (AB - BA) v2>
cplx commutator_element(const OperatorTag& A, const OperatorTag& B, const JetField& v1, const JetField& v2,
                        const GridPtr& grid, const PhysConfig& cfg = {});
// <v1, O v2>
cplx matrix_element(const OperatorTag& op, const JetField& v1, const JetField& v2, const GridPtr& grid,
                    const PhysConfig& cfg = {});

// Commutator with second derivatives of v2 replaced by central differences of
// its first-derivative jets; looser accuracy.
cplx commutator_element_fd(const OperatorTag& A, const OperatorTag& B, const JetField& v1, const JetField& v2,
                           const GridPtr& grid, const PhysConfig& cfg = {}, double step = 1e-4);

struct AlgebraReport {
    std::string relation;
    cplx lhs{};
    cplx rhs{};
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    std::uint64_t seed_left = 0;
    std::uint64_t seed_right = 0;
    std::string components;
    std::array<int, 3> resolution{};
    int pairs = 0;
    bool pass = false;
    double threshold = 1e-9;
};

struct AlgebraOptions {
    std::uint64_t seed = 1;
    int pairs = 20;
    std::array<int, 3> resolution{32, 32, 32};
    std::vector<std::string> relations;  // empty = all
    double threshold = 1e-9;
    PhysConfig cfg{};
};

const std::vector<std::string>& algebra_relation_ids();

// Worst case over all component pairs and field pairs, one report per relation.
std::vector<AlgebraReport> verify_algebra(const AlgebraOptions& opt);

}  // namespace lightam
