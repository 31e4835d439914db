#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lightam/amplitude.hpp"
#include "lightam/dual.hpp"
#include "lightam/grid.hpp"

namespace lightam {

// Value, gradient d1[j] = dv/dk_j and Hessian d2[j][l] at one wave vector.
struct FieldJet {
    Vec3c v{};
    std::array<Vec3c, 3> d1{};
    std::array<std::array<Vec3c, 3>, 3> d2{};
};

class FieldModel {
public:
    virtual ~FieldModel() = default;
    [[nodiscard]] virtual Vec3c value(const Vec3d& k) const = 0;
    [[nodiscard]] virtual FieldJet jet(const Vec3d& k) const = 0;
    // Highest derivative order available from jet(): 2 for analytic models,
    // lower for derived models built from another field's jets.
    [[nodiscard]] virtual int order() const { return 2; }
    [[nodiscard]] virtual std::string name() const { return "field"; }
};

// Type-erased analytic amplitude with exact derivatives.
class JetField {
public:
    JetField() = default;
    explicit JetField(std::shared_ptr<const FieldModel> model) : model_(std::move(model)) {}

    [[nodiscard]] Vec3c value(const Vec3d& k) const { return model_->value(k); }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const { return model_->jet(k); }
    [[nodiscard]] int order() const { return model_->order(); }
    [[nodiscard]] std::string name() const { return model_->name(); }
    [[nodiscard]] bool valid() const { return static_cast<bool>(model_); }
    [[nodiscard]] const std::shared_ptr<const FieldModel>& model() const { return model_; }

private:
    std::shared_ptr<const FieldModel> model_;
};

inline Vec3<Dual2> lift(const FieldJet& j) {
    Vec3<Dual2> out;
    for (int a = 0; a < 3; ++a) {
        out[a].v = j.v[a];
        for (int i = 0; i < 3; ++i) out[a].g[i] = j.d1[i][a];
        for (int i = 0; i < 3; ++i)
            for (int l = i; l < 3; ++l) out[a].h[sym_index(i, l)] = j.d2[i][l][a];
    }
    return out;
}

inline FieldJet lower(const Vec3<Dual2>& d) {
    FieldJet j;
    for (int a = 0; a < 3; ++a) {
        j.v[a] = d[a].v;
        for (int i = 0; i < 3; ++i) j.d1[i][a] = d[a].g[i];
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) j.d2[i][l][a] = d[a].hess(i, l);
    }
    return j;
}

// Wraps a functor F with `template <class T> Vec3<T> operator()(const Vec3<T>& k) const`.
template <class F>
class AnalyticModel final : public FieldModel {
public:
    AnalyticModel(F f, std::string name) : f_(std::move(f)), name_(std::move(name)) {}
    [[nodiscard]] Vec3c value(const Vec3d& k) const override { return f_(seed_wavevector<cplx>(k)); }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override { return lower(f_(seed_wavevector<Dual2>(k))); }
    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] const F& functor() const { return f_; }

private:
    F f_;
    std::string name_;
};

template <class F>
JetField make_jet_field(F f, std::string name) {
    return JetField(std::make_shared<const AnalyticModel<F>>(std::move(f), std::move(name)));
}

// Pointwise transform g(k, v) applied to another field; G provides
// `template <class T> Vec3<T> operator()(const Vec3<T>& k, const Vec3<T>& v) const`.
template <class G>
class MappedModel final : public FieldModel {
public:
    MappedModel(JetField inner, G g, std::string name) : inner_(std::move(inner)), g_(std::move(g)), name_(std::move(name)) {}
    [[nodiscard]] Vec3c value(const Vec3d& k) const override {
        return g_(seed_wavevector<cplx>(k), inner_.value(k));
    }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override {
        return lower(g_(seed_wavevector<Dual2>(k), lift(inner_.jet(k))));
    }
    [[nodiscard]] int order() const override { return inner_.order(); }
    [[nodiscard]] std::string name() const override { return name_; }

private:
    JetField inner_;
    G g_;
    std::string name_;
};

template <class G>
JetField map_field(JetField inner, G g, std::string name) {
    return JetField(std::make_shared<const MappedModel<G>>(std::move(inner), std::move(g), std::move(name)));
}

// sum_i c_i f_i
JetField linear_combination(std::vector<std::pair<cplx, JetField>> terms);
JetField operator+(const JetField& a, const JetField& b);
JetField operator*(cplx s, const JetField& f);

// khat-orthogonal part of a field, applied inside the jet.
JetField projected(const JetField& f);

// v'(k) = R v(R^T k) for a rotation matrix R.
JetField rotated(const JetField& f, const Mat3d& R);

SampledVectorField sample_raw(const JetField& f, const GridPtr& grid);
TransverseAmplitude sample(const JetField& f, const GridPtr& grid, double tol = kDefaultTransverseTol);
std::vector<FieldJet> sample_jets(const JetField& f, const KGrid& grid);

namespace reference {
SampledVectorField sample_raw_serial(const JetField& f, const GridPtr& grid);
}

}  // namespace lightam
