#include "lightam/jet_field.hpp"

#include <stdexcept>

#include "lightam/parallel.hpp"

namespace lightam {

namespace {

class SumModel final : public FieldModel {
public:
    explicit SumModel(std::vector<std::pair<cplx, JetField>> terms) : terms_(std::move(terms)) {
        for (const auto& t : terms_)
            if (!t.second.valid()) throw std::invalid_argument("linear_combination: empty field");
    }
    [[nodiscard]] Vec3c value(const Vec3d& k) const override {
        Vec3c out{};
        for (const auto& [c, f] : terms_) out += c * f.value(k);
        return out;
    }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override {
        FieldJet out;
        for (const auto& [c, f] : terms_) {
            const FieldJet j = f.jet(k);
            out.v += c * j.v;
            for (int i = 0; i < 3; ++i) {
                out.d1[i] += c * j.d1[i];
                for (int l = 0; l < 3; ++l) out.d2[i][l] += c * j.d2[i][l];
            }
        }
        return out;
    }
    [[nodiscard]] int order() const override {
        int o = 2;
        for (const auto& t : terms_) o = std::min(o, t.second.order());
        return o;
    }
    [[nodiscard]] std::string name() const override { return "combination"; }

private:
    std::vector<std::pair<cplx, JetField>> terms_;
};

struct TransverseMap {
    template <class T>
    Vec3<T> operator()(const Vec3<T>& k, const Vec3<T>& v) const {
        const T kv = dot(k, v) / dot(k, k);
        return v - kv * k;
    }
};

class RotatedModel final : public FieldModel {
public:
    RotatedModel(JetField inner, const Mat3d& R) : inner_(std::move(inner)), R_(R), Rt_(transpose(R)) {}
    [[nodiscard]] Vec3c value(const Vec3d& k) const override { return matvec(R_, inner_.value(matvec(Rt_, k))); }
    [[nodiscard]] FieldJet jet(const Vec3d& k) const override {
        const FieldJet j = inner_.jet(matvec(Rt_, k));
        FieldJet out;
        out.v = matvec(R_, j.v);
        // d/dk_i = sum_a (R^T)_{a i} d/dq_a = sum_a R_{i a} d/dq_a
        for (int i = 0; i < 3; ++i) {
            Vec3c acc{};
            for (int a = 0; a < 3; ++a) acc += R_[i][a] * j.d1[a];
            out.d1[i] = matvec(R_, acc);
        }
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) {
                Vec3c acc{};
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) acc += (R_[i][a] * R_[l][b]) * j.d2[a][b];
                out.d2[i][l] = matvec(R_, acc);
            }
        return out;
    }
    [[nodiscard]] int order() const override { return inner_.order(); }
    [[nodiscard]] std::string name() const override { return "rotated(" + inner_.name() + ")"; }

private:
    JetField inner_;
    Mat3d R_;
    Mat3d Rt_;
};

}  // namespace

JetField linear_combination(std::vector<std::pair<cplx, JetField>> terms) {
    return JetField(std::make_shared<const SumModel>(std::move(terms)));
}

JetField operator+(const JetField& a, const JetField& b) { return linear_combination({{1.0, a}, {1.0, b}}); }

JetField operator*(cplx s, const JetField& f) { return linear_combination({{s, f}}); }

JetField projected(const JetField& f) { return map_field(f, TransverseMap{}, "projected(" + f.name() + ")"); }

JetField rotated(const JetField& f, const Mat3d& R) { return JetField(std::make_shared<const RotatedModel>(f, R)); }

SampledVectorField sample_raw(const JetField& f, const GridPtr& grid) {
    SampledVectorField out{grid, std::vector<Vec3c>(grid->size())};
    parallel_for(grid->size(), [&](std::size_t i) { out.values[i] = f.value(grid->point(i)); });
    return out;
}

TransverseAmplitude sample(const JetField& f, const GridPtr& grid, double tol) {
    SampledVectorField raw = sample_raw(f, grid);
    return TransverseAmplitude(grid, std::move(raw.values), tol);
}

std::vector<FieldJet> sample_jets(const JetField& f, const KGrid& grid) {
    if (f.order() < 2) throw std::invalid_argument("sample_jets: field does not provide second derivatives");
    std::vector<FieldJet> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = f.jet(grid.point(i)); });
    return out;
}

namespace reference {
SampledVectorField sample_raw_serial(const JetField& f, const GridPtr& grid) {
    SampledVectorField out{grid, std::vector<Vec3c>(grid->size())};
    for (std::size_t i = 0; i < grid->size(); ++i) out.values[i] = f.value(grid->point(i));
    return out;
}
}  // namespace reference

}  // namespace lightam
