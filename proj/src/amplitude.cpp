#include "lightam/amplitude.hpp"

#include <cmath>
#include <sstream>

#include "lightam/parallel.hpp"

namespace lightam {

TransverseAmplitude::TransverseAmplitude(GridPtr grid, std::vector<Vec3c> values, double tol)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("TransverseAmplitude: null grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("TransverseAmplitude: value count does not match grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const Vec3c& v = values_[i];
        for (const cplx& c : v)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw std::invalid_argument("TransverseAmplitude: non-finite value");
        const Vec3d& k = grid_->point(i);
        const double kn = norm(k);
        const double vn = std::sqrt(norm2(v));
        const cplx kv = dot(k, v) / kn;
        if (std::abs(kv) > tol * vn) {
            std::ostringstream os;
            os << "TransverseAmplitude: node " << i << " violates transversality (|khat.v|/|v| = "
               << std::abs(kv) / vn << ")";
            throw TransversalityError(os.str());
        }
    }
}

double TransverseAmplitude::max_transverse_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double vn = std::sqrt(norm2(values_[i]));
        if (vn == 0.0) continue;
        const Vec3d& k = grid_->point(i);
        worst = std::max(worst, std::abs(dot(k, values_[i])) / (norm(k) * vn));
    }
    return worst;
}

Vec3c project_transverse(const Vec3d& k, const Vec3c& w) {
    const double k2 = dot(k, k);
    if (!(k2 > 0.0)) throw std::invalid_argument("transverse_project: node at |k| = 0");
    const cplx kw = dot(k, w) / k2;
    return {w[0] - kw * k[0], w[1] - kw * k[1], w[2] - kw * k[2]};
}

TransverseAmplitude transverse_project(const SampledVectorField& w) {
    if (!w.grid) throw std::invalid_argument("transverse_project: null grid");
    if (w.values.size() != w.grid->size())
        throw std::invalid_argument("transverse_project: value count does not match grid");
    std::vector<Vec3c> out(w.values.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = project_transverse(w.grid->point(i), w.values[i]); });
    return TransverseAmplitude(w.grid, std::move(out));
}

void require_same_grid(const KGrid& a, const KGrid& b, const char* what) {
    if (!same_grid(a, b)) throw GridMismatch(std::string(what) + ": fields live on different grids");
}

namespace {
cplx weighted_inner(const KGrid& g, const std::vector<Vec3c>& a, const std::vector<Vec3c>& b) {
    return parallel_sum<cplx>(a.size(), [&](std::size_t i) { return g.weight(i) * cdot(a[i], b[i]); });
}
}  // namespace

cplx inner_product(const TransverseAmplitude& a, const TransverseAmplitude& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    return weighted_inner(a.grid(), a.values(), b.values());
}

cplx inner_product(const SampledVectorField& a, const SampledVectorField& b) {
    require_same_grid(*a.grid, *b.grid, "inner_product");
    return weighted_inner(*a.grid, a.values, b.values);
}

double norm_squared(const TransverseAmplitude& v) { return inner_product(v, v).real(); }

TransverseAmplitude scaled(const TransverseAmplitude& v, cplx s) {
    std::vector<Vec3c> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
    return TransverseAmplitude(v.grid_ptr(), std::move(out));
}

TransverseAmplitude added(const TransverseAmplitude& a, const TransverseAmplitude& b) {
    require_same_grid(a.grid(), b.grid(), "added");
    std::vector<Vec3c> out(a.size());
    // Both inputs are transverse; re-projecting only removes rounding left by cancellation.
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = project_transverse(a.grid().point(i), a[i] + b[i]);
    return TransverseAmplitude(a.grid_ptr(), std::move(out));
}

}  // namespace lightam
