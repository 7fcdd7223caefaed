#include "srda/perturb.hpp"

#include <cmath>

namespace srda {

namespace {
constexpr double kFlatNorm = 1e-12;
} // namespace

void NoisePlan::validate() const {
    if (kind == PlanKind::None) return;
    if (!(epsilon > 0.0)) throw InvalidInput("noise plan: epsilon must be positive");
    if (kind == PlanKind::Vat) {
        if (!(vat_xi > 0.0)) throw InvalidInput("noise plan: vat_xi must be positive");
        if (vat_power_iters < 1) throw InvalidInput("noise plan: vat_power_iters must be >= 1");
    }
}

PlanKind plan_kind_from_string(const std::string& s) {
    if (s == "none") return PlanKind::None;
    if (s == "isotropic") return PlanKind::Isotropic;
    if (s == "fgsm") return PlanKind::Fgsm;
    if (s == "vat") return PlanKind::Vat;
    throw InvalidInput("unknown noise plan: " + s);
}

std::string to_string(PlanKind k) {
    switch (k) {
        case PlanKind::None: return "none";
        case PlanKind::Isotropic: return "isotropic";
        case PlanKind::Fgsm: return "fgsm";
        case PlanKind::Vat: return "vat";
    }
    return "?";
}

Matrix sample_isotropic(std::size_t dim, double epsilon, Rng& rng) {
    if (dim == 0) throw InvalidInput("sample_isotropic: dim must be >= 1");
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix m = Matrix::gaussian(1, dim, rng);
        const double n = l2_norm(m);
        if (n < kFlatNorm) continue;
        m *= epsilon / n;
        return m;
    }
    throw InternalError("sample_isotropic: 100 degenerate draws in a row");
}

Matrix fgsm_direction(const Model& model, const Matrix& g_row, double epsilon) {
    if (g_row.rows() != 1 || g_row.cols() != model.feature_width())
        throw ShapeError("fgsm_direction: expected one feature row");
    NetCache cache;
    const Matrix logits = model.classifier().forward(g_row, &cache);
    const Matrix q = softmax(logits);
    const std::size_t pseudo = argmax_row(q);
    // d CE(q, onehot)/d logits = q - onehot
    Matrix dlogits = q;
    dlogits.at(0, pseudo) -= 1.0;
    const Matrix m = model.classifier().input_gradient(cache, dlogits);
    const double n = l2_norm(m);
    if (n < kFlatNorm) throw FlatGradient("fgsm_direction: flat classifier gradient");
    Matrix r = m;
    r *= epsilon / n;
    return r;
}

Matrix power_iteration_direction(std::size_t dim, int iters, Rng& rng,
                                 const std::function<Matrix(const Matrix&)>& grad_at) {
    Matrix d = sample_isotropic(dim, 1.0, rng);
    for (int i = 0; i < iters; ++i) {
        const Matrix grad = grad_at(d);
        if (grad.rows() != 1 || grad.cols() != dim)
            throw ShapeError("power_iteration_direction: gradient shape mismatch");
        const double n = l2_norm(grad);
        if (n < kFlatNorm)
            throw FlatGradient("power_iteration_direction: flat discrepancy gradient");
        d = grad;
        d *= 1.0 / n;
    }
    return d;
}

Matrix vat_direction(const Model& model, const Matrix& g_row, const NoisePlan& plan, Rng& rng) {
    if (g_row.rows() != 1 || g_row.cols() != model.feature_width())
        throw ShapeError("vat_direction: expected one feature row");
    const Matrix p_clean = model.classify(g_row); // detached reference
    auto grad_at = [&](const Matrix& d) {
        Matrix probe = g_row;
        for (std::size_t c = 0; c < probe.cols(); ++c)
            probe.at(0, c) += plan.vat_xi * d.at(0, c);
        NetCache cache;
        const Matrix q = softmax(model.classifier().forward(probe, &cache));
        // d CE(q, p_clean)/d logits = q - p_clean
        Matrix dlogits = q;
        dlogits -= p_clean;
        return model.classifier().input_gradient(cache, dlogits);
    };
    Matrix d = power_iteration_direction(model.feature_width(), plan.vat_power_iters, rng, grad_at);
    d *= plan.epsilon;
    return d;
}

Matrix perturb(const Matrix& g, const Matrix& r) {
    if (!g.same_shape(r)) throw ShapeError("perturb: shape mismatch");
    return g + r;
}

double lsd_value(const Model& model, const Matrix& g_row, const Matrix& r_row) {
    if (!g_row.same_shape(r_row)) throw ShapeError("lsd_value: shape mismatch");
    const Matrix q = model.classify(perturb(g_row, r_row));
    const Matrix p = model.classify(g_row);
    return cross_entropy(q, p);
}

Matrix sample_plan_batch(const Model& model, const Matrix& g, const NoisePlan& plan,
                         Rng& rng, std::size_t* fallback_count) {
    plan.validate();
    if (plan.kind == PlanKind::None)
        throw InvalidInput("sample_plan_batch: plan 'none' produces no perturbations");
    if (g.cols() != model.feature_width())
        throw ShapeError("sample_plan_batch: feature width mismatch");
    Matrix r(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.rows(); ++i) {
        Matrix row;
        switch (plan.kind) {
            case PlanKind::Isotropic:
                row = sample_isotropic(g.cols(), plan.epsilon, rng);
                break;
            case PlanKind::Fgsm:
                try {
                    row = fgsm_direction(model, g.row_copy(i), plan.epsilon);
                } catch (const FlatGradient&) {
                    if (fallback_count) ++*fallback_count;
                    row = sample_isotropic(g.cols(), plan.epsilon, rng);
                }
                break;
            case PlanKind::Vat:
                try {
                    row = vat_direction(model, g.row_copy(i), plan, rng);
                } catch (const FlatGradient&) {
                    if (fallback_count) ++*fallback_count;
                    row = sample_isotropic(g.cols(), plan.epsilon, rng);
                }
                break;
            case PlanKind::None:
                break; // unreachable
        }
        r.set_row(i, row);
    }
    return r;
}

} // namespace srda
