#ifndef SRDA_PERTURB_HPP
#define SRDA_PERTURB_HPP

#include <functional>

#include "srda/model.hpp"
#include "srda/rng.hpp"

namespace srda {

enum class PlanKind { None, Isotropic, Fgsm, Vat };

/// One of the three noise plans for producing feature-space perturbations.
/// Every plan returns vectors of L2 norm exactly epsilon (the isotropic plan
/// as printed yields a unit vector; it is scaled by epsilon here so all
/// plans honor the ||r|| <= epsilon budget the same way).
struct NoisePlan {
    PlanKind kind = PlanKind::Isotropic;
    double epsilon = 0.5;
    double vat_xi = 0.1;      // probe scale for the VAT power iteration
    int vat_power_iters = 1;

    void validate() const;
};

PlanKind plan_kind_from_string(const std::string& s);
std::string to_string(PlanKind k);

/// r = epsilon * m/||m||_2 with m ~ N(0, I). Degenerate draws (norm below
/// 1e-12) are resampled, at most 100 times.
Matrix sample_isotropic(std::size_t dim, double epsilon, Rng& rng);

/// Gradient-ascent direction against the model's own pseudo-label:
/// m = grad_g D(C(g), onehot(C(g))), r = epsilon * m/||m||_2.
/// Probes the classifier only; parameters and their gradients are untouched.
/// Throws FlatGradient when ||m|| < 1e-12.
Matrix fgsm_direction(const Model& model, const Matrix& g_row, double epsilon);

/// Power iteration on the local discrepancy curvature: starting from a random
/// unit direction d, repeatedly replaces d with the normalized gradient of
/// D(C(g + xi*d), C(g)) at the probe point. Returns epsilon * d.
/// Throws FlatGradient on vanishing curvature.
Matrix vat_direction(const Model& model, const Matrix& g_row, const NoisePlan& plan, Rng& rng);

/// The power-iteration core used by vat_direction: grad_at(d) must return the
/// discrepancy gradient at the probe defined by unit direction d. Returns a
/// unit vector.
Matrix power_iteration_direction(std::size_t dim, int iters, Rng& rng,
                                 const std::function<Matrix(const Matrix&)>& grad_at);

/// g' = g + r, elementwise over matching shapes.
Matrix perturb(const Matrix& g, const Matrix& r);

/// Local smooth discrepancy of one feature row under perturbation r:
/// D(C(g + r), C(g)) with the clean prediction treated as a constant.
double lsd_value(const Model& model, const Matrix& g_row, const Matrix& r_row);

/// One perturbation row per feature row, produced by the plan. FGSM/VAT rows
/// whose probe gradient is flat fall back to an isotropic draw; each fallback
/// increments *fallback_count when given. PlanKind::None is rejected.
Matrix sample_plan_batch(const Model& model, const Matrix& g, const NoisePlan& plan,
                         Rng& rng, std::size_t* fallback_count = nullptr);

} // namespace srda

#endif
