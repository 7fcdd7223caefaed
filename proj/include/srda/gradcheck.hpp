#ifndef SRDA_GRADCHECK_HPP
#define SRDA_GRADCHECK_HPP

#include <functional>
#include <string>
#include <vector>

#include "srda/matrix.hpp"
#include "srda/param_store.hpp"

namespace srda {

/// Central-difference gradient (f(w+h) - f(w-h)) / 2h of loss_fn with respect
/// to every parameter in the store, segment by segment. loss_fn must be a
/// deterministic function of the store's current values; the store is
/// restored bit-exactly afterwards. This is the independent oracle that
/// backpropagation is checked against.
std::vector<std::vector<double>> finite_diff_grad(const std::function<double()>& loss_fn,
                                                  ParamStore& params, double h = 1e-5);

/// Central-difference gradient with respect to the entries of a matrix.
Matrix finite_diff_matrix(const std::function<double()>& loss_fn, Matrix& m, double h = 1e-5);

/// |a-b| / max(|a|,|b|, 1e-5). The floor keeps coordinates whose true
/// gradient is ~0 (where central differences only resolve ~1e-10) from
/// dominating the comparison.
double grad_rel_error(double analytic, double numeric);

struct GradCompare {
    double max_rel_error = 0.0;
    std::string worst_segment;
};

/// Max relative error between the store's accumulated gradients and a
/// finite_diff_grad result.
GradCompare compare_grads(const ParamStore& params,
                          const std::vector<std::vector<double>>& fd);

struct GradCheckReport {
    struct Entry {
        std::string loss_name;
        double max_rel_error = 0.0;
        std::string worst_segment;
    };
    std::vector<Entry> entries;
    bool passed(double tol) const;
};

/// Builds a small random model and batch from the seed and checks the
/// backprop gradients of the three training losses (source_loss,
/// entropy_loss, lsd_value) against finite differences. corrupt_backward
/// biases one analytic gradient before comparing; it exists so the negative
/// path of the check itself can be exercised.
GradCheckReport gradcheck_losses(std::uint64_t seed, bool corrupt_backward = false);

} // namespace srda

#endif
