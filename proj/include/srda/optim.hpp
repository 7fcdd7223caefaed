#ifndef SRDA_OPTIM_HPP
#define SRDA_OPTIM_HPP

#include <cstdint>
#include <vector>

#include "srda/param_store.hpp"

namespace srda {

enum class OptimizerKind { Sgd, Adam };

/// First-order parameter update from the gradients in a ParamStore.
///
/// sgd:  w -= lr * g
/// adam: bias-corrected first/second moment update, beta1=0.9, beta2=0.999,
///       eps=1e-8. Moment buffers are owned here, one pair per segment.
///
/// One Optimizer instance serves one ParamStore for the lifetime of a run,
/// even when different training phases step it at different learning rates.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double lr) : kind_(kind), lr_(lr) {}

    OptimizerKind kind() const { return kind_; }
    double lr() const { return lr_; }
    std::int64_t steps_taken() const { return t_; }

    /// One update at the configured rate; throws DivergedError on non-finite
    /// gradients.
    void step(ParamStore& params) { step(params, lr_); }

    /// One update at an explicit rate (the moment state is shared across
    /// rates).
    void step(ParamStore& params, double lr);

private:
    OptimizerKind kind_;
    double lr_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

} // namespace srda

#endif
