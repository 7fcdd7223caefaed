#ifndef SRDA_NET_HPP
#define SRDA_NET_HPP

#include <vector>

#include "srda/matrix.hpp"
#include "srda/param_store.hpp"
#include "srda/rng.hpp"

namespace srda {

enum class Activation { Identity, Relu };

struct LayerSpec {
    std::size_t in_width = 0;
    std::size_t out_width = 0;
    Activation act = Activation::Identity;
};

/// Per-layer state saved by the forward pass for the matching backward pass.
struct LayerCache {
    Matrix input;
    Matrix pre_activation;
};

using NetCache = std::vector<LayerCache>;

/// Ordered stack of affine+activation layers with explicit forward/backward.
///
/// Parameters live in an owned ParamStore, one "W<i>" and one "b<i>" segment
/// per layer. Weight init is N(0, 2/fan_in) for ReLU layers and N(0, 1/fan_in)
/// otherwise; biases start at zero.
class LayeredNet {
public:
    LayeredNet() = default;
    LayeredNet(std::vector<LayerSpec> layers, Rng& init_rng);

    std::size_t layer_count() const { return layers_.size(); }
    const std::vector<LayerSpec>& layers() const { return layers_; }
    std::size_t input_width() const { return layers_.front().in_width; }
    std::size_t output_width() const { return layers_.back().out_width; }

    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    /// output = act(input * W + b), layer by layer. When cache is non-null,
    /// the per-layer inputs and pre-activations are recorded for backward.
    Matrix forward(const Matrix& x, NetCache* cache = nullptr) const;

    /// Chain-rule backward from d loss / d output. Parameter gradients are
    /// accumulated (+=) into the store; returns d loss / d input.
    Matrix backward(const NetCache& cache, const Matrix& upstream);

    /// Backward that computes d loss / d input only. Never touches parameter
    /// values or gradients (probe mode for perturbation directions and for
    /// the frozen-classifier smoothing step).
    Matrix input_gradient(const NetCache& cache, const Matrix& upstream) const;

private:
    Matrix backward_impl(const NetCache& cache, const Matrix& upstream,
                         ParamStore* grads_out) const;

    std::vector<LayerSpec> layers_;
    ParamStore params_;
};

} // namespace srda

#endif
