#ifndef SRDA_MODEL_HPP
#define SRDA_MODEL_HPP

#include <string>
#include <vector>

#include "srda/net.hpp"
#include "srda/ops.hpp"

namespace srda {

/// Feature generator layer widths, input dim -> ... -> feature dim.
/// Hidden layers are ReLU, the output layer is identity.
struct GeneratorSpec {
    std::vector<std::size_t> widths;
};

/// Classifier layer widths, feature dim -> ... -> K class logits.
/// Hidden layers are ReLU, the logit layer is identity; classify() applies
/// the softmax.
struct ClassifierSpec {
    std::vector<std::size_t> widths;
};

/// Expands a width list into LayerSpecs: ReLU on hidden layers, identity on
/// the output layer.
std::vector<LayerSpec> layers_from_widths(const std::vector<std::size_t>& widths);

/// f = C o G: a feature generator and a classifier over its feature space.
class Model {
public:
    Model(const GeneratorSpec& gen, const ClassifierSpec& clf, Rng& init_rng);
    /// Explicit layer stacks (tests and checkpoint loading).
    Model(std::vector<LayerSpec> gen_layers, std::vector<LayerSpec> clf_layers, Rng& init_rng);

    LayeredNet& generator() { return generator_; }
    const LayeredNet& generator() const { return generator_; }
    LayeredNet& classifier() { return classifier_; }
    const LayeredNet& classifier() const { return classifier_; }

    std::size_t input_width() const { return generator_.input_width(); }
    std::size_t feature_width() const { return generator_.output_width(); }
    std::size_t num_classes() const { return classifier_.output_width(); }

    /// g = G(x) for a batch of row samples.
    Matrix forward_features(const Matrix& x, NetCache* cache = nullptr) const;

    /// softmax(C(g)): one probability row per feature row.
    Matrix classify(const Matrix& g, NetCache* cache = nullptr) const;

    /// argmax class per row of C(G(x)); ties break to the lowest index.
    std::vector<std::size_t> predict_labels(const Matrix& x) const;

    /// Mean negative log-probability of the true class over the batch.
    double source_loss(const Matrix& x, const std::vector<int>& labels) const;
    /// Same value, with gradients accumulated into both networks.
    double source_loss_backward(const Matrix& x, const std::vector<int>& labels);

    /// Mean Shannon entropy of the predictions on the batch.
    double entropy_loss(const Matrix& x) const;
    /// Same value scaled by weight, gradients accumulated into both networks.
    double entropy_loss_backward(const Matrix& x, double weight = 1.0);

    void zero_grads();

private:
    /// d(weight * mean entropy)/d logits for probability rows q.
    static Matrix entropy_logit_grad(const Matrix& q, double weight);

    LayeredNet generator_;
    LayeredNet classifier_;

    friend class Trainer;
};

/// Binary checkpoint I/O. The file stores both layer stacks (widths and
/// activations) plus every parameter segment with its shape; values are raw
/// little-endian IEEE-754 doubles, so a write/read round-trip is bit-exact.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

void save_checkpoint_bytes(const Model& model, std::vector<unsigned char>& out);
Model load_checkpoint_bytes(const std::vector<unsigned char>& bytes);

} // namespace srda

#endif
