#include "srda/net.hpp"

#include <cmath>
#include <string>

namespace srda {

LayeredNet::LayeredNet(std::vector<LayerSpec> layers, Rng& init_rng)
    : layers_(std::move(layers)) {
    if (layers_.empty()) throw InvalidInput("LayeredNet: at least one layer required");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.in_width == 0 || l.out_width == 0)
            throw InvalidInput("LayeredNet: zero layer width");
        if (i > 0 && l.in_width != layers_[i - 1].out_width)
            throw ShapeError("LayeredNet: layer widths do not chain");
        params_.add("W" + std::to_string(i), l.in_width, l.out_width);
        params_.add("b" + std::to_string(i), 1, l.out_width);
        auto& w = params_.segment(2 * i);
        const double sd = 0.5 * std::sqrt(1.0 / static_cast<double>(l.in_width));
        for (double& v : w.values) v = sd * init_rng.normal();
    }
}

Matrix LayeredNet::forward(const Matrix& x, NetCache* cache) const {
    if (x.cols() != input_width())
        throw ShapeError("forward: input cols do not match layer input width");
    if (cache) {
        cache->clear();
        cache->reserve(layers_.size());
    }
    Matrix a = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& w = params_.segment(2 * i);
        const auto& b = params_.segment(2 * i + 1);
        Matrix z(a.rows(), layers_[i].out_width);
        // z = a * W + b
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const double* arow = a.row_ptr(r);
            double* zrow = z.row_ptr(r);
            for (std::size_t c = 0; c < z.cols(); ++c) zrow[c] = b.values[c];
            for (std::size_t k = 0; k < a.cols(); ++k) {
                const double av = arow[k];
                const double* wrow = w.values.data() + k * z.cols();
                for (std::size_t c = 0; c < z.cols(); ++c) zrow[c] += av * wrow[c];
            }
        }
        Matrix out = z;
        if (layers_[i].act == Activation::Relu) {
            for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
        }
        if (cache) cache->push_back(LayerCache{std::move(a), std::move(z)});
        a = std::move(out);
    }
    return a;
}

Matrix LayeredNet::backward(const NetCache& cache, const Matrix& upstream) {
    return backward_impl(cache, upstream, &params_);
}

Matrix LayeredNet::input_gradient(const NetCache& cache, const Matrix& upstream) const {
    return backward_impl(cache, upstream, nullptr);
}

Matrix LayeredNet::backward_impl(const NetCache& cache, const Matrix& upstream,
                                 ParamStore* grads_out) const {
    if (cache.size() != layers_.size())
        throw ShapeError("backward: cache does not match network depth");
    Matrix grad = upstream;
    for (std::size_t ii = layers_.size(); ii-- > 0;) {
        const auto& lc = cache[ii];
        const auto& spec = layers_[ii];
        if (grad.rows() != lc.input.rows() || grad.cols() != spec.out_width)
            throw ShapeError("backward: upstream gradient shape mismatch");
        // d loss / d pre-activation
        Matrix dz = grad;
        if (spec.act == Activation::Relu) {
            for (std::size_t i = 0; i < dz.size(); ++i) {
                if (lc.pre_activation.data()[i] <= 0.0) dz.data()[i] = 0.0;
            }
        }
        if (grads_out) {
            auto& wseg = grads_out->segment(2 * ii);
            auto& bseg = grads_out->segment(2 * ii + 1);
            // dW += input^T * dz ; db += column sums of dz
            for (std::size_t r = 0; r < dz.rows(); ++r) {
                const double* in = lc.input.row_ptr(r);
                const double* d = dz.row_ptr(r);
                for (std::size_t k = 0; k < spec.in_width; ++k) {
                    double* wg = wseg.grads.data() + k * spec.out_width;
                    const double inv = in[k];
                    for (std::size_t c = 0; c < spec.out_width; ++c) wg[c] += inv * d[c];
                }
                for (std::size_t c = 0; c < spec.out_width; ++c) bseg.grads[c] += d[c];
            }
        }
        // d loss / d input = dz * W^T
        const auto& wseg = params_.segment(2 * ii);
        Matrix dinput(dz.rows(), spec.in_width);
        for (std::size_t r = 0; r < dz.rows(); ++r) {
            const double* d = dz.row_ptr(r);
            double* out = dinput.row_ptr(r);
            for (std::size_t k = 0; k < spec.in_width; ++k) {
                const double* wrow = wseg.values.data() + k * spec.out_width;
                double acc = 0.0;
                for (std::size_t c = 0; c < spec.out_width; ++c) acc += d[c] * wrow[c];
                out[k] = acc;
            }
        }
        grad = std::move(dinput);
    }
    return grad;
}

} // namespace srda
