#include "srda/optim.hpp"

#include <cmath>

namespace srda {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
} // namespace

void Optimizer::step(ParamStore& params, double lr) {
    if (!params.grads_finite()) throw DivergedError("optimizer step: non-finite gradient");
    if (kind_ == OptimizerKind::Adam && m_.empty()) {
        m_.resize(params.segment_count());
        v_.resize(params.segment_count());
        for (std::size_t i = 0; i < params.segment_count(); ++i) {
            m_[i].assign(params.segment(i).size(), 0.0);
            v_[i].assign(params.segment(i).size(), 0.0);
        }
    }
    ++t_;
    if (kind_ == OptimizerKind::Sgd) {
        for (auto& seg : params) {
            for (std::size_t i = 0; i < seg.size(); ++i)
                seg.values[i] -= lr * seg.grads[i];
        }
        return;
    }
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t s = 0; s < params.segment_count(); ++s) {
        auto& seg = params.segment(s);
        if (m_[s].size() != seg.size())
            throw InvalidInput("optimizer step: store layout changed between steps");
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const double g = seg.grads[i];
            m_[s][i] = kBeta1 * m_[s][i] + (1.0 - kBeta1) * g;
            v_[s][i] = kBeta2 * v_[s][i] + (1.0 - kBeta2) * g * g;
            const double mhat = m_[s][i] / c1;
            const double vhat = v_[s][i] / c2;
            seg.values[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
        }
    }
}

} // namespace srda
