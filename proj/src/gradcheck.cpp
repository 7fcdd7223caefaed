#include "srda/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "srda/model.hpp"
#include "srda/perturb.hpp"

namespace srda {

std::vector<std::vector<double>> finite_diff_grad(const std::function<double()>& loss_fn,
                                                  ParamStore& params, double h) {
    std::vector<std::vector<double>> out(params.segment_count());
    for (std::size_t s = 0; s < params.segment_count(); ++s) {
        auto& seg = params.segment(s);
        out[s].resize(seg.size());
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const double saved = seg.values[i];
            seg.values[i] = saved + h;
            const double up = loss_fn();
            seg.values[i] = saved - h;
            const double down = loss_fn();
            seg.values[i] = saved;
            out[s][i] = (up - down) / (2.0 * h);
        }
    }
    return out;
}

Matrix finite_diff_matrix(const std::function<double()>& loss_fn, Matrix& m, double h) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double saved = m.data()[i];
        m.data()[i] = saved + h;
        const double up = loss_fn();
        m.data()[i] = saved - h;
        const double down = loss_fn();
        m.data()[i] = saved;
        out.data()[i] = (up - down) / (2.0 * h);
    }
    return out;
}

double grad_rel_error(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
    return std::abs(analytic - numeric) / denom;
}

GradCompare compare_grads(const ParamStore& params,
                          const std::vector<std::vector<double>>& fd) {
    if (fd.size() != params.segment_count())
        throw ShapeError("compare_grads: segment count mismatch");
    GradCompare res;
    for (std::size_t s = 0; s < params.segment_count(); ++s) {
        const auto& seg = params.segment(s);
        if (fd[s].size() != seg.size())
            throw ShapeError("compare_grads: segment size mismatch");
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const double e = grad_rel_error(seg.grads[i], fd[s][i]);
            if (e > res.max_rel_error) {
                res.max_rel_error = e;
                res.worst_segment = seg.name;
            }
        }
    }
    return res;
}

bool GradCheckReport::passed(double tol) const {
    return std::all_of(entries.begin(), entries.end(),
                       [tol](const Entry& e) { return e.max_rel_error <= tol; });
}

GradCheckReport gradcheck_losses(std::uint64_t seed, bool corrupt_backward) {
    Rng rng(seed);
    // Small random model: widths <= 8, 3 generator layers.
    const std::size_t in_dim = 2 + rng.index(4);
    const std::size_t hidden = 3 + rng.index(5);
    const std::size_t feat = 2 + rng.index(5);
    const std::size_t classes = 2 + rng.index(3);
    Rng init = rng.child(11);
    Model model(GeneratorSpec{{in_dim, hidden, feat}}, ClassifierSpec{{feat, classes}}, init);

    const std::size_t batch = 5;
    Matrix x = Matrix::gaussian(batch, in_dim, rng);
    std::vector<int> y(batch);
    for (auto& v : y) v = static_cast<int>(rng.index(classes));

    GradCheckReport report;
    auto corrupt = [&](ParamStore& store) {
        if (corrupt_backward && store.segment_count() > 0) store.segment(0).grads[0] += 0.5;
    };

    {
        model.zero_grads();
        model.source_loss_backward(x, y);
        corrupt(model.generator().params());
        auto fn = [&]() { return model.source_loss(x, y); };
        const auto fd_g = finite_diff_grad(fn, model.generator().params());
        const auto fd_c = finite_diff_grad(fn, model.classifier().params());
        const auto cg = compare_grads(model.generator().params(), fd_g);
        const auto cc = compare_grads(model.classifier().params(), fd_c);
        const auto& worst = cg.max_rel_error >= cc.max_rel_error ? cg : cc;
        report.entries.push_back({"source_loss", worst.max_rel_error, worst.worst_segment});
    }
    {
        model.zero_grads();
        model.entropy_loss_backward(x, 1.0);
        corrupt(model.generator().params());
        auto fn = [&]() { return model.entropy_loss(x); };
        const auto fd_g = finite_diff_grad(fn, model.generator().params());
        const auto fd_c = finite_diff_grad(fn, model.classifier().params());
        const auto cg = compare_grads(model.generator().params(), fd_g);
        const auto cc = compare_grads(model.classifier().params(), fd_c);
        const auto& worst = cg.max_rel_error >= cc.max_rel_error ? cg : cc;
        report.entries.push_back({"entropy_loss", worst.max_rel_error, worst.worst_segment});
    }
    {
        // Mean LSD over the batch with r and the clean reference frozen at the
        // base parameters, gradient w.r.t. the generator (the smoothing path).
        model.zero_grads();
        NetCache gcache;
        const Matrix g0 = model.generator().forward(x, &gcache);
        Rng noise_rng = rng.child(12);
        Matrix r(batch, g0.cols());
        for (std::size_t i = 0; i < batch; ++i)
            r.set_row(i, sample_isotropic(g0.cols(), 0.5, noise_rng));
        const Matrix p_ref = model.classify(g0); // frozen reference

        NetCache ccache;
        const Matrix q = softmax(model.classifier().forward(perturb(g0, r), &ccache));
        Matrix dlogits = q;
        dlogits -= p_ref;
        dlogits *= 1.0 / static_cast<double>(batch);
        const Matrix dg = model.classifier().input_gradient(ccache, dlogits);
        model.generator().backward(gcache, dg);
        corrupt(model.generator().params());

        auto fn = [&]() {
            const Matrix g = model.generator().forward(x);
            const Matrix qq = model.classify(perturb(g, r));
            double acc = 0.0;
            for (std::size_t i = 0; i < batch; ++i)
                acc += cross_entropy(qq.row_copy(i), p_ref.row_copy(i));
            return acc / static_cast<double>(batch);
        };
        const auto fd_g = finite_diff_grad(fn, model.generator().params());
        const auto cg = compare_grads(model.generator().params(), fd_g);
        report.entries.push_back({"lsd_value", cg.max_rel_error, cg.worst_segment});
    }
    return report;
}

} // namespace srda
