#include "srda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace srda {

double accuracy(const Model& model, const Dataset& ds) {
    if (!ds.labeled()) throw UnlabeledData("accuracy: dataset has no labels");
    const auto pred = model.predict_labels(ds.features);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (static_cast<int>(pred[i]) == (*ds.labels)[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::uint64_t per_sample_seed(std::uint64_t base_seed, std::size_t i) {
    return derive_seed(base_seed, static_cast<std::uint64_t>(i));
}

namespace {

/// Plan draw for one feature row with the shared fallback policy.
Matrix plan_row(const Model& model, const Matrix& g_row, const NoisePlan& plan,
                Rng& rng, std::size_t* fallback_count) {
    switch (plan.kind) {
        case PlanKind::Isotropic:
            return sample_isotropic(g_row.cols(), plan.epsilon, rng);
        case PlanKind::Fgsm:
            try {
                return fgsm_direction(model, g_row, plan.epsilon);
            } catch (const FlatGradient&) {
                if (fallback_count) ++*fallback_count;
                return sample_isotropic(g_row.cols(), plan.epsilon, rng);
            }
        case PlanKind::Vat:
            try {
                return vat_direction(model, g_row, plan, rng);
            } catch (const FlatGradient&) {
                if (fallback_count) ++*fallback_count;
                return sample_isotropic(g_row.cols(), plan.epsilon, rng);
            }
        case PlanKind::None:
            break;
    }
    throw InvalidInput("plan 'none' produces no perturbations");
}

} // namespace

double mean_lsd(const Model& model, const Dataset& ds, const NoisePlan& plan,
                std::uint64_t base_seed, std::size_t* fallback_count) {
    plan.validate();
    if (ds.size() == 0) throw InvalidInput("mean_lsd: empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Matrix g = model.forward_features(ds.features.row_copy(i));
        Rng rng(per_sample_seed(base_seed, i));
        const Matrix r = plan_row(model, g, plan, rng, fallback_count);
        acc += lsd_value(model, g, r);
    }
    return acc / static_cast<double>(ds.size());
}

double hdh_proxy(const Model& model, const Dataset& ds, const NoisePlan& plan,
                 std::uint64_t base_seed) {
    plan.validate();
    if (ds.size() == 0) throw InvalidInput("hdh_proxy: empty dataset");
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Matrix g = model.forward_features(ds.features.row_copy(i));
        Rng rng(per_sample_seed(base_seed, i));
        const Matrix r = plan_row(model, g, plan, rng, nullptr);
        const std::size_t clean = argmax_row(model.classify(g));
        const std::size_t noisy = argmax_row(model.classify(perturb(g, r)));
        if (clean != noisy) ++disagree;
    }
    return static_cast<double>(disagree) / static_cast<double>(ds.size());
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

TraceResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ShapeError("spearman: length mismatch");
    if (xs.size() < 3) throw InsufficientData("spearman: need at least 3 points");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx < 1e-15 || syy < 1e-15) return TraceResult{0.0, true};
    return TraceResult{sxy / std::sqrt(sxx * syy), false};
}

TraceResult lsd_accuracy_trace(const std::vector<RunRecord>& history) {
    std::vector<double> lsd, acc;
    for (const auto& rec : history) {
        if (rec.target_accuracy) {
            lsd.push_back(rec.mean_lsd);
            acc.push_back(*rec.target_accuracy);
        }
    }
    if (lsd.size() < 3)
        throw InsufficientData("lsd_accuracy_trace: need >= 3 records with accuracy");
    return spearman(lsd, acc);
}

namespace {

void append_real(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    out += buf;
}

} // namespace

std::string emit_csv_string(const std::vector<RunRecord>& history) {
    std::string out = "epoch,step,source_loss,mean_lsd,target_accuracy,hdh_proxy\n";
    for (const auto& rec : history) {
        out += std::to_string(rec.epoch);
        out += ',';
        out += std::to_string(rec.step);
        out += ',';
        append_real(out, rec.source_loss);
        out += ',';
        append_real(out, rec.mean_lsd);
        out += ',';
        if (rec.target_accuracy) {
            append_real(out, *rec.target_accuracy);
        } else {
            out += "NA";
        }
        out += ',';
        append_real(out, rec.hdh_proxy);
        out += '\n';
    }
    return out;
}

std::size_t emit_csv(const std::vector<RunRecord>& history, std::ostream& out) {
    const std::string s = emit_csv_string(history);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw IoError("metrics csv write failed");
    return s.size();
}

void emit_csv_file(const std::vector<RunRecord>& history, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    emit_csv(history, f);
}

} // namespace srda
