#ifndef SRDA_METRICS_HPP
#define SRDA_METRICS_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "srda/data.hpp"
#include "srda/model.hpp"
#include "srda/perturb.hpp"

namespace srda {

/// One evaluation row of a training run.
struct RunRecord {
    std::size_t epoch = 0;
    std::uint64_t step = 0;
    double source_loss = 0.0;
    double mean_lsd = 0.0;
    std::optional<double> target_accuracy; // absent without target labels
    double hdh_proxy = 0.0;
};

/// Fraction of predicted labels matching the dataset labels.
double accuracy(const Model& model, const Dataset& ds);

/// Seed for sample i of a dataset-wide evaluation. Fixed per-sample seeds
/// make the result independent of any parallel split and let a naive
/// per-sample loop reproduce it bit-for-bit.
std::uint64_t per_sample_seed(std::uint64_t base_seed, std::size_t i);

/// Mean LSD over the dataset, one plan-drawn perturbation per sample,
/// deterministic given base_seed. Flat-gradient fallbacks to the isotropic
/// plan are counted into *fallback_count when given.
double mean_lsd(const Model& model, const Dataset& ds, const NoisePlan& plan,
                std::uint64_t base_seed, std::size_t* fallback_count = nullptr);

/// Fraction of samples whose argmax prediction changes between g and g + r:
/// the computable disagreement proxy for the H-delta-H distance.
double hdh_proxy(const Model& model, const Dataset& ds, const NoisePlan& plan,
                 std::uint64_t base_seed);

struct TraceResult {
    double rho = 0.0;      // Spearman rank correlation
    bool degenerate = false; // one series constant; rho forced to 0
};

/// Spearman rank correlation (average ranks for ties).
TraceResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

/// Rank correlation between epoch-wise mean LSD and target accuracy over the
/// records that carry an accuracy. Throws InsufficientData below 3 such rows.
TraceResult lsd_accuracy_trace(const std::vector<RunRecord>& history);

/// Writes "epoch,step,source_loss,mean_lsd,target_accuracy,hdh_proxy" rows,
/// reals at 6 significant digits, NA for absent accuracy. Returns bytes written.
std::size_t emit_csv(const std::vector<RunRecord>& history, std::ostream& out);
std::string emit_csv_string(const std::vector<RunRecord>& history);
void emit_csv_file(const std::vector<RunRecord>& history, const std::string& path);

} // namespace srda

#endif
