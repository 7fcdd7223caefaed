#ifndef SRDA_TRAIN_HPP
#define SRDA_TRAIN_HPP

#include <functional>

#include "srda/data.hpp"
#include "srda/metrics.hpp"
#include "srda/model.hpp"
#include "srda/optim.hpp"
#include "srda/perturb.hpp"

namespace srda {

enum class EntropyStage { Source, Smooth };

/// Full schedule configuration. Defaults follow the reference setup
/// (batch 128, 150 epochs, epsilon 0.5, adam at 1e-3; 1e-4 for the fgsm
/// plan — resolve_learning_rates() fills unset rates per plan).
struct TrainConfig {
    std::size_t epochs = 150;
    std::size_t batch_size = 128;
    double lr_source = 0.0; // 0 = resolve per plan
    double lr_smooth = 0.0; // 0 = resolve per plan
    OptimizerKind optimizer = OptimizerKind::Adam;
    NoisePlan plan;
    double entropy_weight = 0.0; // 0 = entropy trick disabled
    EntropyStage entropy_stage = EntropyStage::Smooth;
    std::size_t warmup_epochs = 50; // pure-source epochs before smoothing starts
    std::uint64_t seed = 1;
    std::size_t eval_every = 1; // RunRecord cadence in epochs

    void resolve_learning_rates();
    void validate() const;
};

enum class StepKind { Source, Smooth };

struct StepEvent {
    std::size_t epoch = 0;
    std::size_t iteration = 0; // within the epoch
    StepKind kind = StepKind::Source;
    double loss = 0.0;         // pre-step loss of that step
    std::uint64_t step_index = 0;
};

/// Called after every optimizer step with the freshly updated model.
using StepObserver = std::function<void(const StepEvent&, const Model&)>;

/// Called at the end of every epoch.
using EpochObserver = std::function<void(std::size_t epoch, const Model&)>;

/// Everything a finished (or in-progress) run carries.
struct TrainState {
    Model model;
    std::size_t epoch = 0;
    std::uint64_t step = 0;
    std::vector<RunRecord> history;
    std::size_t flat_fallbacks = 0;
};

/// Drives the repeated three-step schedule: supervised source step,
/// sensitive-sample generation, generator-only smoothing step.
class Trainer {
public:
    Trainer(Model model, TrainConfig cfg);

    /// One supervised step on a labeled source batch; updates generator and
    /// classifier. x_t_entropy adds the entropy term here when the config
    /// stages it at the source step. lr < 0 means the configured lr_source.
    /// Returns the pre-step loss.
    double step_source(const Matrix& x_s, const std::vector<int>& y_s,
                       const Matrix* x_t_entropy = nullptr, double lr = -1.0);

    /// One smoothing step on an unlabeled target batch: perturb the features,
    /// minimize mean LSD, update the generator only. lr < 0 means the
    /// configured lr_smooth. Returns the pre-step mean LSD. The classifier's
    /// parameters are bit-identical afterwards.
    double step_smooth(const Matrix& x_t, double lr = -1.0);

    /// Runs the full schedule over paired minibatch streams.
    void run(const Dataset& source, const Dataset& target, const StepObserver& observer = {},
             const EpochObserver& epoch_observer = {});

    const TrainConfig& config() const { return cfg_; }
    Model& model() { return state_.model; }
    const Model& model() const { return state_.model; }
    TrainState& state() { return state_; }
    const std::vector<RunRecord>& history() const { return state_.history; }

    TrainState take_state() { return std::move(state_); }

private:
    void record_epoch(const Dataset& target, std::size_t epoch, double epoch_source_loss);

    TrainConfig cfg_;
    TrainState state_;
    Rng rng_;
    Optimizer opt_gen_;
    Optimizer opt_clf_;
};

/// Convenience wrapper: build a Trainer, run the schedule, return the state.
TrainState train_schedule(Model model, const Dataset& source, const Dataset& target,
                          const TrainConfig& cfg, const StepObserver& observer = {});

/// Deterministic model-init seed for a config seed.
std::uint64_t model_init_seed(std::uint64_t config_seed);

} // namespace srda

#endif
